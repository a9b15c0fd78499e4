//! A fat Cantor set on the line.
//!
//! At step `j` the middle interval of length `4^-j` is removed from each of
//! the `2^(j-1)` remaining intervals of `[0,1]`. The level-`L` approximant
//! has `2^L` equal components separated by the removed gaps. Each component
//! and each gap is one vertex whose mass is its length; consecutive vertices
//! share a unit-capacity edge (a boundary point in one dimension).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::{Dyadic, Scale};
use crate::minimize::Variant;
use crate::space::{Chart, Edge, Space};
use crate::vertex_set::VertexSet;

use super::Scenario;

pub const MAX_LEVEL: usize = 12;

#[derive(Clone, Debug)]
pub struct FatCantor {
    pub level: usize,
    pub space: Space,
    /// Vertices of the approximant's components, left to right.
    pub components: Vec<usize>,
    pub set: VertexSet,
}

impl FatCantor {
    pub fn new(level: usize, scale: Option<Scale>) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::Precondition(format!("fat Cantor level must be at most {MAX_LEVEL}")));
        }
        let scale = scale.unwrap_or(Scale::new(2 * MAX_LEVEL as u32 + 4)?);
        let bits = scale.bits();
        let l = level as u32;
        // Component length (1/2 + 2^-(L+1)) / 2^L, exactly.
        let comp = Dyadic::new((1i128 << l) + 1, 2 * l + 1);
        let gap = |j: u32| Dyadic::new(1, 2 * j);

        // Gap sequence between consecutive components: the gap after
        // component i (1-based) is removed at step L - v2(i).
        let count = 1usize << level;
        let mut masses: Vec<Dyadic> = vec![Dyadic::new(1, 1)];
        let mut components = Vec::with_capacity(count);
        for i in 1..=count {
            components.push(masses.len());
            masses.push(comp);
            if i < count {
                masses.push(gap(l - i.trailing_zeros()));
            }
        }
        masses.push(Dyadic::new(1, 1));

        let measure = masses
            .iter()
            .map(|m| {
                if m.exponent() > bits {
                    Err(Error::CapacityScale(format!("fat Cantor level {level} needs a finer scale")))
                } else {
                    Ok(m.numerator_at(bits) as i64)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let n = measure.len();
        let one = 1i64 << bits;
        let edges = (1..n)
            .map(|i| Edge {
                u: i - 1,
                v: i,
                capacity: one,
                length: ((measure[i - 1] + measure[i]) / 2).max(1),
            })
            .collect();
        let mut xs = Vec::with_capacity(n);
        let mut left = -0.5;
        for m in &masses {
            xs.push(left + m.to_f64() / 2.0);
            left += m.to_f64();
        }
        let chart = Chart {
            cols: n,
            rows: 1,
            vertices: (0..n).collect(),
            xs,
            ys: vec![0.0],
        };
        let space = Space::new(scale, measure, edges, vec![chart])?;
        let set = VertexSet::from_vertices(n, components.iter().copied());
        Ok(FatCantor {
            level,
            space,
            components,
            set,
        })
    }

    pub fn component_length(&self) -> Dyadic {
        self.space.measure(self.components[0])
    }

    /// Least perimeter of `G ⊆ F` with `m(F \ G) < ε`, with a set attaining it.
    ///
    /// Components are separated by gaps, so each kept component costs two
    /// boundary points; all components have the same length, so keeping the
    /// fewest of them is optimal.
    pub fn min_perimeter(&self, epsilon: Dyadic) -> Result<(Dyadic, VertexSet)> {
        if epsilon <= Dyadic::ZERO {
            return Err(Error::Precondition("ε must be positive".into()));
        }
        let c = self.component_length();
        let total = self.components.len();
        let mut dropped = 0;
        while dropped < total && Dyadic::from_int(dropped as i64 + 1) * c < epsilon {
            dropped += 1;
        }
        let kept = &self.components[dropped..];
        let g = VertexSet::from_vertices(self.space.vertex_count(), kept.iter().copied());
        Ok((crate::functional::perimeter(&self.space, &g), g))
    }

    pub fn scenario(self) -> Scenario {
        let mut params = BTreeMap::new();
        params.insert("level".into(), self.level as f64);
        Scenario {
            name: "fat_cantor".into(),
            omega: self.set,
            space: self.space,
            lambda: Dyadic::from_int(4),
            variant: Variant::InsideOnly,
            params,
        }
    }
}
