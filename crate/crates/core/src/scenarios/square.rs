//! An `n × n` square of unit density inside a padded grid. Squares are
//! extension domains, which makes this the control for the tripod.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::{Dyadic, Scale};
use crate::minimize::Variant;
use crate::space::{build_grid, GridSpec, Space};
use crate::vertex_set::VertexSet;

use super::{scale_for, Scenario};

pub const PAD: usize = 2;

#[derive(Clone, Debug)]
pub struct SquareControl {
    pub n: usize,
    pub h: f64,
    pub space: Space,
    pub omega: VertexSet,
}

impl SquareControl {
    /// The square occupies `[0, (n-1)h]²`; the grid extends `PAD` cells
    /// beyond it on every side.
    pub fn new(n: usize, h: f64, scale: Option<Scale>) -> Result<Self> {
        if n == 0 || !(h > 0.0) {
            return Err(Error::Precondition("square needs n >= 1 and h > 0".into()));
        }
        let side = n + 2 * PAD;
        let mut spec = GridSpec::uniform_weight(side, side, h, 1.0);
        spec.origin = (-(PAD as f64) * h, -(PAD as f64) * h);
        let space = build_grid(&spec, scale_for(h, scale)?)?;
        let inside = PAD..PAD + n;
        let omega = VertexSet::from_predicate(space.vertex_count(), |v| {
            inside.contains(&(v % side)) && inside.contains(&(v / side))
        });
        Ok(SquareControl { n, h, space, omega })
    }

    fn side(&self) -> usize {
        self.n + 2 * PAD
    }

    pub fn coordinates(&self, v: usize) -> (f64, f64) {
        let side = self.side();
        (
            (v % side) as f64 * self.h - PAD as f64 * self.h,
            (v / side) as f64 * self.h - PAD as f64 * self.h,
        )
    }

    /// Triangles of base `a = 2^(-2k-1)` standing on the bottom edge at
    /// `x = a`, one per `k`. The base row lies on the boundary of the square,
    /// so the base is paid by the perimeter but not the relative perimeter.
    pub fn triangle_family(&self, ks: &[usize]) -> Vec<VertexSet> {
        ks.iter()
            .map(|&k| {
                let a = 2f64.powi(-2 * k as i32 - 1);
                VertexSet::from_predicate(self.space.vertex_count(), |v| {
                    let (x, y) = self.coordinates(v);
                    self.omega.contains(v) && y >= 0.0 && y < x - a && x - a < a - y
                })
            })
            .collect()
    }

    pub fn scenario(self, lambda: Dyadic) -> Scenario {
        let mut params = BTreeMap::new();
        params.insert("n".into(), self.n as f64);
        params.insert("h".into(), self.h);
        Scenario {
            name: "square".into(),
            space: self.space,
            omega: self.omega,
            lambda,
            variant: Variant::InsideOnly,
            params,
        }
    }
}
