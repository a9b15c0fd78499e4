//! Three unit squares glued along their bottom edge, with densities 2, 1, 1
//! and the ℓ¹ metric on each sheet.
//!
//! The domain is the whole upper part of the first sheet, a fan of triangles
//! of base `a = 2^(-2k-1)` on the second sheet, pairs of tiny triangles of
//! base `s = 2^(-4k-3)` on the third, and slits `J` of length `s` at both
//! ends of each fan triangle's base, through which the three parts touch.
//! A triangle `E_k` of the second sheet has relative perimeter about `2s`
//! while any extension must pay about its base length, so the extension
//! ratios grow like `4^k`.
//!
//! The grid is uniform with spacing `h`, refined to `a/32` around each fan
//! triangle and to `s/8` around each slit. Only `k <= k_max` are built.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::{Dyadic, Scale};
use crate::extension::{non_extension_witness, Ratio};
use crate::minimize::{minimize, MinimizerResult, Problem, Variant};
use crate::space::{build_tensor_grid, glue, Axis, Space, VertexId};
use crate::vertex_set::VertexSet;

use super::john::{john_probe, JohnReport};
use super::{scale_for, Scenario};

pub const DENSITIES: [f64; 3] = [2.0, 1.0, 1.0];

pub fn fan_base(k: usize) -> f64 {
    2f64.powi(-2 * k as i32 - 1)
}

pub fn slit_length(k: usize) -> f64 {
    2f64.powi(-4 * k as i32 - 3)
}

#[derive(Clone, Debug)]
pub struct Tripod {
    pub k_max: usize,
    pub h: f64,
    pub space: Space,
    pub omega: VertexSet,
    pub xs: Axis,
    pub ys: Axis,
}

fn refine(points: &mut Vec<f64>, lo: f64, hi: f64, step: f64) {
    let n = ((hi - lo) / step).round() as usize;
    points.extend((0..=n).map(|i| lo + i as f64 * step));
}

fn in_slit(k_max: usize, x: f64) -> bool {
    (0..=k_max).any(|k| {
        let (a, s) = (fan_base(k), slit_length(k));
        (x > a && x < a + s) || (x > 2.0 * a - s && x < 2.0 * a)
    })
}

/// Open triangle `{y > 0, y < x - left < base - y}`.
fn in_triangle(left: f64, base: f64, x: f64, y: f64) -> bool {
    y > 0.0 && y < x - left && x - left < base - y
}

/// Domain membership of the point `(x, y)` of sheet `sheet`.
pub fn in_domain(k_max: usize, sheet: usize, x: f64, y: f64) -> bool {
    if y == 0.0 {
        return in_slit(k_max, x);
    }
    match sheet {
        0 => true,
        1 => (0..=k_max).any(|k| in_triangle(fan_base(k), fan_base(k), x, y)),
        _ => (0..=k_max).any(|k| {
            let (a, s) = (fan_base(k), slit_length(k));
            in_triangle(a, s, x, y) || in_triangle(2.0 * a - s, s, x, y)
        }),
    }
}

impl Tripod {
    pub fn new(k_max: usize, h: f64, scale: Option<Scale>) -> Result<Self> {
        if !(h > 0.0) || h > 0.25 || (1.0 / h).fract() != 0.0 {
            return Err(Error::Precondition("h must divide 1 and be at most 1/4".into()));
        }
        if k_max > 4 {
            return Err(Error::Precondition("k_max must be at most 4".into()));
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        refine(&mut xs, 0.0, 1.0, h);
        refine(&mut ys, 0.0, 1.0, h);
        let mut finest = h;
        for k in 0..=k_max {
            let (a, s) = (fan_base(k), slit_length(k));
            let box_step = h.min(a / 32.0);
            let slit_step = h.min(s / 8.0);
            finest = finest.min(slit_step);
            refine(&mut xs, a, 2.0 * a, box_step);
            refine(&mut ys, 0.0, a / 2.0, box_step);
            refine(&mut xs, a - s, a + 2.0 * s, slit_step);
            refine(&mut xs, 2.0 * a - 2.0 * s, (2.0 * a + s).min(1.0), slit_step);
            refine(&mut ys, 0.0, s, slit_step);
        }
        let xs = Axis::graded(xs)?;
        let ys = Axis::graded(ys)?;
        let scale = scale_for(finest, scale)?;
        let cells = xs.len() * ys.len();
        let sheets = DENSITIES
            .iter()
            .map(|&w| build_tensor_grid(&xs, &ys, &vec![w; cells], scale))
            .collect::<Result<Vec<_>>>()?;
        let groups: Vec<Vec<(usize, VertexId)>> = (0..xs.len()).map(|c| vec![(0, c), (1, c), (2, c)]).collect();
        let space = glue(&sheets, &groups)?;
        let mut omega = space.empty_set();
        for (sheet, chart) in space.charts().iter().enumerate() {
            for r in 0..chart.rows {
                for c in 0..chart.cols {
                    if in_domain(k_max, sheet, chart.xs[c], chart.ys[r]) {
                        omega.insert(chart.vertex(c, r));
                    }
                }
            }
        }
        Ok(Tripod {
            k_max,
            h,
            space,
            omega,
            xs,
            ys,
        })
    }

    pub fn vertex(&self, sheet: usize, x: f64, y: f64) -> Option<VertexId> {
        self.space.charts()[sheet].vertex_at(x, y)
    }

    /// The fan triangle `E_k` on the second sheet.
    pub fn fan_triangle(&self, k: usize) -> VertexSet {
        let chart = &self.space.charts()[1];
        let a = fan_base(k);
        let mut set = self.space.empty_set();
        for r in 0..chart.rows {
            for c in 0..chart.cols {
                if in_triangle(a, a, chart.xs[c], chart.ys[r]) {
                    set.insert(chart.vertex(c, r));
                }
            }
        }
        set
    }

    pub fn family(&self) -> Vec<VertexSet> {
        (0..=self.k_max).map(|k| self.fan_triangle(k)).collect()
    }

    /// Optimal `Per(A) + λ m(Ω Δ A)`; the domain itself is optimal for λ >= 1.
    pub fn claim1(&self, lambda: Dyadic) -> Result<MinimizerResult> {
        minimize(&Problem::new(
            &self.space,
            self.omega.clone(),
            lambda,
            Variant::SymmetricDifference,
        )?)
    }

    /// Extension ratios of the fan triangles.
    pub fn claim2(&self) -> Result<Vec<Ratio>> {
        Ok(non_extension_witness(&self.space, &self.omega, &self.family())?.1)
    }

    /// Geodesic John ratio from the middle of `E_k`, escaping to distance `a`.
    pub fn claim3(&self, k: usize) -> Result<JohnReport> {
        if k > self.k_max {
            return Err(Error::Precondition(format!("k = {k} exceeds k_max")));
        }
        let a = fan_base(k);
        let center = self.vertex(0, 0.0, 0.0).expect("corner is on the grid");
        let y = self
            .vertex(1, 1.5 * a, a / 4.0)
            .ok_or_else(|| Error::Precondition("probe point is off the grid".into()))?;
        let radius = self.space.scale().quantize(a)?;
        john_probe(&self.space, &self.omega, center, y, self.space.scale().value(radius))
    }

    pub fn scenario(self, lambda: Dyadic) -> Scenario {
        let mut params = BTreeMap::new();
        params.insert("k_max".into(), self.k_max as f64);
        params.insert("h".into(), self.h);
        Scenario {
            name: "tripod".into(),
            space: self.space,
            omega: self.omega,
            lambda,
            variant: Variant::SymmetricDifference,
            params,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_membership() {
        assert!(in_domain(1, 0, 0.3, 0.5));
        assert!(!in_domain(1, 0, 0.3, 0.0));
        assert!(in_domain(1, 0, 0.5 + 1.0 / 16.0, 0.0));
        assert!(in_domain(1, 1, 0.75, 0.2));
        assert!(!in_domain(1, 1, 0.75, 0.3));
        assert!(in_domain(1, 2, 0.5 + 1.0 / 16.0, 1.0 / 32.0));
        assert!(!in_domain(1, 2, 0.75, 0.1));
        assert!(!in_domain(0, 1, 0.18, 0.01));
        assert!(in_domain(1, 1, 0.18, 0.01));
    }

    #[test]
    fn sheets_share_the_bottom_edge() {
        let t = Tripod::new(0, 1.0 / 16.0, None).unwrap();
        let v0 = t.vertex(0, 0.25, 0.0).unwrap();
        assert_eq!(t.vertex(1, 0.25, 0.0), Some(v0));
        assert_eq!(t.vertex(2, 0.25, 0.0), Some(v0));
        assert_ne!(t.vertex(1, 0.25, 0.5), t.vertex(2, 0.25, 0.5));
        let sheet = t.xs.len() * t.ys.len();
        assert_eq!(t.space.vertex_count(), 3 * sheet - 2 * t.xs.len());
        assert!(!t.fan_triangle(0).is_empty());
        assert!(t.fan_triangle(0).is_subset(&t.omega));
    }
}
