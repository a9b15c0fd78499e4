//! A square with a fan of small triangles on its top edge and a point mass
//! at the middle of each triangle's base.
//!
//! `Q = (0,1) × (-1,0)` carries density `min{1, dist(·, ℝ×{-1,0})}`, which
//! vanishes along the line `y = 0`. The triangle `T_n` has base
//! `[a, 2a] × {0}` with `a = 2^(-2n+1)`, includes its base and has unit
//! density; its atom of mass `2^-n` sits at `(3a/2, 0)`. For large λ the
//! minimizer keeps every atom but none of the surrounding triangle, since
//! the atom is connected to the rest only through a zero-density line.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::{Dyadic, Scale};
use crate::minimize::{minimize, MinimizerResult, Problem, Variant};
use crate::space::{build_tensor_grid, Axis, Space};
use crate::vertex_set::VertexSet;

use super::{scale_for, Scenario};

#[derive(Clone, Debug)]
pub struct TrianglesAtoms {
    pub n_max: usize,
    pub h: f64,
    pub lambda: Dyadic,
    pub space: Space,
    pub omega: VertexSet,
    /// Vertices of `T_n` for `n = 1..=n_max`, including the atom.
    pub triangles: Vec<VertexSet>,
    pub atoms: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleOutcome {
    pub n: usize,
    pub atom_kept: bool,
    /// Non-atom vertices of `T_n` in the minimal minimizer.
    pub other_vertices: usize,
}

impl TriangleOutcome {
    pub fn isolated_atom(&self) -> bool {
        self.atom_kept && self.other_vertices == 0
    }
}

#[derive(Clone, Debug)]
pub struct AtomsCheck {
    pub result: MinimizerResult,
    pub outcomes: Vec<TriangleOutcome>,
    /// Least `n` from which on every triangle keeps only its atom.
    pub threshold: Option<usize>,
}

pub fn density(y: f64) -> f64 {
    if (-1.0..=0.0).contains(&y) {
        1f64.min(y.abs().min((y + 1.0).abs()))
    } else {
        1.0
    }
}

impl TrianglesAtoms {
    pub fn new(n_max: usize, h: f64, lambda: Dyadic, scale: Option<Scale>) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Precondition("n_max must be at least 1".into()));
        }
        let finest = 2f64.powi(-2 * n_max as i32 - 2);
        if !(h > 0.0) || h > finest || h.log2().fract() != 0.0 {
            return Err(Error::Precondition(format!(
                "h must be a power of two no larger than {finest} to resolve {n_max} triangles"
            )));
        }
        let cols = ((1.0 + 4.0 * h) / h).round() as usize + 1;
        let rows = ((1.25 + 4.0 * h) / h).round() as usize + 1;
        let xs = Axis::uniform(cols, h, -2.0 * h);
        let ys = Axis::uniform(rows, h, -1.0 - 2.0 * h);
        let weights: Vec<f64> = (0..rows)
            .flat_map(|r| std::iter::repeat(density(ys.coords[r])).take(cols))
            .collect();
        let mut space = build_tensor_grid(&xs, &ys, &weights, scale_for(h, scale)?)?;

        let n = space.vertex_count();
        let at = |v: usize| (xs.coords[v % cols], ys.coords[v / cols]);
        let in_q = |x: f64, y: f64| x > 0.0 && x < 1.0 && y > -1.0 && y < 0.0;
        let base = |k: usize| 2f64.powi(-2 * k as i32 + 1);
        let in_t = |k: usize, x: f64, y: f64| {
            let a = base(k);
            y >= 0.0 && y < x - a && x - a < a - y
        };
        let triangles: Vec<VertexSet> = (1..=n_max)
            .map(|k| {
                VertexSet::from_predicate(n, |v| {
                    let (x, y) = at(v);
                    in_t(k, x, y)
                })
            })
            .collect();
        let omega = VertexSet::from_predicate(n, |v| {
            let (x, y) = at(v);
            in_q(x, y) || (1..=n_max).any(|k| in_t(k, x, y))
        });
        let mut atoms = Vec::with_capacity(n_max);
        for k in 1..=n_max {
            let x = 1.5 * base(k);
            let col = xs.index_of(x).ok_or_else(|| Error::Precondition("atom is off the grid".into()))?;
            let row = ys.index_of(0.0).expect("the grid contains y = 0");
            let v = row * cols + col;
            space = space.add_atom(v, 2f64.powi(-(k as i32)))?;
            atoms.push(v);
        }
        Ok(TrianglesAtoms {
            n_max,
            h,
            lambda,
            space,
            omega,
            triangles,
            atoms,
        })
    }

    /// Minimizes `Per(A) + λ m(Ω \ A)` and inspects each triangle.
    pub fn check(&self, lambda: Dyadic) -> Result<AtomsCheck> {
        let problem = Problem::new(&self.space, self.omega.clone(), lambda, Variant::InsideOnly)?;
        let result = minimize(&problem)?;
        let outcomes: Vec<TriangleOutcome> = (0..self.n_max)
            .map(|i| {
                let atom = self.atoms[i];
                let mut rest = self.triangles[i].intersection(&result.minimal_set);
                rest.remove(atom);
                TriangleOutcome {
                    n: i + 1,
                    atom_kept: result.minimal_set.contains(atom),
                    other_vertices: rest.len(),
                }
            })
            .collect();
        let mut threshold = None;
        for o in outcomes.iter().rev() {
            if !o.isolated_atom() {
                break;
            }
            threshold = Some(o.n);
        }
        Ok(AtomsCheck {
            result,
            outcomes,
            threshold,
        })
    }

    pub fn scenario(self) -> Scenario {
        let mut params = BTreeMap::new();
        params.insert("n_max".into(), self.n_max as f64);
        params.insert("h".into(), self.h);
        Scenario {
            name: "triangles_atoms".into(),
            lambda: self.lambda,
            space: self.space,
            omega: self.omega,
            variant: Variant::InsideOnly,
            params,
        }
    }
}
