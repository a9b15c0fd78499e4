//! Two open intervals meeting at a null point.
//!
//! Vertices: a pad left of 0, two cells of (0,1), the point 1 with zero mass,
//! two cells of (1,2) and a pad right of 2. `B` is the pair of open intervals
//! and `A` the left one. Seen as a measure class, `B` has the perimeter of
//! (0,2), so the sum formula for closed sets fails; the graph itself keeps
//! the exact identity.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::exact::{Dyadic, Scale};
use crate::functional::{essential_perimeter, perimeter, relative_perimeter};
use crate::minimize::Variant;
use crate::space::{build_path, Space};
use crate::vertex_set::VertexSet;

use super::Scenario;

pub const NULL_POINT: usize = 3;

#[derive(Clone, Debug)]
pub struct IntervalExample {
    pub space: Space,
    pub a: VertexSet,
    pub b: VertexSet,
    pub closed: bool,
}

/// Both sides of `Per(A) + Per(B \ A)` versus `Per(B) + 2 Per_B(A)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SumFormula {
    pub lhs: Dyadic,
    pub rhs: Dyadic,
}

impl SumFormula {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntervalCheck {
    /// Perimeters of measure classes.
    pub continuum: SumFormula,
    /// Raw cut capacities.
    pub graph: SumFormula,
}

impl IntervalExample {
    /// With `closed`, `B` also contains the point 1.
    pub fn new(closed: bool) -> Result<Self> {
        let space = build_path(&[0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5], 1.0, 0.5, Scale::default())?;
        let a = VertexSet::from_vertices(7, [1, 2]);
        let mut b = VertexSet::from_vertices(7, [1, 2, 4, 5]);
        if closed {
            b.insert(NULL_POINT);
        }
        Ok(IntervalExample { space, a, b, closed })
    }

    pub fn check(&self) -> Result<IntervalCheck> {
        let s = &self.space;
        let rest = self.b.difference(&self.a);
        let ess = |set: &VertexSet| essential_perimeter(s, set).map(|(p, _)| p);
        let rel = relative_perimeter(s, &self.b, &self.a)?;
        let two = Dyadic::from_int(2);
        Ok(IntervalCheck {
            continuum: SumFormula {
                lhs: ess(&self.a)? + ess(&rest)?,
                rhs: ess(&self.b)? + two * rel,
            },
            graph: SumFormula {
                lhs: perimeter(s, &self.a) + perimeter(s, &rest),
                rhs: perimeter(s, &self.b) + two * rel,
            },
        })
    }

    pub fn scenario(self) -> Scenario {
        let mut params = BTreeMap::new();
        params.insert("closed".into(), self.closed as u8 as f64);
        Scenario {
            name: "interval".into(),
            omega: self.b,
            space: self.space,
            lambda: Dyadic::from_int(4),
            variant: Variant::InsideOnly,
            params,
        }
    }
}
