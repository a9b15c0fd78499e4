//! Perimeter, relative perimeter, total variation, BV norms and the discrete
//! coarea formula on a [`Space`].

use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::mincut::{Capacity, FlowNetwork};
use crate::space::Space;
use crate::vertex_set::VertexSet;

/// A real function on the vertices, stored as dyadic numerators `values[v] / 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexFunction {
    pub values: Vec<i64>,
    pub exp: u32,
}

impl VertexFunction {
    pub fn new(values: Vec<i64>, exp: u32) -> Self {
        VertexFunction { values, exp }
    }

    pub fn integer(values: Vec<i64>) -> Self {
        VertexFunction { values, exp: 0 }
    }

    pub fn indicator(set: &VertexSet) -> Self {
        VertexFunction::integer((0..set.universe_len()).map(|v| set.contains(v) as i64).collect())
    }

    pub fn value(&self, v: usize) -> Dyadic {
        Dyadic::new(self.values[v] as i128, self.exp)
    }

    /// Vertices where the function exceeds `t` (given in stored numerators).
    pub fn superlevel_raw(&self, t: i64) -> VertexSet {
        VertexSet::from_predicate(self.values.len(), |v| self.values[v] > t)
    }
}

fn check_universe(space: &Space, set: &VertexSet) -> Result<()> {
    if set.universe_len() == space.vertex_count() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "set over {} vertices used with a space of {}",
            set.universe_len(),
            space.vertex_count()
        )))
    }
}

/// Total capacity of edges with exactly one endpoint in `a`.
pub fn perimeter(space: &Space, a: &VertexSet) -> Dyadic {
    let raw: i128 = space
        .edges()
        .iter()
        .filter(|e| a.contains(e.u) != a.contains(e.v))
        .map(|e| e.capacity as i128)
        .sum();
    Dyadic::new(raw, space.scale().bits())
}

/// Perimeter of `a` measured inside `b`: cut edges with both endpoints in `b`.
pub fn relative_perimeter(space: &Space, b: &VertexSet, a: &VertexSet) -> Result<Dyadic> {
    check_universe(space, a)?;
    check_universe(space, b)?;
    if !a.is_subset(b) {
        return Err(Error::Precondition("relative perimeter needs A ⊆ B".into()));
    }
    let raw: i128 = space
        .edges()
        .iter()
        .filter(|e| b.contains(e.u) && b.contains(e.v) && a.contains(e.u) != a.contains(e.v))
        .map(|e| e.capacity as i128)
        .sum();
    Ok(Dyadic::new(raw, space.scale().bits()))
}

fn variation_over<F: Fn(usize, usize) -> bool>(space: &Space, f: &VertexFunction, keep: F) -> Dyadic {
    let raw: i128 = space
        .edges()
        .iter()
        .filter(|e| keep(e.u, e.v))
        .map(|e| e.capacity as i128 * (f.values[e.u] as i128 - f.values[e.v] as i128).abs())
        .sum();
    Dyadic::new(raw, space.scale().bits() + f.exp)
}

/// `Σ_e w_e |f(u) - f(v)|`.
pub fn total_variation(space: &Space, f: &VertexFunction) -> Dyadic {
    variation_over(space, f, |_, _| true)
}

/// One step of the superlevel profile: on `[threshold, threshold + gap)` the
/// superlevel set `{f > t}` is constant with the given perimeter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoareaLevel {
    pub threshold: Dyadic,
    pub gap: Dyadic,
    pub perimeter: Dyadic,
}

/// Superlevel perimeters of a nonnegative function at each breakpoint.
pub fn coarea_profile(space: &Space, f: &VertexFunction) -> Result<Vec<CoareaLevel>> {
    if f.values.len() != space.vertex_count() {
        return Err(Error::Precondition("function length does not match the space".into()));
    }
    if f.values.iter().any(|&x| x < 0) {
        return Err(Error::Precondition("coarea profile needs f >= 0".into()));
    }
    let mut breaks: Vec<i64> = f.values.iter().copied().filter(|&x| x > 0).collect();
    breaks.push(0);
    breaks.sort_unstable();
    breaks.dedup();

    // Sweep thresholds downward, adding vertices as they enter the superlevel
    // set and updating the cut incrementally.
    let n = space.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&v| std::cmp::Reverse(f.values[v]));
    let mut inside = VertexSet::empty(n);
    let mut cut: i128 = 0;
    let mut next = 0;
    let mut levels = Vec::with_capacity(breaks.len().saturating_sub(1));
    for w in breaks.windows(2).rev() {
        let (lo, hi) = (w[0], w[1]);
        while next < n && f.values[order[next]] >= hi {
            let v = order[next];
            for &(u, ei) in space.neighbors(v) {
                let c = space.edges()[ei].capacity as i128;
                if inside.contains(u) {
                    cut -= c;
                } else {
                    cut += c;
                }
            }
            inside.insert(v);
            next += 1;
        }
        levels.push(CoareaLevel {
            threshold: Dyadic::new(lo as i128, f.exp),
            gap: Dyadic::new((hi - lo) as i128, f.exp),
            perimeter: Dyadic::new(cut, space.scale().bits()),
        });
    }
    levels.reverse();
    Ok(levels)
}

/// `Σ gap * perimeter` over a profile; equals the total variation.
pub fn coarea_integral(levels: &[CoareaLevel]) -> Dyadic {
    levels.iter().map(|l| l.gap * l.perimeter).sum()
}

/// `Σ_{v∈B} m(v)|f(v)|` plus the variation of `f` over edges inside `B`.
pub fn bv_norm(space: &Space, b: &VertexSet, f: &VertexFunction) -> Result<Dyadic> {
    check_universe(space, b)?;
    if f.values.len() != space.vertex_count() {
        return Err(Error::Precondition("function length does not match the space".into()));
    }
    let l1: i128 = b
        .iter()
        .map(|v| space.measure_raw(v) as i128 * (f.values[v] as i128).abs())
        .sum();
    let l1 = Dyadic::new(l1, space.scale().bits() + f.exp);
    Ok(l1 + variation_over(space, f, |u, v| b.contains(u) && b.contains(v)))
}

/// Least perimeter over sets that agree with `a` on every vertex of positive
/// mass, with the largest optimal representative.
///
/// Two sets differing only on null vertices are the same element of the
/// measure algebra; this is the perimeter of that element.
pub fn essential_perimeter(space: &Space, a: &VertexSet) -> Result<(Dyadic, VertexSet)> {
    check_universe(space, a)?;
    let mut net = FlowNetwork::new(space.vertex_count());
    for v in 0..space.vertex_count() {
        if space.measure_raw(v) > 0 {
            if a.contains(v) {
                net.add_terminal(v, Capacity::Infinite, Capacity::Finite(0));
            } else {
                net.add_terminal(v, Capacity::Finite(0), Capacity::Infinite);
            }
        }
    }
    for e in space.edges() {
        net.add_edge(e.u, e.v, e.capacity as i128);
    }
    let cut = net.solve()?;
    let value = Dyadic::new(cut.value, space.scale().bits());
    Ok((value, cut.max_source_side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Scale;
    use crate::space::{build_grid, build_path, GridSpec};

    fn grid(c: usize, r: usize) -> Space {
        build_grid(&GridSpec::uniform_weight(c, r, 1.0, 1.0), Scale::default()).unwrap()
    }

    #[test]
    fn perimeter_basics() {
        let g = grid(2, 1);
        assert_eq!(perimeter(&g, &g.empty_set()), Dyadic::ZERO);
        let left = VertexSet::from_vertices(2, [0]);
        assert_eq!(perimeter(&g, &left), Dyadic::ONE);
        assert_eq!(perimeter(&g, &left.complement()), Dyadic::ONE);
    }

    #[test]
    fn relative_perimeter_cases() {
        let p = build_path(&[1.0, 1.0, 1.0], 1.0, 1.0, Scale::default()).unwrap();
        let b = VertexSet::from_vertices(3, [0, 2]);
        let a = VertexSet::from_vertices(3, [0]);
        assert_eq!(relative_perimeter(&p, &b, &a).unwrap(), Dyadic::ZERO);
        assert_eq!(relative_perimeter(&p, &p.full_set(), &a).unwrap(), perimeter(&p, &a));
        let bad = VertexSet::from_vertices(3, [1]);
        assert!(matches!(relative_perimeter(&p, &b, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn total_variation_of_constants_and_indicators() {
        let g = grid(3, 3);
        assert_eq!(total_variation(&g, &VertexFunction::integer(vec![7; 9])), Dyadic::ZERO);
        let a = VertexSet::from_vertices(9, [0, 1, 4]);
        assert_eq!(total_variation(&g, &VertexFunction::indicator(&a)), perimeter(&g, &a));
    }

    #[test]
    fn coarea_profile_edge_cases() {
        let g = grid(3, 3);
        let zero = VertexFunction::integer(vec![0; 9]);
        assert!(coarea_profile(&g, &zero).unwrap().is_empty());
        let a = VertexSet::from_vertices(9, [4]);
        let prof = coarea_profile(&g, &VertexFunction::indicator(&a)).unwrap();
        assert_eq!(prof.len(), 1);
        assert_eq!(prof[0].threshold, Dyadic::ZERO);
        assert_eq!(prof[0].perimeter, perimeter(&g, &a));
        assert!(coarea_profile(&g, &VertexFunction::integer(vec![-1; 9])).is_err());
    }

    #[test]
    fn bv_norm_cases() {
        let g = grid(3, 3);
        let b = VertexSet::from_vertices(9, [0, 1, 3, 4]);
        assert_eq!(bv_norm(&g, &b, &VertexFunction::integer(vec![0; 9])).unwrap(), Dyadic::ZERO);
        let a = VertexSet::from_vertices(9, [0, 1]);
        let chi = VertexFunction::indicator(&a);
        assert_eq!(
            bv_norm(&g, &b, &chi).unwrap(),
            g.measure_of(&a) + relative_perimeter(&g, &b, &a).unwrap()
        );
        assert_eq!(bv_norm(&g, &g.full_set(), &chi).unwrap(), g.measure_of(&a) + perimeter(&g, &a));
    }

    #[test]
    fn essential_perimeter_with_positive_masses_is_raw() {
        let g = grid(3, 2);
        let a = VertexSet::from_vertices(6, [0, 4]);
        let (value, rep) = essential_perimeter(&g, &a).unwrap();
        assert_eq!(value, perimeter(&g, &a));
        assert_eq!(rep, a);
    }

    #[test]
    fn essential_perimeter_fills_null_point() {
        // pad, 0, 1, 2, 3, 4, pad with vertex 2 null: {0,1,3,4} has raw
        // perimeter 4, but adding the null point merges the two pieces.
        let p = build_path(&[1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0], 1.0, 1.0, Scale::default()).unwrap();
        let a = VertexSet::from_vertices(7, [1, 2, 4, 5]);
        assert_eq!(perimeter(&p, &a), Dyadic::from_int(4));
        let (value, rep) = essential_perimeter(&p, &a).unwrap();
        assert_eq!(value, Dyadic::from_int(2));
        assert_eq!(rep.to_vec(), vec![1, 2, 3, 4, 5]);
    }
}
