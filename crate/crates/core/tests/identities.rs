//! Exact identities of the graph perimeter and the one-dimensional examples.

mod common;

use common::{graph, submasks, to_set, BITS};
use perimin::functional::{coarea_integral, coarea_profile, perimeter, relative_perimeter, total_variation, VertexFunction};
use perimin::scenarios::{FatCantor, IntervalExample};
use perimin::{Dyadic, Scale};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn sum_formula_is_an_equality(g in graph(16), b in any::<u64>(), a in any::<u64>()) {
        let n = g.n();
        let b = b & ((1 << n) - 1);
        let a = a & b;
        let lhs = g.per(a) + g.per(b & !a);
        prop_assert_eq!(lhs, g.per(b) + 2 * g.rel_per(b, a));
        let space = g.space();
        let (sa, sb) = (to_set(n, a), to_set(n, b));
        let lib = perimeter(&space, &sa) + perimeter(&space, &sb.difference(&sa));
        prop_assert_eq!(lib.numerator_at(BITS), lhs);
        prop_assert_eq!(relative_perimeter(&space, &sb, &sa).unwrap().numerator_at(BITS), g.rel_per(b, a));
    }

    #[test]
    fn coarea_matches_levelwise_sum(g in graph(16), values in prop::collection::vec(0..=12i64, 16)) {
        let n = g.n();
        let values = values[..n].to_vec();
        let tv: i128 = g
            .edges
            .iter()
            .map(|&(u, v, c, _)| c as i128 * (values[u] - values[v]).abs() as i128)
            .sum();
        let lo = *values.iter().min().unwrap();
        let hi = *values.iter().max().unwrap();
        let levels: i128 = (lo + 1..=hi)
            .map(|t| g.per((0..n).filter(|&v| values[v] >= t).fold(0, |m, v| m | 1 << v)))
            .sum();
        prop_assert_eq!(tv, levels);
        let space = g.space();
        let f = VertexFunction::integer(values);
        prop_assert_eq!(total_variation(&space, &f).numerator_at(BITS), tv);
        prop_assert_eq!(coarea_integral(&coarea_profile(&space, &f).unwrap()).numerator_at(BITS), tv);
    }

    #[test]
    fn perimeter_is_submodular(g in graph(16), a in any::<u64>(), c in any::<u64>()) {
        prop_assert!(g.per(a) + g.per(c) >= g.per(a | c) + g.per(a & c));
    }
}

/// Least perimeter of a union of components missing less than `ε`, over
/// every subset of components.
fn cantor_brute(fc: &FatCantor, epsilon: Dyadic) -> Dyadic {
    let comps = fc.components.len();
    let all = (1u64 << comps) - 1;
    let mut best: Option<Dyadic> = None;
    for kept in submasks(all) {
        let missed = fc.component_length() * Dyadic::from_int((comps - kept.count_ones() as usize) as i64);
        if missed >= epsilon {
            continue;
        }
        // Each maximal run of kept components costs its two end points; the
        // gaps between components carry mass, so runs never merge.
        let per = Dyadic::from_int(2 * kept.count_ones() as i64);
        best = Some(best.map_or(per, |b| b.min(per)));
    }
    best.unwrap()
}

#[test]
fn fat_cantor_minimal_perimeter_matches_enumeration() {
    let fc = FatCantor::new(4, None).unwrap();
    let c = fc.component_length();
    for eps in [Dyadic::new(1, 10), c, c + Dyadic::new(1, 20), Dyadic::new(1, 2)] {
        let (per, g) = fc.min_perimeter(eps).unwrap();
        assert_eq!(per, cantor_brute(&fc, eps), "ε = {eps}");
        assert_eq!(perimeter(&fc.space, &g), per);
        assert!(fc.space.measure_of(&fc.set.difference(&g)) < eps);
    }
}

#[test]
fn fat_cantor_perimeter_grows_with_level() {
    let eps = Dyadic::new(1, 4);
    let pers: Vec<Dyadic> = (3..=6)
        .map(|l| FatCantor::new(l, None).unwrap().min_perimeter(eps).unwrap().0)
        .collect();
    assert!(pers.windows(2).all(|w| w[0] < w[1]), "{pers:?}");
    // Half the measure stays regardless of level.
    let fc = FatCantor::new(6, Some(Scale::new(28).unwrap())).unwrap();
    assert!(fc.space.measure_of(&fc.set) > Dyadic::new(1, 1));
}

#[test]
fn interval_sum_formula() {
    let open = IntervalExample::new(false).unwrap().check().unwrap();
    assert_eq!(open.continuum.lhs, Dyadic::from_int(4));
    assert_eq!(open.continuum.rhs, Dyadic::from_int(2));
    assert!(!open.continuum.holds());
    assert_eq!(open.graph.lhs, open.graph.rhs);
    let closed = IntervalExample::new(true).unwrap().check().unwrap();
    assert!(closed.continuum.holds());
    assert_eq!(closed.graph.lhs, closed.graph.rhs);
}
