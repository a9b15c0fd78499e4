//! The solvers against exhaustive enumeration on small random graphs.

mod common;

use common::{graph, submasks, to_mask, to_set, RawGraph, BITS};
use perimin::extension::{check_step3, sample_probes};
use perimin::mincut::{Capacity, FlowNetwork};
use perimin::minimize::{best_extension, estimate_lambda, is_concave_nondecreasing, is_nested, minimize, sweep, Problem, Variant};
use perimin::{Dyadic, Error};
use proptest::prelude::*;

/// Value at scale `BITS + 3` of `Per(A) + (l/8) * m(Ω \ A)` or of its
/// symmetric difference variant.
fn objective(g: &RawGraph, omega: u64, l: i128, variant: Variant, a: u64) -> i128 {
    let missed = match variant {
        Variant::InsideOnly => omega & !a,
        Variant::SymmetricDifference => omega ^ a,
    };
    8 * g.per(a) + l * g.mass(missed)
}

/// Optimal value, meet and join of all optimal sets.
fn brute(g: &RawGraph, omega: u64, l: i128, variant: Variant) -> (i128, u64, u64) {
    let all = (1u64 << g.n()) - 1;
    let free = if variant == Variant::InsideOnly { omega } else { all };
    let mut best = i128::MAX;
    let (mut meet, mut join) = (all, 0);
    for a in submasks(free) {
        let v = objective(g, omega, l, variant, a);
        if v < best {
            (best, meet, join) = (v, a, a);
        } else if v == best {
            meet &= a;
            join |= a;
        }
    }
    (best, meet, join)
}

fn variant_of(flag: bool) -> Variant {
    if flag {
        Variant::InsideOnly
    } else {
        Variant::SymmetricDifference
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn minimizer_matches_enumeration(g in graph(12), omega in any::<u64>(), l in 0..=80i128, inside in any::<bool>()) {
        let n = g.n();
        let omega = omega & ((1 << n) - 1);
        let variant = variant_of(inside);
        let space = g.space();
        let p = Problem::new(&space, to_set(n, omega), Dyadic::new(l, 3), variant).unwrap();
        let r = minimize(&p).unwrap();
        let (value, meet, join) = brute(&g, omega, l, variant);
        prop_assert_eq!(r.value.numerator_at(BITS + 3), value);
        prop_assert_eq!(to_mask(&r.minimal_set), meet);
        prop_assert_eq!(to_mask(&r.maximal_set), join);
    }

    #[test]
    fn cut_sides_form_the_extreme_optima(
        n in 1..=10usize,
        terms in prop::collection::vec((0..=20i128, 0..=20i128), 10),
        arcs in prop::collection::vec((0..10usize, 0..10usize, 0..=15i128, 0..=15i128), 0..=20),
    ) {
        let mut net = FlowNetwork::new(n);
        for (v, &(s, t)) in terms.iter().take(n).enumerate() {
            net.add_terminal(v, Capacity::Finite(s), Capacity::Finite(t));
        }
        let arcs: Vec<_> = arcs.into_iter().filter(|a| a.0 < n && a.1 < n && a.0 != a.1).collect();
        for &(u, v, f, b) in &arcs {
            net.add_arc_pair(u, v, f, b);
        }
        let value = |side: u64| -> i128 {
            let mut total = 0;
            for v in 0..n {
                total += if side >> v & 1 == 1 { terms[v].1 } else { terms[v].0 };
            }
            for &(u, v, f, b) in &arcs {
                match (side >> u & 1, side >> v & 1) {
                    (1, 0) => total += f,
                    (0, 1) => total += b,
                    _ => {}
                }
            }
            total
        };
        let (mut best, mut meet, mut join) = (i128::MAX, 0u64, 0u64);
        for side in 0..1u64 << n {
            let v = value(side);
            if v < best {
                (best, meet, join) = (v, side, side);
            } else if v == best {
                meet &= side;
                join |= side;
            }
        }
        let cut = net.solve().unwrap();
        prop_assert_eq!(cut.value, best);
        prop_assert_eq!(to_mask(&cut.min_source_side), meet);
        prop_assert_eq!(to_mask(&cut.max_source_side), join);
    }

    #[test]
    fn sweeps_nest_and_values_are_concave(g in graph(10), omega in any::<u64>(), inside in any::<bool>()) {
        let n = g.n();
        let omega = omega & ((1 << n) - 1);
        let variant = variant_of(inside);
        let space = g.space();
        let ls = [0i128, 1, 3, 8, 20, 64];
        let lambdas: Vec<Dyadic> = ls.iter().map(|&l| Dyadic::new(l, 3)).collect();
        let results = sweep(&space, &to_set(n, omega), &lambdas, variant).unwrap();
        // Outside vertices may enter and leave again under the symmetric
        // difference, so only the inside-only sets must nest.
        if variant == Variant::InsideOnly {
            prop_assert!(is_nested(&results));
        }
        prop_assert!(is_concave_nondecreasing(&results));
        let values: Vec<i128> = ls.iter().map(|&l| brute(&g, omega, l, variant).0).collect();
        for (w, x) in values.windows(3).zip(ls.windows(3)) {
            prop_assert!(w[0] <= w[1]);
            prop_assert!((w[1] - w[0]) * (x[2] - x[1]) >= (w[2] - w[1]) * (x[1] - x[0]));
        }
        for (r, v) in results.iter().zip(&values) {
            prop_assert_eq!(r.value.numerator_at(BITS + 3), *v);
        }
    }

    #[test]
    fn step3_holds_for_minimal_minimizers(g in graph(12), omega in any::<u64>(), l in 0..=80i128) {
        let n = g.n();
        let omega = omega & ((1 << n) - 1);
        let space = g.space();
        let lambda = Dyadic::new(l, 3);
        let r = minimize(&Problem::new(&space, to_set(n, omega), lambda, Variant::InsideOnly).unwrap()).unwrap();
        let gm = to_mask(&r.minimal_set);
        for a in submasks(gm) {
            prop_assert!(8 * g.per(a) <= 16 * g.rel_per(gm, a) + l * g.mass(a), "A = {a:b}");
        }
        let probes = sample_probes(&space, &r.minimal_set, 100, 1).unwrap();
        let report = check_step3(&space, &r.minimal_set, lambda, &probes, false).unwrap();
        prop_assert_eq!(report.step3_violations, 0);
        prop_assert_eq!(report.norm_violations, 0);
    }

    #[test]
    fn best_extension_matches_enumeration(g in graph(12), omega in any::<u64>(), a in any::<u64>()) {
        let n = g.n();
        let all = (1u64 << n) - 1;
        let omega = omega & all;
        let a = a & omega;
        let space = g.space();
        let (set, value) = best_extension(&space, &to_set(n, omega), &to_set(n, a)).unwrap();
        let (mut best, mut meet) = (i128::MAX, all);
        for outside in submasks(all & !omega) {
            let e = a | outside;
            let v = g.mass(e) + g.per(e);
            if v < best {
                (best, meet) = (v, e);
            } else if v == best {
                meet &= e;
            }
        }
        prop_assert_eq!(value.numerator_at(BITS), best);
        prop_assert_eq!(to_mask(&set), meet);
        prop_assert!(best <= g.mass(a) + g.per(a));
    }

    #[test]
    fn chosen_lambda_meets_the_budget(g in graph(12), omega in any::<u64>(), eps in 1..=256i128) {
        let n = g.n();
        let omega = omega & ((1 << n) - 1);
        let space = g.space();
        let epsilon = Dyadic::new(eps, BITS);
        match estimate_lambda(&space, &to_set(n, omega), epsilon) {
            Ok(est) => {
                let r = minimize(&Problem::new(&space, to_set(n, omega), est.lambda, Variant::InsideOnly).unwrap()).unwrap();
                let missed = g.mass(omega & !to_mask(&r.minimal_set));
                if est.trivial {
                    prop_assert!(missed <= eps);
                } else {
                    prop_assert!(missed < eps, "missed {missed} of budget {eps}");
                }
            }
            Err(Error::ResolutionExhausted(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn non_minimal_set_breaks_step3() {
    // A pendant vertex hanging off Ω by an expensive edge.
    let g = RawGraph {
        mass: vec![1, 1, 1],
        edges: vec![(0, 1, 64, 1), (1, 2, 1, 1)],
    };
    let space = g.space();
    let kept = to_set(3, 0b001);
    let report = check_step3(&space, &kept, Dyadic::ONE, &[kept.clone()], false).unwrap();
    assert_eq!(report.step3_violations, 1);
    let r = minimize(&Problem::new(&space, to_set(3, 0b011), Dyadic::ONE, Variant::InsideOnly).unwrap()).unwrap();
    assert_ne!(r.minimal_set, kept);
}
