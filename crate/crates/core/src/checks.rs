//! Invariant suites behind `perimin check`: exact identities on random
//! instances, exhaustive enumeration against the cut solver, and the example
//! claims at their default resolutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{Dyadic, Scale};
use crate::extension::non_extension_witness;
use crate::functional::{coarea_integral, coarea_profile, perimeter, relative_perimeter, total_variation, VertexFunction};
use crate::minimize::{evaluate, minimize, Problem, Variant};
use crate::scenarios::{IntervalExample, SquareControl, TrianglesAtoms, Tripod};
use crate::space::{Edge, Space};
use crate::vertex_set::VertexSet;

pub const SUITES: [&str; 3] = ["identities", "oracle", "scenarios"];

/// Largest number of free vertices [`enumerate_minimizers`] accepts.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            detail,
        }
    }
}

/// Random connected-ish graph on `n` vertices with small dyadic masses,
/// capacities and lengths; about a fifth of the masses are zero.
pub fn random_space(rng: &mut ChaCha8Rng, n: usize) -> Result<Space> {
    let scale = Scale::new(4)?;
    let measure = (0..n)
        .map(|_| if rng.gen_bool(0.2) { 0 } else { rng.gen_range(1..=16) })
        .collect();
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push(Edge {
            u,
            v,
            capacity: rng.gen_range(0..=24),
            length: rng.gen_range(1..=16),
        });
    }
    for u in 0..n {
        for v in u + 2..n {
            if rng.gen_bool(0.15) && !edges.iter().any(|e| e.u == u && e.v == v) {
                edges.push(Edge {
                    u,
                    v,
                    capacity: rng.gen_range(0..=24),
                    length: rng.gen_range(1..=16),
                });
            }
        }
    }
    Space::new(scale, measure, edges, Vec::new())
}

pub fn random_subset(rng: &mut ChaCha8Rng, universe: &VertexSet) -> VertexSet {
    VertexSet::from_predicate(universe.universe_len(), |v| universe.contains(v) && rng.gen_bool(0.5))
}

/// Optimal value and every optimal set, by enumeration of the free vertices.
pub fn enumerate_minimizers(problem: &Problem) -> Result<(Dyadic, Vec<VertexSet>)> {
    let n = problem.space.vertex_count();
    let free: Vec<usize> = match problem.variant {
        Variant::InsideOnly => problem.omega.to_vec(),
        Variant::SymmetricDifference => (0..n).collect(),
    };
    if free.len() > ENUMERATION_LIMIT {
        return Err(Error::Precondition(format!(
            "enumeration is limited to {ENUMERATION_LIMIT} free vertices"
        )));
    }
    let mut best: Option<Dyadic> = None;
    let mut sets = Vec::new();
    for mask in 0..1u64 << free.len() {
        let a = VertexSet::from_mask(n, &free, mask);
        let v = evaluate(problem, &a)?;
        match best {
            Some(b) if v > b => {}
            Some(b) if v == b => sets.push(a),
            _ => {
                best = Some(v);
                sets = vec![a];
            }
        }
    }
    Ok((best.expect("at least the empty set is enumerated"), sets))
}

fn identities(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = Dyadic::from_int(2);
    let (mut sum_fail, mut coarea_fail, mut submod_fail) = (0, 0, 0);
    let trials = 200;
    for _ in 0..trials {
        let n = rng.gen_range(2..=24);
        let space = random_space(&mut rng, n)?;
        let full = space.full_set();
        let b = random_subset(&mut rng, &full);
        let a = random_subset(&mut rng, &b);
        let lhs = perimeter(&space, &a) + perimeter(&space, &b.difference(&a));
        let rhs = perimeter(&space, &b) + two * relative_perimeter(&space, &b, &a)?;
        sum_fail += (lhs != rhs) as usize;

        let f = VertexFunction::integer((0..n).map(|_| rng.gen_range(0..=12)).collect());
        coarea_fail += (total_variation(&space, &f) != coarea_integral(&coarea_profile(&space, &f)?)) as usize;

        let c = random_subset(&mut rng, &full);
        let left = perimeter(&space, &a) + perimeter(&space, &c);
        let right = perimeter(&space, &a.union(&c)) + perimeter(&space, &a.intersection(&c));
        submod_fail += (left < right) as usize;
    }
    Ok(vec![
        CheckOutcome::new("sum formula", sum_fail == 0, format!("{sum_fail} of {trials} failed")),
        CheckOutcome::new("coarea", coarea_fail == 0, format!("{coarea_fail} of {trials} failed")),
        CheckOutcome::new("submodularity", submod_fail == 0, format!("{submod_fail} of {trials} failed")),
    ])
}

fn oracle(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = 50;
    let mut failures = 0;
    for i in 0..trials {
        let variant = if i % 2 == 0 { Variant::InsideOnly } else { Variant::SymmetricDifference };
        let n = rng.gen_range(2..=16);
        let space = random_space(&mut rng, n)?;
        let omega = random_subset(&mut rng, &space.full_set());
        let lambda = Dyadic::new(rng.gen_range(0..=64), 3);
        let problem = Problem::new(&space, omega, lambda, variant)?;
        let got = minimize(&problem)?;
        let (value, sets) = enumerate_minimizers(&problem)?;
        let meet = sets.iter().skip(1).fold(sets[0].clone(), |acc, s| acc.intersection(s));
        let join = sets.iter().skip(1).fold(sets[0].clone(), |acc, s| acc.union(s));
        if got.value != value || got.minimal_set != meet || got.maximal_set != join {
            failures += 1;
        }
    }
    Ok(vec![CheckOutcome::new(
        "oracle equivalence",
        failures == 0,
        format!("{failures} of {trials} disagreed"),
    )])
}

fn scenarios() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let open = IntervalExample::new(false)?.check()?;
    out.push(CheckOutcome::new(
        "interval",
        !open.continuum.holds() && open.graph.lhs == open.graph.rhs,
        format!(
            "measure classes {} > {}, graph {} = {}",
            open.continuum.lhs, open.continuum.rhs, open.graph.lhs, open.graph.rhs
        ),
    ));

    let atoms = TrianglesAtoms::new(3, 1.0 / 256.0, Dyadic::from_int(4), None)?.check(Dyadic::from_int(4))?;
    out.push(CheckOutcome::new(
        "triangles with atoms",
        atoms.threshold.is_some(),
        format!("threshold {:?}", atoms.threshold),
    ));

    let coarse = Tripod::new(2, 1.0 / 128.0, None)?;
    let value = coarse.claim1(Dyadic::ONE)?.value.to_f64();
    out.push(CheckOutcome::new(
        "tripod optimal value",
        (value - 2.0).abs() <= 0.1,
        format!("{value}"),
    ));

    let fine = Tripod::new(2, 1.0 / 512.0, None)?;
    let ratios: Vec<f64> = fine.claim2()?.iter().map(|r| r.to_f64()).collect();
    let growth_ok = ratios.windows(2).all(|w| (3.0..=5.0).contains(&(w[1] / w[0])));
    out.push(CheckOutcome::new("tripod extension ratios", growth_ok, format!("{ratios:?}")));

    let john: Vec<f64> = [1, 2]
        .iter()
        .map(|&k| fine.claim3(k).map(|r| r.ratio))
        .collect::<Result<_>>()?;
    let john_ok = (3.0..=5.0).contains(&(john[0] / john[1]))
        && john
            .iter()
            .zip([1, 2])
            .all(|(r, k)| *r <= 1.5 * 2f64.powi(-2 * k - 1));
    out.push(CheckOutcome::new("tripod John ratios", john_ok, format!("{john:?}")));

    let square = SquareControl::new(513, 1.0 / 512.0, None)?;
    let family = square.triangle_family(&[0, 1, 2]);
    let (_, control) = non_extension_witness(&square.space, &square.omega, &family)?;
    let worst = control.iter().map(|r| r.to_f64()).fold(0.0, f64::max);
    out.push(CheckOutcome::new("square control", worst < 8.0, format!("max ratio {worst}")));
    Ok(out)
}

/// Runs a named suite.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckOutcome>> {
    match name {
        "identities" => identities(seed),
        "oracle" => oracle(seed),
        "scenarios" => scenarios(),
        other => Err(Error::Precondition(format!(
            "unknown suite {other:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        for suite in ["identities", "oracle"] {
            for o in run_suite(suite, 11).unwrap() {
                assert!(o.passed, "{}: {}", o.name, o.detail);
            }
        }
        assert!(run_suite("nope", 0).is_err());
    }
}
