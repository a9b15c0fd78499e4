//! Minimization of `Per(A) + λ m(Ω \ A)` and `Per(A) + λ m(Ω Δ A)` by a
//! single minimum cut, the boundary-layer choice of λ, and the constrained
//! optimal extension of a subset of Ω.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::functional::{perimeter, total_variation, VertexFunction};
use crate::mincut::{Capacity, FlowNetwork};
use crate::space::{exterior_boundary, graph_distance, Space};
use crate::vertex_set::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Sets are restricted to Ω and pay `λ m(Ω \ A)`.
    InsideOnly,
    /// Any set is allowed and pays `λ m(Ω Δ A)`.
    SymmetricDifference,
}

#[derive(Clone, Debug)]
pub struct Problem<'a> {
    pub space: &'a Space,
    pub omega: VertexSet,
    pub lambda: Dyadic,
    pub variant: Variant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimizerResult {
    pub value: Dyadic,
    /// Intersection of all minimizers.
    pub minimal_set: VertexSet,
    /// Union of all minimizers.
    pub maximal_set: VertexSet,
    pub lambda: Dyadic,
    pub variant: Variant,
}

impl<'a> Problem<'a> {
    pub fn new(space: &'a Space, omega: VertexSet, lambda: Dyadic, variant: Variant) -> Result<Self> {
        if omega.universe_len() != space.vertex_count() {
            return Err(Error::Precondition("Ω is not a subset of this space".into()));
        }
        if lambda.is_negative() {
            return Err(Error::Precondition("λ must be nonnegative".into()));
        }
        Ok(Problem {
            space,
            omega,
            lambda: lambda.reduced(),
            variant,
        })
    }

    /// Exponent at which all costs of the problem are integers.
    fn exponent(&self) -> u32 {
        self.space.scale().bits() + self.lambda.exponent()
    }
}

/// Exact value of the functional at `a`.
pub fn evaluate(problem: &Problem, a: &VertexSet) -> Result<Dyadic> {
    let space = problem.space;
    if a.universe_len() != space.vertex_count() {
        return Err(Error::Precondition("set is not a subset of this space".into()));
    }
    let penalty = match problem.variant {
        Variant::InsideOnly => {
            if !a.is_subset(&problem.omega) {
                return Err(Error::Precondition("A must lie in Ω".into()));
            }
            problem.omega.difference(a)
        }
        Variant::SymmetricDifference => problem.omega.symmetric_difference(a),
    };
    Ok(perimeter(space, a) + problem.lambda * space.measure_of(&penalty))
}

/// Global minimizers of the functional: value and the two lattice ends.
pub fn minimize(problem: &Problem) -> Result<MinimizerResult> {
    let space = problem.space;
    let lam = problem.lambda.numerator();
    let edge_shift = problem.lambda.exponent();
    let mut net = FlowNetwork::new(space.vertex_count());
    for v in 0..space.vertex_count() {
        let cost = lam * space.measure_raw(v) as i128;
        if problem.omega.contains(v) {
            net.add_terminal(v, Capacity::Finite(cost), Capacity::Finite(0));
        } else {
            let sink = match problem.variant {
                Variant::InsideOnly => Capacity::Infinite,
                Variant::SymmetricDifference => Capacity::Finite(cost),
            };
            net.add_terminal(v, Capacity::Finite(0), sink);
        }
    }
    for e in space.edges() {
        net.add_edge(e.u, e.v, (e.capacity as i128) << edge_shift);
    }
    let cut = net.solve()?;
    let value = Dyadic::new(cut.value, problem.exponent());
    for set in [&cut.min_source_side, &cut.max_source_side] {
        let direct = evaluate(problem, set)?;
        if direct != value {
            return Err(Error::Invariant(format!(
                "minimizer re-evaluates to {direct}, cut value is {value}"
            )));
        }
    }
    Ok(MinimizerResult {
        value,
        minimal_set: cut.min_source_side,
        maximal_set: cut.max_source_side,
        lambda: problem.lambda,
        variant: problem.variant,
    })
}

/// Solves the problem for each λ of an increasing list.
pub fn sweep(space: &Space, omega: &VertexSet, lambdas: &[Dyadic], variant: Variant) -> Result<Vec<MinimizerResult>> {
    if lambdas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("λ list must be strictly increasing".into()));
    }
    lambdas
        .iter()
        .map(|&l| minimize(&Problem::new(space, omega.clone(), l, variant)?))
        .collect()
}

/// Whether the minimal sets of a sweep increase with λ. Guaranteed for
/// [`Variant::InsideOnly`] only.
pub fn is_nested(results: &[MinimizerResult]) -> bool {
    results
        .windows(2)
        .all(|w| w[0].minimal_set.is_subset(&w[1].minimal_set))
}

/// Whether `λ ↦ value` is nondecreasing and concave on the sampled points,
/// compared exactly through cross-multiplied finite differences.
pub fn is_concave_nondecreasing(results: &[MinimizerResult]) -> bool {
    let increasing = results.windows(2).all(|w| w[0].value <= w[1].value);
    let concave = results.windows(3).all(|w| {
        let (l0, l1, l2) = (w[0].lambda, w[1].lambda, w[2].lambda);
        let (v0, v1, v2) = (w[0].value, w[1].value, w[2].value);
        (v1 - v0) * (l2 - l1) >= (v2 - v1) * (l1 - l0)
    });
    increasing && concave
}

/// Smallest value with `bits` fractional bits strictly above `a / b`.
pub fn quotient_strictly_above(a: Dyadic, b: Dyadic, bits: u32) -> Result<Dyadic> {
    if b.numerator() <= 0 || a.is_negative() {
        return Err(Error::Precondition("quotient needs a >= 0 and b > 0".into()));
    }
    let exp = a.exponent().max(b.exponent());
    let overflow = || Error::CapacityScale("λ overflows the capacity scale".into());
    let top = a
        .numerator_at(exp)
        .checked_mul(1i128.checked_shl(bits).ok_or_else(overflow)?)
        .ok_or_else(overflow)?;
    let den = b.numerator_at(exp);
    let q = top / den + 1;
    if q > 1i128 << 62 {
        return Err(overflow());
    }
    Ok(Dyadic::new(q, bits))
}

/// Boundary-layer data behind a choice of λ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaEstimate {
    pub lambda: Dyadic,
    /// Layer depth; `None` when Ω has no boundary in the space.
    pub r: Option<Dyadic>,
    /// `m(Ω ∩ {d < r})`.
    pub layer_mass: Dyadic,
    /// Least perimeter of `Ω ∩ {d >= s}` over layer thresholds `s <= r`.
    pub min_layer_perimeter: Dyadic,
    /// Total variation of `min(d, r)` on Ω, extended by zero.
    pub layer_variation: Dyadic,
    /// `min_layer_perimeter * r <= layer_mass`.
    pub mass_bound_holds: bool,
    /// Set when `ε >= m(Ω)` and the deepest layer was taken.
    pub trivial: bool,
}

impl LambdaEstimate {
    /// `min_layer_perimeter`, `layer_mass / r` and `layer_variation / r` as floats.
    pub fn certificate_f64(&self) -> (f64, f64, f64) {
        let r = self.r.map(|r| r.to_f64()).unwrap_or(f64::INFINITY);
        (
            self.min_layer_perimeter.to_f64(),
            self.layer_mass.to_f64() / r,
            self.layer_variation.to_f64() / r,
        )
    }
}

struct Layer {
    depth: i64,
    perimeter: i128,
    mass_inside: i128,
}

/// Picks λ so that the lattice-minimal minimizer misses less than `epsilon`
/// of Ω.
///
/// Distances to the exterior boundary split Ω into layers. The depth `r` is
/// the largest layer threshold whose inner layer has mass below `ε/2`, and λ
/// is the least scale value above both `1/r` and `P/(ε - m_r)`, where `P` is
/// the least perimeter of a layer complement. Comparing with that layer
/// complement gives `λ m(Ω \ G) <= P + λ m_r`, hence `m(Ω \ G) < ε`.
pub fn estimate_lambda(space: &Space, omega: &VertexSet, epsilon: Dyadic) -> Result<LambdaEstimate> {
    if epsilon <= Dyadic::ZERO {
        return Err(Error::Precondition("ε must be positive".into()));
    }
    if omega.universe_len() != space.vertex_count() {
        return Err(Error::Precondition("Ω is not a subset of this space".into()));
    }
    let bits = space.scale().bits();
    let exhausted = |why: &str| Error::ResolutionExhausted(why.into());
    let seeds = exterior_boundary(space, omega);
    let dist = if seeds.is_empty() {
        None
    } else {
        Some(graph_distance(space, &seeds, None)?)
    };
    let depth = |v: usize| dist.as_ref().and_then(|d| d.raw(v));

    let mut order: Vec<(i64, usize)> = omega.iter().filter_map(|v| depth(v).map(|d| (d, v))).collect();
    order.sort_unstable();
    if order.is_empty() {
        // Ω has no exterior boundary, so it has zero perimeter and any
        // positive λ keeps all of it.
        return Ok(LambdaEstimate {
            lambda: space.scale().ulp(),
            r: None,
            layer_mass: Dyadic::ZERO,
            min_layer_perimeter: perimeter(space, omega),
            layer_variation: Dyadic::ZERO,
            mass_bound_holds: true,
            trivial: epsilon >= space.measure_of(omega),
        });
    }

    // Sweep thresholds upward, peeling layers off Ω.
    let mut inside = omega.clone();
    let mut cut: i128 = perimeter(space, omega).numerator_at(bits);
    let mut mass: i128 = 0;
    let mut layers: Vec<Layer> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let depth = order[i].0;
        layers.push(Layer {
            depth,
            perimeter: cut,
            mass_inside: mass,
        });
        while i < order.len() && order[i].0 == depth {
            let v = order[i].1;
            inside.remove(v);
            for &(u, ei) in space.neighbors(v) {
                let c = space.edges()[ei].capacity as i128;
                if inside.contains(u) {
                    cut += c;
                } else {
                    cut -= c;
                }
            }
            mass += space.measure_raw(v) as i128;
            i += 1;
        }
    }

    let eps_raw = epsilon;
    let trivial = epsilon >= space.measure_of(omega);
    let chosen = if trivial {
        layers.len() - 1
    } else {
        // The first layer has no mass inside, so some layer always qualifies.
        layers
            .iter()
            .rposition(|l| Dyadic::new(2 * l.mass_inside, bits) < eps_raw)
            .ok_or_else(|| exhausted("no boundary layer is thin enough"))?
    };
    let layer = &layers[chosen];
    let r = Dyadic::new(layer.depth as i128, bits);
    if r.is_zero() {
        return Err(exhausted("boundary layer has zero depth"));
    }
    let min_per = layers[..=chosen].iter().map(|l| l.perimeter).min().unwrap_or(0);
    let min_layer_perimeter = Dyadic::new(min_per, bits);
    let layer_mass = Dyadic::new(layer.mass_inside, bits);

    let mut lambda = quotient_strictly_above(Dyadic::ONE, r, bits).map_err(|_| exhausted("1/r exceeds the capacity scale"))?;
    if !trivial {
        let slack = epsilon - layer_mass;
        let needed = quotient_strictly_above(min_layer_perimeter, slack, bits)
            .map_err(|_| exhausted("λ exceeds the capacity scale"))?;
        lambda = lambda.max(needed);
    }

    let f = VertexFunction::new(
        (0..space.vertex_count())
            .map(|v| {
                if !omega.contains(v) {
                    0
                } else {
                    depth(v).map_or(layer.depth, |d| d.min(layer.depth))
                }
            })
            .collect(),
        bits,
    );
    let layer_variation = total_variation(space, &f);
    if min_layer_perimeter * r > layer_variation {
        return Err(Error::Invariant("coarea lower bound for the layer function fails".into()));
    }

    Ok(LambdaEstimate {
        lambda,
        r: Some(r),
        layer_mass,
        min_layer_perimeter,
        layer_variation,
        mass_bound_holds: min_layer_perimeter * r <= layer_mass,
        trivial,
    })
}

/// Least `m(E) + Per(E)` over sets `E` with `E ∩ Ω = A`, and the smallest
/// optimal `E`.
pub fn best_extension(space: &Space, omega: &VertexSet, a: &VertexSet) -> Result<(VertexSet, Dyadic)> {
    if !a.is_subset(omega) || omega.universe_len() != space.vertex_count() {
        return Err(Error::Precondition("A must lie in Ω".into()));
    }
    let mut net = FlowNetwork::new(space.vertex_count());
    for v in 0..space.vertex_count() {
        let m = space.measure_raw(v) as i128;
        if a.contains(v) {
            net.add_terminal(v, Capacity::Infinite, Capacity::Finite(m));
        } else if omega.contains(v) {
            net.add_terminal(v, Capacity::Finite(0), Capacity::Infinite);
        } else {
            net.add_terminal(v, Capacity::Finite(0), Capacity::Finite(m));
        }
    }
    for e in space.edges() {
        net.add_edge(e.u, e.v, e.capacity as i128);
    }
    let cut = net.solve()?;
    let value = Dyadic::new(cut.value, space.scale().bits());
    let set = cut.min_source_side;
    if space.measure_of(&set) + perimeter(space, &set) != value {
        return Err(Error::Invariant("extension value does not re-evaluate".into()));
    }
    Ok((set, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Scale;
    use crate::space::{build_grid, GridSpec};

    fn square(n: usize, pad: usize) -> (Space, VertexSet) {
        let side = n + 2 * pad;
        let h = 1.0 / n as f64;
        let s = build_grid(&GridSpec::uniform_weight(side, side, h, 1.0), Scale::default()).unwrap();
        let omega = VertexSet::from_predicate(s.vertex_count(), |v| {
            let (c, r) = (v % side, v / side);
            (pad..pad + n).contains(&c) && (pad..pad + n).contains(&r)
        });
        (s, omega)
    }

    #[test]
    fn trivial_values() {
        let (s, omega) = square(4, 1);
        let p = Problem::new(&s, omega.clone(), Dyadic::from_int(3), Variant::InsideOnly).unwrap();
        assert_eq!(evaluate(&p, &omega).unwrap(), perimeter(&s, &omega));
        assert_eq!(evaluate(&p, &s.empty_set()).unwrap(), Dyadic::from_int(3) * s.measure_of(&omega));
        assert!(evaluate(&p, &s.full_set()).is_err());
    }

    #[test]
    fn zero_lambda_gives_empty_minimal_set() {
        let (s, omega) = square(4, 1);
        let r = minimize(&Problem::new(&s, omega, Dyadic::ZERO, Variant::InsideOnly).unwrap()).unwrap();
        assert_eq!(r.value, Dyadic::ZERO);
        assert!(r.minimal_set.is_empty());
    }

    #[test]
    fn inside_only_stays_in_omega() {
        let (s, omega) = square(6, 2);
        for variant in [Variant::InsideOnly, Variant::SymmetricDifference] {
            let r = minimize(&Problem::new(&s, omega.clone(), Dyadic::from_int(8), variant).unwrap()).unwrap();
            assert!(r.minimal_set.is_subset(&r.maximal_set));
            if variant == Variant::InsideOnly {
                assert!(r.maximal_set.is_subset(&omega));
            }
        }
    }

    #[test]
    fn best_extension_trivial_cases() {
        let (s, omega) = square(4, 1);
        let (e, v) = best_extension(&s, &omega, &s.empty_set()).unwrap();
        assert!(e.is_empty());
        assert_eq!(v, Dyadic::ZERO);
        let full = s.full_set();
        let a = VertexSet::from_vertices(s.vertex_count(), [7, 8]);
        let (e, v) = best_extension(&s, &full, &a).unwrap();
        assert_eq!(e, a);
        assert_eq!(v, s.measure_of(&a) + perimeter(&s, &a));
    }

    #[test]
    fn lambda_estimate_meets_budget() {
        let (s, omega) = square(32, 1);
        let eps = Dyadic::new(1, 4);
        let est = estimate_lambda(&s, &omega, eps).unwrap();
        let r = minimize(&Problem::new(&s, omega.clone(), est.lambda, Variant::InsideOnly).unwrap()).unwrap();
        assert!(s.measure_of(&omega.difference(&r.minimal_set)) < eps);
        assert!(est.lambda * est.r.unwrap() > Dyadic::ONE);
    }

    #[test]
    fn lambda_estimate_trivial_epsilon() {
        let (s, omega) = square(8, 1);
        let est = estimate_lambda(&s, &omega, s.measure_of(&omega)).unwrap();
        assert!(est.trivial);
        assert_eq!(est.r.unwrap(), Dyadic::new(1, 1));
    }

    #[test]
    fn quotient_is_strict() {
        assert_eq!(quotient_strictly_above(Dyadic::ONE, Dyadic::new(1, 2), 4).unwrap(), Dyadic::new(65, 4));
        assert_eq!(quotient_strictly_above(Dyadic::ONE, Dyadic::from_int(3), 4).unwrap(), Dyadic::new(6, 4));
    }
}
