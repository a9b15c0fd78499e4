//! Extension inequalities for indicator functions over a candidate set `G`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::functional::{perimeter, relative_perimeter};
use crate::minimize::best_extension;
use crate::space::{graph_distance, Space};
use crate::vertex_set::VertexSet;

/// An exact nonnegative ratio of two dyadic values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub numerator: Dyadic,
    pub denominator: Dyadic,
}

impl Ratio {
    pub fn new(numerator: Dyadic, denominator: Dyadic) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::UndefinedRatio);
        }
        Ok(Ratio { numerator, denominator })
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator.to_f64() / self.denominator.to_f64()
    }

    /// Exact test of `self <= bound`.
    pub fn at_most(&self, bound: Dyadic) -> bool {
        self.numerator <= bound * self.denominator
    }

    /// Exact comparison of two ratios with positive denominators.
    pub fn cmp_ratio(&self, other: &Ratio) -> std::cmp::Ordering {
        (self.numerator * other.denominator).cmp(&(other.numerator * self.denominator))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeRecord {
    pub set: VertexSet,
    pub relative_perimeter: Dyadic,
    pub measure: Dyadic,
    pub perimeter: Dyadic,
    /// Least `m(E) + Per(E)` over `E` with `E ∩ G = A`, when requested.
    pub best_extension: Option<Dyadic>,
    /// `(m(A) + Per(A)) / (m(A) + Per_G(A))`; `None` for the empty probe.
    pub ratio: Option<Ratio>,
    pub violates_step3: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionReport {
    pub probes: Vec<ProbeRecord>,
    pub worst_ratio: Option<Ratio>,
    /// Probes with `Per(A) > 2 Per_G(A) + λ m(A)`.
    pub step3_violations: usize,
    /// Probes whose zero-extension ratio exceeds `max{2, λ + 1}`.
    pub norm_violations: usize,
    pub lambda: Dyadic,
}

impl ExtensionReport {
    pub fn norm_bound(&self) -> Dyadic {
        norm_bound(self.lambda)
    }
}

/// `max{2, λ + 1}`.
pub fn norm_bound(lambda: Dyadic) -> Dyadic {
    Dyadic::from_int(2).max(lambda + Dyadic::ONE)
}

/// `(m(A) + Per(A)) / (m(A) + Per_G(A))`: how much extending `χ_A` by zero
/// inflates its BV norm.
pub fn zero_extension_norm_ratio(space: &Space, g: &VertexSet, a: &VertexSet) -> Result<Ratio> {
    let rel = relative_perimeter(space, g, a)?;
    let m = space.measure_of(a);
    Ratio::new(m + perimeter(space, a), m + rel)
}

/// Checks `Per(A) <= 2 Per_G(A) + λ m(A)` and the zero-extension norm bound
/// for every probe `A ⊆ G`. With `with_extension` each probe also gets its
/// optimal extension value.
pub fn check_step3(
    space: &Space,
    g: &VertexSet,
    lambda: Dyadic,
    probes: &[VertexSet],
    with_extension: bool,
) -> Result<ExtensionReport> {
    let bound = norm_bound(lambda);
    let two = Dyadic::from_int(2);
    let mut records = Vec::with_capacity(probes.len());
    let mut worst: Option<Ratio> = None;
    let (mut step3_violations, mut norm_violations) = (0, 0);
    for a in probes {
        let rel = relative_perimeter(space, g, a)?;
        let m = space.measure_of(a);
        let per = perimeter(space, a);
        let violates_step3 = per > two * rel + lambda * m;
        let ratio = Ratio::new(m + per, m + rel).ok();
        if let Some(r) = ratio {
            if !r.at_most(bound) {
                norm_violations += 1;
            }
            if worst.is_none_or(|w| r.cmp_ratio(&w).is_gt()) {
                worst = Some(r);
            }
        }
        step3_violations += violates_step3 as usize;
        let best = if with_extension {
            Some(best_extension(space, g, a)?.1)
        } else {
            None
        };
        records.push(ProbeRecord {
            set: a.clone(),
            relative_perimeter: rel,
            measure: m,
            perimeter: per,
            best_extension: best,
            ratio,
            violates_step3,
        });
    }
    Ok(ExtensionReport {
        probes: records,
        worst_ratio: worst,
        step3_violations,
        norm_violations,
        lambda,
    })
}

/// For each `E_k ⊆ Ω`: the best extension value over `m(E_k) + Per_Ω(E_k)`.
/// Returns the index of the largest ratio and all ratios.
pub fn non_extension_witness(space: &Space, omega: &VertexSet, family: &[VertexSet]) -> Result<(usize, Vec<Ratio>)> {
    let mut ratios = Vec::with_capacity(family.len());
    for e in family {
        let (_, value) = best_extension(space, omega, e)?;
        let den = space.measure_of(e) + relative_perimeter(space, omega, e)?;
        ratios.push(Ratio::new(value, den)?);
    }
    let best = (0..ratios.len())
        .max_by(|&i, &j| ratios[i].cmp_ratio(&ratios[j]))
        .unwrap_or(0);
    Ok((best, ratios))
}

/// Largest `G` for which [`sample_probes`] enumerates every subset.
pub const EXHAUSTIVE_LIMIT: usize = 16;

/// Probe subsets of `g`. Small `g` is enumerated exhaustively; otherwise the
/// probes cycle through connected sets grown at random, unions of random
/// balls, and independent random subsets.
pub fn sample_probes(space: &Space, g: &VertexSet, count: usize, seed: u64) -> Result<Vec<VertexSet>> {
    let n = space.vertex_count();
    if count == 0 || g.is_empty() {
        return Ok(Vec::new());
    }
    let members = g.to_vec();
    if members.len() <= EXHAUSTIVE_LIMIT {
        return Ok((0..1u64 << members.len())
            .map(|mask| VertexSet::from_mask(n, &members, mask))
            .collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = Vec::with_capacity(count);
    for i in 0..count {
        let probe = match i % 3 {
            0 => grown_probe(space, g, &members, &mut rng),
            1 => ball_union_probe(space, g, &members, &mut rng)?,
            _ => {
                let p: f64 = rng.gen_range(0.05..0.95);
                VertexSet::from_vertices(n, members.iter().copied().filter(|_| rng.gen_bool(p)))
            }
        };
        probes.push(probe);
    }
    Ok(probes)
}

fn grown_probe(space: &Space, g: &VertexSet, members: &[usize], rng: &mut ChaCha8Rng) -> VertexSet {
    let n = space.vertex_count();
    let target = rng.gen_range(1..=members.len());
    let start = *members.choose(rng).expect("G is nonempty");
    let mut set = VertexSet::from_vertices(n, [start]);
    let mut frontier = vec![start];
    while set.len() < target && !frontier.is_empty() {
        let i = rng.gen_range(0..frontier.len());
        let v = frontier[i];
        let fresh: Vec<usize> = space
            .neighbors(v)
            .iter()
            .map(|&(u, _)| u)
            .filter(|&u| g.contains(u) && !set.contains(u))
            .collect();
        match fresh.choose(rng) {
            Some(&u) => {
                set.insert(u);
                frontier.push(u);
            }
            None => {
                frontier.swap_remove(i);
            }
        }
    }
    set
}

fn ball_union_probe(space: &Space, g: &VertexSet, members: &[usize], rng: &mut ChaCha8Rng) -> Result<VertexSet> {
    let n = space.vertex_count();
    let balls = rng.gen_range(1..=4);
    let mut set = VertexSet::empty(n);
    for _ in 0..balls {
        let c = *members.choose(rng).expect("G is nonempty");
        let dist = graph_distance(space, &VertexSet::from_vertices(n, [c]), Some(g))?;
        let reach: Vec<i64> = members.iter().filter_map(|&v| dist.raw(v)).collect();
        let far = reach.iter().copied().max().unwrap_or(0);
        let radius = rng.gen_range(0..=far / 2);
        for &v in members {
            if dist.raw(v).is_some_and(|d| d <= radius) {
                set.insert(v);
            }
        }
    }
    Ok(set)
}
