//! Geodesic test of the local John condition.

use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::space::{exterior_boundary, graph_distance, Space, VertexId};
use crate::vertex_set::VertexSet;

#[derive(Clone, Debug, PartialEq)]
pub struct JohnReport {
    /// Best, over admissible endpoints and shortest paths inside Ω, of the
    /// least `dist(w, ∂Ω) / ℓ(y → w)` along the path.
    pub ratio: f64,
    /// A path from `y` attaining the ratio.
    pub witness: Vec<VertexId>,
    /// Where along the witness the least quotient occurs.
    pub bottleneck: Option<VertexId>,
    pub center_distance: Option<Dyadic>,
}

/// Looks for carrots from `y` to points of Ω at distance at least
/// `escape_radius` from `y`, among shortest paths inside Ω.
///
/// A small ratio certifies that no geodesic carrot exists: every such path
/// passes a point that is close to the boundary compared with its distance
/// from `y`. It does not rule out carrots along longer curves.
pub fn john_probe(
    space: &Space,
    omega: &VertexSet,
    center: VertexId,
    y: VertexId,
    escape_radius: Dyadic,
) -> Result<JohnReport> {
    space.check_vertex(center)?;
    space.check_vertex(y)?;
    if !omega.contains(y) {
        return Err(Error::Precondition("the probe point must lie in Ω".into()));
    }
    let start = VertexSet::from_vertices(space.vertex_count(), [y]);
    let full = graph_distance(space, &start, None)?;
    let center_distance = full.get(center);
    if escape_radius <= Dyadic::ZERO {
        return Ok(JohnReport {
            ratio: f64::INFINITY,
            witness: vec![y],
            bottleneck: None,
            center_distance,
        });
    }
    let scale = space.scale();
    let radius = scale.ceil(escape_radius).numerator_at(scale.bits());

    let seeds = exterior_boundary(space, omega);
    let to_boundary = if seeds.is_empty() {
        None
    } else {
        Some(graph_distance(space, &seeds, None)?)
    };
    let inner = graph_distance(space, &start, Some(omega))?;

    let mut order: Vec<(i64, VertexId)> = omega.iter().filter_map(|v| inner.raw(v).map(|d| (d, v))).collect();
    order.sort_unstable();
    let n = space.vertex_count();
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    best[y] = f64::INFINITY;
    let mut answer: Option<(f64, VertexId)> = None;
    for &(d, z) in &order {
        if z != y {
            let own = match &to_boundary {
                Some(b) => b.get_f64(z) / space.scale().value(d).to_f64(),
                None => f64::INFINITY,
            };
            let mut through = f64::NEG_INFINITY;
            for &(u, ei) in space.neighbors(z) {
                if inner.raw(u).is_some_and(|du| du + space.edges()[ei].length == d) && best[u] > through {
                    through = best[u];
                    pred[z] = u;
                }
            }
            best[z] = own.min(through);
        }
        if full.raw(z).is_some_and(|fd| fd as i128 >= radius) && answer.is_none_or(|(r, _)| best[z] > r) {
            answer = Some((best[z], z));
        }
    }
    let (ratio, end) = answer.ok_or(Error::NoEscape(escape_radius.to_f64()))?;
    let mut witness = vec![end];
    while *witness.last().expect("nonempty") != y {
        witness.push(pred[*witness.last().expect("nonempty")]);
    }
    witness.reverse();
    let bottleneck = witness
        .iter()
        .copied()
        .filter(|&w| w != y)
        .find(|&w| {
            let own = match &to_boundary {
                Some(b) => b.get_f64(w) / inner.get_f64(w),
                None => f64::INFINITY,
            };
            own <= ratio
        });
    Ok(JohnReport {
        ratio,
        witness,
        bottleneck,
        center_distance,
    })
}
