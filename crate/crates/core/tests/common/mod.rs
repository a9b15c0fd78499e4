//! Brute-force helpers shared by the integration tests. Everything here works
//! on raw integers and never calls the solver.

#![allow(dead_code)]

use perimin::space::Edge;
use perimin::{Scale, Space, VertexSet};
use proptest::prelude::*;

pub const BITS: u32 = 4;

/// Masses and undirected edges `(u, v, capacity, length)` of a small graph.
#[derive(Clone, Debug)]
pub struct RawGraph {
    pub mass: Vec<i64>,
    pub edges: Vec<(usize, usize, i64, i64)>,
}

impl RawGraph {
    pub fn n(&self) -> usize {
        self.mass.len()
    }

    pub fn space(&self) -> Space {
        let edges = self
            .edges
            .iter()
            .map(|&(u, v, capacity, length)| Edge { u, v, capacity, length })
            .collect();
        Space::new(Scale::new(BITS).unwrap(), self.mass.clone(), edges, Vec::new()).unwrap()
    }

    pub fn per(&self, a: u64) -> i128 {
        self.edges
            .iter()
            .filter(|&&(u, v, _, _)| (a >> u & 1) != (a >> v & 1))
            .map(|e| e.2 as i128)
            .sum()
    }

    /// Cut edges with both ends in `b`.
    pub fn rel_per(&self, b: u64, a: u64) -> i128 {
        self.edges
            .iter()
            .filter(|&&(u, v, _, _)| (b >> u & 1) == 1 && (b >> v & 1) == 1 && (a >> u & 1) != (a >> v & 1))
            .map(|e| e.2 as i128)
            .sum()
    }

    pub fn mass(&self, a: u64) -> i128 {
        (0..self.n()).filter(|&v| a >> v & 1 == 1).map(|v| self.mass[v] as i128).sum()
    }
}

pub fn graph(max_n: usize) -> impl Strategy<Value = RawGraph> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(prop_oneof![1 => Just(0i64), 4 => 1..=16i64], n),
                prop::collection::vec((0..n, 0..n, 0..=24i64, 1..=8i64), 0..=2 * n),
            )
        })
        .prop_map(|(mass, raw)| {
            let mut edges: Vec<(usize, usize, i64, i64)> = Vec::new();
            for (u, v, c, l) in raw {
                let (u, v) = (u.min(v), u.max(v));
                if u != v && !edges.iter().any(|e| e.0 == u && e.1 == v) {
                    edges.push((u, v, c, l));
                }
            }
            RawGraph { mass, edges }
        })
}

pub fn to_set(n: usize, mask: u64) -> VertexSet {
    VertexSet::from_predicate(n, |v| mask >> v & 1 == 1)
}

pub fn to_mask(set: &VertexSet) -> u64 {
    set.iter().fold(0, |m, v| m | 1 << v)
}

/// Every submask of `mask`.
pub fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}
