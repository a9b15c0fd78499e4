//! Exact s–t minimum cut on integer capacities.
//!
//! The network has one node per graph vertex plus a source and a sink. Each
//! vertex may carry a source arc (cut when the vertex ends on the sink side)
//! and a sink arc (cut when it ends on the source side); vertex pairs carry
//! arcs in both directions. Max flow is computed with Dinic's blocking-flow
//! method, after which residual reachability yields the smallest and the
//! largest minimum source side.

use std::collections::VecDeque;
use std::ops::{AddAssign, SubAssign};

use num_traits::PrimInt;

use crate::error::{Error, Result};
use crate::space::VertexId;
use crate::vertex_set::VertexSet;

/// Capacity of a terminal arc. `Infinite` is a hard constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capacity {
    Finite(i128),
    Infinite,
}

impl Capacity {
    fn finite_part(self) -> i128 {
        match self {
            Capacity::Finite(c) => c,
            Capacity::Infinite => 0,
        }
    }

    fn resolve(self, infinity: i128) -> i128 {
        match self {
            Capacity::Finite(c) => c,
            Capacity::Infinite => infinity,
        }
    }

    fn plus(self, other: Capacity) -> Capacity {
        match (self, other) {
            (Capacity::Finite(a), Capacity::Finite(b)) => Capacity::Finite(a + b),
            _ => Capacity::Infinite,
        }
    }
}

#[derive(Clone, Debug)]
struct PairArc {
    u: VertexId,
    v: VertexId,
    forward: i128,
    backward: i128,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    n: usize,
    source: Vec<Capacity>,
    sink: Vec<Capacity>,
    arcs: Vec<PairArc>,
}

/// Outcome of a minimum cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult {
    pub value: i128,
    /// Vertices reachable from the source in the final residual graph: the
    /// intersection of all minimum source sides.
    pub min_source_side: VertexSet,
    /// Complement of the vertices that reach the sink in the residual graph:
    /// the union of all minimum source sides.
    pub max_source_side: VertexSet,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            source: vec![Capacity::Finite(0); n],
            sink: vec![Capacity::Finite(0); n],
            arcs: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Adds to the source arc (paid if `v` is on the sink side) and the sink
    /// arc (paid if `v` is on the source side) of `v`.
    pub fn add_terminal(&mut self, v: VertexId, source: Capacity, sink: Capacity) {
        assert!(v < self.n, "vertex {v} out of range");
        assert!(
            source.finite_part() >= 0 && sink.finite_part() >= 0,
            "terminal capacities must be nonnegative"
        );
        self.source[v] = self.source[v].plus(source);
        self.sink[v] = self.sink[v].plus(sink);
    }

    /// Symmetric pair arc of capacity `capacity` in both directions.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, capacity: i128) {
        self.add_arc_pair(u, v, capacity, capacity);
    }

    /// Arc `u -> v` of capacity `forward` and `v -> u` of capacity `backward`.
    pub fn add_arc_pair(&mut self, u: VertexId, v: VertexId, forward: i128, backward: i128) {
        assert!(u < self.n && v < self.n, "arc endpoint out of range");
        assert!(forward >= 0 && backward >= 0, "arc capacities must be nonnegative");
        if u == v || (forward == 0 && backward == 0) {
            return;
        }
        self.arcs.push(PairArc { u, v, forward, backward });
    }

    fn finite_total(&self) -> Result<i128> {
        let mut total: i128 = 0;
        let terms = self
            .source
            .iter()
            .chain(self.sink.iter())
            .map(|c| c.finite_part())
            .chain(self.arcs.iter().flat_map(|a| [a.forward, a.backward]));
        for c in terms {
            total = total
                .checked_add(c)
                .ok_or_else(|| Error::CapacityScale("flow network capacities overflow".into()))?;
        }
        if total > i128::MAX / 8 {
            return Err(Error::CapacityScale("flow network capacities overflow".into()));
        }
        Ok(total)
    }

    /// Cut value of a source side, with `infinity` standing in for hard arcs.
    fn cut_value(&self, side: &VertexSet, infinity: i128) -> i128 {
        let mut value: i128 = 0;
        for v in 0..self.n {
            if side.contains(v) {
                value += self.sink[v].resolve(infinity);
            } else {
                value += self.source[v].resolve(infinity);
            }
        }
        for a in &self.arcs {
            match (side.contains(a.u), side.contains(a.v)) {
                (true, false) => value += a.forward,
                (false, true) => value += a.backward,
                _ => {}
            }
        }
        value
    }

    /// Evaluates the cut value of an arbitrary source side. Returns `None`
    /// when the side violates a hard constraint.
    pub fn evaluate(&self, side: &VertexSet) -> Option<i128> {
        let infinity = self.finite_total().ok()? + 1;
        let v = self.cut_value(side, infinity);
        (v < infinity).then_some(v)
    }

    /// Solves the minimum cut exactly.
    pub fn solve(&self) -> Result<CutResult> {
        let finite = self.finite_total()?;
        let infinity = finite + 1;
        let (flow_value, min_side, max_side) = if infinity.saturating_mul(4) < i64::MAX as i128 {
            run::<i64>(self, infinity)
        } else {
            run::<i128>(self, infinity)
        };
        if flow_value >= infinity {
            return Err(Error::Infeasible);
        }
        for side in [&min_side, &max_side] {
            let direct = self.cut_value(side, infinity);
            if direct != flow_value {
                return Err(Error::Invariant(format!(
                    "cut side evaluates to {direct}, max flow is {flow_value}"
                )));
            }
        }
        if !min_side.is_subset(&max_side) {
            return Err(Error::Invariant("minimal cut side is not inside the maximal one".into()));
        }
        Ok(CutResult {
            value: flow_value,
            min_source_side: min_side,
            max_source_side: max_side,
        })
    }
}

trait FlowInt: PrimInt + AddAssign + SubAssign + TryFrom<i128> + Into<i128> {}
impl FlowInt for i64 {}
impl FlowInt for i128 {}

fn narrow<T: FlowInt>(x: i128) -> T {
    T::try_from(x).ok().expect("capacity fits the selected integer width")
}

const UNREACHED: u32 = u32::MAX;

struct Residual<T> {
    start: Vec<u32>,
    head: Vec<u32>,
    rev: Vec<u32>,
    cap: Vec<T>,
    level: Vec<u32>,
    cursor: Vec<u32>,
}

impl<T: FlowInt> Residual<T> {
    fn build(nodes: usize, pairs: &[(u32, u32, T, T)]) -> Self {
        assert!(pairs.len() * 2 < u32::MAX as usize, "too many arcs");
        let mut degree = vec![0u32; nodes + 1];
        for &(a, b, _, _) in pairs {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut start = vec![0u32; nodes + 1];
        for i in 0..nodes {
            start[i + 1] = start[i] + degree[i];
        }
        let m = start[nodes] as usize;
        let mut fill = start.clone();
        let mut head = vec![0u32; m];
        let mut rev = vec![0u32; m];
        let mut cap = vec![T::zero(); m];
        for &(a, b, fwd, bwd) in pairs {
            let pa = fill[a as usize];
            fill[a as usize] += 1;
            let pb = fill[b as usize];
            fill[b as usize] += 1;
            head[pa as usize] = b;
            cap[pa as usize] = fwd;
            rev[pa as usize] = pb;
            head[pb as usize] = a;
            cap[pb as usize] = bwd;
            rev[pb as usize] = pa;
        }
        Residual {
            start,
            head,
            rev,
            cap,
            level: vec![UNREACHED; nodes],
            cursor: vec![0; nodes],
        }
    }

    fn arcs(&self, u: usize) -> std::ops::Range<usize> {
        self.start[u] as usize..self.start[u + 1] as usize
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(UNREACHED);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if self.level[t] != UNREACHED && self.level[u] >= self.level[t] {
                break;
            }
            for a in self.arcs(u) {
                let v = self.head[a] as usize;
                if self.cap[a] > T::zero() && self.level[v] == UNREACHED {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] != UNREACHED
    }

    fn blocking_flow(&mut self, s: usize, t: usize) -> T {
        for u in 0..self.cursor.len() {
            self.cursor[u] = self.start[u];
        }
        let mut total = T::zero();
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let mut bottleneck = self.cap[path[0]];
                for &a in &path[1..] {
                    bottleneck = bottleneck.min(self.cap[a]);
                }
                for &a in &path {
                    self.cap[a] -= bottleneck;
                    let r = self.rev[a] as usize;
                    self.cap[r] += bottleneck;
                }
                total += bottleneck;
                let k = path
                    .iter()
                    .position(|&a| self.cap[a] == T::zero())
                    .expect("an augmenting path saturates an arc");
                path.truncate(k);
                u = match path.last() {
                    Some(&a) => self.head[a] as usize,
                    None => s,
                };
                continue;
            }
            let mut advanced = false;
            while (self.cursor[u] as usize) < self.start[u + 1] as usize {
                let a = self.cursor[u] as usize;
                let v = self.head[a] as usize;
                if self.cap[a] > T::zero() && self.level[v] != UNREACHED && self.level[v] == self.level[u] + 1 {
                    path.push(a);
                    u = v;
                    advanced = true;
                    break;
                }
                self.cursor[u] += 1;
            }
            if !advanced {
                if u == s {
                    break;
                }
                self.level[u] = UNREACHED;
                let a = path.pop().expect("non-source node has an incoming path arc");
                u = self.head[self.rev[a] as usize] as usize;
                self.cursor[u] += 1;
            }
        }
        total
    }

    fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.level.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for a in self.arcs(u) {
                let v = self.head[a] as usize;
                if !seen[v] && self.cap[a] > T::zero() {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    fn reaching(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.level.len()];
        seen[t] = true;
        let mut stack = vec![t];
        while let Some(x) = stack.pop() {
            for a in self.arcs(x) {
                let y = self.head[a] as usize;
                // The reverse of x -> y is y -> x.
                if !seen[y] && self.cap[self.rev[a] as usize] > T::zero() {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }
}

fn run<T: FlowInt>(net: &FlowNetwork, infinity: i128) -> (i128, VertexSet, VertexSet) {
    let n = net.n;
    let (s, t) = (n, n + 1);
    let mut constant: i128 = 0;
    let mut pairs: Vec<(u32, u32, T, T)> = Vec::with_capacity(net.arcs.len() + n);
    for v in 0..n {
        let a = net.source[v].resolve(infinity);
        let b = net.sink[v].resolve(infinity);
        let common = a.min(b);
        constant += common;
        if a > common {
            pairs.push((s as u32, v as u32, narrow(a - common), T::zero()));
        }
        if b > common {
            pairs.push((v as u32, t as u32, narrow(b - common), T::zero()));
        }
    }
    for a in &net.arcs {
        pairs.push((a.u as u32, a.v as u32, narrow(a.forward), narrow(a.backward)));
    }
    let mut g = Residual::<T>::build(n + 2, &pairs);
    let mut flow: i128 = 0;
    while g.bfs(s, t) {
        let f = g.blocking_flow(s, t);
        if f == T::zero() {
            break;
        }
        flow += f.into();
    }
    let from_source = g.reachable_from(s);
    let to_sink = g.reaching(t);
    let min_side = VertexSet::from_predicate(n, |v| from_source[v]);
    let max_side = VertexSet::from_predicate(n, |v| !to_sink[v]);
    (flow + constant, min_side, max_side)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unary_only() {
        let mut net = FlowNetwork::new(1);
        net.add_terminal(0, Capacity::Finite(3), Capacity::Finite(5));
        let cut = net.solve().unwrap();
        assert_eq!(cut.value, 3);
        assert!(cut.min_source_side.is_empty());
        assert!(cut.max_source_side.is_empty());
    }

    #[test]
    fn bottleneck_edge() {
        let mut net = FlowNetwork::new(2);
        net.add_terminal(0, Capacity::Finite(2), Capacity::Finite(0));
        net.add_terminal(1, Capacity::Finite(0), Capacity::Finite(2));
        net.add_edge(0, 1, 1);
        let cut = net.solve().unwrap();
        assert_eq!(cut.value, 1);
        assert_eq!(cut.min_source_side.to_vec(), vec![0]);
        assert_eq!(cut.max_source_side.to_vec(), vec![0]);
    }

    #[test]
    fn ties_give_distinct_lattice_ends() {
        // Source and sink arcs of equal weight: both labels are optimal.
        let mut net = FlowNetwork::new(1);
        net.add_terminal(0, Capacity::Finite(4), Capacity::Finite(4));
        let cut = net.solve().unwrap();
        assert_eq!(cut.value, 4);
        assert!(cut.min_source_side.is_empty());
        assert_eq!(cut.max_source_side.to_vec(), vec![0]);
    }

    #[test]
    fn contradictory_hard_constraints_are_infeasible() {
        let mut net = FlowNetwork::new(2);
        net.add_terminal(0, Capacity::Infinite, Capacity::Finite(0));
        net.add_terminal(1, Capacity::Finite(0), Capacity::Infinite);
        net.add_arc_pair(0, 1, 0, 0);
        assert!(net.solve().is_ok());
        let mut both = FlowNetwork::new(1);
        both.add_terminal(0, Capacity::Infinite, Capacity::Infinite);
        assert!(matches!(both.solve(), Err(Error::Infeasible)));
    }

    #[test]
    fn wide_capacities_use_i128_path() {
        let big = 1i128 << 80;
        let mut net = FlowNetwork::new(2);
        net.add_terminal(0, Capacity::Finite(big), Capacity::Finite(0));
        net.add_terminal(1, Capacity::Finite(0), Capacity::Finite(big));
        net.add_edge(0, 1, big / 3);
        assert_eq!(net.solve().unwrap().value, big / 3);
    }
}
