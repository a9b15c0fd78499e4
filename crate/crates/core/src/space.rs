//! Finite weighted graphs standing in for metric measure spaces.
//!
//! A [`Space`] carries a mass per vertex and, per edge, a perimeter capacity
//! and a length. Perimeter is the capacity of an edge cut; distance is the
//! shortest-path length. Masses, capacities and lengths are stored as integers
//! on a common [`Scale`].

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::exact::{Dyadic, Scale};
use crate::vertex_set::VertexSet;

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    /// Perimeter contribution when the edge is cut, in stored units.
    pub capacity: i64,
    /// Metric length, in stored units.
    pub length: i64,
}

impl Edge {
    pub fn other(&self, w: VertexId) -> VertexId {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A rectangular coordinate patch: maps grid cells to vertices, so that sets
/// can be rendered as raster masks and located geometrically.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub cols: usize,
    pub rows: usize,
    /// Row-major cell to vertex map, `rows * cols` entries.
    pub vertices: Vec<VertexId>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Chart {
    pub fn vertex(&self, col: usize, row: usize) -> VertexId {
        self.vertices[row * self.cols + col]
    }

    /// Vertex at the given coordinates, if they lie exactly on the chart lattice.
    pub fn vertex_at(&self, x: f64, y: f64) -> Option<VertexId> {
        let col = self.xs.iter().position(|&c| c == x)?;
        let row = self.ys.iter().position(|&c| c == y)?;
        Some(self.vertex(col, row))
    }
}

#[derive(Clone, Debug)]
pub struct Space {
    scale: Scale,
    measure: Vec<i64>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, usize)>>,
    charts: Vec<Chart>,
}

impl Space {
    /// Assembles and validates a space.
    pub fn new(scale: Scale, measure: Vec<i64>, edges: Vec<Edge>, charts: Vec<Chart>) -> Result<Self> {
        let n = measure.len();
        if n == 0 {
            return Err(Error::InvalidSpace("a space needs at least one vertex".into()));
        }
        if let Some(m) = measure.iter().find(|&&m| m < 0) {
            return Err(Error::InvalidSpace(format!("negative measure {m}")));
        }
        let total: i128 = measure.iter().map(|&m| m as i128).sum();
        if total > (1i128 << 62) {
            return Err(Error::CapacityScale("total measure overflows the stored range".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = HashMap::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n {
                return Err(Error::InvalidVertex(e.u, n));
            }
            if e.v >= n {
                return Err(Error::InvalidVertex(e.v, n));
            }
            if e.u == e.v {
                return Err(Error::InvalidSpace(format!("self-loop at vertex {}", e.u)));
            }
            if e.capacity < 0 || e.length < 0 {
                return Err(Error::InvalidSpace(format!(
                    "edge {}-{} has a negative capacity or length",
                    e.u, e.v
                )));
            }
            if seen.insert((e.u.min(e.v), e.u.max(e.v)), i).is_some() {
                return Err(Error::InvalidSpace(format!("duplicate edge {}-{}", e.u, e.v)));
            }
            adjacency[e.u].push((e.v, i));
            adjacency[e.v].push((e.u, i));
        }
        let cap_total: i128 = edges.iter().map(|e| e.capacity as i128).sum();
        if cap_total > (1i128 << 62) {
            return Err(Error::CapacityScale("total capacity overflows the stored range".into()));
        }
        for c in &charts {
            if c.vertices.len() != c.cols * c.rows || c.xs.len() != c.cols || c.ys.len() != c.rows {
                return Err(Error::InvalidSpace("chart dimensions are inconsistent".into()));
            }
            if let Some(&v) = c.vertices.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidVertex(v, n));
            }
        }
        Ok(Space {
            scale,
            measure,
            edges,
            adjacency,
            charts,
        })
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn vertex_count(&self) -> usize {
        self.measure.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    /// Neighbors of `v` with the index of the connecting edge.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, usize)] {
        &self.adjacency[v]
    }

    pub fn measure_raw(&self, v: VertexId) -> i64 {
        self.measure[v]
    }

    pub fn measure(&self, v: VertexId) -> Dyadic {
        self.scale.value(self.measure[v])
    }

    pub fn measure_of(&self, set: &VertexSet) -> Dyadic {
        let raw: i128 = set.iter().map(|v| self.measure[v] as i128).sum();
        Dyadic::new(raw, self.scale.bits())
    }

    pub fn total_measure(&self) -> Dyadic {
        let raw: i128 = self.measure.iter().map(|&m| m as i128).sum();
        Dyadic::new(raw, self.scale.bits())
    }

    pub fn capacity(&self, edge: usize) -> Dyadic {
        self.scale.value(self.edges[edge].capacity)
    }

    pub fn length(&self, edge: usize) -> Dyadic {
        self.scale.value(self.edges[edge].length)
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::empty(self.vertex_count())
    }

    pub fn full_set(&self) -> VertexSet {
        VertexSet::full(self.vertex_count())
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v, self.vertex_count()))
        }
    }

    /// Chart coordinates of `v` from the first chart that contains it.
    pub fn coords(&self, v: VertexId) -> Option<(usize, f64, f64)> {
        self.charts.iter().enumerate().find_map(|(ci, c)| {
            c.vertices
                .iter()
                .position(|&w| w == v)
                .map(|cell| (ci, c.xs[cell % c.cols], c.ys[cell / c.cols]))
        })
    }

    /// Adds a point mass at `v`. Atoms carry measure and never perimeter.
    pub fn add_atom(mut self, v: VertexId, mass: f64) -> Result<Space> {
        self.check_vertex(v)?;
        let q = self.scale.quantize(mass)?;
        self.add_atom_raw(v, q)?;
        Ok(self)
    }

    pub(crate) fn add_atom_raw(&mut self, v: VertexId, stored: i64) -> Result<()> {
        self.check_vertex(v)?;
        let total: i128 = self.measure.iter().map(|&m| m as i128).sum::<i128>() + stored as i128;
        if stored < 0 || total > (1i128 << 62) {
            return Err(Error::CapacityScale("atom mass overflows the stored range".into()));
        }
        self.measure[v] += stored;
        Ok(())
    }
}

/// One coordinate axis of a tensor grid.
///
/// `dual[i]` is the width of the cell owned by coordinate `i`; it sets the
/// vertex mass and the capacity of edges crossing that cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub coords: Vec<f64>,
    pub dual: Vec<f64>,
}

impl Axis {
    /// `n` equally spaced points `origin + i*h`, every cell of full width `h`.
    pub fn uniform(n: usize, h: f64, origin: f64) -> Self {
        Axis {
            coords: (0..n).map(|i| origin + i as f64 * h).collect(),
            dual: vec![h; n],
        }
    }

    /// Arbitrary increasing coordinates. Interior cells span half of each
    /// adjacent gap; end cells get the full adjacent gap.
    pub fn graded(mut coords: Vec<f64>) -> Result<Self> {
        coords.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        coords.dedup();
        if coords.len() < 2 {
            return Err(Error::Precondition("a graded axis needs two or more points".into()));
        }
        let n = coords.len();
        let dual = (0..n)
            .map(|i| match i {
                0 => coords[1] - coords[0],
                _ if i == n - 1 => coords[n - 1] - coords[n - 2],
                _ => (coords[i + 1] - coords[i - 1]) / 2.0,
            })
            .collect();
        Ok(Axis { coords, dual })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.coords.iter().position(|&c| c == x)
    }
}

/// Uniform 4-connected grid with tabulated per-cell density.
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub cols: usize,
    pub rows: usize,
    pub h: f64,
    /// Density per cell, row-major; length `cols * rows`.
    pub weights: Vec<f64>,
    pub origin: (f64, f64),
}

impl GridSpec {
    pub fn uniform_weight(cols: usize, rows: usize, h: f64, w: f64) -> Self {
        GridSpec {
            cols,
            rows,
            h,
            weights: vec![w; cols * rows],
            origin: (0.0, 0.0),
        }
    }
}

/// Builds a uniform grid: vertex mass `w*h^2`, edge capacity `h*(w_u+w_v)/2`,
/// edge length `h`. Boundary cells get full mass.
pub fn build_grid(spec: &GridSpec, scale: Scale) -> Result<Space> {
    if spec.cols == 0 || spec.rows == 0 {
        return Err(Error::Precondition("grid needs cols, rows >= 1".into()));
    }
    if !(spec.h > 0.0) {
        return Err(Error::Precondition("grid spacing must be positive".into()));
    }
    let xs = Axis::uniform(spec.cols, spec.h, spec.origin.0);
    let ys = Axis::uniform(spec.rows, spec.h, spec.origin.1);
    build_tensor_grid(&xs, &ys, &spec.weights, scale)
}

/// Builds a 4-connected tensor grid over two axes with per-vertex density.
pub fn build_tensor_grid(xs: &Axis, ys: &Axis, weights: &[f64], scale: Scale) -> Result<Space> {
    let (cols, rows) = (xs.len(), ys.len());
    if cols == 0 || rows == 0 {
        return Err(Error::Precondition("grid needs at least one point per axis".into()));
    }
    if weights.len() != cols * rows {
        return Err(Error::Precondition(format!(
            "expected {} weights, got {}",
            cols * rows,
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::Precondition(format!("invalid density {w}")));
    }
    let id = |c: usize, r: usize| r * cols + c;
    let mut measure = Vec::with_capacity(cols * rows);
    for r in 0..rows {
        for c in 0..cols {
            measure.push(scale.quantize(weights[id(c, r)] * xs.dual[c] * ys.dual[r])?);
        }
    }
    let mut edges = Vec::with_capacity(2 * cols * rows);
    for r in 0..rows {
        for c in 0..cols {
            let u = id(c, r);
            if c + 1 < cols {
                let v = id(c + 1, r);
                let cap = ys.dual[r] * (weights[u] + weights[v]) / 2.0;
                edges.push(Edge {
                    u,
                    v,
                    capacity: scale.quantize(cap)?,
                    length: scale.quantize(xs.coords[c + 1] - xs.coords[c])?,
                });
            }
            if r + 1 < rows {
                let v = id(c, r + 1);
                let cap = xs.dual[c] * (weights[u] + weights[v]) / 2.0;
                edges.push(Edge {
                    u,
                    v,
                    capacity: scale.quantize(cap)?,
                    length: scale.quantize(ys.coords[r + 1] - ys.coords[r])?,
                });
            }
        }
    }
    let chart = Chart {
        cols,
        rows,
        vertices: (0..cols * rows).collect(),
        xs: xs.coords.clone(),
        ys: ys.coords.clone(),
    };
    Space::new(scale, measure, edges, vec![chart])
}

/// Path graph with the given masses and uniform edge capacity and length.
pub fn build_path(masses: &[f64], capacity: f64, length: f64, scale: Scale) -> Result<Space> {
    let measure = masses
        .iter()
        .map(|&m| scale.quantize(m))
        .collect::<Result<Vec<_>>>()?;
    let cap = scale.quantize(capacity)?;
    let len = scale.quantize(length)?;
    let edges = (1..masses.len())
        .map(|i| Edge {
            u: i - 1,
            v: i,
            capacity: cap,
            length: len,
        })
        .collect();
    let chart = Chart {
        cols: masses.len(),
        rows: 1,
        vertices: (0..masses.len()).collect(),
        xs: (0..masses.len()).map(|i| i as f64 * length).collect(),
        ys: vec![0.0],
    };
    Space::new(scale, measure, edges, vec![chart])
}

/// Quotient of the disjoint union of `spaces` by the identification groups.
///
/// Each group lists `(space index, vertex)` pairs from distinct spaces. Merged
/// vertices sum their masses; parallel edges created by gluing sum their
/// capacities and keep the shorter length; edges collapsed to a point are
/// dropped.
pub fn glue(spaces: &[Space], groups: &[Vec<(usize, VertexId)>]) -> Result<Space> {
    let first = spaces
        .first()
        .ok_or_else(|| Error::Precondition("glue needs at least one space".into()))?;
    let scale = first.scale();
    if spaces.iter().any(|s| s.scale() != scale) {
        return Err(Error::CapacityScale("glued spaces must share a scale".into()));
    }
    let mut offset = Vec::with_capacity(spaces.len());
    let mut total = 0usize;
    for s in spaces {
        offset.push(total);
        total += s.vertex_count();
    }

    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut in_group = vec![false; total];
    for group in groups {
        let mut seen_spaces = Vec::with_capacity(group.len());
        for &(si, v) in group {
            let s = spaces
                .get(si)
                .ok_or_else(|| Error::Precondition(format!("no source space {si}")))?;
            s.check_vertex(v)?;
            if seen_spaces.contains(&si) {
                return Err(Error::Precondition(format!(
                    "identification group references space {si} twice"
                )));
            }
            seen_spaces.push(si);
            let g = offset[si] + v;
            if in_group[g] {
                return Err(Error::ConflictingIdentification { space: si, vertex: v });
            }
            in_group[g] = true;
        }
        if let Some(&(s0, v0)) = group.first() {
            let root = find(&mut parent, offset[s0] + v0);
            for &(si, v) in &group[1..] {
                let r = find(&mut parent, offset[si] + v);
                parent[r] = root;
            }
        }
    }

    let mut new_id = vec![usize::MAX; total];
    let mut root_id: HashMap<usize, usize> = HashMap::new();
    let mut measure: Vec<i64> = Vec::new();
    for g in 0..total {
        let r = find(&mut parent, g);
        let id = *root_id.entry(r).or_insert_with(|| {
            measure.push(0);
            measure.len() - 1
        });
        new_id[g] = id;
    }
    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    for (si, s) in spaces.iter().enumerate() {
        for v in 0..s.vertex_count() {
            let id = new_id[offset[si] + v];
            measure[id] = measure[id]
                .checked_add(s.measure_raw(v))
                .ok_or_else(|| Error::CapacityScale("glued measure overflows".into()))?;
        }
        for e in s.edges() {
            let (a, b) = (new_id[offset[si] + e.u], new_id[offset[si] + e.v]);
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            match edge_index.get(&key) {
                Some(&i) => {
                    edges[i].capacity += e.capacity;
                    edges[i].length = edges[i].length.min(e.length);
                }
                None => {
                    edge_index.insert(key, edges.len());
                    edges.push(Edge {
                        u: key.0,
                        v: key.1,
                        capacity: e.capacity,
                        length: e.length,
                    });
                }
            }
        }
    }
    let charts = spaces
        .iter()
        .enumerate()
        .flat_map(|(si, s)| {
            let off = offset[si];
            let new_id = &new_id;
            s.charts().iter().map(move |c| Chart {
                vertices: c.vertices.iter().map(|&v| new_id[off + v]).collect(),
                ..c.clone()
            })
        })
        .collect();
    Space::new(scale, measure, edges, charts)
}

/// Shortest-path distances, in stored length units. `None` is unreachable.
#[derive(Clone, Debug, PartialEq)]
pub struct Distances {
    scale: Scale,
    raw: Vec<Option<i64>>,
}

impl Distances {
    pub fn raw(&self, v: VertexId) -> Option<i64> {
        self.raw[v]
    }

    pub fn get(&self, v: VertexId) -> Option<Dyadic> {
        self.raw[v].map(|d| self.scale.value(d))
    }

    pub fn get_f64(&self, v: VertexId) -> f64 {
        self.get(v).map_or(f64::INFINITY, |d| d.to_f64())
    }

    pub fn as_slice(&self) -> &[Option<i64>] {
        &self.raw
    }
}

/// Multi-source Dijkstra over edge lengths. With `within`, paths may only
/// enter vertices of that set (sources are always starting points).
pub fn graph_distance(space: &Space, sources: &VertexSet, within: Option<&VertexSet>) -> Result<Distances> {
    if sources.universe_len() != space.vertex_count() {
        return Err(Error::Precondition("source set belongs to another space".into()));
    }
    if sources.is_empty() {
        return Err(Error::Precondition("graph_distance needs a nonempty source set".into()));
    }
    let n = space.vertex_count();
    let mut dist: Vec<Option<i64>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    for s in sources.iter() {
        dist[s] = Some(0);
        heap.push(Reverse((0i64, s)));
    }
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u] != Some(d) {
            continue;
        }
        for &(v, ei) in space.neighbors(u) {
            if within.is_some_and(|w| !w.contains(v)) {
                continue;
            }
            let nd = d + space.edges()[ei].length;
            if dist[v].is_none_or(|old| nd < old) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    Ok(Distances {
        scale: space.scale(),
        raw: dist,
    })
}

/// Vertices outside `omega` joined by an edge to a vertex of `omega`.
pub fn exterior_boundary(space: &Space, omega: &VertexSet) -> VertexSet {
    let mut out = space.empty_set();
    for e in space.edges() {
        match (omega.contains(e.u), omega.contains(e.v)) {
            (true, false) => out.insert(e.v),
            (false, true) => out.insert(e.u),
            _ => {}
        }
    }
    out
}
