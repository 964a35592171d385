//! Finite balls of the regular hyperbolic tessellation H(d,k) as planar
//! combinatorial maps.
//!
//! The builder works purely combinatorially. It grows a topological disk by
//! gluing k-gons onto the outside of the current boundary cycle, completing
//! the vertices of one BFS layer at a time. A vertex with `d - 1` incident
//! faces has exactly one free corner left, so the face glued there is forced
//! to run along both of its boundary edges; otherwise the face leaves the
//! boundary through a fresh edge. The construction is deterministic and the
//! vertices are numbered in creation order, with the origin at index 0.
//!
//! Rotations are stored clockwise. Walking a face means following a dart
//! `u -> v` with `v -> w`, where `w` is the successor of `u` in the rotation
//! of `v`.

mod layers;
mod validate;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use layers::{
    class_counts, layers, neighbour_profile, vertex_class, LayerAssignment, LayerScheme,
    VertexClass,
};
pub use validate::{validate_map, ValidationReport};

/// Default cap on the number of vertices a single build may create.
pub const DEFAULT_VERTEX_BUDGET: usize = 5_000_000;

/// Marker for a dart with no face on its left (the outer side of the disk).
pub const NO_FACE: u32 = u32::MAX;

/// The pair (d, k): `d` k-gons meet at every vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TessellationParams {
    d: u32,
    k: u32,
}

impl TessellationParams {
    pub fn new(d: u32, k: u32) -> Result<Self> {
        if d < 3 || k < 3 {
            return Err(Error::DegenerateParams { d, k });
        }
        let product = u64::from(d - 2) * u64::from(k - 2);
        if product <= 4 {
            return Err(Error::NotHyperbolic { d, k, product });
        }
        Ok(Self { d, k })
    }

    /// Vertex degree.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// Face degree.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// `(d-2)(k-2) - 4`, strictly positive for hyperbolic pairs.
    pub fn curvature_excess(&self) -> i64 {
        i64::from(self.d - 2) * i64::from(self.k - 2) - 4
    }
}

impl std::fmt::Display for TessellationParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "H({},{})", self.d, self.k)
    }
}

/// A finite disk of H(d,k) around the origin, stored as a rotation system.
///
/// Neighbour lists are kept in compressed form; the neighbours of `v` are
/// listed clockwise. For an interior vertex the list is cyclic. For a vertex
/// on the rim of the disk the list is linear: consecutive entries bound a
/// face, and there is no face between the last and the first entry.
#[derive(Debug, Clone)]
pub struct PlanarMap {
    params: TessellationParams,
    radius: u32,
    complete_within: u32,
    offsets: Vec<u32>,
    neighbours: Vec<u32>,
    twin: Vec<u32>,
    dart_face: Vec<u32>,
    layer: Vec<u32>,
    complete: Vec<bool>,
    faces: Vec<u32>,
}

/// Serializable form of a map, used by `dump-map`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapDump {
    pub d: u32,
    pub k: u32,
    pub radius: u32,
    pub vertices: Vec<DumpVertex>,
    pub faces: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DumpVertex {
    pub id: u32,
    pub layer: u32,
    pub rotation: Vec<u32>,
}

/// Builds the ball of the given radius with the default vertex budget.
pub fn build_ball(params: TessellationParams, radius: u32) -> Result<PlanarMap> {
    build_ball_with_budget(params, radius, DEFAULT_VERTEX_BUDGET)
}

/// Builds a disk in which every vertex at distance `< radius` from the
/// origin has its full neighbourhood and all of its faces. Vertices at
/// distance `<= radius` are therefore all present, with exact layers.
pub fn build_ball_with_budget(
    params: TessellationParams,
    radius: u32,
    budget: usize,
) -> Result<PlanarMap> {
    let mut builder = Builder::new(params, budget);
    let mut layer_sizes: Vec<usize> = Vec::new();
    for level in 0..radius {
        let dist = builder.bfs();
        let todo: Vec<u32> = (0..builder.vertex_count() as u32)
            .filter(|&v| dist[v as usize] == level)
            .collect();
        layer_sizes.push(todo.len());
        for v in todo {
            match builder.complete(v) {
                Ok(()) => {}
                Err(Error::VertexBudget { .. }) => {
                    let estimate = estimate_vertices(&layer_sizes, radius);
                    return Err(Error::VertexBudget {
                        budget,
                        radius,
                        level,
                        estimate,
                    });
                }
                Err(e) => return Err(e),
            }
        }
    }
    builder.finish(radius)
}

/// Rough vertex count of the ball of the given radius, extrapolated from the
/// layer sizes of a small ball. Cheap enough to call before committing to a
/// large build.
pub fn estimate_ball_size(params: TessellationParams, radius: u32) -> u64 {
    let probe = radius.min(5);
    match build_ball(params, probe) {
        Ok(map) => estimate_vertices(&map.layer_sizes(), radius),
        Err(_) => u64::MAX,
    }
}

/// Extrapolates the vertex count of a ball from the layers seen so far.
fn estimate_vertices(layer_sizes: &[usize], radius: u32) -> u64 {
    let n = layer_sizes.len();
    let ratio = if n >= 2 && layer_sizes[n - 2] > 0 {
        layer_sizes[n - 1] as f64 / layer_sizes[n - 2] as f64
    } else {
        2.0
    }
    .max(1.0);
    let mut total: f64 = layer_sizes.iter().map(|&s| s as f64).sum();
    let mut last = *layer_sizes.last().unwrap_or(&1) as f64;
    for _ in n as u32..=radius {
        last *= ratio;
        total += last;
    }
    if total >= u64::MAX as f64 {
        u64::MAX
    } else {
        total.ceil() as u64
    }
}

/// Mutable disk used during construction. Each vertex owns `d` ring slots
/// holding its rotation; boundary vertices grow at either end of the ring.
struct Builder {
    d: usize,
    k: usize,
    params: TessellationParams,
    ring: Vec<u32>,
    head: Vec<u32>,
    len: Vec<u32>,
    closed: Vec<bool>,
    faces: Vec<u32>,
    budget: usize,
}

impl Builder {
    fn new(params: TessellationParams, budget: usize) -> Self {
        let d = params.d as usize;
        Builder {
            d,
            k: params.k as usize,
            params,
            ring: vec![0; d],
            head: vec![0],
            len: vec![0],
            closed: vec![false],
            faces: Vec::new(),
            budget,
        }
    }

    fn vertex_count(&self) -> usize {
        self.len.len()
    }

    fn new_vertex(&mut self) -> Result<u32> {
        let id = self.vertex_count();
        if id >= self.budget {
            return Err(Error::VertexBudget {
                budget: self.budget,
                radius: 0,
                level: 0,
                estimate: 0,
            });
        }
        self.ring.extend(std::iter::repeat_n(0, self.d));
        self.head.push(0);
        self.len.push(0);
        self.closed.push(false);
        Ok(id as u32)
    }

    fn slot(&self, v: u32, i: u32) -> usize {
        v as usize * self.d + ((self.head[v as usize] + i) as usize % self.d)
    }

    fn first(&self, v: u32) -> u32 {
        self.ring[self.slot(v, 0)]
    }

    fn last(&self, v: u32) -> u32 {
        self.ring[self.slot(v, self.len[v as usize] - 1)]
    }

    fn push_back(&mut self, v: u32, x: u32) {
        debug_assert!((self.len[v as usize] as usize) < self.d);
        let s = self.slot(v, self.len[v as usize]);
        self.ring[s] = x;
        self.len[v as usize] += 1;
    }

    fn push_front(&mut self, v: u32, x: u32) {
        debug_assert!((self.len[v as usize] as usize) < self.d);
        let vi = v as usize;
        self.head[vi] = (self.head[vi] + self.d as u32 - 1) % self.d as u32;
        let s = self.slot(v, 0);
        self.ring[s] = x;
        self.len[vi] += 1;
    }

    /// A boundary vertex with a single free corner.
    fn saturated(&self, v: u32) -> bool {
        !self.closed[v as usize] && self.len[v as usize] as usize == self.d
    }

    fn adjacent(&self, u: u32, v: u32) -> bool {
        (0..self.len[u as usize]).any(|i| self.ring[self.slot(u, i)] == v)
    }

    fn seed_face(&mut self, o: u32) -> Result<()> {
        let mut chain = Vec::with_capacity(self.k);
        chain.push(o);
        for _ in 1..self.k {
            chain.push(self.new_vertex()?);
        }
        let k = self.k;
        for i in 1..k {
            let pred = chain[i - 1];
            let succ = chain[(i + 1) % k];
            self.push_back(chain[i], pred);
            self.push_back(chain[i], succ);
        }
        self.push_back(o, chain[k - 1]);
        self.push_back(o, chain[1]);
        self.faces.extend_from_slice(&chain);
        Ok(())
    }

    /// Glues one face onto the outer side of the boundary dart `v -> first(v)`.
    fn add_face_outside(&mut self, v: u32) -> Result<()> {
        let mut seg: VecDeque<u32> = VecDeque::with_capacity(self.k);
        seg.push_back(v);
        seg.push_back(self.first(v));
        while let Some(&end) = seg.back() {
            if !self.saturated(end) {
                break;
            }
            let next = self.first(end);
            if Some(&next) == seg.front() || seg.len() > self.k {
                return Err(self.corrupt("face closing wrapped around the boundary"));
            }
            seg.push_back(next);
        }
        while let Some(&start) = seg.front() {
            if !self.saturated(start) {
                break;
            }
            let prev = self.last(start);
            if Some(&prev) == seg.back() || seg.len() > self.k {
                return Err(self.corrupt("face closing wrapped around the boundary"));
            }
            seg.push_front(prev);
        }
        let m = seg.len() - 1;
        if m >= self.k {
            return Err(self.corrupt("boundary segment longer than a face"));
        }
        let s0 = seg[0];
        let sm = seg[m];
        for &v in seg.range(1..m) {
            self.closed[v as usize] = true;
        }
        let fresh = self.k - m - 1;
        let mut face: Vec<u32> = seg.iter().copied().collect();
        if fresh == 0 {
            if self.adjacent(s0, sm) {
                return Err(self.corrupt("face closing would duplicate an edge"));
            }
            self.push_back(sm, s0);
            self.push_front(s0, sm);
        } else {
            let start = face.len();
            for _ in 0..fresh {
                face.push(self.new_vertex()?);
            }
            for i in start..face.len() {
                let pred = face[i - 1];
                let succ = if i + 1 < face.len() { face[i + 1] } else { s0 };
                self.push_back(face[i], pred);
                self.push_back(face[i], succ);
            }
            self.push_back(sm, face[start]);
            self.push_front(s0, face[face.len() - 1]);
        }
        self.faces.extend_from_slice(&face);
        Ok(())
    }

    fn complete(&mut self, v: u32) -> Result<()> {
        if self.len[v as usize] == 0 {
            self.seed_face(v)?;
        }
        let mut guard = 0;
        while !self.closed[v as usize] {
            self.add_face_outside(v)?;
            guard += 1;
            if guard > self.d {
                return Err(self.corrupt("vertex did not close after d faces"));
            }
        }
        Ok(())
    }

    fn corrupt(&self, what: &str) -> Error {
        Error::Construction(format!("{} while building {}", what, self.params))
    }

    fn bfs(&self) -> Vec<u32> {
        let n = self.vertex_count();
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        dist[0] = 0;
        queue.push_back(0u32);
        while let Some(u) = queue.pop_front() {
            for i in 0..self.len[u as usize] {
                let w = self.ring[self.slot(u, i)];
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn finish(self, radius: u32) -> Result<PlanarMap> {
        let n = self.vertex_count();
        let layer = self.bfs();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbours = Vec::with_capacity(self.len.iter().map(|&l| l as usize).sum());
        offsets.push(0u32);
        for v in 0..n as u32 {
            for i in 0..self.len[v as usize] {
                neighbours.push(self.ring[self.slot(v, i)]);
            }
            offsets.push(neighbours.len() as u32);
        }
        let complete_within = (0..n)
            .filter(|&v| !self.closed[v])
            .map(|v| layer[v])
            .min()
            .unwrap_or(radius);
        let mut map = PlanarMap {
            params: self.params,
            radius,
            complete_within,
            offsets,
            neighbours,
            twin: Vec::new(),
            dart_face: Vec::new(),
            layer,
            complete: self.closed,
            faces: self.faces,
        };
        map.index_darts()?;
        Ok(map)
    }
}

impl PlanarMap {
    pub fn params(&self) -> TessellationParams {
        self.params
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Every vertex with layer below this value has degree `d` and `d`
    /// closed incident faces.
    pub fn complete_within(&self) -> u32 {
        self.complete_within
    }

    pub fn origin(&self) -> u32 {
        0
    }

    pub fn vertex_count(&self) -> usize {
        self.layer.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbours.len() / 2
    }

    pub fn face_count(&self) -> usize {
        self.faces.len() / self.params.k as usize
    }

    pub fn dart_count(&self) -> usize {
        self.neighbours.len()
    }

    /// Clockwise neighbours of `v`.
    #[inline]
    pub fn neighbours(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.neighbours[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    /// First dart index of `v`; the darts of `v` are consecutive.
    #[inline]
    pub fn dart_offset(&self, v: u32) -> usize {
        self.offsets[v as usize] as usize
    }

    /// Graph distance from the origin (exact for layers up to `complete_within`).
    #[inline]
    pub fn layer(&self, v: u32) -> u32 {
        self.layer[v as usize]
    }

    pub fn layers(&self) -> &[u32] {
        &self.layer
    }

    #[inline]
    pub fn is_complete(&self, v: u32) -> bool {
        self.complete[v as usize]
    }

    pub fn face(&self, f: u32) -> &[u32] {
        let k = self.params.k as usize;
        &self.faces[f as usize * k..(f as usize + 1) * k]
    }

    pub fn faces(&self) -> impl Iterator<Item = &[u32]> {
        self.faces.chunks_exact(self.params.k as usize)
    }

    /// Index of the dart `u -> v`, if the edge exists.
    pub fn dart(&self, u: u32, v: u32) -> Option<usize> {
        self.neighbours(u)
            .iter()
            .position(|&w| w == v)
            .map(|i| self.dart_offset(u) + i)
    }

    #[inline]
    pub fn twin(&self, dart: usize) -> usize {
        self.twin[dart] as usize
    }

    /// Head vertex of a dart.
    #[inline]
    pub fn dart_head(&self, dart: usize) -> u32 {
        self.neighbours[dart]
    }

    /// Face to the walking side of a dart, if it exists.
    #[inline]
    pub fn dart_face(&self, dart: usize) -> Option<u32> {
        match self.dart_face[dart] {
            NO_FACE => None,
            f => Some(f),
        }
    }

    /// Face traversed by the dart `u -> v`.
    pub fn face_of(&self, u: u32, v: u32) -> Option<u32> {
        self.dart(u, v).and_then(|d| self.dart_face(d))
    }

    /// Number of vertices in each layer `0..=complete_within`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let top = self.complete_within as usize;
        let mut sizes = vec![0usize; top + 1];
        for &l in &self.layer {
            if (l as usize) <= top {
                sizes[l as usize] += 1;
            }
        }
        sizes
    }

    pub fn adjacent(&self, u: u32, v: u32) -> bool {
        self.neighbours(u).contains(&v)
    }

    /// Copy of the map with the edge `{u, v}` removed. Faces through the
    /// edge stay in the face list, so the result is deliberately broken;
    /// used to exercise the validator.
    pub fn without_edge(&self, u: u32, v: u32) -> PlanarMap {
        let n = self.vertex_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbours = Vec::with_capacity(self.neighbours.len());
        offsets.push(0u32);
        for x in 0..n as u32 {
            for &y in self.neighbours(x) {
                if !((x == u && y == v) || (x == v && y == u)) {
                    neighbours.push(y);
                }
            }
            offsets.push(neighbours.len() as u32);
        }
        let mut map = PlanarMap {
            offsets,
            neighbours,
            twin: Vec::new(),
            dart_face: Vec::new(),
            ..self.clone()
        };
        map.twin = map.compute_twins();
        map.dart_face = vec![NO_FACE; map.neighbours.len()];
        for f in 0..map.face_count() as u32 {
            let face = map.face(f).to_vec();
            for i in 0..face.len() {
                if let Some(d) = map.dart(face[i], face[(i + 1) % face.len()]) {
                    map.dart_face[d] = f;
                }
            }
        }
        map
    }

    pub fn to_dump(&self) -> MapDump {
        MapDump {
            d: self.params.d,
            k: self.params.k,
            radius: self.radius,
            vertices: (0..self.vertex_count() as u32)
                .map(|v| DumpVertex {
                    id: v,
                    layer: self.layer(v),
                    rotation: self.neighbours(v).to_vec(),
                })
                .collect(),
            faces: self.faces().map(|f| f.to_vec()).collect(),
        }
    }

    fn compute_twins(&self) -> Vec<u32> {
        let mut twin = vec![u32::MAX; self.neighbours.len()];
        for u in 0..self.vertex_count() as u32 {
            let base = self.dart_offset(u);
            for (i, &v) in self.neighbours(u).iter().enumerate() {
                if let Some(back) = self.dart(v, u) {
                    twin[base + i] = back as u32;
                }
            }
        }
        twin
    }

    fn index_darts(&mut self) -> Result<()> {
        self.twin = self.compute_twins();
        if self.twin.contains(&u32::MAX) {
            return Err(Error::Construction("asymmetric rotation system".into()));
        }
        let k = self.params.k as usize;
        let mut dart_face = vec![NO_FACE; self.neighbours.len()];
        for f in 0..self.face_count() {
            for i in 0..k {
                let u = self.faces[f * k + i];
                let v = self.faces[f * k + (i + 1) % k];
                let d = self
                    .dart(u, v)
                    .ok_or_else(|| Error::Construction(format!("face {f} uses a missing edge")))?;
                if dart_face[d] != NO_FACE {
                    return Err(Error::Construction(format!(
                        "dart {u}->{v} lies on two faces"
                    )));
                }
                dart_face[d] = f as u32;
            }
        }
        self.dart_face = dart_face;
        Ok(())
    }
}
