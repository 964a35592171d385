//! Interior structure of a polygon through the origin: which faces it
//! encloses, its inner chords and its inner vertex boundary, plus the
//! integer identities and the isoperimetric inequality they satisfy.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::enumeration::{fold_sap_cycles, Sap};
use crate::error::{Error, Result};
use crate::tessellation::{PlanarMap, TessellationParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SapGeometry {
    pub sap: Sap,
    /// Faces enclosed by the polygon, sorted.
    pub interior_faces: Vec<u32>,
    /// Enclosed vertices not on the polygon, sorted.
    pub interior_vertices: Vec<u32>,
    /// Enclosed edges with both ends on the polygon, as `(min, max)`.
    pub chords: Vec<(u32, u32)>,
    /// Interior vertices on an enclosed face that touches the polygon.
    pub inner_boundary: Vec<u32>,
    /// Directed enclosed edges leaving a polygon vertex; chords count twice.
    pub m: usize,
    /// Edge-sides with both ends off the polygon, summed over the enclosed
    /// faces that touch it.
    pub boundary_length: usize,
}

impl SapGeometry {
    pub fn len(&self) -> usize {
        self.sap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sap.is_empty()
    }

    /// Whether the inner vertex boundary induces a connected subgraph.
    pub fn inner_boundary_connected(&self, map: &PlanarMap) -> bool {
        let Some(&start) = self.inner_boundary.first() else {
            return false;
        };
        let inside = |v: u32| self.inner_boundary.binary_search(&v).is_ok();
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in map.neighbours(u) {
                if inside(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.inner_boundary.len()
    }
}

/// A face is on the map boundary when one of its corners is incomplete.
fn touches_boundary(map: &PlanarMap, face: u32) -> bool {
    map.face(face).iter().any(|&v| !map.is_complete(v))
}

struct Side {
    seen: HashSet<u32>,
    queue: VecDeque<u32>,
    boundary: bool,
}

impl Side {
    fn new(map: &PlanarMap, start: Option<u32>) -> Side {
        let mut side = Side {
            seen: HashSet::new(),
            queue: VecDeque::new(),
            boundary: false,
        };
        match start {
            Some(f) => {
                side.boundary = touches_boundary(map, f);
                side.seen.insert(f);
                side.queue.push_back(f);
            }
            None => side.boundary = true,
        }
        side
    }

    /// Expands one face. Returns false once the side has nothing left.
    fn step(&mut self, map: &PlanarMap, sap: &Sap) -> bool {
        if self.boundary {
            return false;
        }
        let Some(f) = self.queue.pop_front() else {
            return false;
        };
        let face = map.face(f);
        let k = face.len();
        for i in 0..k {
            let (a, b) = (face[i], face[(i + 1) % k]);
            if sap.contains_edge(a, b) {
                continue;
            }
            match map.face_of(b, a) {
                Some(g) => {
                    if self.seen.insert(g) {
                        if touches_boundary(map, g) {
                            self.boundary = true;
                            return false;
                        }
                        self.queue.push_back(g);
                    }
                }
                None => {
                    self.boundary = true;
                    return false;
                }
            }
        }
        true
    }

    fn finished(&self) -> bool {
        !self.boundary && self.queue.is_empty()
    }
}

/// Finds the enclosed faces by growing both sides of the polygon in the
/// dual graph in lockstep. The side that runs out of faces without reaching
/// the edge of the map is the bounded one.
fn interior_faces(map: &PlanarMap, sap: &Sap) -> Result<Vec<u32>> {
    let cyc = sap.cycle();
    let (a, b) = (cyc[0], cyc[1]);
    let mut left = Side::new(map, map.face_of(a, b));
    let mut right = Side::new(map, map.face_of(b, a));
    loop {
        if left.finished() {
            break;
        }
        if right.finished() {
            std::mem::swap(&mut left, &mut right);
            break;
        }
        let l = left.step(map, sap);
        let r = right.step(map, sap);
        if !l && !r && !left.finished() && !right.finished() {
            return Err(Error::InteriorUncertified(format!(
                "both sides of the polygon {:?} reach the edge of the map",
                sap.cycle()
            )));
        }
    }
    let mut faces: Vec<u32> = left.seen.into_iter().collect();
    faces.sort_unstable();
    Ok(faces)
}

pub fn analyze_sap(map: &PlanarMap, sap: &Sap) -> Result<SapGeometry> {
    let faces = interior_faces(map, sap)?;
    let on_p: HashSet<u32> = sap.cycle().iter().copied().collect();
    let face_set: HashSet<u32> = faces.iter().copied().collect();

    let mut interior = HashSet::new();
    let mut chords = HashSet::new();
    let mut inner_boundary = HashSet::new();
    let mut boundary_length = 0;
    for &f in &faces {
        let face = map.face(f);
        let k = face.len();
        let touches_p = face.iter().any(|v| on_p.contains(v));
        for i in 0..k {
            let (x, y) = (face[i], face[(i + 1) % k]);
            match (on_p.contains(&x), on_p.contains(&y)) {
                (true, true) if !sap.contains_edge(x, y) => {
                    chords.insert((x.min(y), x.max(y)));
                }
                (false, false) if touches_p => boundary_length += 1,
                _ => {}
            }
            if !on_p.contains(&x) {
                interior.insert(x);
                if touches_p {
                    inner_boundary.insert(x);
                }
            }
        }
    }

    let mut m = 0;
    for &x in sap.cycle() {
        for &y in map.neighbours(x) {
            if sap.contains_edge(x, y) {
                continue;
            }
            if map.face_of(x, y).is_some_and(|g| face_set.contains(&g)) {
                m += 1;
            }
        }
    }

    let sorted = |s: HashSet<u32>| {
        let mut v: Vec<u32> = s.into_iter().collect();
        v.sort_unstable();
        v
    };
    let mut chords: Vec<(u32, u32)> = chords.into_iter().collect();
    chords.sort_unstable();
    Ok(SapGeometry {
        sap: sap.clone(),
        interior_faces: faces,
        interior_vertices: sorted(interior),
        chords,
        inner_boundary: sorted(inner_boundary),
        m,
        boundary_length,
    })
}

/// `m (k-2) - (2|P| - 2k - c |I|)`, where `c = (d-2)(k-2) - 4`.
pub fn check_edges_enum(geom: &SapGeometry, params: TessellationParams) -> i64 {
    let k = params.k() as i64;
    let p = geom.len() as i64;
    let i = geom.interior_vertices.len() as i64;
    geom.m as i64 * (k - 2) - (2 * p - 2 * k - params.curvature_excess() * i)
}

/// `n' - (|P| - 2k - c |I|)` for chordless polygons whose inner vertex
/// boundary is nonempty and connected.
pub fn check_no_chord_case(
    map: &PlanarMap,
    geom: &SapGeometry,
    params: TessellationParams,
) -> Result<i64> {
    if !geom.chords.is_empty() {
        return Err(Error::PreconditionUnmet(format!(
            "polygon has {} inner chords",
            geom.chords.len()
        )));
    }
    if geom.inner_boundary.is_empty() {
        return Err(Error::PreconditionUnmet(
            "inner vertex boundary is empty".into(),
        ));
    }
    if !geom.inner_boundary_connected(map) {
        return Err(Error::PreconditionUnmet(
            "inner vertex boundary is disconnected".into(),
        ));
    }
    let k = params.k() as i64;
    let p = geom.len() as i64;
    let i = geom.interior_vertices.len() as i64;
    Ok(geom.boundary_length as i64 - (p - 2 * k - params.curvature_excess() * i))
}

/// `(|P| - k) - [(k-2)|ch| + ((d-2)(k-2)-3)|dP|]`; never negative.
pub fn check_main_lemma(geom: &SapGeometry, params: TessellationParams) -> i64 {
    let k = params.k() as i64;
    let p = geom.len() as i64;
    (p - k)
        - ((k - 2) * geom.chords.len() as i64
            + (params.curvature_excess() + 1) * geom.inner_boundary.len() as i64)
}

/// One CSV row per polygon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SapRecord {
    pub length: usize,
    pub interior: usize,
    pub chords: usize,
    pub inner_boundary: usize,
    pub m: usize,
    pub edges_enum_residual: i64,
    pub main_lemma_margin: i64,
    /// Present only when the chordless case applies.
    pub no_chord_residual: Option<i64>,
}

pub fn record(map: &PlanarMap, geom: &SapGeometry) -> SapRecord {
    let params = map.params();
    SapRecord {
        length: geom.len(),
        interior: geom.interior_vertices.len(),
        chords: geom.chords.len(),
        inner_boundary: geom.inner_boundary.len(),
        m: geom.m,
        edges_enum_residual: check_edges_enum(geom, params),
        main_lemma_margin: check_main_lemma(geom, params),
        no_chord_residual: check_no_chord_case(map, geom, params).ok(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub count: u64,
    pub min_margin: Option<i64>,
    /// Polygons attaining margin 0.
    pub tight: u64,
    pub edges_enum_failures: u64,
    pub no_chord_checked: u64,
    pub no_chord_failures: u64,
    pub max_interior: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub by_length: BTreeMap<usize, LengthSummary>,
    /// Polygons whose interior sits in the origin's interior set (must be 0).
    pub origin_inside: u64,
}

impl GeometrySummary {
    fn add(&mut self, rec: &SapRecord, origin_inside: bool) {
        let s = self.by_length.entry(rec.length).or_default();
        s.count += 1;
        s.min_margin = Some(
            s.min_margin
                .map_or(rec.main_lemma_margin, |m| m.min(rec.main_lemma_margin)),
        );
        s.tight += u64::from(rec.main_lemma_margin == 0);
        s.edges_enum_failures += u64::from(rec.edges_enum_residual != 0);
        if let Some(r) = rec.no_chord_residual {
            s.no_chord_checked += 1;
            s.no_chord_failures += u64::from(r != 0);
        }
        s.max_interior = s.max_interior.max(rec.interior);
        self.origin_inside += u64::from(origin_inside);
    }

    fn merge(mut self, other: GeometrySummary) -> GeometrySummary {
        for (len, o) in other.by_length {
            let s = self.by_length.entry(len).or_default();
            s.count += o.count;
            s.min_margin = match (s.min_margin, o.min_margin) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            s.tight += o.tight;
            s.edges_enum_failures += o.edges_enum_failures;
            s.no_chord_checked += o.no_chord_checked;
            s.no_chord_failures += o.no_chord_failures;
            s.max_interior = s.max_interior.max(o.max_interior);
        }
        self.origin_inside += other.origin_inside;
        self
    }

    pub fn total(&self) -> u64 {
        self.by_length.values().map(|s| s.count).sum()
    }

    pub fn min_margin(&self) -> Option<i64> {
        self.by_length.values().filter_map(|s| s.min_margin).min()
    }

    pub fn edges_enum_failures(&self) -> u64 {
        self.by_length.values().map(|s| s.edges_enum_failures).sum()
    }

    pub fn no_chord_failures(&self) -> u64 {
        self.by_length.values().map(|s| s.no_chord_failures).sum()
    }

    /// True when every identity holds and every margin is nonnegative.
    pub fn all_hold(&self) -> bool {
        self.edges_enum_failures() == 0
            && self.no_chord_failures() == 0
            && self.min_margin().is_none_or(|m| m >= 0)
            && self.origin_inside == 0
    }
}

/// Analyses every polygon through the origin up to `n_max`. With `keep`,
/// the per-polygon records are returned as well, sorted.
pub fn survey(
    map: &PlanarMap,
    n_max: usize,
    keep: bool,
) -> Result<(GeometrySummary, Vec<SapRecord>)> {
    type Acc = Result<(GeometrySummary, Vec<SapRecord>)>;
    let origin = map.origin();
    let (summary, mut records) = fold_sap_cycles(
        map,
        n_max,
        || -> Acc { Ok((GeometrySummary::default(), Vec::new())) },
        |acc: &mut Acc, cycle| {
            let Ok((summary, records)) = acc else { return };
            let sap = Sap::from_cycle(cycle);
            match analyze_sap(map, &sap) {
                Ok(geom) => {
                    let rec = record(map, &geom);
                    let inside = geom.interior_vertices.binary_search(&origin).is_ok();
                    summary.add(&rec, inside);
                    if keep {
                        records.push(rec);
                    }
                }
                Err(e) => *acc = Err(e),
            }
        },
        |a, b| {
            let (sa, mut ra) = a?;
            let (sb, rb) = b?;
            ra.extend(rb);
            Ok((sa.merge(sb), ra))
        },
    )??;
    records.sort_unstable_by(|a, b| {
        (a.length, a.interior, a.chords, a.inner_boundary, a.m)
            .cmp(&(b.length, b.interior, b.chords, b.inner_boundary, b.m))
            .then(a.main_lemma_margin.cmp(&b.main_lemma_margin))
    });
    Ok((summary, records))
}
