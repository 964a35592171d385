use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::PlanarMap;

/// Diagnostics for the region of a map that is supposed to be complete.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Vertices below `complete_within` without degree `d` or without `d` faces.
    pub degree_violations: Vec<u32>,
    /// Faces that are not k-cycles of the rotation system.
    pub face_violations: Vec<u32>,
    /// Directed edges whose reverse is missing or duplicated.
    pub rotation_inconsistencies: Vec<(u32, u32)>,
    /// Vertices whose stored layer differs from a fresh BFS.
    pub layer_mismatches: Vec<u32>,
    /// `V - E + F - 1` over the faces incident to the complete region.
    pub euler_defect: i64,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.degree_violations.is_empty()
            && self.face_violations.is_empty()
            && self.rotation_inconsistencies.is_empty()
            && self.layer_mismatches.is_empty()
            && self.euler_defect == 0
    }
}

pub fn validate_map(map: &PlanarMap) -> ValidationReport {
    let d = map.params().d() as usize;
    let k = map.params().k() as usize;
    let cw = map.complete_within();
    let n = map.vertex_count() as u32;
    let mut report = ValidationReport::default();

    for v in 0..n {
        if map.layer(v) >= cw {
            continue;
        }
        let base = map.dart_offset(v);
        let faced = (0..map.degree(v))
            .filter(|&i| map.dart_face(base + i).is_some())
            .count();
        if map.degree(v) != d || faced != d {
            report.degree_violations.push(v);
        }
    }

    for u in 0..n {
        let nbrs = map.neighbours(u);
        for (i, &v) in nbrs.iter().enumerate() {
            let dup_here = nbrs[..i].contains(&v);
            let back = map.neighbours(v).iter().filter(|&&w| w == u).count();
            if dup_here || back != 1 || u == v {
                report.rotation_inconsistencies.push((u, v));
            }
        }
    }

    for (f, face) in map.faces().enumerate() {
        if !is_rotation_cycle(map, face, k) {
            report.face_violations.push(f as u32);
        }
    }

    let fresh = bfs_layers(map);
    for v in 0..n {
        if fresh[v as usize] != map.layer(v) {
            report.layer_mismatches.push(v);
        }
    }

    report.euler_defect = euler_defect(map);
    report
}

/// Checks that consecutive corners of `face` follow the successor rule.
fn is_rotation_cycle(map: &PlanarMap, face: &[u32], k: usize) -> bool {
    if face.len() != k {
        return false;
    }
    let distinct: HashSet<u32> = face.iter().copied().collect();
    if distinct.len() != k {
        return false;
    }
    (0..k).all(|i| {
        let a = face[i];
        let b = face[(i + 1) % k];
        let c = face[(i + 2) % k];
        let rot = map.neighbours(b);
        match rot.iter().position(|&x| x == a) {
            Some(p) => rot[(p + 1) % rot.len()] == c,
            None => false,
        }
    })
}

fn bfs_layers(map: &PlanarMap) -> Vec<u32> {
    let mut dist = vec![u32::MAX; map.vertex_count()];
    let mut queue = VecDeque::from([map.origin()]);
    dist[map.origin() as usize] = 0;
    while let Some(u) = queue.pop_front() {
        for &w in map.neighbours(u) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dist[u as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn euler_defect(map: &PlanarMap) -> i64 {
    let cw = map.complete_within();
    let mut faces: HashSet<u32> = HashSet::new();
    for v in 0..map.vertex_count() as u32 {
        if map.layer(v) < cw {
            let base = map.dart_offset(v);
            for i in 0..map.degree(v) {
                if let Some(f) = map.dart_face(base + i) {
                    faces.insert(f);
                }
            }
        }
    }
    if faces.is_empty() {
        return 0;
    }
    let mut vertices: HashSet<u32> = HashSet::new();
    let mut edges: HashSet<(u32, u32)> = HashSet::new();
    for &f in &faces {
        let face = map.face(f);
        for i in 0..face.len() {
            let a = face[i];
            let b = face[(i + 1) % face.len()];
            vertices.insert(a);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    vertices.len() as i64 - edges.len() as i64 + faces.len() as i64 - 1
}
