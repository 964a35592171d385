//! Plain recursive enumeration with no pruning, prefix splitting or
//! parallelism. Used as an oracle for the optimized searches.

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::tessellation::PlanarMap;

fn extend(map: &PlanarMap, path: &mut Vec<u32>, n_max: usize, visit: &mut dyn FnMut(&[u32])) {
    visit(path);
    if path.len() > n_max {
        return;
    }
    let v = *path.last().unwrap();
    for &w in map.neighbours(v) {
        if !path.contains(&w) {
            path.push(w);
            extend(map, path, n_max, visit);
            path.pop();
        }
    }
}

/// Calls `visit` on every self-avoiding walk from the origin with at most
/// `n_max` steps (as a vertex list).
pub fn for_each_walk(map: &PlanarMap, n_max: usize, visit: &mut dyn FnMut(&[u32])) {
    let mut path = vec![map.origin()];
    extend(map, &mut path, n_max, visit);
}

pub fn count_saws(map: &PlanarMap, n_max: usize) -> Vec<BigUint> {
    let mut counts = vec![0u64; n_max + 1];
    for_each_walk(map, n_max, &mut |p| counts[p.len() - 1] += 1);
    counts.into_iter().map(BigUint::from).collect()
}

/// Edge sets of every polygon through the origin of length `<= n_max`.
/// Needs the map complete up to distance `n_max - 1`.
pub fn sap_edge_sets(map: &PlanarMap, n_max: usize) -> BTreeSet<Vec<(u32, u32)>> {
    let origin = map.origin();
    let mut out = BTreeSet::new();
    if n_max < 3 {
        return out;
    }
    for_each_walk(map, n_max - 1, &mut |p| {
        let last = *p.last().unwrap();
        if p.len() >= 3 && map.neighbours(last).contains(&origin) {
            let mut edges: Vec<(u32, u32)> = p
                .windows(2)
                .map(|e| (e[0].min(e[1]), e[0].max(e[1])))
                .collect();
            edges.push((origin.min(last), origin.max(last)));
            edges.sort_unstable();
            out.insert(edges);
        }
    });
    out
}

pub fn count_saps(map: &PlanarMap, n_max: usize) -> Vec<BigUint> {
    let mut counts = vec![0u64; n_max + 1];
    for edges in sap_edge_sets(map, n_max) {
        counts[edges.len()] += 1;
    }
    counts.into_iter().map(BigUint::from).collect()
}

/// Walks of exactly `n` steps ending at `y`.
pub fn count_saws_to(map: &PlanarMap, n: usize, y: u32) -> u64 {
    let mut count = 0;
    for_each_walk(map, n, &mut |p| {
        if p.len() == n + 1 && *p.last().unwrap() == y {
            count += 1;
        }
    });
    count
}
