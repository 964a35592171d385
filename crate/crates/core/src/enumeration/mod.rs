//! Exact enumeration of self-avoiding walks and polygons from the origin.
//!
//! The search tree is cut at a fixed prefix depth; every prefix is then
//! explored by an independent backtracking worker and the per-worker tallies
//! are summed. All tallies are integers, so the result does not depend on
//! the number of threads or on scheduling.
//!
//! Polygon searches prune any step that lands farther from the origin than
//! the number of steps left, which confines them to the ball of radius
//! `n_max / 2`.

pub mod naive;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tessellation::PlanarMap;

/// Depth at which the search tree is split into parallel tasks.
pub const PREFIX_LEN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountKind {
    Saw,
    Sap,
    SawToVertex,
}

/// Exact counts indexed by length, `values[n]` for `0 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub kind: CountKind,
    pub values: Vec<BigUint>,
}

impl CountTable {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> &BigUint {
        &self.values[n]
    }

    /// Counts as `f64`, for bound comparisons.
    pub fn as_f64(&self, n: usize) -> f64 {
        biguint_to_f64(&self.values[n])
    }
}

pub(crate) fn biguint_to_f64(x: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// A self-avoiding polygon through the origin, identified by its edge set.
///
/// `cycle` lists the vertices starting at the origin, oriented so that the
/// second vertex has a smaller index than the last one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sap {
    edges: Vec<(u32, u32)>,
    cycle: Vec<u32>,
}

impl Sap {
    /// Builds the canonical form of a closed walk `cycle[0] .. cycle[n-1] cycle[0]`.
    pub fn from_cycle(cycle: &[u32]) -> Sap {
        let n = cycle.len();
        let mut cyc = cycle.to_vec();
        if n > 2 && cyc[1] > cyc[n - 1] {
            cyc[1..].reverse();
        }
        let mut edges: Vec<(u32, u32)> = (0..n)
            .map(|i| {
                let (a, b) = (cyc[i], cyc[(i + 1) % n]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        Sap { edges, cycle: cyc }
    }

    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    pub fn cycle(&self) -> &[u32] {
        &self.cycle
    }

    /// Sorted undirected edges `(min, max)`.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn contains_edge(&self, u: u32, v: u32) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }
}

/// Endpoint-distance histogram of the walks of one length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Displacement {
    pub n: usize,
    /// `histogram[r]` walks end at distance `r` from the origin.
    pub histogram: Vec<BigUint>,
}

impl Displacement {
    pub fn total(&self) -> BigUint {
        self.histogram.iter().sum()
    }

    /// Fraction of walks ending at distance at least `eps * n`.
    pub fn probability_at_least(&self, eps: f64) -> f64 {
        let threshold = eps * self.n as f64;
        let total = biguint_to_f64(&self.total());
        if total == 0.0 {
            return 0.0;
        }
        let far: BigUint = self
            .histogram
            .iter()
            .enumerate()
            .filter(|(r, _)| *r as f64 >= threshold - 1e-9)
            .map(|(_, c)| c)
            .sum();
        biguint_to_f64(&far) / total
    }
}

fn check_walk_length(map: &PlanarMap, n: usize) -> Result<()> {
    if n as u64 > u64::from(map.complete_within()) {
        return Err(Error::BeyondRadius {
            n: n as u32,
            needed: n as u32,
            available: map.complete_within(),
        });
    }
    Ok(())
}

/// Polygons of length `n` never leave the ball of radius `n / 2`, so they
/// only need the vertices of that ball to be complete.
pub fn sap_radius_needed(n: usize) -> u32 {
    (n / 2) as u32 + 1
}

fn check_polygon_length(map: &PlanarMap, n: usize) -> Result<()> {
    let needed = sap_radius_needed(n);
    if n >= 3 && needed > map.complete_within() {
        return Err(Error::BeyondRadius {
            n: n as u32,
            needed,
            available: map.complete_within(),
        });
    }
    Ok(())
}

struct Walker<'a> {
    map: &'a PlanarMap,
    visited: Vec<bool>,
    path: Vec<u32>,
}

impl<'a> Walker<'a> {
    fn new(map: &'a PlanarMap) -> Self {
        Walker {
            map,
            visited: vec![false; map.vertex_count()],
            path: Vec::with_capacity(64),
        }
    }

    fn enter(&mut self, prefix: &[u32]) {
        for &x in prefix {
            self.visited[x as usize] = true;
        }
        self.path.clear();
        self.path.extend_from_slice(prefix);
    }

    fn leave(&mut self) {
        for &x in &self.path {
            self.visited[x as usize] = false;
        }
        self.path.clear();
    }

    /// Extends walks ending at `v` (of length `depth`) up to `n_max`,
    /// reporting each new endpoint with its length.
    fn saws<F: FnMut(usize, u32)>(&mut self, v: u32, depth: usize, n_max: usize, on_end: &mut F) {
        if depth >= n_max {
            return;
        }
        let map = self.map;
        let nb = map.neighbours(v);
        if depth + 1 == n_max {
            for &w in nb {
                if !self.visited[w as usize] {
                    on_end(n_max, w);
                }
            }
            return;
        }
        for &w in nb {
            if self.visited[w as usize] {
                continue;
            }
            on_end(depth + 1, w);
            self.visited[w as usize] = true;
            self.saws(w, depth + 1, n_max, on_end);
            self.visited[w as usize] = false;
        }
    }

    /// Extends the pruned walk in `self.path` (ending at `v`) and reports
    /// every closing step back to the origin. Walks are only extended while
    /// they are shorter than `stop`.
    fn saps<F: FnMut(&[u32])>(&mut self, v: u32, stop: usize, n_max: usize, on_cycle: &mut F) {
        let map = self.map;
        let origin = map.origin();
        let depth = self.path.len() - 1;
        let remaining = n_max - depth;
        for &w in map.neighbours(v) {
            if w == origin {
                if depth + 1 >= 3 {
                    on_cycle(&self.path);
                }
                continue;
            }
            if depth + 1 >= stop
                || self.visited[w as usize]
                || map.layer(w) as usize > remaining - 1
            {
                continue;
            }
            self.visited[w as usize] = true;
            self.path.push(w);
            self.saps(w, stop, n_max, on_cycle);
            self.path.pop();
            self.visited[w as usize] = false;
        }
    }
}

/// Runs a SAW search, folding `(length, endpoint)` events into accumulators.
fn par_saws<A, M, S, R>(map: &PlanarMap, n_max: usize, make: M, step: S, merge: R) -> A
where
    A: Send,
    M: Fn() -> A + Sync + Send,
    S: Fn(&mut A, usize, u32) + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    let origin = map.origin();
    let p = n_max.min(PREFIX_LEN);
    let mut head = make();
    let mut prefixes: Vec<Vec<u32>> = Vec::new();
    {
        let mut w = Walker::new(map);
        w.enter(&[origin]);
        collect_saw_prefixes(&mut w, origin, p, &mut |len, y, path: &[u32]| {
            step(&mut head, len, y);
            if len == p && n_max > p {
                let mut pre = path.to_vec();
                pre.push(y);
                prefixes.push(pre);
            }
        });
    }
    if prefixes.is_empty() {
        return head;
    }
    let tail = prefixes
        .par_iter()
        .map_init(
            || Walker::new(map),
            |w, pre| {
                let mut acc = make();
                w.enter(pre);
                let last = *pre.last().unwrap();
                w.saws(last, p, n_max, &mut |len, y| step(&mut acc, len, y));
                w.leave();
                acc
            },
        )
        .reduce(&make, &merge);
    merge(head, tail)
}

fn collect_saw_prefixes<F: FnMut(usize, u32, &[u32])>(
    w: &mut Walker<'_>,
    v: u32,
    p: usize,
    on_end: &mut F,
) {
    let depth = w.path.len() - 1;
    if depth >= p {
        return;
    }
    let map = w.map;
    for &y in map.neighbours(v) {
        if w.visited[y as usize] {
            continue;
        }
        on_end(depth + 1, y, &w.path);
        w.visited[y as usize] = true;
        w.path.push(y);
        collect_saw_prefixes(w, y, p, on_end);
        w.path.pop();
        w.visited[y as usize] = false;
    }
}

/// Runs a SAP search. `visit` sees every closed walk `o .. v` (closing edge
/// `v -> o` implied), in both orientations.
fn par_sap_walks<A, M, S, R>(map: &PlanarMap, n_max: usize, make: M, visit: S, merge: R) -> A
where
    A: Send,
    M: Fn() -> A + Sync + Send,
    S: Fn(&mut A, &[u32]) + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    let origin = map.origin();
    let mut head = make();
    if n_max < 3 {
        return head;
    }
    let q = n_max.min(PREFIX_LEN);
    let mut w = Walker::new(map);
    w.enter(&[origin]);
    // Closed walks of length <= q are found here; walks of exactly q steps
    // become tasks.
    w.saps(origin, q, n_max, &mut |path| visit(&mut head, path));
    let mut prefixes: Vec<Vec<u32>> = Vec::new();
    if n_max > q {
        collect_sap_prefixes(&mut w, origin, q, n_max, &mut prefixes);
    }
    w.leave();
    if prefixes.is_empty() {
        return head;
    }
    let tail = prefixes
        .par_iter()
        .map_init(
            || Walker::new(map),
            |w, pre| {
                let mut acc = make();
                w.enter(pre);
                let last = *pre.last().unwrap();
                w.saps(last, n_max, n_max, &mut |path| visit(&mut acc, path));
                w.leave();
                acc
            },
        )
        .reduce(&make, &merge);
    merge(head, tail)
}

fn collect_sap_prefixes(
    w: &mut Walker<'_>,
    v: u32,
    q: usize,
    n_max: usize,
    out: &mut Vec<Vec<u32>>,
) {
    let depth = w.path.len() - 1;
    if depth == q {
        out.push(w.path.clone());
        return;
    }
    let map = w.map;
    let remaining = n_max - depth;
    for &y in map.neighbours(v) {
        if y == map.origin() || w.visited[y as usize] || map.layer(y) as usize > remaining - 1 {
            continue;
        }
        w.visited[y as usize] = true;
        w.path.push(y);
        collect_sap_prefixes(w, y, q, n_max, out);
        w.path.pop();
        w.visited[y as usize] = false;
    }
}

fn add_vecs(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

fn to_big(values: Vec<u64>) -> Vec<BigUint> {
    values.into_iter().map(BigUint::from).collect()
}

/// `c_n` for `0 <= n <= n_max`.
pub fn count_saws(map: &PlanarMap, n_max: usize) -> Result<CountTable> {
    check_walk_length(map, n_max)?;
    let mut counts = par_saws(
        map,
        n_max,
        || vec![0u64; n_max + 1],
        |acc, len, _| acc[len] += 1,
        add_vecs,
    );
    counts[0] = 1;
    Ok(CountTable {
        kind: CountKind::Saw,
        values: to_big(counts),
    })
}

/// `p_n` for `0 <= n <= n_max`: polygons through the origin, each counted
/// once as an edge set.
pub fn count_saps(map: &PlanarMap, n_max: usize) -> Result<CountTable> {
    check_polygon_length(map, n_max)?;
    let returns = closed_returns(map, n_max);
    let values = returns
        .into_iter()
        .map(|r| {
            debug_assert!(r % 2 == 0, "closed returns come in pairs");
            BigUint::from(r / 2)
        })
        .collect();
    Ok(CountTable {
        kind: CountKind::Sap,
        values,
    })
}

/// Closed self-avoiding returns to the origin by length (each polygon is
/// seen twice, once per direction).
pub fn closed_returns(map: &PlanarMap, n_max: usize) -> Vec<u64> {
    par_sap_walks(
        map,
        n_max,
        || vec![0u64; n_max + 1],
        |acc, path| acc[path.len()] += 1,
        add_vecs,
    )
}

/// `c_n(o, y)` for every vertex `y` of the map.
pub fn endpoint_counts(map: &PlanarMap, n: usize) -> Result<Vec<u64>> {
    check_walk_length(map, n)?;
    if n == 0 {
        let mut v = vec![0u64; map.vertex_count()];
        v[map.origin() as usize] = 1;
        return Ok(v);
    }
    let size = map.vertex_count();
    Ok(par_saws(
        map,
        n,
        || vec![0u64; size],
        |acc, len, y| {
            if len == n {
                acc[y as usize] += 1
            }
        },
        add_vecs,
    ))
}

/// `c_n(o, y)`: walks of length `n` from the origin ending at `y`.
pub fn count_saws_to(map: &PlanarMap, n: usize, y: u32) -> Result<BigUint> {
    if y as usize >= map.vertex_count() {
        return Err(Error::NoSuchVertex(y));
    }
    check_walk_length(map, n)?;
    if n == 0 {
        return Ok(BigUint::from(u8::from(y == map.origin())));
    }
    let count = par_saws(
        map,
        n,
        || 0u64,
        |acc, len, end| {
            if len == n && end == y {
                *acc += 1
            }
        },
        |a, b| a + b,
    );
    Ok(BigUint::from(count))
}

/// Displacement histograms for every length `0..=n_max` in one search.
pub fn displacement_table(map: &PlanarMap, n_max: usize) -> Result<Vec<Displacement>> {
    check_walk_length(map, n_max)?;
    let width = n_max + 1;
    let flat = par_saws(
        map,
        n_max,
        || vec![0u64; width * width],
        |acc, len, y| acc[len * width + map.layer(y) as usize] += 1,
        add_vecs,
    );
    let mut out = Vec::with_capacity(width);
    for n in 0..width {
        let mut histogram: Vec<BigUint> = flat[n * width..(n + 1) * width]
            .iter()
            .map(|&c| BigUint::from(c))
            .collect();
        if n == 0 {
            histogram[0] = BigUint::from(1u8);
        }
        histogram.truncate(n + 1);
        out.push(Displacement { n, histogram });
    }
    Ok(out)
}

pub fn displacement_distribution(map: &PlanarMap, n: usize) -> Result<Displacement> {
    Ok(displacement_table(map, n)?
        .pop()
        .expect("table has n + 1 rows"))
}

/// Folds over every polygon through the origin of length `<= n_max`, each
/// seen exactly once in canonical orientation (as a vertex cycle).
pub fn fold_sap_cycles<A, M, S, R>(
    map: &PlanarMap,
    n_max: usize,
    make: M,
    visit: S,
    merge: R,
) -> Result<A>
where
    A: Send,
    M: Fn() -> A + Sync + Send,
    S: Fn(&mut A, &[u32]) + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    check_polygon_length(map, n_max)?;
    Ok(par_sap_walks(
        map,
        n_max,
        make,
        |acc, path| {
            if path[1] < path[path.len() - 1] {
                visit(acc, path)
            }
        },
        merge,
    ))
}

/// Every polygon through the origin of length `<= n_max`, sorted by length
/// and then by edge set.
pub fn enumerate_saps(map: &PlanarMap, n_max: usize) -> Result<Vec<Sap>> {
    let mut saps = fold_sap_cycles(
        map,
        n_max,
        Vec::new,
        |acc: &mut Vec<Sap>, cycle| acc.push(Sap::from_cycle(cycle)),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )?;
    saps.sort_by(|a, b| (a.len(), &a.edges).cmp(&(b.len(), &b.edges)));
    Ok(saps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tessellation::{build_ball, TessellationParams};

    fn map(d: u32, k: u32, r: u32) -> PlanarMap {
        build_ball(TessellationParams::new(d, k).unwrap(), r).unwrap()
    }

    #[test]
    fn first_counts_of_h73() {
        let m = map(7, 3, 4);
        let c = count_saws(&m, 4).unwrap();
        assert_eq!(c.values[0], BigUint::from(1u8));
        assert_eq!(c.values[1], BigUint::from(7u8));
        assert_eq!(c.values[2], BigUint::from(42u8));
    }

    #[test]
    fn zero_length_tables() {
        let m = map(7, 3, 1);
        assert_eq!(count_saws(&m, 0).unwrap().values, vec![BigUint::from(1u8)]);
        assert_eq!(count_saps(&m, 0).unwrap().values, vec![BigUint::from(0u8)]);
        let d = displacement_distribution(&m, 0).unwrap();
        assert_eq!(d.histogram, vec![BigUint::from(1u8)]);
    }

    #[test]
    fn refuses_lengths_beyond_the_complete_region() {
        let m = map(7, 3, 3);
        assert!(matches!(count_saws(&m, 4), Err(Error::BeyondRadius { .. })));
        assert!(matches!(count_saps(&m, 6), Err(Error::BeyondRadius { .. })));
        assert!(count_saps(&m, 5).is_ok());
        assert!(matches!(
            count_saws_to(&m, 2, 10_000_000),
            Err(Error::NoSuchVertex(_))
        ));
    }

    #[test]
    fn triangles_at_the_origin_are_the_shortest_polygons() {
        let m = map(7, 3, 3);
        let saps = enumerate_saps(&m, 3).unwrap();
        let faces: Vec<Vec<(u32, u32)>> = m
            .faces()
            .filter(|f| f.contains(&0))
            .map(|f| {
                let mut e: Vec<(u32, u32)> = (0..3)
                    .map(|i| (f[i].min(f[(i + 1) % 3]), f[i].max(f[(i + 1) % 3])))
                    .collect();
                e.sort_unstable();
                e
            })
            .collect();
        assert_eq!(saps.len(), 7);
        assert_eq!(faces.len(), 7);
        for sap in &saps {
            assert!(faces.iter().any(|f| f == sap.edges()));
        }
    }

    #[test]
    fn walks_to_the_origin_do_not_exist() {
        let m = map(4, 5, 4);
        for n in 1..=4 {
            assert_eq!(count_saws_to(&m, n, 0).unwrap(), BigUint::from(0u8));
        }
    }

    #[test]
    fn sap_canonical_form_ignores_direction() {
        let a = Sap::from_cycle(&[0, 5, 9, 3]);
        let b = Sap::from_cycle(&[0, 3, 9, 5]);
        assert_eq!(a, b);
        assert_eq!(a.cycle(), &[0, 3, 9, 5]);
        assert!(a.contains_edge(9, 5));
        assert!(!a.contains_edge(0, 9));
    }
}
