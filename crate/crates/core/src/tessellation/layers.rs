//! Concentric layer structures on a built map and the vertex classes that
//! drive the layered-walk recurrences.

use serde::{Deserialize, Serialize};

use super::PlanarMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerScheme {
    /// Layer n is the sphere of radius n around the origin.
    BallBoundary,
    /// Layer 1 is every vertex other than the origin on a face at the
    /// origin; layer n+1 collects the new vertices on faces at layer n.
    PolygonIncidence,
}

impl LayerScheme {
    pub fn name(&self) -> &'static str {
        match self {
            LayerScheme::BallBoundary => "ball-boundary",
            LayerScheme::PolygonIncidence => "polygon-incidence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerAssignment {
    pub scheme: LayerScheme,
    /// Layer of each vertex, `None` where the map is too small to decide.
    pub layer: Vec<Option<u32>>,
    /// Highest layer index whose membership is exact.
    pub defined_up_to: u32,
}

impl LayerAssignment {
    pub fn get(&self, v: u32) -> Option<u32> {
        self.layer[v as usize]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.defined_up_to as usize + 1];
        for l in self.layer.iter().flatten() {
            if *l <= self.defined_up_to {
                sizes[*l as usize] += 1;
            }
        }
        sizes
    }
}

pub fn layers(map: &PlanarMap, scheme: LayerScheme) -> LayerAssignment {
    match scheme {
        LayerScheme::BallBoundary => {
            let cw = map.complete_within();
            LayerAssignment {
                scheme,
                layer: map
                    .layers()
                    .iter()
                    .map(|&l| (l <= cw).then_some(l))
                    .collect(),
                defined_up_to: cw,
            }
        }
        LayerScheme::PolygonIncidence => polygon_layers(map),
    }
}

fn polygon_layers(map: &PlanarMap) -> LayerAssignment {
    let mut layer: Vec<Option<u32>> = vec![None; map.vertex_count()];
    layer[map.origin() as usize] = Some(0);
    let mut frontier = vec![map.origin()];
    let mut depth = 0u32;
    loop {
        if frontier.is_empty() || frontier.iter().any(|&v| !map.is_complete(v)) {
            break;
        }
        let mut next = Vec::new();
        for &v in &frontier {
            let base = map.dart_offset(v);
            for i in 0..map.degree(v) {
                let f = map
                    .dart_face(base + i)
                    .expect("complete vertices have all their faces");
                for &w in map.face(f) {
                    if layer[w as usize].is_none() {
                        layer[w as usize] = Some(depth + 1);
                        next.push(w);
                    }
                }
            }
        }
        next.sort_unstable();
        frontier = next;
        depth += 1;
    }
    // Layer `depth` was grown from a complete layer, so its membership is exact.
    let defined_up_to = depth;
    LayerAssignment {
        scheme: LayerScheme::PolygonIncidence,
        layer,
        defined_up_to,
    }
}

/// Neighbourhood classes used by the layered-walk recurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexClass {
    S1,
    S2,
    S3,
    S4,
    S5,
}

impl VertexClass {
    pub fn index(&self) -> usize {
        *self as usize
    }
}

/// Classifies `v` using the rules for H(7,3) with ball-boundary layers or
/// H(4,5) with polygon-incidence layers.
pub fn vertex_class(map: &PlanarMap, layers: &LayerAssignment, v: u32) -> Result<VertexClass> {
    if v as usize >= map.vertex_count() {
        return Err(Error::NoSuchVertex(v));
    }
    let p = map.params();
    match (p.d(), p.k(), layers.scheme) {
        (7, 3, LayerScheme::BallBoundary) => class_h73(map, layers, v),
        (4, 5, LayerScheme::PolygonIncidence) => class_h45(map, layers, v),
        (d, k, scheme) => Err(Error::NoClassification {
            d,
            k,
            scheme: scheme.name(),
        }),
    }
}

struct Local {
    previous: usize,
    same: Vec<u32>,
    next: usize,
}

fn local(map: &PlanarMap, layers: &LayerAssignment, v: u32) -> Result<Local> {
    let here = layers.get(v).ok_or(Error::ClassUndetermined(v))?;
    if !map.is_complete(v) || here + 1 > layers.defined_up_to {
        return Err(Error::ClassUndetermined(v));
    }
    let mut out = Local {
        previous: 0,
        same: Vec::new(),
        next: 0,
    };
    for &w in map.neighbours(v) {
        let lw = layers.get(w).ok_or(Error::ClassUndetermined(v))?;
        if lw + 1 == here {
            out.previous += 1;
        } else if lw == here {
            out.same.push(w);
        } else if lw == here + 1 {
            out.next += 1;
        }
    }
    Ok(out)
}

/// Numbers of previous-layer, same-layer and next-layer neighbours of `v`.
pub fn neighbour_profile(
    map: &PlanarMap,
    layers: &LayerAssignment,
    v: u32,
) -> Result<(usize, usize, usize)> {
    let l = local(map, layers, v)?;
    Ok((l.previous, l.same.len(), l.next))
}

fn class_h73(map: &PlanarMap, layers: &LayerAssignment, v: u32) -> Result<VertexClass> {
    if v == map.origin() {
        return Ok(VertexClass::S1);
    }
    let here = local(map, layers, v)?;
    match here.next {
        3 => Ok(VertexClass::S2),
        4 if here.same.len() == 2 => {
            let mut three = 0;
            for &w in &here.same {
                match local(map, layers, w)?.next {
                    3 => three += 1,
                    4 => {}
                    _ => return Err(Error::ClassUndetermined(v)),
                }
            }
            Ok(match three {
                0 => VertexClass::S3,
                1 => VertexClass::S4,
                _ => VertexClass::S5,
            })
        }
        _ => Err(Error::ClassUndetermined(v)),
    }
}

fn class_h45(map: &PlanarMap, layers: &LayerAssignment, v: u32) -> Result<VertexClass> {
    if v == map.origin() {
        return Ok(VertexClass::S1);
    }
    let here = local(map, layers, v)?;
    if here.next == 1 {
        return Ok(VertexClass::S2);
    }
    if here.next == 2 && here.same.len() == 2 {
        let mut both = true;
        for &w in &here.same {
            if local(map, layers, w)?.next != 1 {
                both = false;
            }
        }
        if both {
            return Ok(VertexClass::S3);
        }
    }
    Ok(VertexClass::S4)
}

/// Counts vertex classes per layer for every classifiable vertex.
pub fn class_counts(map: &PlanarMap, layers: &LayerAssignment) -> Result<Vec<[usize; 5]>> {
    let mut counts = vec![[0usize; 5]; layers.defined_up_to as usize + 1];
    for v in 0..map.vertex_count() as u32 {
        let Some(l) = layers.get(v) else { continue };
        match vertex_class(map, layers, v) {
            Ok(c) => counts[l as usize][c.index()] += 1,
            Err(Error::ClassUndetermined(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tessellation::{build_ball, TessellationParams};

    fn map(d: u32, k: u32, r: u32) -> PlanarMap {
        build_ball(TessellationParams::new(d, k).unwrap(), r).unwrap()
    }

    #[test]
    fn origin_is_layer_zero_in_both_schemes() {
        let m = map(4, 5, 4);
        for scheme in [LayerScheme::BallBoundary, LayerScheme::PolygonIncidence] {
            assert_eq!(layers(&m, scheme).get(0), Some(0));
        }
    }

    #[test]
    fn h45_first_polygon_layer_is_the_four_pentagons() {
        let m = map(4, 5, 4);
        let l = layers(&m, LayerScheme::PolygonIncidence);
        let mut expected: Vec<u32> = m
            .faces()
            .filter(|f| f.contains(&0))
            .flat_map(|f| f.iter().copied())
            .filter(|&v| v != 0)
            .collect();
        expected.sort_unstable();
        expected.dedup();
        assert_eq!(expected.len(), 12);
        let mut got: Vec<u32> = (0..m.vertex_count() as u32)
            .filter(|&v| l.get(v) == Some(1))
            .collect();
        got.sort_unstable();
        assert_eq!(got, expected);
    }

    #[test]
    fn h73_first_layer_is_all_s3() {
        let m = map(7, 3, 3);
        let l = layers(&m, LayerScheme::BallBoundary);
        assert_eq!(vertex_class(&m, &l, 0).unwrap(), VertexClass::S1);
        for &v in m.neighbours(0) {
            assert_eq!(vertex_class(&m, &l, v).unwrap(), VertexClass::S3);
        }
    }

    #[test]
    fn unsupported_pairs_have_no_classification() {
        let m = map(3, 7, 3);
        let l = layers(&m, LayerScheme::BallBoundary);
        assert!(matches!(
            vertex_class(&m, &l, 0),
            Err(Error::NoClassification { d: 3, k: 7, .. })
        ));
        let m = map(7, 3, 3);
        let l = layers(&m, LayerScheme::PolygonIncidence);
        assert!(vertex_class(&m, &l, 0).is_err());
    }
}
