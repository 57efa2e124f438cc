//! Applying a lopsp-operation to a plane map.
//!
//! The operation is cut open along a path `v1 -> v0 -> v2` and one copy of
//! the resulting disc is glued into every double chamber of the map (the
//! two chambers on either side of a vertex-face segment). The glued complex
//! is handled as a chamber system and contracted back to a map.

use std::collections::VecDeque;

use thiserror::Error;

use crate::lopsp::LopspOperation;
use crate::map::{theta, ChamberSystem, Dart, PlaneMap, TriangleComplex, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("invalid cut-path: {0}")]
    InvalidPath(&'static str),
}

/// A walk from `v1` to `v0` (the first `split` darts) followed by a walk
/// from `v0` to `v2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutPath {
    pub darts: Vec<Dart>,
    pub split: usize,
}

impl CutPath {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn vertices(&self, m: &PlaneMap) -> Vec<Vertex> {
        let mut vs = Vec::with_capacity(self.darts.len() + 1);
        if let Some(&d) = self.darts.first() {
            vs.push(m.tail(d));
        }
        vs.extend(self.darts.iter().map(|&d| m.head(d)));
        vs
    }

    pub fn validate(&self, o: &LopspOperation) -> Result<(), ApplyError> {
        let m = &o.map;
        let [v0, v1, v2] = o.marks;
        if self.split == 0 || self.split >= self.darts.len() {
            return Err(ApplyError::InvalidPath("both segments must be non-empty"));
        }
        if self.darts.iter().any(|&d| d >= m.dart_count()) {
            return Err(ApplyError::InvalidPath("dart out of range"));
        }
        if self.darts.windows(2).any(|w| m.head(w[0]) != m.tail(w[1])) {
            return Err(ApplyError::InvalidPath("darts do not form a walk"));
        }
        let vs = self.vertices(m);
        if vs[0] != v1 || vs[self.split] != v0 || vs[vs.len() - 1] != v2 {
            return Err(ApplyError::InvalidPath("wrong endpoints"));
        }
        let mut seen = vec![false; m.vertex_count()];
        for v in vs {
            if std::mem::replace(&mut seen[v], true) {
                return Err(ApplyError::InvalidPath("vertices repeat"));
            }
        }
        Ok(())
    }
}

/// A shortest cut-path (fewest edges in total), from a unit-capacity
/// minimum cost flow sending two paths out of `v0`, one to `v1` and one to
/// `v2`.
pub fn shortest_cut_path(o: &LopspOperation) -> CutPath {
    let m = &o.map;
    let [v0, v1, v2] = o.marks;
    let n = m.vertex_count();
    // Node 2v is the entry of v and 2v + 1 its exit; 2n is the sink.
    let sink = 2 * n;
    let mut g = Flow::new(2 * n + 1);
    for v in 0..n {
        if v != v0 {
            g.arc(2 * v, 2 * v + 1, 0, usize::MAX);
        }
    }
    let mut dart_arc = vec![usize::MAX; m.dart_count()];
    for d in 0..m.dart_count() {
        dart_arc[d] = g.arc(2 * m.tail(d) + 1, 2 * m.head(d), 1, d);
    }
    g.arc(2 * v1 + 1, sink, 0, usize::MAX);
    g.arc(2 * v2 + 1, sink, 0, usize::MAX);
    for _ in 0..2 {
        assert!(g.augment(2 * v0 + 1, sink), "operation is not 2-connected");
    }
    // Follow the flow out of v0 twice.
    let mut used = vec![false; g.arcs.len()];
    let mut walks = Vec::new();
    for _ in 0..2 {
        let mut darts = Vec::new();
        let mut node = 2 * v0 + 1;
        while node != sink {
            let a = g.out[node]
                .iter()
                .copied()
                .find(|&a| a % 2 == 0 && g.arcs[a].cap == 0 && !used[a])
                .expect("flow is conserved");
            used[a] = true;
            if g.arcs[a].tag != usize::MAX {
                darts.push(g.arcs[a].tag);
            }
            node = g.arcs[a].to;
        }
        walks.push(darts);
    }
    debug_assert!(walks
        .iter()
        .all(|w| w.iter().all(|&d| dart_arc[d] != usize::MAX)));
    let (to_v1, to_v2) = if m.head(*walks[0].last().unwrap()) == v1 {
        (walks.swap_remove(0), walks.swap_remove(0))
    } else {
        let a = walks.swap_remove(0);
        (walks.swap_remove(0), a)
    };
    let mut darts: Vec<Dart> = to_v1.iter().rev().map(|&d| theta(d)).collect();
    let split = darts.len();
    darts.extend(to_v2);
    let p = CutPath { darts, split };
    debug_assert!(p.validate(o).is_ok());
    p
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i32,
    cost: i64,
    tag: usize,
}

/// Residual graph with unit capacities; arc `a ^ 1` is the reverse of `a`.
struct Flow {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl Flow {
    fn new(n: usize) -> Self {
        Flow {
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
        }
    }

    fn arc(&mut self, from: usize, to: usize, cost: i64, tag: usize) -> usize {
        let a = self.arcs.len();
        self.arcs.push(Arc {
            to,
            cap: 1,
            cost,
            tag,
        });
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
            tag,
        });
        self.out[from].push(a);
        self.out[to].push(a + 1);
        a
    }

    /// One unit along a cheapest residual path (Bellman-Ford, queue based).
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let n = self.out.len();
        let mut dist = vec![i64::MAX; n];
        let mut via = vec![usize::MAX; n];
        let mut queued = vec![false; n];
        let mut queue = VecDeque::from([s]);
        dist[s] = 0;
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            for &a in &self.out[u] {
                let Arc { to, cap, cost, .. } = self.arcs[a];
                if cap > 0 && dist[u] + cost < dist[to] {
                    dist[to] = dist[u] + cost;
                    via[to] = a;
                    if !queued[to] {
                        queued[to] = true;
                        queue.push_back(to);
                    }
                }
            }
        }
        if dist[t] == i64::MAX {
            return false;
        }
        let mut v = t;
        while v != s {
            let a = via[v];
            self.arcs[a].cap -= 1;
            self.arcs[a ^ 1].cap += 1;
            v = self.arcs[a ^ 1].to;
        }
        true
    }
}

/// Which segment of the cut-path a side lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Segment {
    V0V1,
    V0V2,
}

/// A triangle side on the cut-path: its segment and whether the triangle is
/// left of the path (oriented `v1 -> v0 -> v2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathSide {
    pub segment: Segment,
    pub left: bool,
}

/// The operation cut open along a path: a disc of `2k` triangles whose
/// boundary consists of two copies of the path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    /// Triangles of the operation; sides on the path are unglued.
    pub complex: TriangleComplex,
    /// Neighbour across every side in the uncut operation.
    pub uncut: Vec<[(usize, usize); 3]>,
    pub sides: Vec<[Option<PathSide>; 3]>,
    pub path: CutPath,
}

/// Cuts `o` along `p`.
pub fn cut(o: &LopspOperation, p: &CutPath) -> Result<Patch, ApplyError> {
    p.validate(o)?;
    let m = &o.map;
    let (mut complex, corners) = TriangleComplex::from_triangulation(m, &o.colour);
    let mut segment_of = vec![None; m.edge_count()];
    for (i, &d) in p.darts.iter().enumerate() {
        let seg = if i < p.split {
            Segment::V0V1
        } else {
            Segment::V0V2
        };
        segment_of[d / 2] = Some((seg, d));
    }
    let mut uncut = Vec::with_capacity(complex.len());
    let mut sides = Vec::with_capacity(complex.len());
    for (t, tri) in complex.tris.iter_mut().enumerate() {
        uncut.push(tri.adj.map(|a| a.expect("closed triangulation")));
        let mut s = [None; 3];
        for j in 0..3 {
            let Some((segment, d)) = segment_of[tri.tag[j] / 2] else {
                continue;
            };
            let (a, b) = (corners[t][(j + 1) % 3], corners[t][(j + 2) % 3]);
            debug_assert!((a, b) == (m.tail(d), m.head(d)) || (b, a) == (m.tail(d), m.head(d)));
            s[j] = Some(PathSide {
                segment,
                left: (a, b) == (m.tail(d), m.head(d)),
            });
            tri.adj[j] = None;
        }
        sides.push(s);
    }
    Ok(Patch {
        complex,
        uncut,
        sides,
        path: p.clone(),
    })
}

impl Patch {
    pub fn chamber_count(&self) -> usize {
        self.complex.len()
    }

    /// The disc as a map with one outer face, with vertex colours.
    pub fn to_map(&self) -> (PlaneMap, Vec<u8>) {
        let (m, colour, _, _) = self.complex.to_map();
        (m, colour)
    }

    pub fn boundary_length(&self) -> usize {
        self.sides.iter().flatten().filter(|s| s.is_some()).count()
    }
}

/// `o(m)`, using a shortest cut-path.
pub fn apply(o: &LopspOperation, m: &PlaneMap) -> PlaneMap {
    apply_with_path(o, m, &shortest_cut_path(o)).expect("shortest cut-path is valid")
}

pub fn apply_with_path(
    o: &LopspOperation,
    m: &PlaneMap,
    p: &CutPath,
) -> Result<PlaneMap, ApplyError> {
    let patch = cut(o, p)?;
    Ok(glue(&patch, m).to_map())
}

/// The chamber system of the glued complex. Chamber `d * T + t` is
/// triangle `t` of the patch inside the double chamber of dart `d`.
pub fn glue(patch: &Patch, m: &PlaneMap) -> ChamberSystem {
    let tn = patch.complex.len();
    let n = m.dart_count() * tn;
    let mut s = [vec![0; n], vec![0; n], vec![0; n]];
    let mut positive = vec![false; n];
    let phi_inv = |d: Dart| m.sigma_inv(theta(d));
    for d in 0..m.dart_count() {
        for (t, tri) in patch.complex.tris.iter().enumerate() {
            let c = d * tn + t;
            positive[c] = matches!(tri.colour, [0, 1, 2] | [1, 2, 0] | [2, 0, 1]);
            for j in 0..3 {
                let (u, _) = patch.uncut[t][j];
                let dd = match patch.sides[t][j] {
                    None => d,
                    Some(PathSide {
                        segment: Segment::V0V1,
                        ..
                    }) => theta(d),
                    Some(PathSide {
                        segment: Segment::V0V2,
                        left: false,
                    }) => m.phi(d),
                    Some(PathSide {
                        segment: Segment::V0V2,
                        left: true,
                    }) => phi_inv(d),
                };
                s[tri.colour[j] as usize][c] = dd * tn + u;
            }
        }
    }
    ChamberSystem { s, positive }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lopsp::{enumerate_ops, expand, predecoration_params, Dedup};
    use crate::plane_map_gen::{generate_maps, join};
    use crate::quad_gen::{generate, GenConfig};

    fn ops(k: usize) -> Vec<LopspOperation> {
        let (n, _) = predecoration_params(k);
        let mut v = Vec::new();
        generate(&GenConfig::new(n), |q| {
            enumerate_ops(q, k, Dedup::Full, |p| v.push(expand(p).unwrap()));
        });
        v
    }

    fn small_maps() -> Vec<PlaneMap> {
        let mut v = vec![PlaneMap::tetrahedron(), PlaneMap::cube()];
        for e in 1..=3 {
            generate_maps(e, |m| v.push(m.clone()));
        }
        v
    }

    #[test]
    fn identity_path_and_patch() {
        let id = LopspOperation::identity();
        let p = shortest_cut_path(&id);
        assert_eq!(p.len(), 2);
        let patch = cut(&id, &p).unwrap();
        assert_eq!(patch.chamber_count(), 2);
        assert_eq!(patch.boundary_length(), 4);
        let (disc, _) = patch.to_map();
        assert_eq!(disc.vertex_count(), 4);
    }

    #[test]
    fn identity_and_join() {
        let id = LopspOperation::identity();
        let j = LopspOperation::join();
        for m in small_maps() {
            assert!(apply(&id, &m).is_isomorphic(&m));
            assert!(apply(&j, &m).is_isomorphic(&join(&m)));
        }
        assert!(apply(&id, &PlaneMap::dodecahedron()).is_isomorphic(&PlaneMap::dodecahedron()));
        let c = apply(&j, &PlaneMap::cube());
        assert_eq!(
            (c.vertex_count(), c.edge_count(), c.face_count()),
            (14, 24, 12)
        );
    }

    #[test]
    fn identity_keeps_orientation() {
        let id = LopspOperation::identity();
        let mut chiral = Vec::new();
        generate_maps(5, |m| {
            if !m.canonical_form(None).has_reflection() {
                chiral.push(m.clone());
            }
        });
        assert!(!chiral.is_empty());
        for m in &chiral {
            let r = apply(&id, m);
            assert!(r.is_isomorphic_oriented(m));
            assert!(!r.is_isomorphic_oriented(&m.mirror()));
        }
    }

    #[test]
    fn dual() {
        let d = LopspOperation::dual();
        let cube = apply(&d, &PlaneMap::cube());
        assert_eq!((cube.vertex_count(), cube.face_count()), (6, 8));
        assert!(apply(&d, &cube).is_isomorphic(&PlaneMap::cube()));
    }

    #[test]
    fn gyro_on_tetrahedron_is_dodecahedron() {
        let g = LopspOperation::gyro();
        assert_eq!(g.inflation_factor(), 5);
        let r = apply(&g, &PlaneMap::tetrahedron());
        assert_eq!(
            (r.vertex_count(), r.edge_count(), r.face_count()),
            (20, 30, 12)
        );
        assert!(r.faces().sizes().iter().all(|&s| s == 5));
        assert!(r.is_isomorphic(&PlaneMap::dodecahedron()));
    }

    #[test]
    fn patch_sizes() {
        for k in 1..=6 {
            for o in ops(k) {
                let p = shortest_cut_path(&o);
                let patch = cut(&o, &p).unwrap();
                assert_eq!(patch.chamber_count(), 2 * k);
                assert_eq!(patch.boundary_length(), 2 * p.len());
                let (disc, _) = patch.to_map();
                assert_eq!(disc.genus(), 0);
            }
        }
    }

    #[test]
    fn edge_multiplication() {
        let maps = small_maps();
        for k in 1..=5 {
            for o in ops(k) {
                for m in &maps {
                    let r = apply(&o, m);
                    assert_eq!(r.edge_count(), k * m.edge_count());
                    assert_eq!(r.genus(), 0);
                }
            }
        }
    }
}
