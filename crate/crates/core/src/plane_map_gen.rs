//! Plane maps from quadrangulations through the radial construction.
//!
//! `join` sends a map to the quadrangulation on its vertices and faces with
//! one edge per corner. `split` inverts it for a chosen colour class.

use crate::map::{theta, Dart, PlaneMap, Vertex};
use crate::quad_gen::{generate, GenConfig, GenStats};

/// The radial quadrangulation. Vertices `0..V` are the vertices of `m`,
/// vertex `V + i` is face `i` of `m.face_ids()`. Edge `d` joins the tail of
/// dart `d` to the face of the corner `(d, sigma d)`.
pub fn join(m: &PlaneMap) -> PlaneMap {
    let n = m.vertex_count();
    let (fid, _) = m.face_ids();
    let nd = m.dart_count();
    let mut sigma = vec![0; 2 * nd];
    let mut vertex_of = vec![0; 2 * nd];
    // Inverse of the face walk: the corner walked just before d.
    let mut phi_inv = vec![0; nd];
    for d in 0..nd {
        phi_inv[m.phi(d)] = d;
    }
    for d in 0..nd {
        sigma[2 * d] = 2 * m.sigma(d);
        vertex_of[2 * d] = m.tail(d);
        sigma[2 * d + 1] = 2 * phi_inv[d] + 1;
        vertex_of[2 * d + 1] = n + fid[d];
    }
    build(sigma, vertex_of)
}

fn build(sigma: Vec<Dart>, vertex_of: Vec<Vertex>) -> PlaneMap {
    let nv = vertex_of.iter().max().map_or(0, |&v| v + 1);
    let mut first_dart = vec![usize::MAX; nv];
    let mut degree = vec![0; nv];
    for (d, &v) in vertex_of.iter().enumerate() {
        degree[v] += 1;
        first_dart[v] = first_dart[v].min(d);
    }
    PlaneMap::from_parts(sigma, vertex_of, first_dart, degree)
}

/// The map on one colour class of a quadrangulation: `class = false` picks
/// the class of vertex 0. Each face gives one edge between its two corners
/// in the class, a loop when both corners are the same vertex.
pub fn split(q: &PlaneMap, class: bool) -> PlaneMap {
    let side = q
        .bipartition_sides()
        .expect("quadrangulations are bipartite");
    let mut vid = vec![usize::MAX; q.vertex_count()];
    let mut nv = 0;
    for v in 0..q.vertex_count() {
        if side[v] == class {
            vid[v] = nv;
            nv += 1;
        }
    }
    // New dart ids: one edge per face, numbered by the face's first corner.
    let mut new_id = vec![usize::MAX; q.dart_count()];
    let mut ne = 0;
    for d in 0..q.dart_count() {
        if side[q.tail(d)] == class && new_id[d] == usize::MAX {
            let o = q.phi(q.phi(d));
            new_id[d] = 2 * ne;
            new_id[o] = 2 * ne + 1;
            ne += 1;
        }
    }
    let mut sigma = vec![0; 2 * ne];
    let mut vertex_of = vec![0; 2 * ne];
    for d in 0..q.dart_count() {
        if new_id[d] != usize::MAX {
            sigma[new_id[d]] = new_id[q.sigma(d)];
            vertex_of[new_id[d]] = vid[q.tail(d)];
        }
    }
    debug_assert!((0..2 * ne).all(|d| theta(theta(d)) == d));
    build(sigma, vertex_of)
}

/// Whether some automorphism of `q` swaps its two colour classes.
pub fn classes_swappable(q: &PlaneMap) -> bool {
    let side = q
        .bipartition_sides()
        .expect("quadrangulations are bipartite");
    let a: Vec<u32> = side.iter().map(|&s| s as u32).collect();
    let b: Vec<u32> = side.iter().map(|&s| !s as u32).collect();
    q.canonical_form(Some(&a)).code == q.canonical_form(Some(&b)).code
}

/// Emits every plane map with `edge_count` edges exactly once.
pub fn generate_maps(edge_count: usize, mut visit: impl FnMut(&PlaneMap)) -> (u64, GenStats) {
    let mut count = 0;
    let stats = generate(&GenConfig::new(edge_count + 2), |q| {
        visit(&split(q, false));
        count += 1;
        if !classes_swappable(q) {
            visit(&split(q, true));
            count += 1;
        }
    });
    (count, stats)
}
