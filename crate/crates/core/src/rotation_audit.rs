//! Rotations of quadrangulations and the closure audit of a generated list.
//!
//! Both moves keep dart ids: rotation A moves the two darts of the rotated
//! edge onto the new diagonal, rotation C moves the far dart of the pendant
//! edge. So anchors for a later move can refer to the same ids.

use std::collections::HashMap;

use thiserror::Error;

use crate::map::{theta, Dart, PlaneMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RotationKind {
    A,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RotationMove {
    pub kind: RotationKind,
    pub anchor_dart: Dart,
    /// Only meaningful for A.
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RotationError {
    #[error("rotation {0:?} is not applicable")]
    NotApplicable(RotationMove),
}

fn phi(q: &PlaneMap, d: Dart) -> Dart {
    theta(q.sigma[d])
}

/// Moves dart `d` so that it follows `after` (at another vertex).
fn relink(sigma: &mut [Dart], sigma_inv: &mut [Dart], d: Dart, after: Dart) {
    let (p, n) = (sigma_inv[d], sigma[d]);
    sigma[p] = n;
    sigma_inv[n] = p;
    let next = sigma[after];
    sigma[after] = d;
    sigma_inv[d] = after;
    sigma[d] = next;
    sigma_inv[next] = d;
}

fn rebuild(
    q: &PlaneMap,
    sigma: Vec<Dart>,
    sigma_inv: Vec<Dart>,
    moved: &[(Dart, usize)],
) -> PlaneMap {
    let mut vertex_of = q.vertex_of.clone();
    let mut degree = q.degree.clone();
    let mut first_dart = q.first_dart.clone();
    for &(d, to) in moved {
        let from = vertex_of[d];
        degree[from] -= 1;
        degree[to] += 1;
        vertex_of[d] = to;
        if first_dart[from] == d {
            // The old successor of d stays behind.
            first_dart[from] = q.sigma[d];
        }
    }
    PlaneMap {
        sigma,
        sigma_inv,
        vertex_of,
        first_dart,
        degree,
    }
}

/// Rotation A: the edge of `anchor` is replaced by a diagonal of the
/// hexagon formed by its two faces. `Forward` joins the corner following
/// the anchor's tail in the face left of the anchor to the corner following
/// its head in the other face; `Backward` joins the two remaining corners.
pub fn rotate_a(
    q: &PlaneMap,
    anchor: Dart,
    direction: Direction,
) -> Result<PlaneMap, RotationError> {
    let mv = RotationMove {
        kind: RotationKind::A,
        anchor_dart: anchor,
        direction,
    };
    let d = anchor;
    if d >= q.dart_count() {
        return Err(RotationError::NotApplicable(mv));
    }
    let td = theta(d);
    let f1 = [d, phi(q, d), phi(q, phi(q, d)), phi(q, phi(q, phi(q, d)))];
    if f1.contains(&td) {
        return Err(RotationError::NotApplicable(mv));
    }
    let (c_a, c_b) = match direction {
        Direction::Forward => (phi(q, d), phi(q, td)),
        Direction::Backward => (phi(q, phi(q, d)), phi(q, phi(q, td))),
    };
    let mut sigma = q.sigma.clone();
    let mut sigma_inv = q.sigma_inv.clone();
    relink(&mut sigma, &mut sigma_inv, d, c_a);
    relink(&mut sigma, &mut sigma_inv, td, c_b);
    let moved = [(d, q.vertex_of[c_a]), (td, q.vertex_of[c_b])];
    Ok(rebuild(q, sigma, sigma_inv, &moved))
}

/// Rotation C: the pendant edge of `pendant` (a dart leaving a degree-1
/// vertex `v` towards `w`) is swung inside the face `v, w, x, w` so that it
/// hangs from `x`.
pub fn rotate_c(q: &PlaneMap, pendant: Dart) -> Result<PlaneMap, RotationError> {
    let mv = RotationMove {
        kind: RotationKind::C,
        anchor_dart: pendant,
        direction: Direction::Forward,
    };
    if pendant >= q.dart_count() || q.degree[q.vertex_of[pendant]] != 1 {
        return Err(RotationError::NotApplicable(mv));
    }
    // On the path with three vertices the move is an isomorphism.
    if q.vertex_count() <= 3 {
        return Err(RotationError::NotApplicable(mv));
    }
    let tp = theta(pendant);
    let corner_x = theta(q.sigma[tp]);
    let mut sigma = q.sigma.clone();
    let mut sigma_inv = q.sigma_inv.clone();
    relink(&mut sigma, &mut sigma_inv, tp, corner_x);
    Ok(rebuild(q, sigma, sigma_inv, &[(tp, q.vertex_of[corner_x])]))
}

/// Rotation B, defined as A, then C, then A; anchors refer to the dart ids,
/// which every move keeps.
pub fn rotate_b(
    q: &PlaneMap,
    first: (Dart, Direction),
    pendant: Dart,
    second: (Dart, Direction),
) -> Result<PlaneMap, RotationError> {
    let r = rotate_a(q, first.0, first.1)?;
    let r = rotate_c(&r, pendant)?;
    rotate_a(&r, second.0, second.1)
}

/// Every applicable move of kinds A and C.
pub fn moves(q: &PlaneMap) -> Vec<RotationMove> {
    let mut out = Vec::new();
    let (fid, _) = q.face_ids();
    for d in 0..q.dart_count() {
        if fid[d] != fid[theta(d)] {
            for direction in [Direction::Forward, Direction::Backward] {
                out.push(RotationMove {
                    kind: RotationKind::A,
                    anchor_dart: d,
                    direction,
                });
            }
        }
        if q.vertex_count() > 3 && q.degree[q.vertex_of[d]] == 1 {
            out.push(RotationMove {
                kind: RotationKind::C,
                anchor_dart: d,
                direction: Direction::Forward,
            });
        }
    }
    out
}

pub fn apply(q: &PlaneMap, mv: &RotationMove) -> Result<PlaneMap, RotationError> {
    match mv.kind {
        RotationKind::A => rotate_a(q, mv.anchor_dart, mv.direction),
        RotationKind::C => rotate_c(q, mv.anchor_dart),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub n: usize,
    pub maps: usize,
    pub moves: usize,
    pub closed: bool,
    pub connected: bool,
}

impl std::fmt::Display for ClosureReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "closure n={}: maps {} moves {} closed {} connected {}",
            self.n, self.maps, self.moves, self.closed, self.connected
        )
    }
}

/// Applies every A and C move to every map and checks that the results stay
/// inside the list and that the move graph is connected.
pub fn closure_audit(n: usize, maps: &[PlaneMap]) -> ClosureReport {
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    for (i, m) in maps.iter().enumerate() {
        index.insert(m.canonical_form(None).code, i);
    }
    let mut parent: Vec<usize> = (0..maps.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut closed = true;
    let mut count = 0;
    for (i, m) in maps.iter().enumerate() {
        for mv in moves(m) {
            let Ok(r) = apply(m, &mv) else { continue };
            count += 1;
            match index.get(&r.canonical_form(None).code) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
                None => closed = false,
            }
        }
    }
    let roots = (0..maps.len())
        .filter(|&i| find(&mut parent, i) == i)
        .count();
    ClosureReport {
        n,
        maps: maps.len(),
        moves: count,
        closed,
        connected: roots <= 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_gen::{generate, GenConfig};

    fn all(n: usize) -> Vec<PlaneMap> {
        let mut v = Vec::new();
        generate(&GenConfig::new(n), |q| v.push(q.clone()));
        v
    }

    #[test]
    fn moves_keep_quadrangulations() {
        for n in 4..=6 {
            for q in all(n) {
                for mv in moves(&q) {
                    let r = apply(&q, &mv).unwrap();
                    assert!(r.is_quadrangulation(), "{mv:?}");
                    assert_eq!(
                        (r.vertex_count(), r.edge_count()),
                        (q.vertex_count(), q.edge_count())
                    );
                }
            }
        }
    }

    #[test]
    fn a_on_c4_gives_double_edge_with_two_pendants() {
        let c4 = PlaneMap::cycle(4);
        for dir in [Direction::Forward, Direction::Backward] {
            let r = rotate_a(&c4, 0, dir).unwrap();
            assert_eq!(r.degree1_count(), 2);
            assert_eq!(r.max_parallel_class(), 2);
            let ends: Vec<_> = (0..4)
                .filter(|&v| r.degree(v) == 1)
                .map(|v| r.neighbours(v)[0])
                .collect();
            assert_ne!(ends[0], ends[1]);
        }
    }

    #[test]
    fn moves_are_reversible() {
        for n in 4..=6 {
            for q in all(n) {
                for mv in moves(&q) {
                    let r = apply(&q, &mv).unwrap();
                    let back = match mv.kind {
                        RotationKind::A => {
                            let other = match mv.direction {
                                Direction::Forward => Direction::Backward,
                                Direction::Backward => Direction::Forward,
                            };
                            rotate_a(&r, mv.anchor_dart, other).unwrap()
                        }
                        RotationKind::C => rotate_c(&r, mv.anchor_dart).unwrap(),
                    };
                    assert!(back.is_isomorphic(&q), "{mv:?}");
                }
            }
        }
    }

    #[test]
    fn c_examples() {
        assert!(rotate_c(&PlaneMap::cycle(4), 0).is_err());
        assert!(rotate_c(&PlaneMap::path3(), 0).is_err());
    }

    #[test]
    fn b_composite_on_five_vertices() {
        for q in all(5) {
            for a1 in moves(&q).into_iter().filter(|m| m.kind == RotationKind::A) {
                let r = rotate_a(&q, a1.anchor_dart, a1.direction).unwrap();
                for c in moves(&r).into_iter().filter(|m| m.kind == RotationKind::C) {
                    let s = rotate_c(&r, c.anchor_dart).unwrap();
                    for a2 in moves(&s).into_iter().filter(|m| m.kind == RotationKind::A) {
                        let b = rotate_b(
                            &q,
                            (a1.anchor_dart, a1.direction),
                            c.anchor_dart,
                            (a2.anchor_dart, a2.direction),
                        )
                        .unwrap();
                        assert!(b.is_quadrangulation());
                        assert_eq!(b.vertex_count(), 5);
                    }
                }
            }
        }
    }

    #[test]
    fn closure_small() {
        let four = all(4);
        let r = closure_audit(4, &four);
        assert!(r.closed && r.connected, "{r}");
        let r = closure_audit(6, &all(6));
        assert!(r.closed && r.connected, "{r}");
        assert!(r.to_string().starts_with("closure n=6: maps 30 moves "));
        let missing = closure_audit(4, &four[1..]);
        assert!(!missing.closed);
    }
}
