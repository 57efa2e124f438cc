//! Slow reference checks used to validate the fast code paths.

use crate::lopsp::{LopspOperation, Predecoration};
use crate::lopsp_apply::{cut, shortest_cut_path, CutPath, Patch, PathSide, Segment};
use crate::map::{theta, Dart, PlaneMap, Triangle, TriangleComplex, Vertex};

/// Every cut-path of minimal total length.
pub fn minimal_cut_paths(o: &LopspOperation) -> Vec<CutPath> {
    let best = shortest_cut_path(o).len();
    let m = &o.map;
    let [v0, v1, v2] = o.marks;
    let mut out = Vec::new();
    let mut used = vec![false; m.vertex_count()];
    let mut first = Vec::new();
    used[v1] = true;
    used[v2] = true;
    simple_paths(
        m,
        v1,
        v0,
        best - 1,
        &mut used,
        &mut first,
        &mut |m, used, p1| {
            let mut second = Vec::new();
            used[v2] = false;
            simple_paths(
                m,
                v0,
                v2,
                best - p1.len(),
                used,
                &mut second,
                &mut |_, _, p2| {
                    if p1.len() + p2.len() == best {
                        let mut darts = p1.to_vec();
                        darts.extend_from_slice(p2);
                        out.push(CutPath {
                            darts,
                            split: p1.len(),
                        });
                    }
                },
            );
            used[v2] = true;
        },
    );
    out
}

/// Calls `f` on every simple path from `from` to `to` with at most `max`
/// edges avoiding vertices marked in `used` (except `to`).
fn simple_paths(
    m: &PlaneMap,
    from: Vertex,
    to: Vertex,
    max: usize,
    used: &mut Vec<bool>,
    path: &mut Vec<Dart>,
    f: &mut dyn FnMut(&PlaneMap, &mut Vec<bool>, &[Dart]),
) {
    if from == to {
        let p = path.clone();
        f(m, used, &p);
        return;
    }
    if path.len() == max {
        return;
    }
    used[from] = true;
    for d in m.darts_at(from).collect::<Vec<_>>() {
        let w = m.head(d);
        if w == to || !used[w] {
            path.push(d);
            simple_paths(m, w, to, max, used, path, f);
            path.pop();
        }
    }
    used[from] = false;
}

fn has_parallel_pair(m: &PlaneMap) -> bool {
    let mut seen = std::collections::HashSet::new();
    (0..m.edge_count()).any(|e| {
        let (a, b) = (m.tail(2 * e), m.head(2 * e));
        !seen.insert((a.min(b), a.max(b)))
    })
}

/// No minimal cut-path leaves a 2-cycle in the cut-open operation.
pub fn c2_oracle(o: &LopspOperation) -> bool {
    minimal_cut_paths(o)
        .iter()
        .all(|p| !has_parallel_pair(&cut(o, p).unwrap().to_map().0))
}

/// c2, and no minimal cut-path gives a non-trivial 4-cycle in two copies
/// of the cut-open operation sharing a segment of the path.
pub fn c3_oracle(o: &LopspOperation) -> bool {
    if !c2_oracle(o) {
        return false;
    }
    minimal_cut_paths(o).iter().all(|p| {
        let patch = cut(o, p).unwrap();
        [Segment::V0V1, Segment::V0V2].iter().all(|&s| {
            let (x, colour) = double_patch(&patch, s);
            !has_nontrivial_four_cycle(&x, &colour)
        })
    })
}

/// Two copies of the patch as they meet in neighbouring double chambers:
/// along one copy of the `v0 v2` segment (right side of the first copy to
/// the left side of the second), or along both copies of the `v0 v1`
/// segment.
pub fn double_patch(patch: &Patch, segment: Segment) -> (PlaneMap, Vec<u8>) {
    let n = patch.complex.len();
    let mut tris: Vec<Triangle> = Vec::with_capacity(2 * n);
    for copy in 0..2 {
        for tri in &patch.complex.tris {
            let mut t = tri.clone();
            t.adj = tri.adj.map(|a| a.map(|(u, k)| (u + copy * n, k)));
            tris.push(t);
        }
    }
    for t in 0..n {
        for j in 0..3 {
            if let Some(PathSide { segment: s, left }) = patch.sides[t][j] {
                if s == segment && (s == Segment::V0V1 || !left) {
                    let (u, k) = patch.uncut[t][j];
                    tris[t].adj[j] = Some((u + n, k));
                    tris[u + n].adj[k] = Some((t, j));
                }
            }
        }
    }
    let (m, colour, _, _) = TriangleComplex { tris }.to_map();
    (m, colour)
}

/// Some closed walk of four distinct edges has, strictly on each side, a
/// vertex that is not of colour 1. A side holding only colour-1 vertices
/// is the neighbourhood of a single edge of the resulting map. The side
/// with the boundary face of the patch always counts, as the tiling goes
/// on past it.
pub fn has_nontrivial_four_cycle(m: &PlaneMap, colour: &[u8]) -> bool {
    let nd = m.dart_count();
    for d1 in 0..nd {
        for d2 in m.darts_at(m.head(d1)) {
            for d3 in m.darts_at(m.head(d2)) {
                for d4 in m.darts_at(m.head(d3)) {
                    if m.head(d4) != m.tail(d1) {
                        continue;
                    }
                    let w = [d1, d2, d3, d4];
                    let mut edges = w.map(|d| d / 2);
                    edges.sort_unstable();
                    if edges.windows(2).any(|p| p[0] == p[1]) {
                        continue;
                    }
                    if separates_non_edges(m, colour, &w) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Regions of the complement of an edge set: faces joined across edges
/// outside the set.
fn regions(m: &PlaneMap, in_set: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let (face_of, count) = m.face_ids();
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for d in 0..m.dart_count() {
        if !in_set[d / 2] {
            let (a, b) = (
                find(&mut parent, face_of[d]),
                find(&mut parent, face_of[theta(d)]),
            );
            parent[a] = b;
        }
    }
    let region: Vec<usize> = (0..count).map(|f| find(&mut parent, f)).collect();
    (face_of, region)
}

fn separates_non_edges(m: &PlaneMap, colour: &[u8], walk: &[Dart]) -> bool {
    let mut in_set = vec![false; m.edge_count()];
    let mut on_walk = vec![false; m.vertex_count()];
    for &d in walk {
        in_set[d / 2] = true;
        on_walk[m.tail(d)] = true;
    }
    let (face_of, region) = regions(m, &in_set);
    let left: Vec<usize> = walk.iter().map(|&d| region[face_of[d]]).collect();
    let right: Vec<usize> = walk.iter().map(|&d| region[face_of[theta(d)]]).collect();
    if left.iter().any(|r| right.contains(r)) {
        return false;
    }
    let mut found = [false; 2];
    // The patch boundary face stands for the rest of the tiling.
    let mut size = vec![0; region.len()];
    for d in 0..m.dart_count() {
        size[face_of[d]] += 1;
    }
    for (f, _) in size.iter().enumerate().filter(|(_, &s)| s != 3) {
        found[0] |= left.contains(&region[f]);
        found[1] |= right.contains(&region[f]);
    }
    for d in 0..m.dart_count() {
        let v = m.tail(d);
        if on_walk[v] || colour[v] == 1 {
            continue;
        }
        let r = region[face_of[d]];
        if left.contains(&r) {
            found[0] = true;
        }
        if right.contains(&r) {
            found[1] = true;
        }
    }
    found[0] && found[1]
}

/// Checks the face conditions on every connected edge subset of the
/// predecoration.
pub fn submap_c3_oracle(p: &Predecoration) -> bool {
    let q = &p.quad;
    let e = q.edge_count();
    assert!(e <= 24, "too many edge subsets");
    let [v0, v1, v2] = p.marks;
    let (face_of, face_count) = q.face_ids();
    for mask in 1u32..(1 << e) {
        let in_set: Vec<bool> = (0..e).map(|i| mask >> i & 1 == 1).collect();
        if !edges_connected(q, &in_set) {
            continue;
        }
        let (_, region) = regions(q, &in_set);
        let mut in_h = vec![false; q.vertex_count()];
        for d in 0..q.dart_count() {
            if in_set[d / 2] {
                in_h[q.tail(d)] = true;
            }
        }
        let mut size = vec![0usize; face_count];
        let mut faces = vec![0usize; face_count];
        for d in 0..q.dart_count() {
            if in_set[d / 2] {
                size[region[face_of[d]]] += 1;
            }
        }
        for f in 0..face_count {
            faces[region[f]] += 1;
        }
        let mut interior: Vec<Vec<Vertex>> = vec![Vec::new(); face_count];
        for v in 0..q.vertex_count() {
            if !in_h[v] {
                interior[region[face_of[q.first_dart(v)]]].push(v);
            }
        }
        for r in 0..face_count {
            if region[r] != r {
                continue;
            }
            let inside = &interior[r];
            let ok = match size[r] {
                2 => {
                    inside.contains(&v0)
                        || inside.contains(&v2)
                        || (p.v1_colour1 && inside == &[v1])
                }
                4 if faces[r] >= 2 => inside.iter().any(|v| p.marks.contains(v)),
                _ => true,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

fn edges_connected(q: &PlaneMap, in_set: &[bool]) -> bool {
    let mut parent: Vec<usize> = (0..q.vertex_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut first = None;
    for (i, _) in in_set.iter().enumerate().filter(|(_, &b)| b) {
        let (a, b) = (
            find(&mut parent, q.tail(2 * i)),
            find(&mut parent, q.tail(2 * i + 1)),
        );
        parent[a] = b;
        first.get_or_insert(q.tail(2 * i));
    }
    let Some(r) = first else { return false };
    let root = find(&mut parent, r);
    (0..in_set.len())
        .filter(|&i| in_set[i])
        .all(|i| find(&mut parent, q.tail(2 * i)) == root)
}

/// Direct isomorphism test: try to extend a map of one dart to a full
/// bijection commuting with rotation and reversal (or inverted rotation).
pub fn isomorphic_by_search(a: &PlaneMap, b: &PlaneMap) -> bool {
    if a.vertex_count() != b.vertex_count() || a.dart_count() != b.dart_count() {
        return false;
    }
    let n = a.dart_count();
    if n == 0 {
        return true;
    }
    for target in 0..n {
        for flip in [false, true] {
            let mut img = vec![usize::MAX; n];
            let mut pre = vec![usize::MAX; n];
            img[0] = target;
            pre[target] = 0;
            let mut stack = vec![0];
            let mut ok = true;
            while let Some(d) = stack.pop() {
                let x = img[d];
                let rot_b = if flip { b.sigma_inv(x) } else { b.sigma(x) };
                for (from, to) in [(a.sigma(d), rot_b), (theta(d), theta(x))] {
                    if img[from] == usize::MAX && pre[to] == usize::MAX {
                        img[from] = to;
                        pre[to] = from;
                        stack.push(from);
                    } else if img[from] != to {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok {
                return true;
            }
        }
    }
    false
}

/// Number of isomorphism classes, by pairwise search.
pub fn dedup_oracle(maps: &[PlaneMap]) -> usize {
    let mut reps: Vec<&PlaneMap> = Vec::new();
    for m in maps {
        if !reps.iter().any(|r| isomorphic_by_search(r, m)) {
            reps.push(m);
        }
    }
    reps.len()
}

/// Rooted quadrangulations with `f` faces: `2 * 3^f * (2f)! / (f! (f+2)!)`.
pub fn rooted_identity(f: u32) -> u128 {
    let fact = |n: u32| (1..=n as u128).product::<u128>();
    2 * 3u128.pow(f) * fact(2 * f) / (fact(f) * fact(f + 2))
}

/// Sum of `4E / |Aut|` over the given maps.
pub fn rooted_sum(maps: &[PlaneMap]) -> u128 {
    maps.iter()
        .map(|m| (2 * m.dart_count() / m.canonical_form(None).group_order()) as u128)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lopsp::{enumerate_ops, expand, is_c2, is_c3, predecoration_params, Dedup};
    use crate::quad_gen::{generate, GenConfig};

    fn preds(k: usize) -> Vec<Predecoration> {
        let (n, _) = predecoration_params(k);
        let mut v = Vec::new();
        generate(&GenConfig::new(n), |q| {
            enumerate_ops(q, k, Dedup::Full, |p| v.push(p.clone()));
        });
        v
    }

    #[test]
    fn identity_passes() {
        let id = LopspOperation::identity();
        assert!(c2_oracle(&id) && c3_oracle(&id));
        let p = crate::lopsp::predecoration_of(&id).unwrap();
        assert!(submap_c3_oracle(&p));
    }

    #[test]
    fn k2_counts() {
        let ops: Vec<_> = preds(2).iter().map(|p| expand(p).unwrap()).collect();
        assert_eq!(ops.iter().filter(|o| c2_oracle(o)).count(), 6);
        assert_eq!(ops.iter().filter(|o| c3_oracle(o)).count(), 2);
    }

    #[test]
    fn adjacent_v0_v2_fail_submap_check() {
        let p = Predecoration::new(PlaneMap::path3(), [0, 2, 1], false, 0).unwrap();
        assert!(!submap_c3_oracle(&p));
    }

    #[test]
    fn oracles_agree_small() {
        for k in 1..=6 {
            for p in preds(k) {
                let o = expand(&p).unwrap();
                let c2 = is_c2(&p);
                assert_eq!(c2_oracle(&o), c2, "{p:?}");
                let c3 = c2 && is_c3(&p).unwrap();
                assert_eq!(c3_oracle(&o), c3, "{p:?}");
                assert_eq!(submap_c3_oracle(&p), c3, "{p:?}");
            }
        }
    }

    #[test]
    fn rooted() {
        assert_eq!(rooted_identity(1), 2);
        assert_eq!(rooted_identity(3), 54);
        for f in 1..=6 {
            let mut maps = Vec::new();
            generate(&GenConfig::new(f + 2), |q| maps.push(q.clone()));
            assert_eq!(rooted_sum(&maps), rooted_identity(f as u32));
        }
    }

    #[test]
    fn dedup_search() {
        let mut maps = Vec::new();
        generate(&GenConfig::new(6), |q| maps.push(q.clone()));
        assert_eq!(dedup_oracle(&maps), maps.len());
        maps.push(maps[3].mirror());
        assert_eq!(dedup_oracle(&maps), maps.len() - 1);
    }
}
