//! Isomorph-free generation of plane quadrangulations (parallel edges
//! allowed) from the path on three vertices.
//!
//! Three extensions each add one vertex, two edges and one face:
//!
//! * `D1` at a dart `g = w->x` replaces the edge of `g` by a 2-gon and hangs
//!   a new degree-1 vertex from `w` inside it.
//! * `P0` at two opposite corners of a face adds a degree-2 vertex joined to
//!   both corners.
//! * `P1` at a dart `d = z->a` whose sides are distinct faces deletes the
//!   edge and adds a degree-3 vertex joined to `z` and to the corners
//!   opposite `z` in both faces.
//!
//! A child is kept only if the new vertex is the canonical reduction of the
//! child: the kind must be the first of `D1, P0, P1` that occurs in the
//! child, the site must maximise a degree invariant, and ties are broken by
//! the smallest BFS code from the site.

use std::cmp::Ordering;

use thiserror::Error;

use crate::map::{theta, CodeScratch, Dart, MapEditor, PlaneMap, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtKind {
    D1,
    P0,
    P1,
}

/// Where an extension is applied. `partner` is the second corner for `P0`
/// and equals `anchor` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtensionSite {
    pub kind: ExtKind,
    pub anchor: Dart,
    pub partner: Dart,
}

/// A reduction of a quadrangulation. `dart` leaves `vertex`: the pendant
/// edge for `D1`, any dart of the vertex for `P0`, the dart towards the
/// kept neighbour `z` for `P1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReductionSite {
    pub kind: ExtKind,
    pub vertex: Vertex,
    pub dart: Dart,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadGenError {
    #[error("extension {0:?} is not applicable")]
    NotApplicable(ExtensionSite),
    #[error("reduction {0:?} is not applicable")]
    ReductionNotApplicable(ReductionSite),
}

/// The path on three vertices: ends 0 and 2, middle 1.
pub fn base_quad() -> PlaneMap {
    PlaneMap::path3()
}

/// `(degree-1 vertex count, largest parallel class)`.
pub fn filter_state(q: &PlaneMap) -> (usize, usize) {
    (q.degree1_count(), q.max_parallel_class())
}

#[inline]
fn phi(q: &PlaneMap, d: Dart) -> Dart {
    theta(q.sigma[d])
}

/// Corner opposite to the corner `d` in its (size four) face.
#[inline]
fn opposite(q: &PlaneMap, d: Dart) -> Dart {
    phi(q, phi(q, d))
}

/// Every applicable extension site of `q`.
pub fn extension_sites(q: &PlaneMap) -> Vec<ExtensionSite> {
    let mut sites = Vec::new();
    for g in 0..q.dart_count() {
        sites.push(ExtensionSite {
            kind: ExtKind::D1,
            anchor: g,
            partner: g,
        });
    }
    sites.extend(p0_sites(q));
    let (fid, _) = q.face_ids();
    for d in 0..q.dart_count() {
        if fid[d] != fid[theta(d)] {
            sites.push(ExtensionSite {
                kind: ExtKind::P1,
                anchor: d,
                partner: d,
            });
        }
    }
    sites
}

fn p0_sites(q: &PlaneMap) -> Vec<ExtensionSite> {
    let mut sites = Vec::new();
    let mut seen = vec![false; q.dart_count()];
    for d0 in 0..q.dart_count() {
        if seen[d0] {
            continue;
        }
        let d1 = phi(q, d0);
        let d2 = phi(q, d1);
        let d3 = phi(q, d2);
        for x in [d0, d1, d2, d3] {
            seen[x] = true;
        }
        for (a, c) in [(d0, d2), (d1, d3)] {
            if q.vertex_of[a] != q.vertex_of[c] {
                sites.push(ExtensionSite {
                    kind: ExtKind::P0,
                    anchor: a.min(c),
                    partner: a.max(c),
                });
            }
        }
    }
    sites
}

/// Applies an extension. Returns the child and the reduction site of the
/// new vertex in the child. The new vertex is always the last one.
pub fn extend(
    q: &PlaneMap,
    site: ExtensionSite,
) -> Result<(PlaneMap, ReductionSite), QuadGenError> {
    let ok = match site.kind {
        ExtKind::D1 => site.anchor < q.dart_count(),
        ExtKind::P0 => {
            site.partner < q.dart_count()
                && opposite(q, site.anchor) == site.partner
                && q.vertex_of[site.anchor] != q.vertex_of[site.partner]
        }
        ExtKind::P1 => {
            site.anchor < q.dart_count() && {
                let (fid, _) = q.face_ids();
                fid[site.anchor] != fid[theta(site.anchor)]
            }
        }
    };
    if !ok {
        return Err(QuadGenError::NotApplicable(site));
    }
    Ok(extend_unchecked(q, site))
}

pub(crate) fn extend_unchecked(q: &PlaneMap, site: ExtensionSite) -> (PlaneMap, ReductionSite) {
    let nd = q.dart_count();
    let v = q.vertex_count();
    let mut sigma = Vec::with_capacity(nd + 4);
    sigma.extend_from_slice(&q.sigma);
    sigma.extend([0; 4]);
    let mut vertex_of = Vec::with_capacity(nd + 4);
    vertex_of.extend_from_slice(&q.vertex_of);
    vertex_of.extend([0; 4]);
    let mut first_dart = Vec::with_capacity(v + 1);
    first_dart.extend_from_slice(&q.first_dart);
    let mut degree = Vec::with_capacity(v + 1);
    degree.extend_from_slice(&q.degree);
    let (a0, a1, b0, b1) = (nd, nd + 1, nd + 2, nd + 3);
    let red = match site.kind {
        ExtKind::D1 => {
            let g = site.anchor;
            let (w, x) = (q.vertex_of[g], q.vertex_of[theta(g)]);
            // At w: g, pendant, new parallel edge, old successor of g.
            let next = sigma[g];
            sigma[g] = a0;
            sigma[a0] = b0;
            sigma[b0] = next;
            // At x: new parallel edge right before the reverse of g.
            let prev = q.sigma_inv[theta(g)];
            sigma[prev] = b1;
            sigma[b1] = theta(g);
            sigma[a1] = a1;
            vertex_of[a0] = w;
            vertex_of[b0] = w;
            vertex_of[b1] = x;
            vertex_of[a1] = v;
            degree[w] += 2;
            degree[x] += 1;
            degree.push(1);
            first_dart.push(a1);
            ReductionSite {
                kind: ExtKind::D1,
                vertex: v,
                dart: a1,
            }
        }
        ExtKind::P0 => {
            let (c0, c2) = (site.anchor, site.partner);
            let (a, c) = (q.vertex_of[c0], q.vertex_of[c2]);
            sigma[a0] = sigma[c0];
            sigma[c0] = a0;
            sigma[b0] = sigma[c2];
            sigma[c2] = b0;
            sigma[a1] = b1;
            sigma[b1] = a1;
            vertex_of[a0] = a;
            vertex_of[b0] = c;
            vertex_of[a1] = v;
            vertex_of[b1] = v;
            degree[a] += 1;
            degree[c] += 1;
            degree.push(2);
            first_dart.push(a1);
            ReductionSite {
                kind: ExtKind::P0,
                vertex: v,
                dart: a1,
            }
        }
        ExtKind::P1 => {
            let d = site.anchor;
            let td = theta(d);
            let a = q.vertex_of[td];
            let c1 = opposite(q, d);
            let c2 = phi(q, td);
            let (y1, y2) = (q.vertex_of[c1], q.vertex_of[c2]);
            // Detach the reverse of d from a; the edge of d becomes z-v.
            let prev = q.sigma_inv[td];
            sigma[prev] = sigma[td];
            if first_dart[a] == td {
                first_dart[a] = sigma[td];
            }
            sigma[a0] = sigma[c1];
            sigma[c1] = a0;
            sigma[b0] = sigma[c2];
            sigma[c2] = b0;
            // Counter-clockwise at v: towards z, towards y2, towards y1.
            sigma[td] = b1;
            sigma[b1] = a1;
            sigma[a1] = td;
            vertex_of[td] = v;
            vertex_of[a0] = y1;
            vertex_of[b0] = y2;
            vertex_of[a1] = v;
            vertex_of[b1] = v;
            degree[a] -= 1;
            degree[y1] += 1;
            degree[y2] += 1;
            degree.push(3);
            first_dart.push(td);
            ReductionSite {
                kind: ExtKind::P1,
                vertex: v,
                dart: td,
            }
        }
    };
    (
        PlaneMap::from_parts(sigma, vertex_of, first_dart, degree),
        red,
    )
}

/// Whether the reduction at `site` is applicable in `q`.
pub fn is_reduction(q: &PlaneMap, site: &ReductionSite) -> bool {
    let v = site.vertex;
    if q.vertex_count() <= 3 || v >= q.vertex_count() || q.vertex_of[site.dart] != v {
        return false;
    }
    match site.kind {
        ExtKind::D1 => q.degree[v] == 1,
        ExtKind::P0 => p0_reducible(q, v),
        ExtKind::P1 => p1_reducible(q, v),
    }
}

fn p0_reducible(q: &PlaneMap, v: Vertex) -> bool {
    if q.degree[v] != 2 {
        return false;
    }
    let t0 = q.first_dart[v];
    let t1 = q.sigma[t0];
    q.vertex_of[theta(t0)] != q.vertex_of[theta(t1)]
}

/// The three corners of a degree-3 vertex lie in three distinct faces.
fn p1_reducible(q: &PlaneMap, v: Vertex) -> bool {
    if q.degree[v] != 3 {
        return false;
    }
    let t0 = q.first_dart[v];
    let t1 = q.sigma[t0];
    let t2 = q.sigma[t1];
    // Walking a face of size four from corner t returns after four steps;
    // the corner is in the face of t' iff t' is among the four elements.
    let face = |t: Dart| [t, phi(q, t), opposite(q, t), phi(q, opposite(q, t))];
    let f0 = face(t0);
    !f0.contains(&t1) && !f0.contains(&t2) && !face(t1).contains(&t2)
}

/// All reductions of the given kind.
pub fn reduction_sites(q: &PlaneMap, kind: ExtKind) -> Vec<ReductionSite> {
    let mut out = Vec::new();
    if q.vertex_count() <= 3 {
        return out;
    }
    for v in 0..q.vertex_count() {
        match kind {
            ExtKind::D1 if q.degree[v] == 1 => out.push(ReductionSite {
                kind,
                vertex: v,
                dart: q.first_dart[v],
            }),
            ExtKind::P0 if p0_reducible(q, v) => out.push(ReductionSite {
                kind,
                vertex: v,
                dart: q.first_dart[v],
            }),
            ExtKind::P1 if p1_reducible(q, v) => {
                for t in q.darts_at(v) {
                    out.push(ReductionSite {
                        kind,
                        vertex: v,
                        dart: t,
                    });
                }
            }
            _ => {}
        }
    }
    out
}

/// The first kind in `D1, P0, P1` with a reduction in `q`.
pub fn canonical_kind(q: &PlaneMap) -> Option<ExtKind> {
    if q.vertex_count() <= 3 {
        return None;
    }
    if q.degree.iter().any(|&d| d == 1) {
        return Some(ExtKind::D1);
    }
    if (0..q.vertex_count()).any(|v| p0_reducible(q, v)) {
        return Some(ExtKind::P0);
    }
    Some(ExtKind::P1)
}

/// Applies a reduction, giving a quadrangulation with one vertex fewer.
pub fn reduce(q: &PlaneMap, site: &ReductionSite) -> Result<PlaneMap, QuadGenError> {
    if !is_reduction(q, site) {
        return Err(QuadGenError::ReductionNotApplicable(*site));
    }
    let mut e = MapEditor::new(q);
    match site.kind {
        ExtKind::D1 => {
            let p = site.dart;
            let a = q.sigma[theta(p)];
            e.remove_edge_of(a);
        }
        ExtKind::P0 => {}
        ExtKind::P1 => {
            let t = site.dart;
            let t1 = q.sigma[t];
            let c = opposite(q, t1);
            e.add_edge_after(c, theta(t));
        }
    }
    e.remove_vertex(site.vertex);
    e.finish()
        .map_err(|_| QuadGenError::ReductionNotApplicable(*site))
}

/// Isomorphism-invariant ranking of a reduction; larger is preferred.
fn invariant(q: &PlaneMap, site: &ReductionSite) -> u64 {
    let deg = |d: Dart| q.degree[q.vertex_of[d]] as u64;
    let t = site.dart;
    match site.kind {
        ExtKind::D1 => {
            let a = q.sigma[theta(t)];
            (deg(theta(t)) << 16) | deg(theta(a))
        }
        ExtKind::P0 => {
            let (x, y) = (deg(theta(t)), deg(theta(q.sigma[t])));
            let (o0, o1) = (deg(opposite(q, t)), deg(opposite(q, q.sigma[t])));
            (x.max(y) << 48) | (x.min(y) << 32) | (o0.max(o1) << 16) | o0.min(o1)
        }
        ExtKind::P1 => {
            let t1 = q.sigma[t];
            let (x, y) = (deg(theta(t1)), deg(theta(q.sigma[t1])));
            (deg(theta(t)) << 48) | (deg(opposite(q, t1)) << 32) | (x.max(y) << 16) | x.min(y)
        }
    }
}

/// Start darts whose BFS codes identify the orbit of a reduction.
fn site_starts(q: &PlaneMap, site: &ReductionSite) -> ([Dart; 2], usize) {
    match site.kind {
        ExtKind::P0 => ([site.dart, q.sigma[site.dart]], 2),
        _ => ([site.dart, site.dart], 1),
    }
}

/// Smallest code over the starts of `site`, written into `best`.
fn site_code(q: &PlaneMap, site: &ReductionSite, scratch: &mut CodeScratch, best: &mut Vec<u32>) {
    best.clear();
    let (starts, k) = site_starts(q, site);
    for &s in &starts[..k] {
        for fwd in [true, false] {
            let cmp = if best.is_empty() {
                scratch.compute(q, s, fwd, None, None)
            } else {
                scratch.compute(q, s, fwd, None, Some(best))
            };
            if cmp == Ordering::Less {
                std::mem::swap(best, &mut scratch.code);
            }
        }
    }
}

/// Whether some start of `site` beats `best`.
fn site_beats(q: &PlaneMap, site: &ReductionSite, scratch: &mut CodeScratch, best: &[u32]) -> bool {
    let (starts, k) = site_starts(q, site);
    for &s in &starts[..k] {
        for fwd in [true, false] {
            if scratch.compute(q, s, fwd, None, Some(best)) == Ordering::Less {
                return true;
            }
        }
    }
    false
}

/// Reusable buffers for acceptance tests.
#[derive(Debug, Default)]
pub struct AcceptScratch {
    code: CodeScratch,
    best: Vec<u32>,
    sites: Vec<(u64, ReductionSite)>,
}

/// Whether `applied` is the canonical reduction of `child` (up to
/// automorphisms of `child`).
pub fn canonical_accept(child: &PlaneMap, applied: &ReductionSite) -> bool {
    canonical_accept_with(child, applied, &mut AcceptScratch::default())
}

pub fn canonical_accept_with(
    child: &PlaneMap,
    applied: &ReductionSite,
    s: &mut AcceptScratch,
) -> bool {
    if canonical_kind(child) != Some(applied.kind) || !is_reduction(child, applied) {
        return false;
    }
    let mine = invariant(child, applied);
    s.sites.clear();
    let n = child.vertex_count();
    for v in 0..n {
        match applied.kind {
            ExtKind::D1 => {
                if child.degree[v] == 1 && v != applied.vertex {
                    let r = ReductionSite {
                        kind: ExtKind::D1,
                        vertex: v,
                        dart: child.first_dart[v],
                    };
                    let inv = invariant(child, &r);
                    if inv > mine {
                        return false;
                    }
                    if inv == mine {
                        s.sites.push((inv, r));
                    }
                }
            }
            ExtKind::P0 => {
                if v != applied.vertex && p0_reducible(child, v) {
                    let r = ReductionSite {
                        kind: ExtKind::P0,
                        vertex: v,
                        dart: child.first_dart[v],
                    };
                    let inv = invariant(child, &r);
                    if inv > mine {
                        return false;
                    }
                    if inv == mine {
                        s.sites.push((inv, r));
                    }
                }
            }
            ExtKind::P1 => {
                if child.degree[v] == 3 && p1_reducible(child, v) {
                    for t in child.darts_at(v) {
                        if v == applied.vertex && t == applied.dart {
                            continue;
                        }
                        let r = ReductionSite {
                            kind: ExtKind::P1,
                            vertex: v,
                            dart: t,
                        };
                        let inv = invariant(child, &r);
                        if inv > mine {
                            return false;
                        }
                        if inv == mine {
                            s.sites.push((inv, r));
                        }
                    }
                }
            }
        }
    }
    if s.sites.is_empty() {
        return true;
    }
    let mut best = std::mem::take(&mut s.best);
    site_code(child, applied, &mut s.code, &mut best);
    let beaten = s
        .sites
        .iter()
        .any(|(_, r)| site_beats(child, r, &mut s.code, &best));
    s.best = best;
    !beaten
}

/// Generation settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub target_n: usize,
    /// Prune maps with more degree-1 vertices than this.
    pub max_degree1: Option<usize>,
    /// Drop output maps with a larger parallel class than this.
    pub max_parallel_class: Option<usize>,
    /// `(res, mod, depth)`: only subtrees `i` with `i % mod == res` among
    /// the maps accepted `depth` extensions below the root are explored.
    pub split: Option<(usize, usize, usize)>,
}

impl GenConfig {
    pub fn new(target_n: usize) -> Self {
        GenConfig {
            target_n,
            max_degree1: None,
            max_parallel_class: None,
            split: None,
        }
    }
}

/// Per level counters, indexed by vertex count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenStats {
    /// Children built.
    pub generated: Vec<u64>,
    /// Children passing the canonicity test and the filters.
    pub accepted: Vec<u64>,
    pub rejected_by_canonicity: Vec<u64>,
    /// Canonical children removed by a filter.
    pub pruned_by_filter: Vec<u64>,
}

impl GenStats {
    fn new(n: usize) -> Self {
        GenStats {
            generated: vec![0; n + 1],
            accepted: vec![0; n + 1],
            rejected_by_canonicity: vec![0; n + 1],
            pruned_by_filter: vec![0; n + 1],
        }
    }

    pub fn merge(&mut self, other: &GenStats) {
        let n = self.generated.len().max(other.generated.len());
        for v in [
            &mut self.generated,
            &mut self.accepted,
            &mut self.rejected_by_canonicity,
            &mut self.pruned_by_filter,
        ] {
            v.resize(n, 0);
        }
        for i in 0..other.generated.len() {
            self.generated[i] += other.generated[i];
            self.accepted[i] += other.accepted[i];
            self.rejected_by_canonicity[i] += other.rejected_by_canonicity[i];
            self.pruned_by_filter[i] += other.pruned_by_filter[i];
        }
    }

    /// One line per level: `level <n>: generated G accepted A pruned P`.
    pub fn report(&self) -> String {
        let mut s = String::new();
        for n in 3..self.generated.len() {
            s.push_str(&format!(
                "level {n}: generated {} accepted {} pruned {}\n",
                self.generated[n], self.accepted[n], self.pruned_by_filter[n]
            ));
        }
        s
    }
}

struct Generator<'a, F: FnMut(&PlaneMap)> {
    cfg: &'a GenConfig,
    visit: F,
    stats: GenStats,
    split_counter: usize,
    scratch: AcceptScratch,
}

impl<F: FnMut(&PlaneMap)> Generator<'_, F> {
    fn passes(&self, q: &PlaneMap, leaf: bool) -> bool {
        if let Some(k) = self.cfg.max_degree1 {
            if q.degree1_count() > k {
                return false;
            }
        }
        if leaf {
            if let Some(k) = self.cfg.max_parallel_class {
                if q.max_parallel_class() > k {
                    return false;
                }
            }
        }
        true
    }

    /// Handles an accepted map; returns whether it is explored further.
    fn enter(&mut self, q: &PlaneMap, depth: usize) -> bool {
        let n = q.vertex_count();
        let leaf = n == self.cfg.target_n;
        if !self.passes(q, leaf) {
            self.stats.pruned_by_filter[n] += 1;
            return false;
        }
        if let Some((res, m, d)) = self.cfg.split {
            if depth == d {
                let i = self.split_counter;
                self.split_counter += 1;
                if i % m != res {
                    return false;
                }
            } else if leaf && depth < d && res != 0 {
                return false;
            }
        }
        self.stats.accepted[n] += 1;
        if leaf {
            (self.visit)(q);
            return false;
        }
        true
    }

    fn run(&mut self, q: &PlaneMap, depth: usize) {
        let sites = self.child_sites(q);
        let n = q.vertex_count() + 1;
        for site in sites {
            if !self.precheck(q, &site) {
                self.stats.rejected_by_canonicity[n] += 1;
                continue;
            }
            let (child, red) = extend_unchecked(q, site);
            self.stats.generated[n] += 1;
            if !canonical_accept_with(&child, &red, &mut self.scratch) {
                self.stats.rejected_by_canonicity[n] += 1;
                continue;
            }
            if self.enter(&child, depth + 1) {
                self.run(&child, depth + 1);
            }
        }
    }

    /// Extension sites of `q`, one per orbit of its automorphism group.
    fn child_sites(&mut self, q: &PlaneMap) -> Vec<ExtensionSite> {
        let pendants = q.degree1_count();
        let mut sites: Vec<ExtensionSite> = Vec::new();
        for g in 0..q.dart_count() {
            sites.push(ExtensionSite {
                kind: ExtKind::D1,
                anchor: g,
                partner: g,
            });
        }
        // A P0 or P1 child with a degree-1 vertex is never canonical, and
        // these extensions cover at most two degree-1 vertices.
        if pendants <= 2 {
            sites.extend(p0_sites(q));
            for d in 0..q.dart_count() {
                if !same_face(q, d, theta(d)) {
                    sites.push(ExtensionSite {
                        kind: ExtKind::P1,
                        anchor: d,
                        partner: d,
                    });
                }
            }
        }
        let cf = q.canonical_form(None);
        if cf.group_order() == 1 {
            return sites;
        }
        sites.retain(|s| {
            cf.automorphisms.iter().all(|a| {
                let img = image(q, a.orientation_preserving, &a.perm, s);
                img >= *s
            })
        });
        sites
    }

    /// Cheap rejections from the parent's degrees, before building the child.
    fn precheck(&self, q: &PlaneMap, site: &ExtensionSite) -> bool {
        match site.kind {
            ExtKind::D1 => {
                let g = site.anchor;
                let (w, x) = (q.vertex_of[g], q.vertex_of[theta(g)]);
                let mine = q.degree[w] + 2;
                for u in 0..q.vertex_count() {
                    if q.degree[u] == 1 && u != w && u != x {
                        let nb = q.vertex_of[theta(q.first_dart[u])];
                        let dn = q.degree[nb] + if nb == x { 1 } else { 0 };
                        if dn > mine {
                            return false;
                        }
                    }
                }
                true
            }
            ExtKind::P0 => {
                let (a, c) = (q.vertex_of[site.anchor], q.vertex_of[site.partner]);
                let covered = (q.degree[a] == 1) as usize + (q.degree[c] == 1) as usize;
                covered == q.degree1_count()
            }
            ExtKind::P1 => {
                let d = site.anchor;
                let a = q.vertex_of[theta(d)];
                if q.degree[a] <= 2 {
                    return false;
                }
                let y1 = q.vertex_of[opposite(q, d)];
                let y2 = q.vertex_of[phi(q, theta(d))];
                let covered =
                    (q.degree[y1] == 1) as usize + (y2 != y1 && q.degree[y2] == 1) as usize;
                covered == q.degree1_count()
            }
        }
    }
}

fn same_face(q: &PlaneMap, d: Dart, e: Dart) -> bool {
    let mut x = d;
    for _ in 0..4 {
        if x == e {
            return true;
        }
        x = phi(q, x);
    }
    false
}

/// Image of an extension site under an automorphism.
fn image(
    q: &PlaneMap,
    orientation_preserving: bool,
    perm: &[Dart],
    s: &ExtensionSite,
) -> ExtensionSite {
    match s.kind {
        ExtKind::D1 | ExtKind::P1 => {
            let d = perm[s.anchor];
            ExtensionSite {
                kind: s.kind,
                anchor: d,
                partner: d,
            }
        }
        ExtKind::P0 => {
            let corner = |c: Dart| {
                if orientation_preserving {
                    perm[c]
                } else {
                    q.sigma_inv[perm[c]]
                }
            };
            let (x, y) = (corner(s.anchor), corner(s.partner));
            ExtensionSite {
                kind: ExtKind::P0,
                anchor: x.min(y),
                partner: x.max(y),
            }
        }
    }
}

/// Generates every quadrangulation with `cfg.target_n` vertices exactly
/// once (up to isomorphism, including reflections), subject to the filters.
pub fn generate(cfg: &GenConfig, visit: impl FnMut(&PlaneMap)) -> GenStats {
    let mut g = Generator {
        cfg,
        visit,
        stats: GenStats::new(cfg.target_n.max(3)),
        split_counter: 0,
        scratch: AcceptScratch::default(),
    };
    if cfg.target_n < 3 {
        return g.stats;
    }
    let root = base_quad();
    g.stats.generated[3] = 1;
    if g.enter(&root, 0) {
        g.run(&root, 0);
    }
    g.stats
}

/// Number of quadrangulations with `n` vertices.
pub fn count(n: usize) -> u64 {
    let mut c = 0;
    generate(&GenConfig::new(n), |_| c += 1);
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(n: usize) -> Vec<PlaneMap> {
        let mut v = Vec::new();
        generate(&GenConfig::new(n), |q| v.push(q.clone()));
        v
    }

    #[test]
    fn base() {
        let b = base_quad();
        assert_eq!(
            (b.vertex_count(), b.edge_count(), b.face_count()),
            (3, 2, 1)
        );
        assert!(b.is_quadrangulation());
        assert_eq!(b.canonical_form(None).group_order(), 4);
        for k in [ExtKind::D1, ExtKind::P0, ExtKind::P1] {
            assert!(reduction_sites(&b, k).is_empty());
        }
    }

    #[test]
    fn every_extension_is_a_quadrangulation_and_reduces_back() {
        for n in 3..=5 {
            for q in all(n) {
                for s in extension_sites(&q) {
                    let (c, r) = extend(&q, s).unwrap();
                    assert!(c.is_quadrangulation(), "{s:?}");
                    assert_eq!(c.vertex_count(), n + 1);
                    assert!(is_reduction(&c, &r), "{s:?}");
                    assert!(reduce(&c, &r).unwrap().is_isomorphic(&q));
                }
            }
        }
    }

    #[test]
    fn every_reduction_extends_back() {
        for n in 4..=6 {
            for q in all(n) {
                for k in [ExtKind::D1, ExtKind::P0, ExtKind::P1] {
                    for r in reduction_sites(&q, k) {
                        let p = reduce(&q, &r).unwrap();
                        assert!(p.is_quadrangulation());
                        let back = extension_sites(&p)
                            .into_iter()
                            .filter(|s| s.kind == k)
                            .any(|s| extend(&p, s).unwrap().0.is_isomorphic(&q));
                        assert!(back, "{r:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn p3_extensions() {
        let p = base_quad();
        let c4 = extension_sites(&p)
            .into_iter()
            .filter(|s| s.kind == ExtKind::P0)
            .map(|s| extend(&p, s).unwrap().0)
            .collect::<Vec<_>>();
        assert_eq!(c4.len(), 1);
        assert!(c4[0].is_isomorphic(&PlaneMap::cycle(4)));
        let (d, _) = extend(
            &p,
            ExtensionSite {
                kind: ExtKind::D1,
                anchor: 0,
                partner: 0,
            },
        )
        .unwrap();
        assert_eq!(filter_state(&d), (2, 2));
    }

    #[test]
    fn c4_sites() {
        let c4 = PlaneMap::cycle(4);
        assert_eq!(reduction_sites(&c4, ExtKind::P0).len(), 4);
        assert!(reduction_sites(&c4, ExtKind::D1).is_empty());
        assert_eq!(filter_state(&c4), (0, 1));
        assert_eq!(filter_state(&base_quad()), (2, 1));
    }

    #[test]
    fn small_counts() {
        let want = [1, 3, 7, 30, 124, 733];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(count(i + 3), w, "n = {}", i + 3);
        }
    }

    #[test]
    fn outputs_are_pairwise_distinct() {
        let maps = all(7);
        let mut codes: Vec<_> = maps.iter().map(|m| m.canonical_form(None).code).collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), maps.len());
    }

    #[test]
    fn split_partitions_output() {
        let total = count(7);
        let mut sum = 0;
        for res in 0..3 {
            let cfg = GenConfig {
                split: Some((res, 3, 2)),
                ..GenConfig::new(7)
            };
            generate(&cfg, |_| sum += 1);
        }
        assert_eq!(sum, total);
    }
}
