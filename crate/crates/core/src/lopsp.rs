//! Lopsp-operations through their predecorations: enumeration over a
//! quadrangulation, expansion to the coloured triangulation and back,
//! c2/c3 classification and lsp recognition.

use std::collections::HashSet;

use thiserror::Error;

use crate::map::{theta, Dart, LopspRecord, MapEditor, PlaneMap, RecordKind, Vertex};
use crate::quad_gen::{generate, GenConfig, GenStats};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LopspError {
    #[error("invalid predecoration: {0}")]
    InvalidPredecoration(String),
    #[error("invalid operation: {0}")]
    InvalidOperation(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
}

/// Vertex count of the predecoration and whether `v1` has colour 1.
pub fn predecoration_params(k: usize) -> (usize, bool) {
    assert!(k >= 1, "inflation factor must be positive");
    if k % 2 == 0 {
        ((k + 4) / 2, false)
    } else {
        ((k + 5) / 2, true)
    }
}

/// A quadrangulation with three marks and a colouring of its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predecoration {
    pub quad: PlaneMap,
    /// `[v0, v1, v2]`.
    pub marks: [Vertex; 3],
    pub v1_colour1: bool,
    pub colour: Vec<u8>,
}

/// The colouring that gives colour `c0` to the class of vertex 0, with `v1`
/// overridden to colour 1 when asked.
fn colouring(side: &[bool], c0: u8, v1: Option<Vertex>) -> Vec<u8> {
    let mut colour: Vec<u8> = side.iter().map(|&s| if s { 2 - c0 } else { c0 }).collect();
    if let Some(v) = v1 {
        colour[v] = 1;
    }
    colour
}

impl Predecoration {
    /// `c0` is the colour (0 or 2) of the class of vertex 0.
    pub fn new(
        quad: PlaneMap,
        marks: [Vertex; 3],
        v1_colour1: bool,
        c0: u8,
    ) -> Result<Self, LopspError> {
        let side = quad
            .bipartition_sides()
            .map_err(|e| LopspError::InvalidPredecoration(e.to_string()))?;
        if marks.iter().any(|&v| v >= quad.vertex_count()) {
            return Err(LopspError::InvalidPredecoration("mark out of range".into()));
        }
        let colour = colouring(&side, c0, v1_colour1.then_some(marks[1]));
        let p = Predecoration {
            quad,
            marks,
            v1_colour1,
            colour,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn inflation_factor(&self) -> usize {
        self.quad.edge_count() - self.v1_colour1 as usize
    }

    pub fn validate(&self) -> Result<(), LopspError> {
        let bad = |s: &str| Err(LopspError::InvalidPredecoration(s.into()));
        let q = &self.quad;
        let [v0, v1, v2] = self.marks;
        if !q.is_quadrangulation() {
            return bad("not a quadrangulation");
        }
        if self.colour.len() != q.vertex_count() {
            return bad("colouring has the wrong length");
        }
        if v0 == v1 || v1 == v2 || v0 == v2 || self.marks.iter().any(|&v| v >= q.vertex_count()) {
            return bad("marks must be distinct vertices");
        }
        for d in 0..q.dart_count() {
            let (a, b) = (q.tail(d), q.head(d));
            if self.v1_colour1 && (a == v1 || b == v1) {
                continue;
            }
            let (ca, cb) = (self.colour[a], self.colour[b]);
            if ca == 1 || cb == 1 || ca == cb {
                return bad("colouring is not a proper {0,2}-colouring");
            }
        }
        if self.v1_colour1 {
            if self.colour[v1] != 1 || q.degree(v1) != 1 {
                return bad("v1 of colour 1 must be a pendant vertex");
            }
            if self.colour[q.neighbours(v1)[0]] != 0 {
                return bad("the neighbour of v1 must have colour 0");
            }
        } else if self.colour[v1] == 1 {
            return bad("v1 has colour 1 but the flag is unset");
        }
        Ok(())
    }

    pub fn to_record(&self) -> LopspRecord {
        LopspRecord {
            kind: RecordKind::Predeco {
                v1_colour1: self.v1_colour1,
            },
            map: self.quad.clone(),
            colour: self.colour.clone(),
            marks: self.marks,
            comments: Vec::new(),
        }
    }

    pub fn from_record(r: &LopspRecord) -> Result<Self, LopspError> {
        let RecordKind::Predeco { v1_colour1 } = r.kind else {
            return Err(LopspError::InvalidPredecoration(
                "not a predecoration record".into(),
            ));
        };
        let p = Predecoration {
            quad: r.map.clone(),
            marks: r.marks,
            v1_colour1,
            colour: r.colour.clone(),
        };
        p.validate()?;
        Ok(p)
    }
}

/// A 3-coloured plane triangulation with marks `v0, v1, v2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LopspOperation {
    pub map: PlaneMap,
    pub colour: Vec<u8>,
    pub marks: [Vertex; 3],
}

impl LopspOperation {
    pub fn inflation_factor(&self) -> usize {
        self.map.face_count() / 2
    }

    pub fn validate(&self) -> Result<(), LopspError> {
        let bad = |s: &str| Err(LopspError::InvalidOperation(s.into()));
        let m = &self.map;
        let [v0, v1, v2] = self.marks;
        if m.genus() != 0 || m.faces().sizes().iter().any(|&s| s != 3) {
            return bad("not a plane triangulation");
        }
        if self.colour.len() != m.vertex_count()
            || self.marks.iter().any(|&v| v >= m.vertex_count())
        {
            return bad("colouring or marks out of range");
        }
        if v0 == v1 || v1 == v2 || v0 == v2 {
            return bad("marks must be distinct");
        }
        if (0..m.dart_count()).any(|d| self.colour[m.tail(d)] == self.colour[m.head(d)]) {
            return bad("colouring is not proper");
        }
        if self.colour[v0] == 1 || self.colour[v2] == 1 {
            return bad("v0 and v2 must not have colour 1");
        }
        for v in 0..m.vertex_count() {
            if self.colour[v] == 1 {
                let want = if v == v1 { 2 } else { 4 };
                if m.degree(v) != want {
                    return bad("colour-1 vertex of wrong degree");
                }
            }
        }
        if !is_two_connected(m) {
            return bad("not 2-connected");
        }
        Ok(())
    }

    pub fn to_record(&self) -> LopspRecord {
        LopspRecord {
            kind: RecordKind::Lopsp {
                k: self.inflation_factor(),
            },
            map: self.map.clone(),
            colour: self.colour.clone(),
            marks: self.marks,
            comments: Vec::new(),
        }
    }

    pub fn from_record(r: &LopspRecord) -> Result<Self, LopspError> {
        let o = LopspOperation {
            map: r.map.clone(),
            colour: r.colour.clone(),
            marks: r.marks,
        };
        o.validate()?;
        if let RecordKind::Lopsp { k } = r.kind {
            if k != o.inflation_factor() {
                return Err(LopspError::InvalidOperation(
                    "inflation factor does not match".into(),
                ));
            }
        }
        Ok(o)
    }

    /// The identity: a triangle on `v0, v1, v2` seen from both sides.
    pub fn identity() -> Self {
        expand(&Predecoration::new(PlaneMap::path3(), [1, 0, 2], true, 2).unwrap()).unwrap()
    }

    /// Dual: vertices and faces exchange roles.
    pub fn dual() -> Self {
        expand(&Predecoration::new(PlaneMap::path3(), [2, 0, 1], true, 2).unwrap()).unwrap()
    }

    /// Gyro: every face becomes a ring of pentagons around a central vertex.
    pub fn gyro() -> Self {
        let q = PlaneMap::from_rotation(
            5,
            &[
                vec![0, 8, 10, 4, 6],
                vec![1, 2, 7, 11],
                vec![3],
                vec![5],
                vec![9],
            ],
        )
        .expect("valid rotation");
        expand(&Predecoration::new(q, [3, 2, 4], true, 2).unwrap()).unwrap()
    }

    /// Join: vertices and faces of the map both become vertices.
    pub fn join() -> Self {
        expand(&Predecoration::new(PlaneMap::path3(), [0, 1, 2], false, 0).unwrap()).unwrap()
    }
}

/// No vertex whose removal disconnects the map (loops would also fail).
fn is_two_connected(m: &PlaneMap) -> bool {
    let n = m.vertex_count();
    if n < 3 {
        return false;
    }
    for cut in 0..n {
        let start = if cut == 0 { 1 } else { 0 };
        let mut seen = vec![false; n];
        seen[cut] = true;
        seen[start] = true;
        let mut stack = vec![start];
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for w in m.neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != n - 1 {
            return false;
        }
    }
    (0..m.dart_count()).all(|d| m.tail(d) != m.head(d))
}

/// Adds a colour-1 vertex inside every face. With `v1_colour1` the face
/// around `v1` gets the edge from `v1` to its opposite corner instead.
pub fn expand(p: &Predecoration) -> Result<LopspOperation, LopspError> {
    p.validate()?;
    let q = &p.quad;
    let v1 = p.marks[1];
    let mut ed = MapEditor::new(q);
    let mut colour = p.colour.clone();
    let mut done = vec![false; q.dart_count()];
    let special = p.v1_colour1.then(|| q.first_dart(v1));
    for d0 in 0..q.dart_count() {
        if done[d0] {
            continue;
        }
        let walk = [d0, q.phi(d0), q.phi(q.phi(d0)), q.phi(q.phi(q.phi(d0)))];
        for &d in &walk {
            done[d] = true;
        }
        if let Some(s) = special.filter(|s| walk.contains(s)) {
            ed.add_edge_after(s, q.phi(q.phi(s)));
            continue;
        }
        let c = ed.add_vertex();
        colour.push(1);
        let mut prev = theta(ed.add_edge_to_new(walk[0], c));
        for &d in walk[1..].iter().rev() {
            prev = theta(ed.add_edge_after(d, prev));
        }
    }
    let map = ed
        .finish()
        .map_err(|e| LopspError::InvalidOperation(e.to_string()))?;
    let o = LopspOperation {
        map,
        colour,
        marks: p.marks,
    };
    o.validate()?;
    Ok(o)
}

/// The submap on the vertices of colours 0 and 2 with the edges between
/// them, plus `v1` and its edge to a colour-0 vertex when `v1` has colour 1.
pub fn predecoration_of(o: &LopspOperation) -> Result<Predecoration, LopspError> {
    o.validate()?;
    let m = &o.map;
    let v1 = o.marks[1];
    let mut ed = MapEditor::new(m);
    let mut alive = vec![true; m.vertex_count()];
    for v in 0..m.vertex_count() {
        if o.colour[v] == 1 && v != v1 {
            ed.remove_vertex(v);
            alive[v] = false;
        }
    }
    let v1_colour1 = o.colour[v1] == 1;
    if v1_colour1 {
        let d = m
            .darts_at(v1)
            .find(|&d| o.colour[m.head(d)] == 2)
            .expect("v1 has a colour-2 neighbour");
        ed.remove_edge_of(d);
    }
    let quad = ed
        .finish()
        .map_err(|e| LopspError::InvalidPredecoration(e.to_string()))?;
    let mut id = vec![usize::MAX; m.vertex_count()];
    let mut next = 0;
    for v in 0..m.vertex_count() {
        if alive[v] {
            id[v] = next;
            next += 1;
        }
    }
    let colour = (0..m.vertex_count())
        .filter(|&v| alive[v])
        .map(|v| o.colour[v])
        .collect();
    let p = Predecoration {
        quad,
        marks: o.marks.map(|v| id[v]),
        v1_colour1,
        colour,
    };
    p.validate()?;
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dedup {
    Full,
    OrientationPreserving,
}

/// Which operations to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpClass {
    All,
    C2,
    C3,
}

/// Restrictions that marks must satisfy, as vertex bitmasks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Constraints {
    /// Sides of parallel pairs: each must hold some mark.
    pub c2: Vec<u64>,
    /// Interiors of size-2 faces of submaps.
    pub two: Vec<u64>,
    /// Vertex sets of non-empty interiors of size-4 faces of submaps.
    pub four: Vec<u64>,
}

impl Constraints {
    /// Only the parallel pairs.
    pub fn c2_only(q: &PlaneMap) -> Self {
        let mut c = Constraints::default();
        let mut faces = Vec::new();
        for mask in connected_edge_sets(q, 2) {
            if mask.count_ones() == 2 && is_parallel_pair(q, mask) {
                faces.clear();
                small_faces(q, mask, &mut faces);
                c.c2.extend(faces.iter().map(|f| f.interior));
            }
        }
        c.c2.sort_unstable();
        c.c2.dedup();
        c
    }

    /// Size-2 faces only (submaps of at most two edges); enough to rule
    /// out most quadrangulations before the expensive part.
    pub fn add_two(&mut self, q: &PlaneMap) {
        self.scan(q, 2);
    }

    /// Everything the c3 test needs.
    pub fn full(q: &PlaneMap) -> Self {
        Constraints::up_to(q, 4)
    }

    /// Faces of submaps with at most `max_edges` edges.
    pub fn up_to(q: &PlaneMap, max_edges: usize) -> Self {
        let mut c = Constraints::c2_only(q);
        c.scan(q, max_edges);
        c
    }

    fn scan(&mut self, q: &PlaneMap, max_edges: usize) {
        let mut faces = Vec::new();
        for mask in connected_edge_sets(q, max_edges) {
            faces.clear();
            small_faces(q, mask, &mut faces);
            for f in &faces {
                match f.size {
                    2 => self.two.push(f.interior),
                    4 if f.non_empty => self.four.push(f.interior),
                    _ => {}
                }
            }
        }
        for v in [&mut self.two, &mut self.four] {
            v.sort_unstable();
            v.dedup();
        }
    }

    pub fn c2_holds(&self, marks: [Vertex; 3]) -> bool {
        let m = marks.iter().fold(0u64, |a, &v| a | 1 << v);
        self.c2.iter().all(|&s| s & m != 0)
    }

    pub fn two_holds(&self, marks: [Vertex; 3], v1_colour1: bool) -> bool {
        let m02 = 1u64 << marks[0] | 1 << marks[2];
        let only_v1 = if v1_colour1 {
            1u64 << marks[1]
        } else {
            u64::MAX
        };
        self.two.iter().all(|&s| s & m02 != 0 || s == only_v1)
    }

    pub fn c3_holds(&self, marks: [Vertex; 3], v1_colour1: bool) -> bool {
        let m = marks.iter().fold(0u64, |a, &v| a | 1 << v);
        self.two_holds(marks, v1_colour1) && self.four.iter().all(|&s| s & m != 0)
    }
}

fn is_parallel_pair(q: &PlaneMap, mask: u64) -> bool {
    let a = mask.trailing_zeros() as usize;
    let b = (mask & (mask - 1)).trailing_zeros() as usize;
    let (x, y) = (q.tail(2 * a), q.head(2 * a));
    x != y && ((q.tail(2 * b), q.head(2 * b)) == (x, y) || (q.tail(2 * b), q.head(2 * b)) == (y, x))
}

/// Connected edge sets with at most `max` edges, as bitmasks over edges.
fn connected_edge_sets(q: &PlaneMap, max: usize) -> Vec<u64> {
    assert!(
        q.edge_count() <= 64 && q.vertex_count() <= 64,
        "map too large for bitmasks"
    );
    let mut incident = vec![0u64; q.vertex_count()];
    for d in 0..q.dart_count() {
        incident[q.tail(d)] |= 1 << (d / 2);
    }
    let ends = |mask: u64| {
        let mut vs = 0u64;
        let mut m = mask;
        while m != 0 {
            let e = m.trailing_zeros() as usize;
            m &= m - 1;
            vs |= 1 << q.tail(2 * e) | 1 << q.head(2 * e);
        }
        vs
    };
    let mut seen: HashSet<u64> = HashSet::new();
    let mut layer: Vec<u64> = (0..q.edge_count()).map(|e| 1u64 << e).collect();
    let mut out = layer.clone();
    for _ in 1..max {
        let mut next = Vec::new();
        for &mask in &layer {
            let mut vs = ends(mask);
            let mut cand = 0u64;
            while vs != 0 {
                let v = vs.trailing_zeros() as usize;
                vs &= vs - 1;
                cand |= incident[v];
            }
            cand &= !mask;
            while cand != 0 {
                let e = cand.trailing_zeros();
                cand &= cand - 1;
                let m = mask | 1 << e;
                if seen.insert(m) {
                    next.push(m);
                }
            }
        }
        out.extend_from_slice(&next);
        layer = next;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SmallFace {
    size: usize,
    interior: u64,
    non_empty: bool,
}

/// Faces of size 2 or 4 of the submap formed by the edges in `mask`, with
/// the vertices of `q` strictly inside each.
fn small_faces(q: &PlaneMap, mask: u64, out: &mut Vec<SmallFace>) {
    let in_h = |d: Dart| mask >> (d / 2) & 1 == 1;
    let mut hv = 0u64;
    let mut darts = Vec::with_capacity(8);
    let mut m = mask;
    while m != 0 {
        let e = m.trailing_zeros() as usize;
        m &= m - 1;
        darts.extend([2 * e, 2 * e + 1]);
        hv |= 1 << q.tail(2 * e) | 1 << q.head(2 * e);
    }
    let sigma_h = |d: Dart| {
        let mut x = q.sigma(d);
        while !in_h(x) {
            x = q.sigma(x);
        }
        x
    };
    let mut done: Vec<Dart> = Vec::with_capacity(darts.len());
    for &start in &darts {
        if done.contains(&start) {
            continue;
        }
        let mut walk = Vec::with_capacity(4);
        let mut d = start;
        loop {
            walk.push(d);
            done.push(d);
            d = theta(sigma_h(d));
            if d == start {
                break;
            }
        }
        if walk.len() != 2 && walk.len() != 4 {
            continue;
        }
        let mut interior = 0u64;
        let mut non_empty = false;
        let mut stack = Vec::new();
        for &d in &walk {
            let stop = sigma_h(d);
            let mut x = q.sigma(d);
            while x != stop {
                non_empty = true;
                let h = q.head(x);
                if hv >> h & 1 == 0 && interior >> h & 1 == 0 {
                    interior |= 1 << h;
                    stack.push(h);
                }
                x = q.sigma(x);
            }
        }
        while let Some(v) = stack.pop() {
            for x in q.darts_at(v) {
                let h = q.head(x);
                if hv >> h & 1 == 0 && interior >> h & 1 == 0 {
                    interior |= 1 << h;
                    stack.push(h);
                }
            }
        }
        out.push(SmallFace {
            size: walk.len(),
            interior,
            non_empty,
        });
    }
}

/// Every pair of parallel edges has a mark strictly inside each side.
pub fn is_c2(p: &Predecoration) -> bool {
    Constraints::c2_only(&p.quad).c2_holds(p.marks)
}

/// Requires c2. Checks the face conditions on every submap with at most
/// four edges, which bound every size-2 and size-4 face of any submap.
pub fn is_c3(p: &Predecoration) -> Result<bool, LopspError> {
    let c = Constraints::full(&p.quad);
    if !c.c2_holds(p.marks) {
        return Err(LopspError::PreconditionViolated("operation is not c2"));
    }
    Ok(c.c3_holds(p.marks, p.v1_colour1))
}

/// Some orientation-reversing automorphism fixes the three marks.
pub fn is_lsp(p: &Predecoration) -> bool {
    let q = &p.quad;
    q.automorphisms(None).iter().any(|a| {
        !a.orientation_preserving && {
            let vm = a.vertex_map(q);
            p.marks.iter().all(|&v| vm[v] == v)
                && (0..q.vertex_count()).all(|v| p.colour[vm[v]] == p.colour[v])
        }
    })
}

/// `flags` comment for a lopsp_text record.
pub fn classification_comment(c2: bool, c3: bool, lsp: bool) -> String {
    format!("c2={c2} c3={c3} lsp={lsp}")
}

/// Vertex action of the automorphism group on a quadrangulation.
struct Group {
    side: Vec<bool>,
    /// Vertex map, orientation preserving, swaps the colour classes.
    elements: Vec<(Vec<Vertex>, bool, bool)>,
}

impl Group {
    fn new(q: &PlaneMap) -> Self {
        let side = q
            .bipartition_sides()
            .expect("quadrangulations are bipartite");
        let elements = q
            .automorphisms(None)
            .into_iter()
            .map(|a| {
                let vm = a.vertex_map(q);
                let swap = side[vm[0]] != side[0];
                (vm, a.orientation_preserving, swap)
            })
            .collect();
        Group { side, elements }
    }

    /// Whether the state is the smallest in its orbit under the full group
    /// and under the orientation-preserving subgroup.
    fn minimal(&self, marks: [Vertex; 3], c0: u8) -> (bool, bool) {
        let (mut full, mut op) = (true, true);
        for (vm, pres, swap) in &self.elements {
            let img = (
                [vm[marks[0]], vm[marks[1]], vm[marks[2]]],
                if *swap { 2 - c0 } else { c0 },
            );
            if img < (marks, c0) {
                full = false;
                if *pres {
                    op = false;
                    break;
                }
            }
        }
        (full, op)
    }

    fn lsp(&self, marks: [Vertex; 3]) -> bool {
        self.elements.iter().any(|(vm, pres, swap)| {
            let fixes = !pres && marks.iter().all(|&v| vm[v] == v);
            debug_assert!(!(fixes && *swap), "class swap fixing a vertex");
            fixes
        })
    }
}

/// Visits one representative of every class of marked, coloured
/// quadrangulations on `q` with inflation factor `k`. Returns the count.
pub fn enumerate_ops(
    q: &PlaneMap,
    k: usize,
    dedup: Dedup,
    mut visit: impl FnMut(&Predecoration),
) -> u64 {
    let (n, v1_colour1) = predecoration_params(k);
    assert_eq!(
        q.vertex_count(),
        n,
        "wrong vertex count for this inflation factor"
    );
    let g = Group::new(q);
    let mut count = 0;
    for_each_state(q, &g.side, v1_colour1, |marks, c0| {
        let (full, op) = g.minimal(marks, c0);
        let keep = match dedup {
            Dedup::Full => full,
            Dedup::OrientationPreserving => op,
        };
        if keep {
            count += 1;
            let colour = colouring(&g.side, c0, v1_colour1.then_some(marks[1]));
            visit(&Predecoration {
                quad: q.clone(),
                marks,
                v1_colour1,
                colour,
            });
        }
    });
    count
}

fn for_each_state(
    q: &PlaneMap,
    side: &[bool],
    v1_colour1: bool,
    mut f: impl FnMut([Vertex; 3], u8),
) {
    let n = q.vertex_count();
    for v1 in 0..n {
        let forced = if v1_colour1 {
            if q.degree(v1) != 1 {
                continue;
            }
            let w = q.neighbours(v1)[0];
            Some(if side[w] { 2 } else { 0 })
        } else {
            None
        };
        for v0 in (0..n).filter(|&v| v != v1) {
            for v2 in (0..n).filter(|&v| v != v1 && v != v0) {
                match forced {
                    Some(c0) => f([v0, v1, v2], c0),
                    None => {
                        f([v0, v1, v2], 0);
                        f([v0, v1, v2], 2);
                    }
                }
            }
        }
    }
}

/// Class counts: `op` counts mirror images separately.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub tot: u64,
    pub lsp: u64,
    pub chir: u64,
    pub op: u64,
}

impl Counts {
    fn add(&mut self, o: &Counts) {
        self.tot += o.tot;
        self.lsp += o.lsp;
        self.chir += o.chir;
        self.op += o.op;
    }
}

/// Intermediate numbers of a counting run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub gen: GenStats,
    /// Quadrangulations with the right vertex count that were examined.
    pub quads: u64,
    /// Quadrangulations left after the cheap filters.
    pub candidates: u64,
    /// Quadrangulations carrying at least one operation of the class.
    pub bearing: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub k: usize,
    pub class: OpClass,
    /// Filled when `class` is `All`.
    pub all: Option<Counts>,
    /// Filled unless `class` is `C3`.
    pub c2: Option<Counts>,
    pub c3: Counts,
    pub diagnostics: Diagnostics,
}

impl CountReport {
    /// Counts for the requested class.
    pub fn selected(&self) -> Counts {
        match self.class {
            OpClass::All => self.all.unwrap(),
            OpClass::C2 => self.c2.unwrap(),
            OpClass::C3 => self.c3,
        }
    }
}

impl std::fmt::Display for CountReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let row = |f: &mut std::fmt::Formatter<'_>, name: &str, c: &Counts| {
            writeln!(
                f,
                "k={} {name}: tot {} lsp {} chir {} op {}",
                self.k, c.tot, c.lsp, c.chir, c.op
            )
        };
        if let Some(c) = &self.all {
            row(f, "all", c)?;
        }
        if let Some(c) = &self.c2 {
            row(f, "c2", c)?;
        }
        row(f, "c3", &self.c3)?;
        let d = &self.diagnostics;
        write!(
            f,
            "quads {} candidates {} bearing {}",
            d.quads, d.candidates, d.bearing
        )
    }
}

/// Pendant and parallel-class limits that no operation of the class can
/// exceed. A pendant vertex lies alone inside a 2-cycle (or the map is the
/// path on three vertices), so it must be a mark. `m` parallel edges bound
/// `m` disjoint regions that each need their own mark; for c3 only `v0`,
/// `v2` and a lone colour-1 `v1` qualify.
pub fn class_limits(k: usize, class: OpClass) -> (Option<usize>, Option<usize>) {
    match class {
        OpClass::All => (None, None),
        OpClass::C2 => (Some(3), Some(3)),
        OpClass::C3 if k % 2 == 0 => (Some(2), Some(2)),
        OpClass::C3 => (Some(3), Some(3)),
    }
}

/// Per quadrangulation counting used by the pipeline.
fn count_quad(
    q: &PlaneMap,
    k: usize,
    class: OpClass,
    out: &mut [Counts; 3],
    diag: &mut Diagnostics,
) {
    let (_, v1_colour1) = predecoration_params(k);
    diag.quads += 1;
    let (_, max_par) = class_limits(k, class);
    if max_par.is_some_and(|m| q.max_parallel_class() > m) {
        return;
    }
    // c3 needs some placement of v0 and v2 meeting all size-2 faces.
    if class == OpClass::C3 {
        let mut cons = Constraints::default();
        cons.add_two(q);
        let n = q.vertex_count();
        let possible = (0..n).any(|a| {
            (a + 1..n).any(|b| {
                (0..n).any(|v1| v1 != a && v1 != b && cons.two_holds([a, v1, b], v1_colour1))
            })
        });
        if !possible {
            return;
        }
    }
    diag.candidates += 1;
    let cons = Constraints::full(q);
    let g = Group::new(q);
    // The generator emits one of a quadrangulation and its mirror image;
    // for a chiral one the mirror carries the mirrored operations.
    let op_weight = if g.elements.iter().any(|e| !e.1) {
        1
    } else {
        2
    };
    let mut found = false;
    for_each_state(q, &g.side, v1_colour1, |marks, c0| {
        let c2 = cons.c2_holds(marks);
        let c3 = c2 && cons.c3_holds(marks, v1_colour1);
        let keep = [class == OpClass::All, class != OpClass::C3 && c2, c3];
        if !keep.iter().any(|&b| b) {
            return;
        }
        let (full, op) = g.minimal(marks, c0);
        if !full && !op {
            return;
        }
        let lsp = full && g.lsp(marks);
        for (slot, &b) in out.iter_mut().zip(&keep) {
            if b {
                if full {
                    slot.tot += 1;
                    if lsp {
                        slot.lsp += 1;
                    } else {
                        slot.chir += 1;
                    }
                }
                if op {
                    slot.op += op_weight;
                }
            }
        }
        found |= keep[class as usize];
    });
    if found {
        diag.bearing += 1;
    }
}

/// Flags of an emitted operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpFlags {
    pub c2: bool,
    pub c3: bool,
    pub lsp: bool,
}

/// Visits every operation of the class with inflation factor `k` once.
/// With `Dedup::OrientationPreserving` mirror images are visited as
/// separate operations.
pub fn for_each_op(
    k: usize,
    class: OpClass,
    dedup: Dedup,
    mut visit: impl FnMut(&Predecoration, OpFlags),
) -> GenStats {
    let (n, v1_colour1) = predecoration_params(k);
    let (max_deg1, max_par) = class_limits(k, class);
    let mut cfg = GenConfig::new(n);
    cfg.max_degree1 = max_deg1;
    generate(&cfg, |q| {
        if max_par.is_some_and(|m| q.max_parallel_class() > m) {
            return;
        }
        let cons = Constraints::full(q);
        let mut hosts = vec![q.clone()];
        if dedup == Dedup::OrientationPreserving && !q.canonical_form(None).has_reflection() {
            hosts.push(q.mirror());
        }
        for h in &hosts {
            enumerate_ops(h, k, dedup, |p| {
                let c2 = cons.c2_holds(p.marks);
                let c3 = c2 && cons.c3_holds(p.marks, v1_colour1);
                let keep = match class {
                    OpClass::All => true,
                    OpClass::C2 => c2,
                    OpClass::C3 => c3,
                };
                if keep {
                    visit(
                        p,
                        OpFlags {
                            c2,
                            c3,
                            lsp: is_lsp(p),
                        },
                    );
                }
            });
        }
    })
}

/// Counts all operations of the class with inflation factor `k`, running
/// the generator on `threads` workers.
pub fn count_report(k: usize, class: OpClass, threads: usize) -> CountReport {
    let (n, _) = predecoration_params(k);
    let (max_deg1, _) = class_limits(k, class);
    let mut cfg = GenConfig::new(n);
    cfg.max_degree1 = max_deg1;
    let threads = threads.max(1);
    let run = |cfg: &GenConfig| {
        let mut counts = [Counts::default(); 3];
        let mut diag = Diagnostics::default();
        diag.gen = generate(cfg, |q| count_quad(q, k, class, &mut counts, &mut diag));
        (counts, diag)
    };
    let parts: Vec<([Counts; 3], Diagnostics)> = if threads == 1 || n < 8 {
        vec![run(&cfg)]
    } else {
        let modulus = 8 * threads;
        let next = std::sync::atomic::AtomicUsize::new(0);
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|_| {
                    s.spawn(|| {
                        let mut acc = Vec::new();
                        loop {
                            let res = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                            if res >= modulus {
                                break;
                            }
                            let mut c = cfg.clone();
                            c.split = Some((res, modulus, 3));
                            acc.push(run(&c));
                        }
                        acc
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().unwrap())
                .collect()
        })
    };
    let mut counts = [Counts::default(); 3];
    let mut diag = Diagnostics::default();
    for (i, (c, d)) in parts.iter().enumerate() {
        for j in 0..3 {
            counts[j].add(&c[j]);
        }
        if i == 0 {
            diag.gen = d.gen.clone();
        } else {
            diag.gen.merge(&d.gen);
        }
        diag.quads += d.quads;
        diag.candidates += d.candidates;
        diag.bearing += d.bearing;
    }
    for c in &counts {
        assert_eq!(c.tot, c.lsp + c.chir);
        assert_eq!(
            c.op,
            2 * c.tot - c.lsp,
            "orientation-preserving count mismatch"
        );
    }
    CountReport {
        k,
        class,
        all: (class == OpClass::All).then_some(counts[0]),
        c2: (class != OpClass::C3).then_some(counts[1]),
        c3: counts[2],
        diagnostics: diag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quads(n: usize) -> Vec<PlaneMap> {
        let mut v = Vec::new();
        generate(&GenConfig::new(n), |q| v.push(q.clone()));
        v
    }

    fn all_ops(k: usize) -> Vec<Predecoration> {
        let (n, _) = predecoration_params(k);
        let mut v = Vec::new();
        for q in quads(n) {
            enumerate_ops(&q, k, Dedup::Full, |p| v.push(p.clone()));
        }
        v
    }

    #[test]
    fn params() {
        assert_eq!(predecoration_params(1), (3, true));
        assert_eq!(predecoration_params(2), (3, false));
        assert_eq!(predecoration_params(20), (12, false));
    }

    #[test]
    fn identity_is_a_doubled_triangle() {
        let id = LopspOperation::identity();
        assert_eq!(
            (
                id.map.vertex_count(),
                id.map.edge_count(),
                id.map.face_count()
            ),
            (3, 3, 2)
        );
        assert_eq!(id.inflation_factor(), 1);
        assert_eq!(id.colour[id.marks[0]], 0);
        assert_eq!(id.colour[id.marks[1]], 1);
        assert_eq!(id.colour[id.marks[2]], 2);
        let p = predecoration_of(&id).unwrap();
        assert!(p.quad.is_isomorphic(&PlaneMap::path3()));
        assert!(p.v1_colour1 && p.quad.degree(p.marks[1]) == 1);
        assert!(is_lsp(&p));
    }

    #[test]
    fn join_predecoration() {
        let j = LopspOperation::join();
        assert_eq!(j.inflation_factor(), 2);
        let p = predecoration_of(&j).unwrap();
        assert_eq!(p.quad.vertex_count(), 3);
        assert!(!p.v1_colour1);
    }

    #[test]
    fn small_enumeration_counts() {
        assert_eq!(enumerate_ops(&PlaneMap::path3(), 1, Dedup::Full, |_| {}), 2);
        assert_eq!(enumerate_ops(&PlaneMap::path3(), 2, Dedup::Full, |_| {}), 6);
        assert_eq!(all_ops(3).len(), 12);
        assert_eq!(all_ops(4).len(), 54);
    }

    #[test]
    fn expand_round_trip() {
        for k in 1..=6 {
            for p in all_ops(k) {
                let o = expand(&p).unwrap();
                assert_eq!(o.inflation_factor(), k);
                let back = predecoration_of(&o).unwrap();
                assert_eq!(back, p);
            }
        }
    }

    #[test]
    fn classification_small() {
        let count = |k: usize| {
            let ops = all_ops(k);
            let c2: Vec<_> = ops.iter().filter(|p| is_c2(p)).collect();
            let c3 = c2.iter().filter(|p| is_c3(p).unwrap()).count();
            let lsp = ops.iter().filter(|p| is_lsp(p)).count();
            (ops.len(), lsp, c2.len(), c3)
        };
        assert_eq!(count(1), (2, 2, 2, 2));
        assert_eq!(count(2), (6, 6, 6, 2));
        assert_eq!(count(3), (12, 12, 8, 4));
        assert_eq!(count(4), (54, 54, 30, 6));
        assert_eq!(count(5), (86, 64, 38, 8));
    }

    #[test]
    fn c3_markings_on_path() {
        // Only the end, middle, end markings survive.
        let mut ok = Vec::new();
        enumerate_ops(&PlaneMap::path3(), 2, Dedup::Full, |p| {
            if is_c3(p).unwrap() {
                ok.push(p.marks);
            }
        });
        assert_eq!(ok.len(), 2);
        assert!(ok.iter().all(|m| m[1] == 1));
    }

    #[test]
    fn c3_requires_c2() {
        let p = all_ops(4).into_iter().find(|p| !is_c2(p)).unwrap();
        assert!(matches!(
            is_c3(&p),
            Err(LopspError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn reports_match_direct_counts() {
        for k in 1..=6 {
            let r = count_report(k, OpClass::All, 1);
            let ops = all_ops(k);
            let all = r.all.unwrap();
            assert_eq!(all.tot, ops.len() as u64);
            assert_eq!(all.lsp, ops.iter().filter(|p| is_lsp(p)).count() as u64);
            let op = {
                let (n, _) = predecoration_params(k);
                let weight = |q: &PlaneMap| {
                    if q.canonical_form(None).has_reflection() {
                        1
                    } else {
                        2
                    }
                };
                quads(n)
                    .iter()
                    .map(|q| weight(q) * enumerate_ops(q, k, Dedup::OrientationPreserving, |_| {}))
                    .sum::<u64>()
            };
            assert_eq!(all.op, op);
            let r3 = count_report(k, OpClass::C3, 1);
            assert_eq!(r3.c3, r.c3);
            let r2 = count_report(k, OpClass::C2, 1);
            assert_eq!(r2.c2, r.c2);
        }
    }

    #[test]
    fn four_parallel_edges_are_never_c2() {
        let q = quads(6)
            .into_iter()
            .find(|q| q.max_parallel_class() >= 4)
            .unwrap();
        enumerate_ops(&q, 8, Dedup::Full, |p| assert!(!is_c2(p)));
    }

    #[test]
    fn text_records() {
        let p = all_ops(3).pop().unwrap();
        let mut r = p.to_record();
        r.comments
            .push(classification_comment(is_c2(&p), false, is_lsp(&p)));
        let text = crate::map::codec::write_lopsp_text(&[r]);
        let back = crate::map::codec::read_lopsp_text(&text).unwrap();
        assert_eq!(Predecoration::from_record(&back[0]).unwrap(), p);
        let o = expand(&p).unwrap();
        let back = crate::map::codec::read_lopsp_text(&o.to_record().to_text()).unwrap();
        assert_eq!(LopspOperation::from_record(&back[0]).unwrap(), o);
    }

    #[test]
    fn streaming_matches_counts() {
        for k in 1..=7 {
            for class in [OpClass::All, OpClass::C2, OpClass::C3] {
                let c = count_report(k, class, 1).selected();
                let (mut tot, mut lsp) = (0, 0);
                for_each_op(k, class, Dedup::Full, |_, f| {
                    tot += 1;
                    lsp += f.lsp as u64;
                });
                assert_eq!((tot, lsp), (c.tot, c.lsp), "k={k} {class:?}");
                let mut op = 0;
                for_each_op(k, class, Dedup::OrientationPreserving, |_, _| op += 1);
                assert_eq!(op, c.op, "k={k} {class:?}");
            }
        }
    }
}
