//! Canonical codes and automorphism groups.
//!
//! A code is produced by a breadth-first labelling of darts from a start
//! dart in one of the two orientations. Darts are numbered in discovery
//! order; for each dart in that order the code records the vertex label and
//! degree of its tail, then the numbers of its rotation successor and of its
//! reverse. The pair (rotation, reverse) of a connected map is recoverable
//! from the code, so equal codes mean an isomorphism mapping start to start.

use std::cmp::Ordering;

use super::{theta, Dart, PlaneMap, Vertex};

/// A dart permutation commuting with `theta`, and with `sigma` (orientation
/// preserving) or with `sigma` inverted (orientation reversing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub perm: Vec<Dart>,
    pub orientation_preserving: bool,
}

impl Automorphism {
    pub fn identity(dart_count: usize) -> Self {
        Automorphism {
            perm: (0..dart_count).collect(),
            orientation_preserving: true,
        }
    }

    pub fn vertex_map(&self, m: &PlaneMap) -> Vec<Vertex> {
        (0..m.vertex_count())
            .map(|v| m.tail(self.perm[m.first_dart(v)]))
            .collect()
    }

    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        // (self . other)(d) = self(other(d))
        Automorphism {
            perm: other.perm.iter().map(|&d| self.perm[d]).collect(),
            orientation_preserving: self.orientation_preserving == other.orientation_preserving,
        }
    }

    /// Checks the defining commutation relations against `m`.
    pub fn is_valid_for(&self, m: &PlaneMap) -> bool {
        (0..m.dart_count()).all(|d| {
            let rot = if self.orientation_preserving {
                m.sigma(self.perm[d])
            } else {
                m.sigma_inv(self.perm[d])
            };
            self.perm[theta(d)] == theta(self.perm[d]) && rot == self.perm[m.sigma(d)]
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub code: Vec<u32>,
    pub automorphisms: Vec<Automorphism>,
    /// Start dart and orientation (`true` = counter-clockwise) of the minimal code.
    pub canonical_start: (Dart, bool),
    /// Canonical number of each dart under the canonical start (0-based).
    pub dart_label: Vec<usize>,
}

impl CanonicalForm {
    pub fn group_order(&self) -> usize {
        self.automorphisms.len()
    }

    pub fn orientation_preserving_order(&self) -> usize {
        self.automorphisms
            .iter()
            .filter(|a| a.orientation_preserving)
            .count()
    }

    pub fn has_reflection(&self) -> bool {
        self.automorphisms.iter().any(|a| !a.orientation_preserving)
    }

    /// The code as little-endian bytes.
    pub fn code_bytes(&self) -> Vec<u8> {
        self.code.iter().flat_map(|c| c.to_le_bytes()).collect()
    }
}

/// Reusable buffers for code computation.
#[derive(Debug, Default, Clone)]
pub struct CodeScratch {
    label: Vec<u32>,
    pub(crate) order: Vec<Dart>,
    pub(crate) code: Vec<u32>,
}

impl CodeScratch {
    pub fn new() -> Self {
        Self::default()
    }

    /// The code of the last [`CodeScratch::compute`] call.
    pub fn code(&self) -> &[u32] {
        &self.code
    }

    /// Computes the code from `(start, forward)` into `self.code`. If `best`
    /// is given, stops as soon as the code is known to exceed it and reports
    /// `Greater`; otherwise reports how the full code compares to `best`
    /// (`Less` when `best` is `None`).
    pub fn compute(
        &mut self,
        m: &PlaneMap,
        start: Dart,
        forward: bool,
        refine: Option<&[u32]>,
        best: Option<&[u32]>,
    ) -> Ordering {
        let n = m.dart_count();
        self.label.clear();
        self.label.resize(n, 0);
        self.order.clear();
        self.code.clear();
        let mut state = if best.is_some() {
            Ordering::Equal
        } else {
            Ordering::Less
        };
        self.label[start] = 1;
        self.order.push(start);
        let mut next_label = 2u32;
        let mut i = 0;
        while i < self.order.len() {
            let d = self.order[i];
            i += 1;
            let rot = if forward { m.sigma(d) } else { m.sigma_inv(d) };
            let v = m.tail(d);
            let mut unit = [0u32; 4];
            unit[0] = refine.map_or(0, |r| r[v]);
            unit[1] = m.degree(v) as u32;
            for (slot, x) in [(2, rot), (3, theta(d))] {
                if self.label[x] == 0 {
                    self.label[x] = next_label;
                    next_label += 1;
                    self.order.push(x);
                }
                unit[slot] = self.label[x];
            }
            for u in unit {
                if state == Ordering::Equal {
                    let pos = self.code.len();
                    match u.cmp(&best.unwrap()[pos]) {
                        Ordering::Equal => {}
                        Ordering::Less => state = Ordering::Less,
                        Ordering::Greater => return Ordering::Greater,
                    }
                }
                self.code.push(u);
            }
        }
        state
    }
}

impl PlaneMap {
    /// Minimal code over all start darts and both orientations, with the
    /// full automorphism group. `refine` assigns a label to every vertex;
    /// isomorphisms must preserve it.
    pub fn canonical_form(&self, refine: Option<&[u32]>) -> CanonicalForm {
        let mut scratch = CodeScratch::new();
        let mut best: Vec<u32> = Vec::new();
        let mut best_order: Vec<Dart> = Vec::new();
        let mut best_start = (0, true);
        let mut minimal: Vec<(Dart, bool)> = Vec::new();
        for d in 0..self.dart_count() {
            for forward in [true, false] {
                let cmp = if best.is_empty() {
                    scratch.compute(self, d, forward, refine, None)
                } else {
                    scratch.compute(self, d, forward, refine, Some(&best))
                };
                match cmp {
                    Ordering::Less => {
                        std::mem::swap(&mut best, &mut scratch.code);
                        std::mem::swap(&mut best_order, &mut scratch.order);
                        best_start = (d, forward);
                        minimal.clear();
                        minimal.push((d, forward));
                    }
                    Ordering::Equal => minimal.push((d, forward)),
                    Ordering::Greater => {}
                }
            }
        }
        let mut automorphisms = Vec::with_capacity(minimal.len());
        for &(d, forward) in &minimal {
            scratch.compute(self, d, forward, refine, None);
            let mut perm = vec![0; self.dart_count()];
            for (i, &x) in best_order.iter().enumerate() {
                perm[x] = scratch.order[i];
            }
            automorphisms.push(Automorphism {
                perm,
                orientation_preserving: forward == best_start.1,
            });
        }
        let mut dart_label = vec![0; self.dart_count()];
        for (i, &x) in best_order.iter().enumerate() {
            dart_label[x] = i;
        }
        CanonicalForm {
            code: best,
            automorphisms,
            canonical_start: best_start,
            dart_label,
        }
    }

    /// Automorphism group only, computed from a known start.
    pub fn automorphisms(&self, refine: Option<&[u32]>) -> Vec<Automorphism> {
        self.canonical_form(refine).automorphisms
    }

    pub fn is_isomorphic(&self, other: &PlaneMap) -> bool {
        self.vertex_count() == other.vertex_count()
            && self.dart_count() == other.dart_count()
            && self.canonical_form(None).code == other.canonical_form(None).code
    }

    /// Minimal code over counter-clockwise starts only: equal for maps that
    /// are isomorphic without reflection.
    pub fn oriented_code(&self) -> Vec<u32> {
        let mut scratch = CodeScratch::new();
        let mut best: Vec<u32> = Vec::new();
        for d in 0..self.dart_count() {
            let prev = if best.is_empty() {
                None
            } else {
                Some(&best[..])
            };
            if scratch.compute(self, d, true, None, prev) == Ordering::Less {
                std::mem::swap(&mut best, &mut scratch.code);
            }
        }
        best
    }

    pub fn is_isomorphic_oriented(&self, other: &PlaneMap) -> bool {
        self.vertex_count() == other.vertex_count()
            && self.dart_count() == other.dart_count()
            && self.oriented_code() == other.oriented_code()
    }

    /// Canonically relabelled copy: darts renumbered by canonical label.
    pub fn canonical_relabel(&self) -> PlaneMap {
        let cf = self.canonical_form(None);
        let m = if cf.canonical_start.1 {
            self.clone()
        } else {
            self.mirror()
        };
        // Pair labels: the reverse of each dart gets the partner slot.
        let mut order: Vec<Dart> = vec![0; m.dart_count()];
        for (d, &l) in cf.dart_label.iter().enumerate() {
            order[l] = d;
        }
        let mut dart_map = vec![usize::MAX; m.dart_count()];
        let mut next = 0;
        for &d in &order {
            if dart_map[d] == usize::MAX {
                dart_map[d] = next;
                dart_map[theta(d)] = next + 1;
                next += 2;
            }
        }
        let mut vertex_map = vec![usize::MAX; m.vertex_count()];
        let mut nv = 0;
        for &d in &order {
            let v = m.tail(d);
            if vertex_map[v] == usize::MAX {
                vertex_map[v] = nv;
                nv += 1;
            }
        }
        m.relabel(&dart_map, &vertex_map)
    }

    /// Vertex orbits under the automorphism group (or its orientation
    /// preserving subgroup).
    pub fn vertex_orbits(
        &self,
        cf: &CanonicalForm,
        orientation_preserving_only: bool,
    ) -> Vec<Vec<Vertex>> {
        let n = self.vertex_count();
        let mut rep: Vec<Vertex> = (0..n).collect();
        fn find(rep: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while rep[r] != r {
                r = rep[r];
            }
            let mut y = x;
            while rep[y] != r {
                let next = rep[y];
                rep[y] = r;
                y = next;
            }
            r
        }
        for a in &cf.automorphisms {
            if orientation_preserving_only && !a.orientation_preserving {
                continue;
            }
            for (v, w) in a.vertex_map(self).into_iter().enumerate() {
                let (rv, rw) = (find(&mut rep, v), find(&mut rep, w));
                if rv != rw {
                    rep[rv.max(rw)] = rv.min(rw);
                }
            }
        }
        let mut orbits: Vec<Vec<Vertex>> = Vec::new();
        let mut index = vec![usize::MAX; n];
        for v in 0..n {
            let r = find(&mut rep, v);
            if index[r] == usize::MAX {
                index[r] = orbits.len();
                orbits.push(Vec::new());
            }
            orbits[index[r]].push(v);
        }
        orbits
    }
}
