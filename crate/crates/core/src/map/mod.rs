//! Dart-based combinatorial maps.
//!
//! A map is stored as a rotation system: `sigma` sends a dart to the next
//! dart counter-clockwise around its tail vertex. The edge involution is
//! implicit, dart `d` is paired with `d ^ 1`, so edge `e` owns darts `2e`
//! and `2e + 1`. Faces are the orbits of `theta . sigma`; with a
//! counter-clockwise `sigma` these orbits walk each face clockwise, and the
//! element `d` of a face orbit stands for the corner between `d` and
//! `sigma(d)` at the tail of `d`.

mod bary;
mod canon;
pub mod codec;
mod editor;

pub use bary::{ChamberSystem, ColouredMap, Triangle, TriangleComplex};
pub use canon::{Automorphism, CanonicalForm, CodeScratch};
pub use codec::{decode, encode, Format, LopspRecord, RecordKind};
pub use editor::MapEditor;

use thiserror::Error;

pub type Dart = usize;
pub type Vertex = usize;

/// Reverse dart of the same edge.
#[inline(always)]
pub fn theta(d: Dart) -> Dart {
    d ^ 1
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("malformed rotation system: {0}")]
    MalformedRotation(String),
    #[error("map is not connected")]
    Disconnected,
    #[error("map is not plane (genus {0})")]
    NonPlanar(usize),
    #[error("map is not bipartite")]
    NotBipartite,
}

/// Face size requirement used by [`PlaneMap::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Quadrangulation,
    Triangulation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlaneMap {
    pub(crate) sigma: Vec<Dart>,
    pub(crate) sigma_inv: Vec<Dart>,
    pub(crate) vertex_of: Vec<Vertex>,
    pub(crate) first_dart: Vec<Dart>,
    pub(crate) degree: Vec<usize>,
}

/// The faces of a map as dart cycles under `theta . sigma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSet {
    pub faces: Vec<Vec<Dart>>,
}

impl FaceSet {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }
}

impl PlaneMap {
    /// Builds a plane map from per-vertex cyclic dart lists (counter-clockwise).
    pub fn from_rotation(vertex_count: usize, rotations: &[Vec<Dart>]) -> Result<Self, MapError> {
        let m = Self::from_rotation_relaxed(vertex_count, rotations)?;
        match m.genus() {
            0 => Ok(m),
            g => Err(MapError::NonPlanar(g)),
        }
    }

    /// Same as [`PlaneMap::from_rotation`] but accepts any genus.
    pub fn from_rotation_relaxed(
        vertex_count: usize,
        rotations: &[Vec<Dart>],
    ) -> Result<Self, MapError> {
        if vertex_count == 0 {
            return Err(MapError::MalformedRotation("no vertices".into()));
        }
        if rotations.len() != vertex_count {
            return Err(MapError::MalformedRotation(format!(
                "{} rotation lists for {} vertices",
                rotations.len(),
                vertex_count
            )));
        }
        let dart_count: usize = rotations.iter().map(Vec::len).sum();
        if dart_count % 2 != 0 {
            return Err(MapError::MalformedRotation("odd number of darts".into()));
        }
        let mut sigma = vec![usize::MAX; dart_count];
        let mut vertex_of = vec![usize::MAX; dart_count];
        let mut first_dart = Vec::with_capacity(vertex_count);
        let mut degree = Vec::with_capacity(vertex_count);
        for (v, rot) in rotations.iter().enumerate() {
            if rot.is_empty() {
                return Err(MapError::MalformedRotation(format!(
                    "vertex {v} is isolated"
                )));
            }
            for (i, &d) in rot.iter().enumerate() {
                if d >= dart_count || vertex_of[d] != usize::MAX {
                    return Err(MapError::MalformedRotation(format!(
                        "dart {d} out of range or repeated"
                    )));
                }
                vertex_of[d] = v;
                sigma[d] = rot[(i + 1) % rot.len()];
            }
            first_dart.push(rot[0]);
            degree.push(rot.len());
        }
        let m = Self::from_parts(sigma, vertex_of, first_dart, degree);
        if !m.is_connected() {
            return Err(MapError::Disconnected);
        }
        Ok(m)
    }

    pub(crate) fn from_parts(
        sigma: Vec<Dart>,
        vertex_of: Vec<Vertex>,
        first_dart: Vec<Dart>,
        degree: Vec<usize>,
    ) -> Self {
        let mut sigma_inv = vec![0; sigma.len()];
        for (d, &s) in sigma.iter().enumerate() {
            sigma_inv[s] = d;
        }
        PlaneMap {
            sigma,
            sigma_inv,
            vertex_of,
            first_dart,
            degree,
        }
    }

    /// Builds a map directly from a permutation `sigma` on darts `0..2E`
    /// (pairing `d ^ 1`), deriving the vertices as `sigma` cycles.
    pub fn from_sigma(sigma: Vec<Dart>) -> Result<Self, MapError> {
        let n = sigma.len();
        if n == 0 || n % 2 != 0 {
            return Err(MapError::MalformedRotation(
                "dart count must be even and positive".into(),
            ));
        }
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || seen[s] {
                return Err(MapError::MalformedRotation(
                    "sigma is not a permutation".into(),
                ));
            }
            seen[s] = true;
        }
        let mut vertex_of = vec![usize::MAX; n];
        let mut first_dart = Vec::new();
        let mut degree = Vec::new();
        for d in 0..n {
            if vertex_of[d] != usize::MAX {
                continue;
            }
            let v = first_dart.len();
            first_dart.push(d);
            let mut x = d;
            let mut deg = 0;
            loop {
                vertex_of[x] = v;
                deg += 1;
                x = sigma[x];
                if x == d {
                    break;
                }
            }
            degree.push(deg);
        }
        let m = Self::from_parts(sigma, vertex_of, first_dart, degree);
        if !m.is_connected() {
            return Err(MapError::Disconnected);
        }
        Ok(m)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.first_dart.len()
    }

    #[inline]
    pub fn dart_count(&self) -> usize {
        self.sigma.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.sigma.len() / 2
    }

    #[inline]
    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d]
    }

    #[inline]
    pub fn sigma_inv(&self, d: Dart) -> Dart {
        self.sigma_inv[d]
    }

    /// Next dart in the face walk.
    #[inline]
    pub fn phi(&self, d: Dart) -> Dart {
        theta(self.sigma[d])
    }

    #[inline]
    pub fn tail(&self, d: Dart) -> Vertex {
        self.vertex_of[d]
    }

    #[inline]
    pub fn head(&self, d: Dart) -> Vertex {
        self.vertex_of[theta(d)]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.degree[v]
    }

    #[inline]
    pub fn first_dart(&self, v: Vertex) -> Dart {
        self.first_dart[v]
    }

    pub fn sigma_slice(&self) -> &[Dart] {
        &self.sigma
    }

    /// Darts leaving `v`, counter-clockwise starting at its first dart.
    pub fn darts_at(&self, v: Vertex) -> impl Iterator<Item = Dart> + '_ {
        let start = self.first_dart[v];
        let mut cur = Some(start);
        std::iter::from_fn(move || {
            let d = cur?;
            let next = self.sigma[d];
            cur = if next == start { None } else { Some(next) };
            Some(d)
        })
    }

    pub fn rotations(&self) -> Vec<Vec<Dart>> {
        (0..self.vertex_count())
            .map(|v| self.darts_at(v).collect())
            .collect()
    }

    pub fn neighbours(&self, v: Vertex) -> Vec<Vertex> {
        self.darts_at(v).map(|d| self.head(d)).collect()
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for d in self.darts_at(v) {
                let w = self.head(d);
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    pub fn faces(&self) -> FaceSet {
        let mut seen = vec![false; self.dart_count()];
        let mut faces = Vec::new();
        for d in 0..self.dart_count() {
            if seen[d] {
                continue;
            }
            let mut face = Vec::new();
            let mut x = d;
            while !seen[x] {
                seen[x] = true;
                face.push(x);
                x = self.phi(x);
            }
            faces.push(face);
        }
        FaceSet { faces }
    }

    /// Face index of every dart (as a face-orbit element) and the face count.
    pub fn face_ids(&self) -> (Vec<usize>, usize) {
        let mut id = vec![usize::MAX; self.dart_count()];
        let mut count = 0;
        for d in 0..self.dart_count() {
            if id[d] != usize::MAX {
                continue;
            }
            let mut x = d;
            while id[x] == usize::MAX {
                id[x] = count;
                x = self.phi(x);
            }
            count += 1;
        }
        (id, count)
    }

    pub fn face_count(&self) -> usize {
        self.face_ids().1
    }

    pub fn genus(&self) -> usize {
        let chi =
            self.vertex_count() as isize - self.edge_count() as isize + self.face_count() as isize;
        ((2 - chi) / 2) as usize
    }

    pub fn validate(&self, kind: Kind) -> bool {
        let want = match kind {
            Kind::Quadrangulation => 4,
            Kind::Triangulation => 3,
        };
        self.genus() == 0 && self.faces().faces.iter().all(|f| f.len() == want)
    }

    pub fn is_quadrangulation(&self) -> bool {
        self.validate(Kind::Quadrangulation)
    }

    /// Two-colouring of the vertices; class A contains vertex 0.
    pub fn bipartition(&self) -> Result<(Vec<Vertex>, Vec<Vertex>), MapError> {
        let side = self.bipartition_sides()?;
        let a = (0..self.vertex_count()).filter(|&v| !side[v]).collect();
        let b = (0..self.vertex_count()).filter(|&v| side[v]).collect();
        Ok((a, b))
    }

    /// `false` for the class of vertex 0, `true` for the other class.
    pub fn bipartition_sides(&self) -> Result<Vec<bool>, MapError> {
        let n = self.vertex_count();
        let mut side: Vec<Option<bool>> = vec![None; n];
        side[0] = Some(false);
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            let s = side[v].unwrap();
            for d in self.darts_at(v) {
                let w = self.head(d);
                match side[w] {
                    None => {
                        side[w] = Some(!s);
                        stack.push(w);
                    }
                    Some(t) if t == s => return Err(MapError::NotBipartite),
                    _ => {}
                }
            }
        }
        Ok(side.into_iter().map(Option::unwrap).collect())
    }

    /// Relabels darts and vertices: dart `d` becomes `dart_map[d]`, which must
    /// respect the edge pairing, and vertex `v` becomes `vertex_map[v]`.
    pub fn relabel(&self, dart_map: &[Dart], vertex_map: &[Vertex]) -> PlaneMap {
        let n = self.dart_count();
        let mut sigma = vec![0; n];
        let mut vertex_of = vec![0; n];
        for d in 0..n {
            sigma[dart_map[d]] = dart_map[self.sigma[d]];
            vertex_of[dart_map[d]] = vertex_map[self.vertex_of[d]];
        }
        let mut first_dart = vec![usize::MAX; self.vertex_count()];
        let mut degree = vec![0; self.vertex_count()];
        for v in 0..self.vertex_count() {
            degree[vertex_map[v]] = self.degree[v];
        }
        for d in 0..n {
            let v = vertex_of[d];
            first_dart[v] = first_dart[v].min(d);
        }
        PlaneMap::from_parts(sigma, vertex_of, first_dart, degree)
    }

    /// The mirror image: every rotation reversed.
    pub fn mirror(&self) -> PlaneMap {
        PlaneMap::from_parts(
            self.sigma_inv.clone(),
            self.vertex_of.clone(),
            self.first_dart.clone(),
            self.degree.clone(),
        )
    }

    pub fn degree1_count(&self) -> usize {
        self.degree.iter().filter(|&&d| d == 1).count()
    }

    /// Largest number of edges joining one pair of vertices.
    pub fn max_parallel_class(&self) -> usize {
        let mut best = 0;
        let mut count = std::collections::HashMap::new();
        for e in 0..self.edge_count() {
            let (a, b) = (self.tail(2 * e), self.head(2 * e));
            let key = (a.min(b), a.max(b));
            let c = count.entry(key).or_insert(0usize);
            *c += 1;
            best = best.max(*c);
        }
        best
    }

    /// Cube skeleton, the usual 3-regular polyhedron on 8 vertices.
    pub fn cube() -> PlaneMap {
        polyhedron(&[
            vec![0, 1, 2, 3],
            vec![4, 7, 6, 5],
            vec![0, 4, 5, 1],
            vec![1, 5, 6, 2],
            vec![2, 6, 7, 3],
            vec![3, 7, 4, 0],
        ])
    }

    pub fn tetrahedron() -> PlaneMap {
        polyhedron(&[vec![0, 1, 2], vec![0, 3, 1], vec![1, 3, 2], vec![2, 3, 0]])
    }

    pub fn dodecahedron() -> PlaneMap {
        polyhedron(&[
            vec![0, 1, 2, 3, 4],
            vec![0, 5, 6, 7, 1],
            vec![1, 7, 8, 9, 2],
            vec![2, 9, 10, 11, 3],
            vec![3, 11, 12, 13, 4],
            vec![4, 13, 14, 5, 0],
            vec![15, 16, 19, 18, 17],
            vec![5, 14, 19, 16, 6],
            vec![6, 16, 15, 8, 7],
            vec![8, 15, 17, 10, 9],
            vec![10, 17, 18, 12, 11],
            vec![12, 18, 19, 14, 13],
        ])
    }

    /// A single edge joining two vertices.
    pub fn single_edge() -> PlaneMap {
        PlaneMap::from_rotation(2, &[vec![0], vec![1]]).expect("valid")
    }

    /// One vertex carrying one loop.
    pub fn single_loop() -> PlaneMap {
        PlaneMap::from_rotation(1, &[vec![0, 1]]).expect("valid")
    }

    /// Path on three vertices: end, middle, end.
    pub fn path3() -> PlaneMap {
        PlaneMap::from_rotation(3, &[vec![0], vec![1, 2], vec![3]]).expect("valid")
    }

    /// Cycle on `n` vertices.
    pub fn cycle(n: usize) -> PlaneMap {
        let rot: Vec<Vec<Dart>> = (0..n)
            .map(|v| vec![2 * v, 2 * ((v + n - 1) % n) + 1])
            .collect();
        PlaneMap::from_rotation(n, &rot).expect("valid")
    }
}

/// Builds a polyhedral map from its faces, each listed as a vertex cycle in
/// counter-clockwise order as seen from outside. Every edge must occur in
/// exactly two faces with opposite directions.
pub fn polyhedron(faces: &[Vec<Vertex>]) -> PlaneMap {
    use std::collections::HashMap;
    let n = faces.iter().flatten().max().map_or(0, |&v| v + 1);
    // Directed face edge (a, b) means the face lies to the left of a -> b.
    let mut dart_of: HashMap<(Vertex, Vertex), Dart> = HashMap::new();
    let mut next_edge = 0;
    for f in faces {
        for i in 0..f.len() {
            let (a, b) = (f[i], f[(i + 1) % f.len()]);
            if let Some(&d) = dart_of.get(&(b, a)) {
                dart_of.insert((a, b), theta(d));
            } else {
                dart_of.insert((a, b), 2 * next_edge);
                next_edge += 1;
            }
        }
    }
    // The face left of a -> b continues at b with b -> c, so around b the
    // dart b -> c follows b -> a clockwise; counter-clockwise sigma(b->c) = b->a.
    let mut sigma = vec![0; 2 * next_edge];
    for f in faces {
        for i in 0..f.len() {
            let (a, b, c) = (f[i], f[(i + 1) % f.len()], f[(i + 2) % f.len()]);
            sigma[dart_of[&(b, c)]] = dart_of[&(b, a)];
        }
    }
    let m = PlaneMap::from_sigma(sigma).expect("polyhedron must be connected");
    assert_eq!(m.vertex_count(), n);
    assert_eq!(m.genus(), 0, "polyhedron faces must describe a sphere");
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path3_has_one_face_of_size_four() {
        let p = PlaneMap::path3();
        assert_eq!(p.vertex_count(), 3);
        assert_eq!(p.edge_count(), 2);
        assert_eq!(p.faces().sizes(), vec![4]);
        assert_eq!(p.genus(), 0);
        assert!(p.validate(Kind::Quadrangulation));
    }

    #[test]
    fn empty_input_is_malformed() {
        assert!(matches!(
            PlaneMap::from_rotation(0, &[]),
            Err(MapError::MalformedRotation(_))
        ));
    }

    #[test]
    fn interleaved_double_loop_is_a_torus() {
        // loops a = (0,1), b = (2,3); rotation a, b, a', b'
        let err = PlaneMap::from_rotation(1, &[vec![0, 2, 1, 3]]).unwrap_err();
        assert_eq!(err, MapError::NonPlanar(1));
        let m = PlaneMap::from_rotation_relaxed(1, &[vec![0, 2, 1, 3]]).unwrap();
        assert_eq!(m.face_count(), 1);
        assert_eq!(m.genus(), 1);
    }

    #[test]
    fn disconnected_is_rejected() {
        let err = PlaneMap::from_rotation(4, &[vec![0], vec![1], vec![2], vec![3]]).unwrap_err();
        assert_eq!(err, MapError::Disconnected);
    }

    #[test]
    fn face_examples() {
        assert_eq!(PlaneMap::cycle(4).faces().sizes(), vec![4, 4]);
        assert_eq!(PlaneMap::single_edge().faces().sizes(), vec![2]);
        let cube = PlaneMap::cube();
        assert_eq!(
            (cube.vertex_count(), cube.edge_count(), cube.face_count()),
            (8, 12, 6)
        );
        assert_eq!(cube.genus(), 0);
        let d = PlaneMap::dodecahedron();
        assert_eq!(
            (d.vertex_count(), d.edge_count(), d.face_count()),
            (20, 30, 12)
        );
        assert!(d.faces().faces.iter().all(|f| f.len() == 5));
    }

    #[test]
    fn face_walk_returns_after_size_steps() {
        let cube = PlaneMap::cube();
        for f in cube.faces().faces {
            let mut x = f[0];
            for _ in 0..f.len() {
                x = cube.phi(x);
            }
            assert_eq!(x, f[0]);
        }
    }

    #[test]
    fn bipartition_examples() {
        let (a, b) = PlaneMap::cycle(4).bipartition().unwrap();
        assert_eq!((a.len(), b.len()), (2, 2));
        let (a, b) = PlaneMap::path3().bipartition().unwrap();
        assert_eq!(a, vec![0, 2]);
        assert_eq!(b, vec![1]);
        assert_eq!(
            PlaneMap::cycle(3).bipartition().unwrap_err(),
            MapError::NotBipartite
        );
    }

    #[test]
    fn c4_with_chord_is_not_a_quadrangulation() {
        // C4 on 0..3 plus chord 0-2 inside.
        let mut e = MapEditor::new(&PlaneMap::cycle(4));
        let d0 = PlaneMap::cycle(4).first_dart(0);
        let d2 = PlaneMap::cycle(4).first_dart(2);
        e.add_edge_after(d0, d2);
        let m = e.finish().unwrap();
        assert!(!m.validate(Kind::Quadrangulation));
        assert_eq!(m.faces().sizes().iter().filter(|&&s| s == 3).count(), 2);
    }
}
