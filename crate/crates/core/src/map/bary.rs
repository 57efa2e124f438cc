//! Chamber systems, triangle complexes and barycentric subdivision.

use super::{theta, Dart, PlaneMap, Vertex};

/// A map together with a vertex colouring in `{0, 1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredMap {
    pub map: PlaneMap,
    pub colour: Vec<u8>,
}

impl ColouredMap {
    /// No edge joins two vertices of equal colour.
    pub fn is_proper(&self) -> bool {
        (0..self.map.edge_count())
            .all(|e| self.colour[self.map.tail(2 * e)] != self.colour[self.map.head(2 * e)])
    }

    /// Colour of an edge: the colour missing from its two endpoints.
    pub fn edge_colour(&self, d: Dart) -> u8 {
        3 - self.colour[self.map.tail(d)] - self.colour[self.map.head(d)]
    }
}

/// Flags of a map: `s[i]` moves to the chamber differing only in its
/// colour-`i` element. Positive chambers have colours 0, 1, 2 in
/// counter-clockwise order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberSystem {
    pub s: [Vec<usize>; 3],
    pub positive: Vec<bool>,
}

impl ChamberSystem {
    /// Chamber `2d` is (tail d, edge d, face left of d) and `2d + 1` is the
    /// chamber with the face right of `d`.
    pub fn from_map(m: &PlaneMap) -> Self {
        let n = 2 * m.dart_count();
        let mut s0 = vec![0; n];
        let mut s1 = vec![0; n];
        let mut s2 = vec![0; n];
        let mut positive = vec![false; n];
        for d in 0..m.dart_count() {
            let (p, q) = (2 * d, 2 * d + 1);
            positive[p] = true;
            s2[p] = q;
            s2[q] = p;
            s1[p] = 2 * m.sigma(d) + 1;
            s1[q] = 2 * m.sigma_inv(d);
            s0[p] = 2 * theta(d) + 1;
            s0[q] = 2 * theta(d);
        }
        ChamberSystem {
            s: [s0, s1, s2],
            positive,
        }
    }

    pub fn len(&self) -> usize {
        self.positive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty()
    }

    /// Recovers the map: darts are the positive chambers, the reverse dart
    /// is `s0 s2` and the rotation is `s2 s1`.
    pub fn to_map(&self) -> PlaneMap {
        let n = self.len();
        let mut dart = vec![usize::MAX; n];
        let mut next = 0;
        for c in 0..n {
            if self.positive[c] && dart[c] == usize::MAX {
                let r = self.s[0][self.s[2][c]];
                debug_assert!(self.positive[r] && r != c);
                dart[c] = next;
                dart[r] = next + 1;
                next += 2;
            }
        }
        let mut sigma = vec![0; next];
        for c in 0..n {
            if self.positive[c] {
                sigma[dart[c]] = dart[self.s[2][self.s[1][c]]];
            }
        }
        PlaneMap::from_sigma(sigma).expect("chamber system must be connected")
    }

    pub fn to_complex(&self) -> TriangleComplex {
        let n = self.len();
        let mut tris = Vec::with_capacity(n);
        for c in 0..n {
            let colour = if self.positive[c] {
                [0, 1, 2]
            } else {
                [0, 2, 1]
            };
            let mut adj = [None; 3];
            for (j, &col) in colour.iter().enumerate() {
                let t = self.s[col as usize][c];
                let other = if self.positive[t] {
                    [0u8, 1, 2]
                } else {
                    [0, 2, 1]
                };
                let jj = other.iter().position(|&x| x == col).unwrap();
                adj[j] = Some((t, jj));
            }
            tris.push(Triangle {
                colour,
                adj,
                tag: [usize::MAX; 3],
            });
        }
        TriangleComplex { tris }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangle {
    /// Corner colours in counter-clockwise order.
    pub colour: [u8; 3],
    /// Neighbour across side `j` (the side opposite corner `j`) and the
    /// index of that side in the neighbour; `None` on a boundary.
    pub adj: [Option<(usize, usize)>; 3],
    /// Free per-side tag (used to remember source darts).
    pub tag: [usize; 3],
}

/// An oriented surface made of triangles glued along sides, possibly with a
/// boundary. Vertices are not stored; they are the classes of corners
/// identified across glued sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleComplex {
    pub tris: Vec<Triangle>,
}

impl TriangleComplex {
    /// Triangles are the faces of a triangulation `m`. Side tags hold the
    /// dart of `m` running along that side.
    pub fn from_triangulation(m: &PlaneMap, colour: &[u8]) -> (Self, Vec<[Vertex; 3]>) {
        let (face_of, count) = m.face_ids();
        let mut faces: Vec<Vec<Dart>> = vec![Vec::new(); count];
        let mut pos = vec![0; m.dart_count()];
        for d in 0..m.dart_count() {
            if faces[face_of[d]].is_empty() {
                let mut x = d;
                loop {
                    pos[x] = faces[face_of[d]].len();
                    faces[face_of[d]].push(x);
                    x = m.phi(x);
                    if x == d {
                        break;
                    }
                }
            }
        }
        const SIDE: [usize; 3] = [1, 0, 2];
        let mut tris = Vec::with_capacity(count);
        let mut corners = Vec::with_capacity(count);
        for f in &faces {
            assert_eq!(f.len(), 3, "not a triangulation");
            let vs = [m.tail(f[0]), m.tail(f[2]), m.tail(f[1])];
            let mut adj = [None; 3];
            let mut tag = [0; 3];
            for k in 0..3 {
                let e = m.sigma(f[k]);
                let other = face_of[e];
                let kk = (pos[e] + 2) % 3;
                adj[SIDE[k]] = Some((other, SIDE[kk]));
                tag[SIDE[k]] = e;
            }
            tris.push(Triangle {
                colour: vs.map(|v| colour[v]),
                adj,
                tag,
            });
            corners.push(vs);
        }
        (TriangleComplex { tris }, corners)
    }

    pub fn len(&self) -> usize {
        self.tris.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tris.is_empty()
    }

    /// Chamber system of a closed, properly 3-coloured complex.
    pub fn to_chambers(&self) -> ChamberSystem {
        let n = self.tris.len();
        let mut s = [vec![0; n], vec![0; n], vec![0; n]];
        let mut positive = vec![false; n];
        for (t, tri) in self.tris.iter().enumerate() {
            let c = tri.colour;
            positive[t] = matches!(c, [0, 1, 2] | [1, 2, 0] | [2, 0, 1]);
            for j in 0..3 {
                let (u, _) = tri.adj[j].expect("closed complex");
                s[c[j] as usize][t] = u;
            }
        }
        ChamberSystem { s, positive }
    }

    /// Vertex id of every corner, from gluing corners across sides.
    pub fn corner_vertices(&self) -> (Vec<[Vertex; 3]>, usize) {
        let n = self.tris.len();
        let mut parent: Vec<usize> = (0..3 * n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (t, tri) in self.tris.iter().enumerate() {
            for j in 0..3 {
                if let Some((u, k)) = tri.adj[j] {
                    let pairs = [
                        (3 * t + (j + 1) % 3, 3 * u + (k + 2) % 3),
                        (3 * t + (j + 2) % 3, 3 * u + (k + 1) % 3),
                    ];
                    for (a, b) in pairs {
                        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                        if ra != rb {
                            parent[ra.max(rb)] = ra.min(rb);
                        }
                    }
                }
            }
        }
        let mut id = vec![usize::MAX; 3 * n];
        let mut count = 0;
        let mut out = vec![[0; 3]; n];
        for t in 0..n {
            for j in 0..3 {
                let r = find(&mut parent, 3 * t + j);
                if id[r] == usize::MAX {
                    id[r] = count;
                    count += 1;
                }
                out[t][j] = id[r];
            }
        }
        (out, count)
    }

    /// Converts to a map. Boundary sides become edges bordering one extra
    /// face (the boundary must form a single simple cycle). Returns the map,
    /// the vertex colours, the vertex of every corner and the dart running
    /// counter-clockwise along every side of every triangle.
    pub fn to_map(&self) -> (PlaneMap, Vec<u8>, Vec<[Vertex; 3]>, Vec<[Dart; 3]>) {
        let n = self.tris.len();
        let (corner_vertex, vcount) = self.corner_vertices();
        // side_dart[t][j]: dart along side j from corner j+1 to corner j+2.
        let mut side_dart = vec![[usize::MAX; 3]; n];
        let mut next = 0;
        let mut boundary_out: Vec<Option<Dart>> = vec![None; vcount];
        let mut boundary_in: Vec<Dart> = Vec::new();
        for t in 0..n {
            for j in 0..3 {
                if side_dart[t][j] != usize::MAX {
                    continue;
                }
                side_dart[t][j] = next;
                match self.tris[t].adj[j] {
                    Some((u, k)) => side_dart[u][k] = next + 1,
                    None => {
                        let from = corner_vertex[t][(j + 1) % 3];
                        assert!(
                            boundary_out[from].is_none(),
                            "boundary is not a simple cycle"
                        );
                        boundary_out[from] = Some(next);
                        boundary_in.push(next + 1);
                    }
                }
                next += 2;
            }
        }
        let mut sigma = vec![usize::MAX; next];
        let mut vertex_of = vec![usize::MAX; next];
        for t in 0..n {
            for j in 0..3 {
                let d = side_dart[t][j];
                sigma[d] = theta(side_dart[t][(j + 2) % 3]);
                vertex_of[d] = corner_vertex[t][(j + 1) % 3];
                vertex_of[theta(d)] = corner_vertex[t][(j + 2) % 3];
            }
        }
        for &d in &boundary_in {
            sigma[d] = boundary_out[vertex_of[d]].expect("dangling boundary");
        }
        let mut colour = vec![0; vcount];
        for t in 0..n {
            for j in 0..3 {
                colour[corner_vertex[t][j]] = self.tris[t].colour[j];
            }
        }
        let m = PlaneMap::from_sigma(sigma).expect("complex must be connected");
        // from_sigma numbers vertices by first dart; translate corner ids.
        let mut vmap = vec![usize::MAX; vcount];
        for d in 0..next {
            vmap[vertex_of[d]] = m.tail(d);
        }
        let mut colour2 = vec![0; vcount];
        for v in 0..vcount {
            colour2[vmap[v]] = colour[v];
        }
        let corners = corner_vertex.iter().map(|c| c.map(|v| vmap[v])).collect();
        (m, colour2, corners, side_dart)
    }
}

impl PlaneMap {
    /// Barycentric subdivision: colour 0 = vertices, 1 = edges, 2 = faces.
    pub fn barycentric(&self) -> ColouredMap {
        let (map, colour, _, _) = ChamberSystem::from_map(self).to_complex().to_map();
        ColouredMap { map, colour }
    }
}
