use super::{theta, Dart, MapError, PlaneMap, Vertex};

const DEAD: usize = usize::MAX;

/// Mutable rotation system used to build maps by local surgery.
///
/// Edges and vertices are tombstoned on removal and compacted by
/// [`MapEditor::finish`], so dart ids stay stable while editing. The
/// rotation may be temporarily non-plane between operations.
#[derive(Debug, Clone)]
pub struct MapEditor {
    sigma: Vec<Dart>,
    sigma_inv: Vec<Dart>,
    vertex_of: Vec<Vertex>,
    first_dart: Vec<Dart>,
    vertex_alive: Vec<bool>,
}

impl MapEditor {
    pub fn new(m: &PlaneMap) -> Self {
        MapEditor {
            sigma: m.sigma.clone(),
            sigma_inv: m.sigma_inv.clone(),
            vertex_of: m.vertex_of.clone(),
            first_dart: m.first_dart.clone(),
            vertex_alive: vec![true; m.vertex_count()],
        }
    }

    pub fn empty() -> Self {
        MapEditor {
            sigma: Vec::new(),
            sigma_inv: Vec::new(),
            vertex_of: Vec::new(),
            first_dart: Vec::new(),
            vertex_alive: Vec::new(),
        }
    }

    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d]
    }

    pub fn sigma_inv(&self, d: Dart) -> Dart {
        self.sigma_inv[d]
    }

    pub fn tail(&self, d: Dart) -> Vertex {
        self.vertex_of[d]
    }

    pub fn add_vertex(&mut self) -> Vertex {
        self.first_dart.push(DEAD);
        self.vertex_alive.push(true);
        self.first_dart.len() - 1
    }

    fn new_dart_pair(&mut self) -> (Dart, Dart) {
        let d = self.sigma.len();
        self.sigma.extend([DEAD, DEAD]);
        self.sigma_inv.extend([DEAD, DEAD]);
        self.vertex_of.extend([DEAD, DEAD]);
        (d, d + 1)
    }

    /// Places `new` right after `after` (counter-clockwise) at `after`'s tail.
    fn link_after(&mut self, after: Dart, new: Dart) {
        let next = self.sigma[after];
        self.sigma[after] = new;
        self.sigma_inv[new] = after;
        self.sigma[new] = next;
        self.sigma_inv[next] = new;
        self.vertex_of[new] = self.vertex_of[after];
    }

    fn link_alone(&mut self, v: Vertex, new: Dart) {
        debug_assert_eq!(self.first_dart[v], DEAD);
        self.sigma[new] = new;
        self.sigma_inv[new] = new;
        self.vertex_of[new] = v;
        self.first_dart[v] = new;
    }

    /// Adds an edge whose first dart sits right after `a` and whose second
    /// dart sits right after `b`. Returns the first dart.
    pub fn add_edge_after(&mut self, a: Dart, b: Dart) -> Dart {
        let (x, y) = self.new_dart_pair();
        self.link_after(a, x);
        self.link_after(b, y);
        x
    }

    /// Adds an edge from a dart slot to a vertex that has no darts yet.
    /// Returns the dart leaving the existing vertex.
    pub fn add_edge_to_new(&mut self, a: Dart, v: Vertex) -> Dart {
        let (x, y) = self.new_dart_pair();
        self.link_after(a, x);
        self.link_alone(v, y);
        x
    }

    /// Adds an edge from a slot to vertex `v` (which has darts), placing the
    /// dart at `v` right after `after_at_v`. Convenience alias.
    pub fn add_edge_between(&mut self, a: Dart, after_at_v: Dart) -> Dart {
        self.add_edge_after(a, after_at_v)
    }

    fn unlink(&mut self, d: Dart) {
        let v = self.vertex_of[d];
        let (p, n) = (self.sigma_inv[d], self.sigma[d]);
        if n == d {
            self.first_dart[v] = DEAD;
        } else {
            self.sigma[p] = n;
            self.sigma_inv[n] = p;
            if self.first_dart[v] == d {
                self.first_dart[v] = n;
            }
        }
        self.sigma[d] = DEAD;
        self.sigma_inv[d] = DEAD;
        self.vertex_of[d] = DEAD;
    }

    pub fn remove_edge_of(&mut self, d: Dart) {
        self.unlink(d);
        self.unlink(theta(d));
    }

    /// Removes a vertex together with all its edges.
    pub fn remove_vertex(&mut self, v: Vertex) {
        while self.first_dart[v] != DEAD {
            let d = self.first_dart[v];
            self.remove_edge_of(d);
        }
        self.vertex_alive[v] = false;
    }

    /// Compacts ids and validates that the result is a connected plane map.
    pub fn finish(self) -> Result<PlaneMap, MapError> {
        let m = self.finish_relaxed()?;
        match m.genus() {
            0 => Ok(m),
            g => Err(MapError::NonPlanar(g)),
        }
    }

    /// Compacts ids; checks connectivity and isolated vertices but not genus.
    pub fn finish_relaxed(self) -> Result<PlaneMap, MapError> {
        let m = self.compact()?;
        if m.vertex_count() == 0 {
            return Err(MapError::MalformedRotation("no vertices".into()));
        }
        if !m.is_connected() {
            return Err(MapError::Disconnected);
        }
        Ok(m)
    }

    /// Compacts without any validation beyond isolated vertices.
    pub(crate) fn compact(self) -> Result<PlaneMap, MapError> {
        let mut vmap = vec![DEAD; self.first_dart.len()];
        let mut nv = 0;
        for v in 0..self.first_dart.len() {
            if self.vertex_alive[v] {
                if self.first_dart[v] == DEAD {
                    return Err(MapError::MalformedRotation(format!(
                        "vertex {v} is isolated"
                    )));
                }
                vmap[v] = nv;
                nv += 1;
            }
        }
        let mut dmap = vec![DEAD; self.sigma.len()];
        let mut nd = 0;
        for e in 0..self.sigma.len() / 2 {
            if self.sigma[2 * e] != DEAD {
                dmap[2 * e] = nd;
                dmap[2 * e + 1] = nd + 1;
                nd += 2;
            }
        }
        let mut sigma = vec![0; nd];
        let mut vertex_of = vec![0; nd];
        let mut degree = vec![0; nv];
        for d in 0..self.sigma.len() {
            if dmap[d] == DEAD {
                continue;
            }
            sigma[dmap[d]] = dmap[self.sigma[d]];
            let v = vmap[self.vertex_of[d]];
            vertex_of[dmap[d]] = v;
            degree[v] += 1;
        }
        let first_dart = (0..self.first_dart.len())
            .filter(|&v| self.vertex_alive[v])
            .map(|v| dmap[self.first_dart[v]])
            .collect();
        Ok(PlaneMap::from_parts(sigma, vertex_of, first_dart, degree))
    }
}
