//! Finite hexagonal lattice Λ and its triangular-face representation.
//!
//! Sites of the hexagonal lattice are the triangular faces of the dual
//! triangular lattice. Vertices of the triangular lattice carry axial
//! coordinates `(i, j)` with unit vectors at 0° and 60°. Faces come in two
//! orientations:
//!
//! * `up(a, b)` has vertices `(a, b)`, `(a+1, b)`, `(a, b+1)`;
//! * `down(a, b)` has vertices `(a+1, b)`, `(a, b+1)`, `(a+1, b+1)`.
//!
//! Adjacency (shared edge): `up(a, b)` touches `down(a, b)`, `down(a-1, b)`
//! and `down(a, b-1)`; `down(a, b)` touches `up(a, b)`, `up(a+1, b)` and
//! `up(a, b+1)`.
//!
//! The interior hexagon Λ⁻ of radius `L` is the set of faces whose three
//! vertices satisfy `|i| ≤ L`, `|j| ≤ L` and `|i + j| ≤ L`. The inner
//! boundary ∂⁻Λ is the set of faces outside Λ⁻ sharing an edge with it, and
//! Λ = Λ⁻ ∪ ∂⁻Λ. Sites are numbered row-major: by `b`, then `a`, then up
//! before down.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a site of Λ.
pub type SiteId = usize;

/// Axial vertex coordinate on the triangular lattice.
pub type Vertex = (i32, i32);

/// The six unit directions of the triangular lattice, counter-clockwise from 0°.
pub const DIRECTIONS: [Vertex; 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Up,
    Down,
}

/// A triangular face of the dual lattice, i.e. a site of the hexagonal lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceCoord {
    pub a: i32,
    pub b: i32,
    pub t: Orientation,
}

impl FaceCoord {
    pub const fn up(a: i32, b: i32) -> Self {
        FaceCoord { a, b, t: Orientation::Up }
    }

    pub const fn down(a: i32, b: i32) -> Self {
        FaceCoord { a, b, t: Orientation::Down }
    }

    pub fn vertices(&self) -> [Vertex; 3] {
        let (a, b) = (self.a, self.b);
        match self.t {
            Orientation::Up => [(a, b), (a + 1, b), (a, b + 1)],
            Orientation::Down => [(a + 1, b), (a, b + 1), (a + 1, b + 1)],
        }
    }

    /// Recovers the face spanned by three vertices, if they bound a unit triangle.
    pub fn from_vertices(v: [Vertex; 3]) -> Option<FaceCoord> {
        let a = v.iter().map(|p| p.0).min()?;
        let b = v.iter().map(|p| p.1).min()?;
        for cand in [FaceCoord::up(a, b), FaceCoord::down(a, b)] {
            let mut w = cand.vertices();
            let mut u = v;
            w.sort_unstable();
            u.sort_unstable();
            if w == u {
                return Some(cand);
            }
        }
        None
    }

    /// The three edge-sharing neighbours on the infinite lattice.
    pub fn neighbors(&self) -> [FaceCoord; 3] {
        let (a, b) = (self.a, self.b);
        match self.t {
            Orientation::Up => [FaceCoord::down(a, b), FaceCoord::down(a - 1, b), FaceCoord::down(a, b - 1)],
            Orientation::Down => [FaceCoord::up(a, b), FaceCoord::up(a + 1, b), FaceCoord::up(a, b + 1)],
        }
    }

    /// Embedding into a cube-like integer triple in which the hexagonal
    /// graph distance is the L1 norm of the difference.
    pub fn cube(&self) -> (i32, i32, i32) {
        match self.t {
            Orientation::Up => (self.a, self.b, -self.a - self.b),
            Orientation::Down => (self.a, self.b, -self.a - self.b - 1),
        }
    }

    /// Graph distance on the infinite hexagonal lattice.
    pub fn distance(&self, other: &FaceCoord) -> u32 {
        let (x0, y0, z0) = self.cube();
        let (x1, y1, z1) = other.cube();
        (x0 - x1).unsigned_abs() + (y0 - y1).unsigned_abs() + (z0 - z1).unsigned_abs()
    }

    /// Cartesian centroid with unit edge length.
    pub fn centroid(&self) -> (f64, f64) {
        let (mut x, mut y) = (0.0, 0.0);
        for v in self.vertices() {
            let (px, py) = vertex_xy(v);
            x += px;
            y += py;
        }
        (x / 3.0, y / 3.0)
    }

    pub fn translate(&self, di: i32, dj: i32) -> FaceCoord {
        FaceCoord {
            a: self.a + di,
            b: self.b + dj,
            t: self.t,
        }
    }

    pub fn transform(&self, s: Symmetry) -> FaceCoord {
        let v = self.vertices().map(|p| s.apply_vertex(p));
        FaceCoord::from_vertices(v).expect("lattice symmetries map faces to faces")
    }

    /// True when every vertex lies in the hexagon of radius `r` about the origin.
    pub fn in_hexagon(&self, r: i32) -> bool {
        self.vertices().iter().all(|&(i, j)| i.abs() <= r && j.abs() <= r && (i + j).abs() <= r)
    }
}

/// Cartesian position of a lattice vertex.
pub fn vertex_xy((i, j): Vertex) -> (f64, f64) {
    (i as f64 + 0.5 * j as f64, j as f64 * 3f64.sqrt() / 2.0)
}

/// The face occupying the 60° wedge at `v` between directions `k` and `k+1`.
pub fn wedge_face(v: Vertex, k: usize) -> FaceCoord {
    let d0 = DIRECTIONS[k % 6];
    let d1 = DIRECTIONS[(k + 1) % 6];
    FaceCoord::from_vertices([v, (v.0 + d0.0, v.1 + d0.1), (v.0 + d1.0, v.1 + d1.1)]).expect("adjacent directions span a unit triangle")
}

/// One element of the 12-element symmetry group of the lattice about the
/// origin vertex: an optional reflection `(i, j) ↦ (j, i)` followed by a
/// rotation by `rot · 60°` counter-clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symmetry {
    pub rot: u8,
    pub reflect: bool,
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry { rot: 0, reflect: false };

    pub fn all() -> impl Iterator<Item = Symmetry> {
        (0..12u8).map(|k| Symmetry { rot: k % 6, reflect: k >= 6 })
    }

    pub fn apply_vertex(&self, (mut i, mut j): Vertex) -> Vertex {
        if self.reflect {
            std::mem::swap(&mut i, &mut j);
        }
        for _ in 0..self.rot {
            (i, j) = (-j, i + j);
        }
        (i, j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Λ⁻, the hexagon of radius L.
    Interior,
    /// ∂⁻Λ, sites of Λ with a neighbour outside Λ.
    Boundary,
}

/// Neighbour slot of a site: either another site of Λ or a face outside Λ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Adjacent {
    Site(SiteId),
    Exterior(FaceCoord),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondKind {
    /// Both endpoints in Λ.
    Interior,
    /// From ∂⁻Λ to outside Λ.
    Out,
    /// From outside Λ into ∂⁻Λ.
    In,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BondEnd {
    Site(SiteId),
    Exterior(FaceCoord),
}

impl BondEnd {
    pub fn site(&self) -> Option<SiteId> {
        match self {
            BondEnd::Site(s) => Some(*s),
            BondEnd::Exterior(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientedBond {
    pub from: BondEnd,
    pub to: BondEnd,
    pub kind: BondKind,
}

impl OrientedBond {
    pub fn reverse(&self) -> OrientedBond {
        let kind = match self.kind {
            BondKind::Interior => BondKind::Interior,
            BondKind::Out => BondKind::In,
            BondKind::In => BondKind::Out,
        };
        OrientedBond {
            from: self.to,
            to: self.from,
            kind,
        }
    }
}

/// Which part of Λ a neighbour query is restricted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Lambda,
    Interior,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BondCounts {
    pub interior: usize,
    pub incoming: usize,
    pub outgoing: usize,
}

impl BondCounts {
    /// |Λ̄^{*,orie}|, the normaliser of the Metropolis kernel.
    pub fn total(&self) -> usize {
        self.interior + self.incoming + self.outgoing
    }
}

/// The finite lattice Λ of radius `L`. Immutable after construction.
#[derive(Clone, Debug)]
pub struct HexLattice {
    radius: u32,
    faces: Vec<FaceCoord>,
    regions: Vec<Region>,
    index: HashMap<FaceCoord, SiteId>,
    adjacency: Vec<[Adjacent; 3]>,
    interior_bonds: Vec<(SiteId, SiteId)>,
    oriented: Vec<OrientedBond>,
    counts: BondCounts,
    interior_sites: Vec<SiteId>,
    boundary_sites: Vec<SiteId>,
}

impl HexLattice {
    pub fn new(radius: i64) -> Result<HexLattice> {
        if !(1..=1000).contains(&radius) {
            return Err(Error::InvalidRadius(radius));
        }
        let l = radius as i32;
        let mut faces = Vec::new();
        let window = l + 2;
        for b in -window..=window {
            for a in -window..=window {
                for f in [FaceCoord::up(a, b), FaceCoord::down(a, b)] {
                    let inside = f.in_hexagon(l);
                    let touches = f.neighbors().iter().any(|n| n.in_hexagon(l));
                    if inside || touches {
                        faces.push(f);
                    }
                }
            }
        }
        // Loop order above is already (b, a, up<down) row-major.
        let index: HashMap<FaceCoord, SiteId> = faces.iter().enumerate().map(|(k, f)| (*f, k)).collect();
        let regions: Vec<Region> = faces
            .iter()
            .map(|f| if f.in_hexagon(l) { Region::Interior } else { Region::Boundary })
            .collect();
        let adjacency: Vec<[Adjacent; 3]> = faces
            .iter()
            .map(|f| {
                f.neighbors().map(|n| match index.get(&n) {
                    Some(&s) => Adjacent::Site(s),
                    None => Adjacent::Exterior(n),
                })
            })
            .collect();

        let mut interior_bonds = Vec::new();
        let mut oriented = Vec::new();
        let mut counts = BondCounts::default();
        for (x, adj) in adjacency.iter().enumerate() {
            for slot in adj {
                match *slot {
                    Adjacent::Site(y) => {
                        oriented.push(OrientedBond {
                            from: BondEnd::Site(x),
                            to: BondEnd::Site(y),
                            kind: BondKind::Interior,
                        });
                        counts.interior += 1;
                        if x < y && regions[x] == Region::Interior && regions[y] == Region::Interior {
                            interior_bonds.push((x, y));
                        }
                    }
                    Adjacent::Exterior(f) => {
                        oriented.push(OrientedBond {
                            from: BondEnd::Site(x),
                            to: BondEnd::Exterior(f),
                            kind: BondKind::Out,
                        });
                        oriented.push(OrientedBond {
                            from: BondEnd::Exterior(f),
                            to: BondEnd::Site(x),
                            kind: BondKind::In,
                        });
                        counts.outgoing += 1;
                        counts.incoming += 1;
                    }
                }
            }
        }
        let interior_sites = (0..faces.len()).filter(|&s| regions[s] == Region::Interior).collect();
        let boundary_sites = (0..faces.len()).filter(|&s| regions[s] == Region::Boundary).collect();
        Ok(HexLattice {
            radius: radius as u32,
            faces,
            regions,
            index,
            adjacency,
            interior_bonds,
            oriented,
            counts,
            interior_sites,
            boundary_sites,
        })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// |Λ|.
    pub fn num_sites(&self) -> usize {
        self.faces.len()
    }

    pub fn face(&self, x: SiteId) -> FaceCoord {
        self.faces[x]
    }

    pub fn faces(&self) -> &[FaceCoord] {
        &self.faces
    }

    pub fn site(&self, f: &FaceCoord) -> Option<SiteId> {
        self.index.get(f).copied()
    }

    pub fn region(&self, x: SiteId) -> Region {
        self.regions[x]
    }

    pub fn is_interior(&self, x: SiteId) -> bool {
        self.regions[x] == Region::Interior
    }

    /// Sites of Λ⁻ in ascending order.
    pub fn interior(&self) -> &[SiteId] {
        &self.interior_sites
    }

    /// Sites of ∂⁻Λ in ascending order.
    pub fn inner_boundary(&self) -> &[SiteId] {
        &self.boundary_sites
    }

    pub fn adjacency(&self, x: SiteId) -> &[Adjacent; 3] {
        &self.adjacency[x]
    }

    /// Neighbours of `x` inside Λ or, with [`Scope::Interior`], inside Λ⁻.
    pub fn neighbors(&self, x: SiteId, scope: Scope) -> Result<Vec<SiteId>> {
        let adj = self.adjacency.get(x).ok_or(Error::UnknownSite(x))?;
        Ok(adj
            .iter()
            .filter_map(|a| match *a {
                Adjacent::Site(y) if scope == Scope::Lambda || self.is_interior(y) => Some(y),
                _ => None,
            })
            .collect())
    }

    /// Neighbours inside Λ, without bounds checking or allocation.
    pub fn site_neighbors(&self, x: SiteId) -> impl Iterator<Item = SiteId> + '_ {
        self.adjacency[x].iter().filter_map(|a| match *a {
            Adjacent::Site(y) => Some(y),
            Adjacent::Exterior(_) => None,
        })
    }

    /// Number of faces outside Λ adjacent to `x`.
    pub fn exterior_degree(&self, x: SiteId) -> usize {
        self.adjacency[x].iter().filter(|a| matches!(a, Adjacent::Exterior(_))).count()
    }

    /// Unordered nearest-neighbour pairs inside Λ⁻ (Λ^{*,−}), with `x < y`.
    pub fn interior_bonds(&self) -> &[(SiteId, SiteId)] {
        &self.interior_bonds
    }

    /// The full oriented bond list Λ̄^{*,orie}.
    pub fn oriented_bonds(&self) -> &[OrientedBond] {
        &self.oriented
    }

    pub fn bond_counts(&self) -> BondCounts {
        self.counts
    }

    /// Hexagonal graph distance between two sites.
    pub fn face_distance(&self, x: SiteId, y: SiteId) -> Result<u32> {
        let fx = self.faces.get(x).ok_or(Error::UnknownSite(x))?;
        let fy = self.faces.get(y).ok_or(Error::UnknownSite(y))?;
        Ok(fx.distance(fy))
    }

    /// Breadth-first distances from `x` to every site, moving only inside Λ.
    pub fn bfs_distances(&self, x: SiteId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.num_sites()];
        let mut queue = VecDeque::from([x]);
        dist[x] = 0;
        while let Some(u) = queue.pop_front() {
            for v in self.site_neighbors(u) {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Image of a site under a lattice symmetry (Λ is invariant under all 12).
    pub fn transform_site(&self, x: SiteId, s: Symmetry) -> SiteId {
        self.index[&self.faces[x].transform(s)]
    }

    pub fn dump(&self) -> LatticeDump {
        LatticeDump {
            l: self.radius,
            sites: self
                .faces
                .iter()
                .enumerate()
                .map(|(id, f)| SiteDump {
                    id,
                    a: f.a,
                    b: f.b,
                    t: f.t,
                    region: self.regions[id],
                })
                .collect(),
            bonds: self.oriented.clone(),
        }
    }
}

/// JSON-serialisable form of a lattice for debugging and golden files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeDump {
    #[serde(rename = "L")]
    pub l: u32,
    pub sites: Vec<SiteDump>,
    pub bonds: Vec<OrientedBond>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiteDump {
    pub id: SiteId,
    pub a: i32,
    pub b: i32,
    pub t: Orientation,
    pub region: Region,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_zero_is_rejected() {
        assert!(matches!(HexLattice::new(0), Err(Error::InvalidRadius(0))));
        assert!(HexLattice::new(-3).is_err());
    }

    #[test]
    fn face_vertex_roundtrip() {
        for a in -3..3 {
            for b in -3..3 {
                for f in [FaceCoord::up(a, b), FaceCoord::down(a, b)] {
                    assert_eq!(FaceCoord::from_vertices(f.vertices()), Some(f));
                }
            }
        }
        assert_eq!(FaceCoord::from_vertices([(0, 0), (2, 0), (0, 1)]), None);
    }

    #[test]
    fn wedges_around_a_vertex_are_six_distinct_faces() {
        let faces: Vec<_> = (0..6).map(|k| wedge_face((0, 0), k)).collect();
        for f in &faces {
            assert!(f.vertices().contains(&(0, 0)));
        }
        let mut sorted = faces.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 6);
        // consecutive wedges share an edge
        for k in 0..6 {
            assert!(faces[k].neighbors().contains(&faces[(k + 1) % 6]));
        }
    }

    #[test]
    fn symmetry_group_has_twelve_distinct_elements() {
        let probe = FaceCoord::up(2, 1);
        let mut images: Vec<_> = Symmetry::all().map(|s| probe.transform(s)).collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 12);
    }
}
