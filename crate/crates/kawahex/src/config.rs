//! Occupation configurations η ∈ {0,1}^Λ and their combinatorial structure.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::hexlattice::{wedge_face, FaceCoord, HexLattice, Orientation, SiteId, Vertex, DIRECTIONS};

/// Occupation map over the sites of one lattice, packed 64 sites per word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    words: SmallVec<[u64; 4]>,
    sites: u32,
}

impl Configuration {
    /// The empty configuration □.
    pub fn empty(lat: &HexLattice) -> Configuration {
        Self::zeros(lat.num_sites())
    }

    fn zeros(sites: usize) -> Configuration {
        Configuration {
            words: SmallVec::from_elem(0, sites.div_ceil(64)),
            sites: sites as u32,
        }
    }

    /// The full configuration ■: every site of Λ⁻ occupied, ∂⁻Λ empty.
    pub fn full(lat: &HexLattice) -> Configuration {
        Self::from_sites(lat, lat.interior().iter().copied())
    }

    pub fn from_sites(lat: &HexLattice, sites: impl IntoIterator<Item = SiteId>) -> Configuration {
        let mut c = Self::empty(lat);
        for s in sites {
            c.set(s, true);
        }
        c
    }

    /// Builds a configuration from face coordinates; every face must be a site of Λ.
    pub fn from_faces<'a>(lat: &HexLattice, faces: impl IntoIterator<Item = &'a FaceCoord>) -> Result<Configuration> {
        let mut c = Self::empty(lat);
        for f in faces {
            let s = lat.site(f).ok_or_else(|| Error::Placement(format!("{f:?} is outside the lattice")))?;
            c.set(s, true);
        }
        Ok(c)
    }

    pub fn from_words(sites: usize, words: &[u64]) -> Configuration {
        debug_assert_eq!(words.len(), sites.div_ceil(64));
        Configuration {
            words: SmallVec::from_slice(words),
            sites: sites as u32,
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn num_sites(&self) -> usize {
        self.sites as usize
    }

    #[inline]
    pub fn get(&self, x: SiteId) -> bool {
        (self.words[x >> 6] >> (x & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: SiteId, occupied: bool) {
        let bit = 1u64 << (x & 63);
        if occupied {
            self.words[x >> 6] |= bit;
        } else {
            self.words[x >> 6] &= !bit;
        }
    }

    /// Total particle count n(η) over Λ (the manifold index).
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn occupied(&self) -> impl Iterator<Item = SiteId> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    pub fn check_lattice(&self, lat: &HexLattice) -> Result<()> {
        if self.num_sites() != lat.num_sites() {
            return Err(Error::LatticeMismatch {
                expected: lat.num_sites(),
                got: self.num_sites(),
            });
        }
        Ok(())
    }

    /// Occupancy as a hex string, least significant site first within each word,
    /// words in ascending order.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.words.len() * 16);
        for w in &self.words {
            let _ = write!(s, "{w:016x}");
        }
        s
    }

    pub fn from_hex(lat: &HexLattice, hex: &str) -> Result<Configuration> {
        let bad = || Error::Parse {
            what: "configuration bitmap",
            input: hex.to_string(),
        };
        let n = lat.num_sites().div_ceil(64);
        if hex.len() != 16 * n || !hex.is_ascii() {
            return Err(bad());
        }
        let mut words = SmallVec::with_capacity(n);
        for k in 0..n {
            words.push(u64::from_str_radix(&hex[16 * k..16 * (k + 1)], 16).map_err(|_| bad())?);
        }
        let c = Configuration {
            words,
            sites: lat.num_sites() as u32,
        };
        if c.occupied().any(|x| x >= lat.num_sites()) {
            return Err(bad());
        }
        Ok(c)
    }

    pub fn to_json(&self, lat: &HexLattice) -> ConfigDump {
        ConfigDump {
            l: lat.radius(),
            occupancy: self.to_hex(),
        }
    }

    pub fn from_json(lat: &HexLattice, dump: &ConfigDump) -> Result<Configuration> {
        if dump.l != lat.radius() {
            return Err(Error::Parse {
                what: "configuration radius",
                input: dump.l.to_string(),
            });
        }
        Self::from_hex(lat, &dump.occupancy)
    }

    /// Text rendering, one row of faces per line, top row first. Interior
    /// faces print as `A`/`V` when occupied and `.` when empty; boundary faces
    /// as `a`/`v` and `,`.
    pub fn render_ascii(&self, lat: &HexLattice) -> String {
        let faces = lat.faces();
        let bmin = faces.iter().map(|f| f.b).min().unwrap_or(0);
        let bmax = faces.iter().map(|f| f.b).max().unwrap_or(0);
        let amin = faces.iter().map(|f| f.a).min().unwrap_or(0);
        let amax = faces.iter().map(|f| f.a).max().unwrap_or(0);
        let mut out = String::new();
        for b in (bmin..=bmax).rev() {
            let indent = (b - bmin) as usize;
            out.push_str(&" ".repeat(indent));
            for a in amin..=amax {
                for f in [FaceCoord::up(a, b), FaceCoord::down(a, b)] {
                    let ch = match lat.site(&f) {
                        None => ' ',
                        Some(s) => {
                            let interior = lat.is_interior(s);
                            match (self.get(s), f.t, interior) {
                                (true, Orientation::Up, true) => 'A',
                                (true, Orientation::Down, true) => 'V',
                                (true, Orientation::Up, false) => 'a',
                                (true, Orientation::Down, false) => 'v',
                                (false, _, true) => '.',
                                (false, _, false) => ',',
                            }
                        }
                    };
                    out.push(ch);
                }
            }
            out.truncate(out.trim_end().len());
            out.push('\n');
        }
        out
    }

    /// Faces of the occupied sites.
    pub fn faces(&self, lat: &HexLattice) -> Vec<FaceCoord> {
        self.occupied().map(|s| lat.face(s)).collect()
    }
}

/// JSON form of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigDump {
    #[serde(rename = "L")]
    pub l: u32,
    pub occupancy: String,
}

/// Number of occupied Λ⁻ neighbours of `x` (the bonds a particle at `x` carries).
#[inline]
pub fn occupied_interior_neighbors(lat: &HexLattice, cfg: &Configuration, x: SiteId) -> usize {
    lat.site_neighbors(x).filter(|&y| lat.is_interior(y) && cfg.get(y)).count()
}

/// Number of occupied nearest-neighbour pairs inside Λ⁻.
pub fn interior_bond_count(lat: &HexLattice, cfg: &Configuration) -> usize {
    lat.interior_bonds().iter().filter(|&&(x, y)| cfg.get(x) && cfg.get(y)).count()
}

/// Free particles: occupied boundary sites, and occupied interior sites with
/// no occupied interior neighbour.
pub fn free_particles(lat: &HexLattice, cfg: &Configuration) -> Vec<SiteId> {
    cfg.occupied()
        .filter(|&x| !lat.is_interior(x) || occupied_interior_neighbors(lat, cfg, x) == 0)
        .collect()
}

/// The n-manifold index: total particle count including free particles.
pub fn manifold_index(cfg: &Configuration) -> usize {
    cfg.count()
}

/// A maximal connected set of clusterised particles inside Λ⁻.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cluster {
    /// Sites in ascending order.
    pub sites: Vec<SiteId>,
    pub bonds: usize,
}

impl Cluster {
    pub fn area(&self) -> usize {
        self.sites.len()
    }

    /// Number of unit edges separating the cluster from the rest: 3·area − 2·bonds.
    pub fn perimeter(&self) -> usize {
        3 * self.area() - 2 * self.bonds
    }

    pub fn faces(&self, lat: &HexLattice) -> Vec<FaceCoord> {
        self.sites.iter().map(|&s| lat.face(s)).collect()
    }

    pub fn contains(&self, x: SiteId) -> bool {
        self.sites.binary_search(&x).is_ok()
    }

    pub fn boundary_walks(&self, lat: &HexLattice) -> Vec<BoundaryWalk> {
        boundary_walks(&self.faces(lat))
    }

    pub fn holes(&self, lat: &HexLattice) -> Vec<Vec<SiteId>> {
        holes(&self.faces(lat))
            .into_iter()
            .map(|h| {
                let mut v: Vec<SiteId> = h.iter().map(|f| lat.site(f).expect("holes lie inside the hexagon")).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }
}

/// Decomposes the clusterised part η_cl into clusters, ordered by smallest site.
pub fn clusters(lat: &HexLattice, cfg: &Configuration) -> Vec<Cluster> {
    let mut seen = vec![false; lat.num_sites()];
    let mut out = Vec::new();
    for &x in lat.interior() {
        if !cfg.get(x) || seen[x] || occupied_interior_neighbors(lat, cfg, x) == 0 {
            continue;
        }
        let mut sites = vec![x];
        let mut queue = VecDeque::from([x]);
        seen[x] = true;
        let mut degree_sum = 0;
        while let Some(u) = queue.pop_front() {
            for v in lat.site_neighbors(u) {
                if lat.is_interior(v) && cfg.get(v) {
                    degree_sum += 1;
                    if !seen[v] {
                        seen[v] = true;
                        sites.push(v);
                        queue.push_back(v);
                    }
                }
            }
        }
        sites.sort_unstable();
        out.push(Cluster {
            sites,
            bonds: degree_sum / 2,
        });
    }
    out
}

/// Fails if the clusters share a site; otherwise reports whether their
/// minimal face distance is exactly two.
pub fn interacting(lat: &HexLattice, c1: &Cluster, c2: &Cluster) -> Result<bool> {
    if c1.sites.iter().any(|&x| c2.contains(x)) {
        return Err(Error::OverlappingClusters);
    }
    let f2 = c2.faces(lat);
    let min = c1
        .sites
        .iter()
        .flat_map(|&x| {
            let fx = lat.face(x);
            f2.iter().map(move |g| fx.distance(g))
        })
        .min()
        .unwrap_or(u32::MAX);
    Ok(min == 2)
}

/// One closed component of a polyiamond's boundary, traversed with the
/// polyiamond on the left (external components run counter-clockwise,
/// internal ones clockwise).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryWalk {
    /// Vertices visited; edge `k` runs from `vertices[k]` to `vertices[k+1]` (cyclically).
    pub vertices: Vec<Vertex>,
    /// Internal angle at each vertex in units of π/3 (1..=5).
    pub angles: Vec<u8>,
    pub external: bool,
}

impl BoundaryWalk {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Σ(π − angle) in units of π/3: +6 for external walks, −6 for internal ones.
    pub fn turning(&self) -> i32 {
        self.angles.iter().map(|&a| 3 - a as i32).sum()
    }
}

fn dir_index(from: Vertex, to: Vertex) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    DIRECTIONS.iter().position(|&e| e == d).expect("unit edge")
}

fn ccw_vertices(f: &FaceCoord) -> [Vertex; 3] {
    let (a, b) = (f.a, f.b);
    match f.t {
        Orientation::Up => [(a, b), (a + 1, b), (a, b + 1)],
        Orientation::Down => [(a + 1, b), (a + 1, b + 1), (a, b + 1)],
    }
}

/// Traces every boundary component of a set of faces. At a vertex the walk
/// leaves along the first boundary edge met when rotating clockwise from the
/// reversed incoming edge, which turns maximally counter-clockwise and splits
/// pinch vertices into separate corners.
pub fn boundary_walks(faces: &[FaceCoord]) -> Vec<BoundaryWalk> {
    let set: HashSet<FaceCoord> = faces.iter().copied().collect();
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    for f in faces {
        let v = ccw_vertices(f);
        for k in 0..3 {
            let (u, w) = (v[k], v[(k + 1) % 3]);
            let d = dir_index(u, w);
            // The face to the right of u→w is the wedge at u clockwise from d.
            let across = wedge_face(u, (d + 5) % 6);
            if !set.contains(&across) {
                edges.push((u, w));
            }
        }
    }
    edges.sort_unstable();
    let mut used: HashMap<(Vertex, Vertex), bool> = edges.iter().map(|&e| (e, false)).collect();
    let mut walks = Vec::new();
    for &start in &edges {
        if used[&start] {
            continue;
        }
        let mut vertices = Vec::new();
        let mut angles = Vec::new();
        let mut e = start;
        loop {
            *used.get_mut(&e).expect("boundary edge") = true;
            vertices.push(e.0);
            let (u, v) = e;
            let back = dir_index(v, u);
            let mut m = 1;
            while m < 6 && set.contains(&wedge_face(v, (back + 6 - m) % 6)) {
                m += 1;
            }
            let out_dir = (back + 7 - m) % 6;
            let d = DIRECTIONS[out_dir];
            angles.push((m - 1) as u8);
            e = (v, (v.0 + d.0, v.1 + d.1));
            if e == start {
                break;
            }
        }
        // angles[k] belongs to the vertex at the end of edge k; rotate so that
        // angles[k] sits at vertices[k].
        angles.rotate_right(1);
        let turning: i32 = angles.iter().map(|&a| 3 - a as i32).sum();
        walks.push(BoundaryWalk {
            vertices,
            angles,
            external: turning > 0,
        });
    }
    walks
}

/// Enclosed components of non-member faces, found by flood fill from outside
/// a margin around the set.
pub fn holes(faces: &[FaceCoord]) -> Vec<Vec<FaceCoord>> {
    if faces.is_empty() {
        return Vec::new();
    }
    let set: HashSet<FaceCoord> = faces.iter().copied().collect();
    let amin = faces.iter().map(|f| f.a).min().unwrap() - 1;
    let amax = faces.iter().map(|f| f.a).max().unwrap() + 1;
    let bmin = faces.iter().map(|f| f.b).min().unwrap() - 1;
    let bmax = faces.iter().map(|f| f.b).max().unwrap() + 1;
    let inside = |f: &FaceCoord| f.a >= amin && f.a <= amax && f.b >= bmin && f.b <= bmax;
    let mut outside: HashSet<FaceCoord> = HashSet::new();
    let mut queue = VecDeque::new();
    for a in amin..=amax {
        for b in bmin..=bmax {
            if a == amin || a == amax || b == bmin || b == bmax {
                for f in [FaceCoord::up(a, b), FaceCoord::down(a, b)] {
                    if !set.contains(&f) && outside.insert(f) {
                        queue.push_back(f);
                    }
                }
            }
        }
    }
    while let Some(f) = queue.pop_front() {
        for n in f.neighbors() {
            if inside(&n) && !set.contains(&n) && outside.insert(n) {
                queue.push_back(n);
            }
        }
    }
    let mut seen: HashSet<FaceCoord> = HashSet::new();
    let mut out = Vec::new();
    for a in amin..=amax {
        for b in bmin..=bmax {
            for f in [FaceCoord::up(a, b), FaceCoord::down(a, b)] {
                if set.contains(&f) || outside.contains(&f) || seen.contains(&f) {
                    continue;
                }
                let mut comp = vec![f];
                seen.insert(f);
                let mut q = VecDeque::from([f]);
                while let Some(g) = q.pop_front() {
                    for n in g.neighbors() {
                        if !set.contains(&n) && !outside.contains(&n) && seen.insert(n) {
                            comp.push(n);
                            q.push_back(n);
                        }
                    }
                }
                comp.sort();
                out.push(comp);
            }
        }
    }
    out
}

/// A corner: a vertex of an external boundary with internal angle 2π/3
/// together with the two polyiamond faces filling that angle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corner {
    pub vertex: Vertex,
    pub faces: [FaceCoord; 2],
}

/// All corners of a set of faces.
pub fn corners(faces: &[FaceCoord]) -> Vec<Corner> {
    let set: HashSet<FaceCoord> = faces.iter().copied().collect();
    let mut out = Vec::new();
    for w in boundary_walks(faces).iter().filter(|w| w.external) {
        let n = w.len();
        for k in 0..n {
            if w.angles[k] != 2 {
                continue;
            }
            let v = w.vertices[k];
            let prev = w.vertices[(k + n - 1) % n];
            let back = dir_index(v, prev);
            let f0 = wedge_face(v, (back + 5) % 6);
            let f1 = wedge_face(v, (back + 4) % 6);
            debug_assert!(set.contains(&f0) && set.contains(&f1));
            out.push(Corner { vertex: v, faces: [f0, f1] });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon(r: i32) -> Vec<FaceCoord> {
        let mut v = Vec::new();
        for a in -r - 1..=r {
            for b in -r - 1..=r {
                for f in [FaceCoord::up(a, b), FaceCoord::down(a, b)] {
                    if f.in_hexagon(r) {
                        v.push(f);
                    }
                }
            }
        }
        v
    }

    #[test]
    fn single_triangle_walk() {
        let w = boundary_walks(&[FaceCoord::up(0, 0)]);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].len(), 3);
        assert_eq!(w[0].angles, vec![1, 1, 1]);
        assert!(w[0].external);
    }

    #[test]
    fn regular_hexagon_walk() {
        let w = boundary_walks(&hexagon(1));
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].angles, vec![2; 6]);
        assert_eq!(corners(&hexagon(1)).len(), 6);
    }

    #[test]
    fn annulus_has_internal_walk_and_hole() {
        let inner: HashSet<FaceCoord> = hexagon(1).into_iter().collect();
        let ring: Vec<FaceCoord> = hexagon(2).into_iter().filter(|f| !inner.contains(f)).collect();
        let walks = boundary_walks(&ring);
        assert_eq!(walks.len(), 2);
        assert_eq!(walks.iter().filter(|w| w.external).count(), 1);
        let internal = walks.iter().find(|w| !w.external).unwrap();
        assert_eq!(internal.turning(), -6);
        assert_eq!(internal.len(), 6);
        let h = holes(&ring);
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].len(), 6);
    }

    #[test]
    fn pinch_vertex_splits_into_two_corners() {
        // Two triangles touching only at the origin, opposite wedges.
        let faces = [wedge_face((0, 0), 0), wedge_face((0, 0), 3)];
        let walks = boundary_walks(&faces);
        assert_eq!(walks.len(), 2);
        assert!(walks.iter().all(|w| w.external && w.angles == vec![1, 1, 1]));
    }
}
