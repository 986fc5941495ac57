//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use kawahex::dynamics::apply_bond;
use kawahex::shapes::HexBounds;
use kawahex::{Configuration, Energy, FaceCoord, HexLattice, Params};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// H = Δ·n − U·(adjacent pairs), counted face by face; sites of ∂⁻Λ carry
/// no bonds.
pub fn face_energy(lat: &HexLattice, cfg: &Configuration, p: &Params) -> Energy {
    let occupied: HashSet<FaceCoord> = cfg.occupied().map(|x| lat.face(x)).collect();
    let interior: HashSet<FaceCoord> = lat.interior().iter().map(|&x| lat.face(x)).collect();
    let mut pairs = 0;
    for f in &occupied {
        if !interior.contains(f) {
            continue;
        }
        for g in f.neighbors() {
            if occupied.contains(&g) && interior.contains(&g) {
                pairs += 1;
            }
        }
    }
    p.delta * occupied.len() as i64 - p.u * (pairs / 2)
}

/// H of a bare set of faces (all counted as interior).
pub fn shape_energy(faces: &[FaceCoord], p: &Params) -> Energy {
    let set: HashSet<FaceCoord> = faces.iter().copied().collect();
    let pairs: i64 = faces
        .iter()
        .map(|f| f.neighbors().iter().filter(|g| set.contains(g)).count() as i64)
        .sum();
    p.delta * faces.len() as i64 - p.u * (pairs / 2)
}

/// Every state of a lattice with at most 16 sites, with its move graph
/// taken straight from the oriented-bond list.
pub struct StateSpace {
    pub sites: usize,
    pub energy: Vec<Energy>,
    pub adj: Vec<Vec<u32>>,
}

impl StateSpace {
    pub fn new(lat: &HexLattice, p: &Params) -> StateSpace {
        let sites = lat.num_sites();
        assert!(sites <= 16);
        let n = 1usize << sites;
        let mut energy = Vec::with_capacity(n);
        let mut adj = Vec::with_capacity(n);
        for w in 0..n as u64 {
            let c = Configuration::from_words(sites, &[w]);
            energy.push(face_energy(lat, &c, p));
            let mut nb: Vec<u32> = lat
                .oriented_bonds()
                .iter()
                .map(|b| apply_bond(&c, b).words()[0] as u32)
                .filter(|&v| v as u64 != w)
                .collect();
            nb.sort_unstable();
            nb.dedup();
            adj.push(nb);
        }
        StateSpace { sites, energy, adj }
    }

    pub fn config(&self, s: u32) -> Configuration {
        Configuration::from_words(self.sites, &[s as u64])
    }

    pub fn len(&self) -> usize {
        self.energy.len()
    }

    /// States reachable from `from` through states with H ≤ level (or
    /// H < level when `strict`).
    pub fn reach(&self, from: u32, level: Energy, strict: bool) -> Vec<bool> {
        let ok = |e: Energy| if strict { e < level } else { e <= level };
        let mut seen = vec![false; self.len()];
        if !ok(self.energy[from as usize]) {
            return seen;
        }
        seen[from as usize] = true;
        let mut q = VecDeque::from([from]);
        while let Some(x) = q.pop_front() {
            for &y in &self.adj[x as usize] {
                if !seen[y as usize] && ok(self.energy[y as usize]) {
                    seen[y as usize] = true;
                    q.push_back(y);
                }
            }
        }
        seen
    }

    pub fn levels(&self) -> Vec<Energy> {
        let mut l = self.energy.clone();
        l.sort_unstable();
        l.dedup();
        l
    }

    /// Φ(a, b): the lowest level at which a and b share a component.
    pub fn phi(&self, a: u32, b: u32) -> Energy {
        self.levels()
            .into_iter()
            .find(|&t| self.reach(a, t, false)[b as usize])
            .expect("the state space is connected")
    }

    /// V_σ, or `None` when no state lies below σ.
    pub fn stability(&self, s: u32) -> Option<Energy> {
        let h = self.energy[s as usize];
        self.levels()
            .into_iter()
            .filter(|&t| t >= h)
            .find(|&t| self.reach(s, t, false).iter().zip(&self.energy).any(|(&r, &e)| r && e < h))
            .map(|t| t - h)
    }

    /// The component of σ inside {H < threshold}.
    pub fn cycle(&self, s: u32, threshold: Energy) -> Vec<u32> {
        self.reach(s, threshold, true)
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(i, _)| i as u32)
            .collect()
    }
}

/// Convex hexagon with bounds cut down at random from a regular one.
pub fn random_convex(rng: &mut StdRng, max_r: i32) -> Vec<FaceCoord> {
    loop {
        let r = rng.gen_range(1..=max_r);
        let mut b = [r; 6];
        for c in b.iter_mut() {
            *c -= rng.gen_range(0..=r.min(2));
        }
        let faces = HexBounds(b).faces();
        if faces.len() >= 2 {
            return faces;
        }
    }
}

fn translate_into(lat: &HexLattice, rng: &mut StdRng, faces: &[FaceCoord]) -> Option<Vec<FaceCoord>> {
    for _ in 0..50 {
        let (di, dj) = (rng.gen_range(-4..=4), rng.gen_range(-4..=4));
        let moved: Vec<FaceCoord> = faces.iter().map(|f| f.translate(di, dj)).collect();
        if moved.iter().all(|f| lat.site(f).is_some_and(|x| lat.is_interior(x))) {
            return Some(moved);
        }
    }
    None
}

fn outside_neighbors(faces: &[FaceCoord]) -> Vec<(FaceCoord, usize)> {
    let set: HashSet<FaceCoord> = faces.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for f in faces {
        for g in f.neighbors() {
            if !set.contains(&g) && seen.insert(g) {
                let k = g.neighbors().iter().filter(|h| set.contains(h)).count();
                out.push((g, k));
            }
        }
    }
    out
}

/// Kinds of structured configurations used to exercise reducing paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Convex,
    Protrusion,
    Notch,
    Rhombus,
    Hole,
    Interacting,
    Separate,
    FreeParticle,
}

pub const FAMILIES: [Family; 8] = [
    Family::Convex,
    Family::Protrusion,
    Family::Notch,
    Family::Rhombus,
    Family::Hole,
    Family::Interacting,
    Family::Separate,
    Family::FreeParticle,
];

/// One random configuration of the family on `lat`, or `None` when the
/// draw did not fit.
pub fn build_family(lat: &HexLattice, family: Family, rng: &mut StdRng) -> Option<Configuration> {
    let base = random_convex(rng, 3);
    let faces: Vec<FaceCoord> = match family {
        Family::Convex => base,
        Family::Protrusion => {
            let cands: Vec<FaceCoord> = outside_neighbors(&base).into_iter().filter(|&(_, k)| k == 1).map(|(g, _)| g).collect();
            let mut f = base;
            f.push(cands[rng.gen_range(0..cands.len())]);
            f
        }
        Family::Notch => {
            let set: HashSet<FaceCoord> = base.iter().copied().collect();
            let edge: Vec<usize> = (0..base.len())
                .filter(|&i| base[i].neighbors().iter().filter(|g| set.contains(g)).count() == 2)
                .collect();
            if edge.is_empty() || base.len() < 4 {
                return None;
            }
            let mut f = base;
            f.swap_remove(edge[rng.gen_range(0..edge.len())]);
            f
        }
        Family::Rhombus => {
            let cands: Vec<FaceCoord> = outside_neighbors(&base).into_iter().filter(|&(_, k)| k == 1).map(|(g, _)| g).collect();
            let a = cands[rng.gen_range(0..cands.len())];
            let mut f = base;
            f.push(a);
            let next: Vec<FaceCoord> = outside_neighbors(&f)
                .into_iter()
                .filter(|&(g, k)| k == 1 && g.neighbors().contains(&a))
                .map(|(g, _)| g)
                .collect();
            if next.is_empty() {
                return None;
            }
            f.push(next[rng.gen_range(0..next.len())]);
            f
        }
        Family::Hole => {
            let set: HashSet<FaceCoord> = base.iter().copied().collect();
            let inner: Vec<usize> = (0..base.len())
                .filter(|&i| {
                    base[i]
                        .neighbors()
                        .iter()
                        .all(|g| set.contains(g) && g.neighbors().iter().all(|h| set.contains(h)))
                })
                .collect();
            if inner.is_empty() {
                return None;
            }
            let mut f = base;
            f.swap_remove(inner[rng.gen_range(0..inner.len())]);
            f
        }
        Family::Interacting | Family::Separate => {
            let other = random_convex(rng, 2);
            let set: HashSet<FaceCoord> = base.iter().copied().collect();
            let ring: HashSet<FaceCoord> = outside_neighbors(&base).into_iter().map(|(g, _)| g).collect();
            let (di, dj) = (rng.gen_range(-7..=7), rng.gen_range(-7..=7));
            let moved: Vec<FaceCoord> = other.iter().map(|f| f.translate(di, dj)).collect();
            if moved.iter().any(|f| set.contains(f) || ring.contains(f)) {
                return None;
            }
            let moved_ring: HashSet<FaceCoord> = outside_neighbors(&moved).into_iter().map(|(g, _)| g).collect();
            let touching = ring.iter().any(|g| moved_ring.contains(g));
            if touching != (family == Family::Interacting) {
                return None;
            }
            base.into_iter().chain(moved).collect()
        }
        Family::FreeParticle => base,
    };
    let faces = translate_into(lat, rng, &faces)?;
    let mut cfg = Configuration::from_faces(lat, &faces).ok()?;
    if family == Family::FreeParticle {
        let empty: Vec<usize> = (0..lat.num_sites())
            .filter(|&x| !cfg.get(x) && lat.site_neighbors(x).all(|y| !cfg.get(y) || !lat.is_interior(y)))
            .collect();
        cfg.set(empty[rng.gen_range(0..empty.len())], true);
    }
    Some(cfg)
}

/// `n` configurations cycling through all families, from a fixed seed.
pub fn structured_configurations(lat: &HexLattice, n: usize, seed: u64) -> Vec<(Family, Configuration)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut k = 0;
    while out.len() < n {
        let fam = FAMILIES[k % FAMILIES.len()];
        if let Some(c) = build_family(lat, fam, &mut rng) {
            out.push((fam, c));
            k += 1;
        }
    }
    out
}
