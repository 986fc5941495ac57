//! The protocritical set K(A*−1) and its free-particle extension C(A*).

use std::collections::{HashSet, VecDeque};

use super::search::SymmetryTable;
use crate::config::{free_particles, occupied_interior_neighbors, Configuration};
use crate::energy::{hamiltonian, Energy, Params};
use crate::error::{Error, Result};
use crate::hexlattice::{FaceCoord, HexLattice};
use crate::shapes::{canonical_shape, protocritical_seeds};

/// Membership oracle for K(A*−1) and C(A*) on one lattice.
#[derive(Clone, Debug)]
pub struct GateSet {
    /// H of every member of K.
    pub seed_energy: Energy,
    pub particles: usize,
    members: HashSet<Configuration>,
    /// Shapes of the members modulo translation and lattice symmetry.
    pub shape_classes: HashSet<Vec<FaceCoord>>,
    sym: Option<SymmetryTable>,
    /// Configurations visited by the closure, including intermediates.
    pub explored: usize,
    pub warnings: Vec<String>,
}

impl GateSet {
    /// Number of members of K (symmetry classes in quotient mode).
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn key(&self, cfg: &Configuration) -> Configuration {
        match &self.sym {
            Some(t) => t.canonical(cfg),
            None => cfg.clone(),
        }
    }

    pub fn in_k(&self, cfg: &Configuration) -> bool {
        cfg.count() == self.particles && self.members.contains(&self.key(cfg))
    }

    /// True when `cfg` is a member of K plus exactly one free particle.
    pub fn in_c(&self, lat: &HexLattice, cfg: &Configuration) -> bool {
        if cfg.count() != self.particles + 1 {
            return false;
        }
        let free = free_particles(lat, cfg);
        if free.len() != 1 {
            return false;
        }
        let mut rest = cfg.clone();
        rest.set(free[0], false);
        self.in_k(&rest)
    }

    /// Shape-class test for a cluster given by its faces.
    pub fn shape_in_k(&self, faces: &[FaceCoord]) -> bool {
        faces.len() == self.particles && self.shape_classes.contains(&canonical_shape(faces))
    }

    /// Members of K (canonical representatives in quotient mode).
    pub fn members(&self) -> impl Iterator<Item = &Configuration> {
        self.members.iter()
    }
}

fn no_free_after_hop(lat: &HexLattice, cfg: &Configuration, from: usize, to: usize) -> bool {
    // cfg is the configuration after the hop
    if occupied_interior_neighbors(lat, cfg, to) == 0 {
        return false;
    }
    lat.site_neighbors(from)
        .all(|z| !cfg.get(z) || occupied_interior_neighbors(lat, cfg, z) > 0)
}

/// Closure of S̃(A*−1) ∪ D̃(A*−1) under particle-conserving hops that keep
/// every particle clusterised inside Λ⁻ and never exceed H(seed) + U.
/// Only endpoints at the seed energy are members of K.
pub fn gate_set(lat: &HexLattice, p: &Params, symmetry: bool, cap: usize) -> Result<GateSet> {
    let (seeds, warnings) = protocritical_seeds(p, lat, false)?;
    if seeds.is_empty() {
        return Err(Error::Placement(format!("no protocritical droplet fits in radius {}", lat.radius())));
    }
    let sym = symmetry.then(|| SymmetryTable::new(lat));
    let key = |c: &Configuration| match &sym {
        Some(t) => t.canonical(c),
        None => c.clone(),
    };
    let seed_energy = hamiltonian(lat, &seeds[0], p);
    let ceiling = seed_energy + p.u;
    let mut visited: HashSet<Configuration> = HashSet::new();
    let mut members = HashSet::new();
    let mut queue = VecDeque::new();
    for s in &seeds {
        let k = key(s);
        if visited.insert(k.clone()) {
            queue.push_back((s.clone(), seed_energy));
        }
    }
    while let Some((cfg, h)) = queue.pop_front() {
        if h == seed_energy {
            members.insert(key(&cfg));
        }
        for x in cfg.occupied() {
            let lost = occupied_interior_neighbors(lat, &cfg, x) as i64;
            for y in lat.site_neighbors(x) {
                if cfg.get(y) || !lat.is_interior(y) {
                    continue;
                }
                let gained = occupied_interior_neighbors(lat, &cfg, y) as i64 - 1;
                let hn = h + p.u * (lost - gained);
                if hn > ceiling {
                    continue;
                }
                let mut next = cfg.clone();
                next.set(x, false);
                next.set(y, true);
                if !no_free_after_hop(lat, &next, x, y) {
                    continue;
                }
                if visited.insert(key(&next)) {
                    if visited.len() > cap {
                        return Err(Error::CapExceeded {
                            cap,
                            explored: visited.len(),
                        });
                    }
                    queue.push_back((next, hn));
                }
            }
        }
    }
    let shape_classes = members.iter().map(|c| canonical_shape(&c.faces(lat))).collect();
    Ok(GateSet {
        seed_energy,
        particles: seeds[0].count(),
        members,
        shape_classes,
        sym,
        explored: visited.len(),
        warnings,
    })
}
