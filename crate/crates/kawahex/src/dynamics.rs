//! The Kawasaki Metropolis kernel with boundary creation and annihilation.
//!
//! One step picks an oriented bond uniformly from Λ̄^{*,orie}, forms T_b η and
//! accepts it with probability e^{−β[ΔH]₊}. Draws that leave η unchanged
//! (equal occupancies, creation on an occupied site, annihilation from an
//! empty one) still advance the clock. Transition probabilities sum over all
//! bonds realising the same target configuration.

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::config::{clusters, occupied_interior_neighbors, Cluster, Configuration};
use crate::energy::{delta_energy, hamiltonian, Energy, Params};
use crate::error::Result;
use crate::hexlattice::{BondEnd, BondKind, HexLattice, SiteId};

/// A single elementary change of a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    /// A particle moves along a bond of Λ from an occupied to an empty site.
    Hop { from: SiteId, to: SiteId },
    /// A particle enters an empty site of ∂⁻Λ from outside.
    Create(SiteId),
    /// A particle on ∂⁻Λ leaves the lattice.
    Annihilate(SiteId),
}

impl Move {
    /// Applies the move without checking applicability.
    pub fn apply(&self, cfg: &mut Configuration) {
        match *self {
            Move::Hop { from, to } => {
                cfg.set(from, false);
                cfg.set(to, true);
            }
            Move::Create(y) => cfg.set(y, true),
            Move::Annihilate(x) => cfg.set(x, false),
        }
    }

    pub fn inverse(&self) -> Move {
        match *self {
            Move::Hop { from, to } => Move::Hop { from: to, to: from },
            Move::Create(y) => Move::Annihilate(y),
            Move::Annihilate(x) => Move::Create(x),
        }
    }
}

/// A distinct successor of a configuration under the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub mv: Move,
    pub dh: Energy,
    /// Number of oriented bonds b with T_b η equal to the successor.
    pub multiplicity: usize,
}

/// All state-changing moves from `cfg`, each listed once with its multiplicity.
pub fn enumerate_moves(lat: &HexLattice, cfg: &Configuration, p: &Params) -> Vec<Transition> {
    let mut out = Vec::new();
    for x in cfg.occupied() {
        for y in lat.site_neighbors(x) {
            if !cfg.get(y) {
                let mv = Move::Hop { from: x, to: y };
                let dh = delta_energy(lat, cfg, &mv, p).expect("hop is applicable");
                out.push(Transition { mv, dh, multiplicity: 2 });
            }
        }
    }
    for &y in lat.inner_boundary() {
        let m = lat.exterior_degree(y);
        if cfg.get(y) {
            out.push(Transition {
                mv: Move::Annihilate(y),
                dh: -p.delta,
                multiplicity: m,
            });
        } else {
            out.push(Transition {
                mv: Move::Create(y),
                dh: p.delta,
                multiplicity: m,
            });
        }
    }
    out
}

/// Successor configurations with their energies, without multiplicities.
pub fn neighbors(lat: &HexLattice, cfg: &Configuration, p: &Params) -> Vec<(Move, Configuration)> {
    enumerate_moves(lat, cfg, p)
        .into_iter()
        .map(|t| {
            let mut c = cfg.clone();
            t.mv.apply(&mut c);
            (t.mv, c)
        })
        .collect()
}

/// T_b η for one oriented bond.
pub fn apply_bond(cfg: &Configuration, bond: &crate::hexlattice::OrientedBond) -> Configuration {
    let mut c = cfg.clone();
    match (bond.kind, bond.from, bond.to) {
        (BondKind::Interior, BondEnd::Site(x), BondEnd::Site(y)) => {
            let (ox, oy) = (c.get(x), c.get(y));
            c.set(x, oy);
            c.set(y, ox);
        }
        (BondKind::Out, BondEnd::Site(x), _) => c.set(x, false),
        (BondKind::In, _, BondEnd::Site(y)) => c.set(y, true),
        _ => unreachable!("bond kinds and endpoints are consistent"),
    }
    c
}

/// P(η, η′) computed directly from the bond list.
pub fn transition_prob(lat: &HexLattice, eta: &Configuration, eta2: &Configuration, p: &Params) -> f64 {
    let norm = lat.bond_counts().total() as f64;
    if eta == eta2 {
        let leave: f64 = enumerate_moves(lat, eta, p)
            .iter()
            .map(|t| t.multiplicity as f64 / norm * acceptance(p, t.dh))
            .sum();
        return 1.0 - leave;
    }
    let m = lat.oriented_bonds().iter().filter(|b| apply_bond(eta, b) == *eta2).count();
    if m == 0 {
        return 0.0;
    }
    let dh = hamiltonian(lat, eta2, p) - hamiltonian(lat, eta, p);
    m as f64 / norm * acceptance(p, dh)
}

/// Metropolis acceptance e^{−β[dh]₊}.
pub fn acceptance(p: &Params, dh: Energy) -> f64 {
    if dh <= 0 {
        1.0
    } else {
        p.boltzmann(dh)
    }
}

/// Which configurations stop a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Empty,
    Full,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reached {
    Empty,
    Full,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingResult {
    /// τ, or the step budget on timeout.
    pub steps: u64,
    pub reached: Reached,
}

/// An accepted state change, reported to monitors after it is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveEvent {
    pub step: u64,
    pub mv: Move,
    /// Bonds carried by the moving particle before the move.
    pub bonds_before: u8,
    /// Bonds carried by the moving particle after the move.
    pub bonds_after: u8,
}

/// Observer of accepted moves.
pub trait Monitor {
    fn on_move(&mut self, sim: &Simulation<'_>, event: &MoveEvent);
}

/// A monitor that records nothing.
pub struct NoMonitor;

impl Monitor for NoMonitor {
    #[inline]
    fn on_move(&mut self, _: &Simulation<'_>, _: &MoveEvent) {}
}

const NONE: u32 = u32::MAX;

/// Precomputed lattice tables for the sampling loop.
#[derive(Clone, Debug)]
pub struct Kernel<'a> {
    lat: &'a HexLattice,
    bonds: Vec<(u32, u32)>,
    interior_nbrs: Vec<[u32; 3]>,
    interior: Vec<bool>,
    u: Energy,
    delta: Energy,
    /// accept_u[d] = ⌊e^{−βdU}·2⁶⁴⌋ for d = 1..=3
    accept_u: [u64; 4],
    accept_delta: u64,
    n_interior: u32,
}

fn threshold(prob: f64) -> u64 {
    if prob >= 1.0 {
        u64::MAX
    } else {
        (prob * 18446744073709551616.0) as u64
    }
}

impl<'a> Kernel<'a> {
    pub fn new(lat: &'a HexLattice, p: &Params) -> Kernel<'a> {
        let bonds = lat
            .oriented_bonds()
            .iter()
            .map(|b| {
                let e = |end: BondEnd| end.site().map_or(NONE, |s| s as u32);
                (e(b.from), e(b.to))
            })
            .collect();
        let interior: Vec<bool> = (0..lat.num_sites()).map(|x| lat.is_interior(x)).collect();
        let interior_nbrs = (0..lat.num_sites())
            .map(|x| {
                let mut slots = [NONE; 3];
                for (k, y) in lat.site_neighbors(x).filter(|&y| interior[y]).enumerate() {
                    slots[k] = y as u32;
                }
                slots
            })
            .collect();
        let mut accept_u = [u64::MAX; 4];
        for (d, slot) in accept_u.iter_mut().enumerate().skip(1) {
            *slot = threshold(p.boltzmann(d as Energy * p.u));
        }
        Kernel {
            lat,
            bonds,
            interior_nbrs,
            interior,
            u: p.u,
            delta: p.delta,
            accept_u,
            accept_delta: threshold(p.boltzmann(p.delta)),
            n_interior: lat.interior().len() as u32,
        }
    }

    pub fn lattice(&self) -> &'a HexLattice {
        self.lat
    }
}

/// A running chain: configuration, clock, cached energy and generator.
pub struct Simulation<'a> {
    kernel: &'a Kernel<'a>,
    words: Vec<u64>,
    energy: Energy,
    time: u64,
    rng: Xoshiro256PlusPlus,
    n_interior: u32,
    n_boundary: u32,
}

impl<'a> Simulation<'a> {
    pub fn new(kernel: &'a Kernel<'a>, start: &Configuration, p: &Params, seed: u64) -> Simulation<'a> {
        let lat = kernel.lat;
        let n_interior = start.occupied().filter(|&x| lat.is_interior(x)).count() as u32;
        Simulation {
            kernel,
            words: start.words().to_vec(),
            energy: hamiltonian(lat, start, p),
            time: 0,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            n_interior,
            n_boundary: start.count() as u32 - n_interior,
        }
    }

    pub fn configuration(&self) -> Configuration {
        Configuration::from_words(self.kernel.lat.num_sites(), &self.words)
    }

    pub fn energy(&self) -> Energy {
        self.energy
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn lattice(&self) -> &'a HexLattice {
        self.kernel.lat
    }

    pub fn is_empty(&self) -> bool {
        self.n_interior == 0 && self.n_boundary == 0
    }

    pub fn is_full(&self) -> bool {
        self.n_interior == self.kernel.n_interior && self.n_boundary == 0
    }

    pub fn in_target(&self, target: Target) -> Option<Reached> {
        let empty = matches!(target, Target::Empty | Target::Both) && self.is_empty();
        let full = matches!(target, Target::Full | Target::Both) && self.is_full();
        if empty {
            Some(Reached::Empty)
        } else if full {
            Some(Reached::Full)
        } else {
            None
        }
    }

    #[inline(always)]
    fn occ(&self, x: u32) -> bool {
        (self.words[(x >> 6) as usize] >> (x & 63)) & 1 == 1
    }

    #[inline(always)]
    fn flip(&mut self, x: u32) {
        self.words[(x >> 6) as usize] ^= 1u64 << (x & 63);
    }

    #[inline(always)]
    fn bonds_at(&self, x: u32) -> u32 {
        let k = self.kernel;
        let mut n = 0;
        for &y in &k.interior_nbrs[x as usize] {
            if y != NONE && self.occ(y) {
                n += 1;
            }
        }
        n
    }

    /// Advances the clock by one step; returns the applied move, if any.
    #[inline]
    pub fn step(&mut self) -> Option<MoveEvent> {
        let k = self.kernel;
        self.time += 1;
        let r = self.rng.next_u64();
        let b = ((r as u128 * k.bonds.len() as u128) >> 64) as usize;
        let (f, t) = k.bonds[b];
        if t == NONE {
            if !self.occ(f) {
                return None;
            }
            self.flip(f);
            self.n_boundary -= 1;
            self.energy -= k.delta;
            return Some(MoveEvent {
                step: self.time,
                mv: Move::Annihilate(f as usize),
                bonds_before: 0,
                bonds_after: 0,
            });
        }
        if f == NONE {
            if self.occ(t) || self.rng.next_u64() >= k.accept_delta {
                return None;
            }
            self.flip(t);
            self.n_boundary += 1;
            self.energy += k.delta;
            return Some(MoveEvent {
                step: self.time,
                mv: Move::Create(t as usize),
                bonds_before: 0,
                bonds_after: 0,
            });
        }
        let (of, ot) = (self.occ(f), self.occ(t));
        if of == ot {
            return None;
        }
        let (src, dst) = if of { (f, t) } else { (t, f) };
        let src_int = k.interior[src as usize];
        let dst_int = k.interior[dst as usize];
        let lost = if src_int { self.bonds_at(src) } else { 0 };
        let gained = if dst_int { self.bonds_at(dst) - u32::from(src_int) } else { 0 };
        if lost > gained && self.rng.next_u64() >= k.accept_u[(lost - gained) as usize] {
            return None;
        }
        self.flip(src);
        self.flip(dst);
        self.energy += k.u * (lost as Energy - gained as Energy);
        if src_int != dst_int {
            if dst_int {
                self.n_interior += 1;
                self.n_boundary -= 1;
            } else {
                self.n_interior -= 1;
                self.n_boundary += 1;
            }
        }
        Some(MoveEvent {
            step: self.time,
            mv: Move::Hop {
                from: src as usize,
                to: dst as usize,
            },
            bonds_before: lost as u8,
            bonds_after: gained as u8,
        })
    }

    /// Runs until the target set is hit or `max_steps` steps have elapsed.
    pub fn run_until<M: Monitor>(&mut self, target: Target, max_steps: u64, monitor: &mut M) -> HittingResult {
        if let Some(reached) = self.in_target(target) {
            return HittingResult { steps: self.time, reached };
        }
        while self.time < max_steps {
            if let Some(ev) = self.step() {
                monitor.on_move(self, &ev);
                if let Some(reached) = self.in_target(target) {
                    return HittingResult { steps: self.time, reached };
                }
            }
        }
        HittingResult {
            steps: self.time,
            reached: Reached::Timeout,
        }
    }

    pub fn rng(&mut self) -> &mut Xoshiro256PlusPlus {
        &mut self.rng
    }
}

/// Runs one seeded chain from `start` until it hits `target`.
pub fn run_until<M: Monitor>(
    lat: &HexLattice,
    start: &Configuration,
    target: Target,
    p: &Params,
    max_steps: u64,
    seed: u64,
    monitor: &mut M,
) -> Result<HittingResult> {
    start.check_lattice(lat)?;
    let kernel = Kernel::new(lat, p);
    let mut sim = Simulation::new(&kernel, start, p, seed);
    Ok(sim.run_until(target, max_steps, monitor))
}

/// Independent occupation of every site of Λ with probability `density`.
pub fn random_configuration(lat: &HexLattice, density: f64, seed: u64) -> Configuration {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut c = Configuration::empty(lat);
    for x in 0..lat.num_sites() {
        if rng.gen_bool(density) {
            c.set(x, true);
        }
    }
    c
}

/// Per-replica seed derived from a base seed.
pub fn replica_seed(base: u64, replica: u64) -> u64 {
    // splitmix64 finaliser, so neighbouring replicas get unrelated streams
    let mut z = base.wrapping_add(replica.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The configuration at a gate-monitor crossing.
#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    pub step: u64,
    /// The configuration just before the attaching move.
    pub before: Configuration,
    pub mv: Move,
    /// Whether the attaching particle was free before the move.
    pub mover_free: bool,
}

/// Tracks the largest cluster and remembers the most recent move that took
/// it from below `a_star` to at least `a_star`.
pub struct GateMonitor {
    a_star: usize,
    largest: usize,
    pub last_crossing: Option<Crossing>,
}

impl GateMonitor {
    pub fn new(lat: &HexLattice, start: &Configuration, a_star: usize) -> GateMonitor {
        let largest = clusters(lat, start).iter().map(Cluster::area).max().unwrap_or(0);
        GateMonitor {
            a_star,
            largest,
            last_crossing: None,
        }
    }
}

impl Monitor for GateMonitor {
    fn on_move(&mut self, sim: &Simulation<'_>, ev: &MoveEvent) {
        if ev.bonds_before == 0 && ev.bonds_after == 0 {
            return;
        }
        let lat = sim.lattice();
        let cfg = sim.configuration();
        let largest = clusters(lat, &cfg).iter().map(Cluster::area).max().unwrap_or(0);
        if self.largest < self.a_star && largest >= self.a_star {
            let mut before = cfg.clone();
            ev.mv.inverse().apply(&mut before);
            let mover_free = match ev.mv {
                Move::Hop { from, .. } => !lat.is_interior(from) || occupied_interior_neighbors(lat, &before, from) == 0,
                _ => false,
            };
            self.last_crossing = Some(Crossing {
                step: ev.step,
                before,
                mv: ev.mv,
                mover_free,
            });
        }
        self.largest = largest;
    }
}

/// Forwards every event to two monitors.
pub struct Both<'m, A, B>(pub &'m mut A, pub &'m mut B);

impl<A: Monitor, B: Monitor> Monitor for Both<'_, A, B> {
    fn on_move(&mut self, sim: &Simulation<'_>, ev: &MoveEvent) {
        self.0.on_move(sim, ev);
        self.1.on_move(sim, ev);
    }
}

/// Checks cached energy against the Hamiltonian after every move (for tests).
pub struct EnergyAudit {
    pub params: Params,
    pub mismatches: usize,
    pub moves: usize,
}

impl Monitor for EnergyAudit {
    fn on_move(&mut self, sim: &Simulation<'_>, _: &MoveEvent) {
        self.moves += 1;
        if hamiltonian(sim.lattice(), &sim.configuration(), &self.params) != sim.energy() {
            self.mismatches += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_match_probabilities() {
        assert_eq!(threshold(1.0), u64::MAX);
        assert_eq!(threshold(0.5), 1u64 << 63);
    }

    #[test]
    fn start_in_target_gives_zero() {
        let lat = HexLattice::new(2).unwrap();
        let p = Params::p1(1.0);
        let r = run_until(&lat, &Configuration::empty(&lat), Target::Both, &p, 100, 1, &mut NoMonitor).unwrap();
        assert_eq!(
            r,
            HittingResult {
                steps: 0,
                reached: Reached::Empty
            }
        );
    }

    #[test]
    fn same_seed_same_trajectory() {
        let lat = HexLattice::new(2).unwrap();
        let p = Params::p1(1.0);
        let start = random_configuration(&lat, 0.5, 3);
        let a = run_until(&lat, &start, Target::Both, &p, 200_000, 9, &mut NoMonitor).unwrap();
        let b = run_until(&lat, &start, Target::Both, &p, 200_000, 9, &mut NoMonitor).unwrap();
        assert_eq!(a, b);
    }
}
