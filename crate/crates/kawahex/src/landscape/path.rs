use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::dynamics::Move;
use crate::energy::{delta_energy, hamiltonian, Energy, Params};
use crate::error::{Error, Result};
use crate::hexlattice::{HexLattice, SiteId};

/// A finite path of configurations with the energy of every state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub configurations: Vec<Configuration>,
    pub moves: Vec<Move>,
    pub energies: Vec<Energy>,
}

impl PathRecord {
    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    pub fn start(&self) -> &Configuration {
        &self.configurations[0]
    }

    pub fn end(&self) -> &Configuration {
        self.configurations.last().expect("paths are never empty")
    }

    pub fn max_energy(&self) -> Energy {
        self.energies.iter().copied().max().expect("paths are never empty")
    }

    /// Indices of every state attaining the maximal energy.
    pub fn argmax(&self) -> Vec<usize> {
        let m = self.max_energy();
        (0..self.energies.len()).filter(|&k| self.energies[k] == m).collect()
    }

    /// The same path traversed backwards, with inverted moves.
    pub fn reversed(&self) -> PathRecord {
        let mut configurations = self.configurations.clone();
        configurations.reverse();
        let mut energies = self.energies.clone();
        energies.reverse();
        let moves = self.moves.iter().rev().map(Move::inverse).collect();
        PathRecord {
            configurations,
            moves,
            energies,
        }
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn extend(&mut self, other: &PathRecord) -> Result<()> {
        if other.start() != self.end() {
            return Err(Error::InapplicableMove("paths do not connect".into()));
        }
        self.configurations.extend_from_slice(&other.configurations[1..]);
        self.energies.extend_from_slice(&other.energies[1..]);
        self.moves.extend_from_slice(&other.moves);
        Ok(())
    }

    /// Replays every move from the start, checking applicability and the
    /// recorded energies against a fresh evaluation of H.
    pub fn validate(&self, lat: &HexLattice, p: &Params) -> Result<()> {
        if self.configurations.len() != self.moves.len() + 1 || self.energies.len() != self.configurations.len() {
            return Err(Error::InapplicableMove("path arrays have inconsistent lengths".into()));
        }
        for (k, c) in self.configurations.iter().enumerate() {
            if hamiltonian(lat, c, p) != self.energies[k] {
                return Err(Error::InapplicableMove(format!("energy mismatch at step {k}")));
            }
        }
        for (k, mv) in self.moves.iter().enumerate() {
            let mut c = self.configurations[k].clone();
            delta_energy(lat, &c, mv, p)?;
            mv.apply(&mut c);
            if c != self.configurations[k + 1] {
                return Err(Error::InapplicableMove(format!("move {k} does not produce the next state")));
            }
        }
        Ok(())
    }
}

/// Builds a path move by move, tracking the energy incrementally.
#[derive(Clone, Debug)]
pub struct PathBuilder<'a> {
    lat: &'a HexLattice,
    p: Params,
    current: Configuration,
    energy: Energy,
    record: PathRecord,
}

impl<'a> PathBuilder<'a> {
    pub fn new(lat: &'a HexLattice, p: &Params, start: &Configuration) -> PathBuilder<'a> {
        let energy = hamiltonian(lat, start, p);
        PathBuilder {
            lat,
            p: *p,
            current: start.clone(),
            energy,
            record: PathRecord {
                configurations: vec![start.clone()],
                moves: Vec::new(),
                energies: vec![energy],
            },
        }
    }

    pub fn current(&self) -> &Configuration {
        &self.current
    }

    pub fn energy(&self) -> Energy {
        self.energy
    }

    pub fn len(&self) -> usize {
        self.record.len()
    }

    pub fn is_empty(&self) -> bool {
        self.record.is_empty()
    }

    pub fn push(&mut self, mv: Move) -> Result<Energy> {
        let dh = delta_energy(self.lat, &self.current, &mv, &self.p)?;
        mv.apply(&mut self.current);
        self.energy += dh;
        self.record.configurations.push(self.current.clone());
        self.record.energies.push(self.energy);
        self.record.moves.push(mv);
        Ok(self.energy)
    }

    /// Drops everything after the first `len` states.
    pub fn truncate(&mut self, len: usize) {
        self.record.configurations.truncate(len);
        self.record.energies.truncate(len);
        self.record.moves.truncate(len.saturating_sub(1));
        self.current = self.record.end().clone();
        self.energy = *self.record.energies.last().expect("non-empty");
    }

    /// Creates a particle on the nearest reachable empty boundary site and
    /// walks it through empty sites to `target`.
    pub fn bring_in(&mut self, target: SiteId) -> Result<()> {
        if self.current.get(target) {
            return Err(Error::InapplicableMove(format!("site {target} is occupied")));
        }
        let lat = self.lat;
        let mut route = empty_route(lat, &self.current, target, |y| !lat.is_interior(y))
            .ok_or_else(|| Error::InapplicableMove(format!("no empty route from the boundary to {target}")))?;
        route.reverse();
        self.push(Move::Create(route[0]))?;
        self.hop_along(&route)
    }

    /// Walks the particle at `x` through empty sites to the boundary and
    /// removes it.
    pub fn take_out(&mut self, x: SiteId) -> Result<()> {
        let lat = self.lat;
        let route = empty_route(lat, &self.current, x, |y| !lat.is_interior(y))
            .ok_or_else(|| Error::InapplicableMove(format!("particle at {x} cannot reach the boundary")))?;
        self.hop_along(&route)?;
        self.push(Move::Annihilate(*route.last().expect("route is non-empty")))?;
        Ok(())
    }

    /// Walks the particle at `x` through empty sites to `y`.
    pub fn walk(&mut self, x: SiteId, y: SiteId) -> Result<()> {
        let route =
            empty_route(self.lat, &self.current, x, |z| z == y).ok_or_else(|| Error::InapplicableMove(format!("no empty route from {x} to {y}")))?;
        self.hop_along(&route)
    }

    fn hop_along(&mut self, route: &[SiteId]) -> Result<()> {
        for w in route.windows(2) {
            self.push(Move::Hop { from: w[0], to: w[1] })?;
        }
        Ok(())
    }

    pub fn finish(self) -> PathRecord {
        self.record
    }

    pub fn record(&self) -> &PathRecord {
        &self.record
    }
}

/// Shortest route from `from` to the nearest site accepted by `goal`,
/// stepping only on empty sites (`from` itself may be occupied).
pub(crate) fn empty_route(lat: &HexLattice, cfg: &Configuration, from: SiteId, goal: impl Fn(SiteId) -> bool) -> Option<Vec<SiteId>> {
    if goal(from) {
        return Some(vec![from]);
    }
    let mut prev = vec![usize::MAX; lat.num_sites()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for y in lat.site_neighbors(x) {
            if prev[y] != usize::MAX || cfg.get(y) {
                continue;
            }
            prev[y] = x;
            if goal(y) {
                let mut route = vec![y];
                let mut z = y;
                while z != from {
                    z = prev[z];
                    route.push(z);
                }
                route.reverse();
                return Some(route);
            }
            queue.push_back(y);
        }
    }
    None
}
