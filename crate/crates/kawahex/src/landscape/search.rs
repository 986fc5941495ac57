//! Best-first minimax search over configurations.
//!
//! States live in an arena of packed occupancy words indexed by a hash
//! table of `u32` handles. The priority of a state is the lowest known
//! path maximum from the start; ties go to states whose bond count is
//! closer to the goal's, then to lower energy, then to more particles.
//! Buckets are drained in increasing order, so the first time a goal is
//! generated at the current bottleneck, that bottleneck is the exact
//! communication height.

use std::collections::{BTreeMap, VecDeque};
use std::hash::BuildHasher;

use hashbrown::HashTable;
use rustc_hash::FxBuildHasher;
use serde::{Deserialize, Serialize};

use super::path::{PathBuilder, PathRecord};
use crate::config::{occupied_interior_neighbors, Configuration};
use crate::dynamics::Move;
use crate::energy::{hamiltonian, Energy, Params};
use crate::error::{Error, Result};
use crate::hexlattice::{HexLattice, Symmetry};

/// Default number of stored states before a search gives up.
pub const DEFAULT_CAP: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// States with H at or above the cutoff are never stored.
    pub cutoff: Option<Energy>,
    pub cap: usize,
    /// Identify configurations related by one of the 12 lattice symmetries.
    pub symmetry: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            cutoff: None,
            cap: DEFAULT_CAP,
            symmetry: false,
        }
    }
}

impl SearchOptions {
    pub fn with_cutoff(mut self, cutoff: Energy) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_symmetry(mut self, on: bool) -> Self {
        self.symmetry = on;
        self
    }
}

/// Site permutations of the dihedral group acting on Λ.
#[derive(Clone, Debug)]
pub struct SymmetryTable {
    sites: usize,
    perms: Vec<Vec<u32>>,
}

impl SymmetryTable {
    pub fn new(lat: &HexLattice) -> SymmetryTable {
        let perms = Symmetry::all()
            .filter(|&s| s != Symmetry::IDENTITY)
            .map(|s| (0..lat.num_sites()).map(|x| lat.transform_site(x, s) as u32).collect())
            .collect();
        SymmetryTable {
            sites: lat.num_sites(),
            perms,
        }
    }

    /// The lexicographically smallest image of `cfg` under the group.
    pub fn canonical(&self, cfg: &Configuration) -> Configuration {
        let mut best: Vec<u64> = cfg.words().to_vec();
        let mut buf = vec![0u64; best.len()];
        for perm in &self.perms {
            buf.iter_mut().for_each(|w| *w = 0);
            for x in cfg.occupied() {
                let y = perm[x] as usize;
                buf[y / 64] |= 1 << (y % 64);
            }
            if buf.iter().rev().lt(best.iter().rev()) {
                best.copy_from_slice(&buf);
            }
        }
        Configuration::from_words(self.sites, &best)
    }
}

/// Calls `f` on every state-changing move with its energy difference.
pub(crate) fn for_each_move(lat: &HexLattice, cfg: &Configuration, p: &Params, mut f: impl FnMut(Move, Energy)) {
    for x in cfg.occupied() {
        let from_int = lat.is_interior(x);
        let lost = if from_int { occupied_interior_neighbors(lat, cfg, x) as i64 } else { 0 };
        for y in lat.site_neighbors(x) {
            if cfg.get(y) {
                continue;
            }
            let gained = if lat.is_interior(y) {
                occupied_interior_neighbors(lat, cfg, y) as i64 - i64::from(from_int)
            } else {
                0
            };
            f(Move::Hop { from: x, to: y }, p.u * (lost - gained));
        }
    }
    for &y in lat.inner_boundary() {
        if cfg.get(y) {
            f(Move::Annihilate(y), -p.delta);
        } else {
            f(Move::Create(y), p.delta);
        }
    }
}

const NO_PARENT: u32 = u32::MAX;

/// Per-site distance to the face nearest the goal's centre of mass, or to
/// the boundary when the goal is empty.
fn potential(lat: &HexLattice, goal: &Configuration) -> Vec<u32> {
    if goal.is_empty() {
        return (0..lat.num_sites())
            .map(|x| {
                lat.inner_boundary()
                    .iter()
                    .map(|&b| lat.face(x).distance(&lat.face(b)))
                    .min()
                    .unwrap_or(u32::MAX)
            })
            .collect();
    }
    let n = goal.count() as f64;
    let (sx, sy) = goal.occupied().fold((0.0, 0.0), |(a, b), x| {
        let (cx, cy) = lat.face(x).centroid();
        (a + cx, b + cy)
    });
    let (mx, my) = (sx / n, sy / n);
    let centre = (0..lat.num_sites())
        .min_by(|&x, &y| {
            let d = |z: usize| {
                let (cx, cy) = lat.face(z).centroid();
                (cx - mx).powi(2) + (cy - my).powi(2)
            };
            d(x).total_cmp(&d(y))
        })
        .expect("lattices are non-empty");
    let c = lat.face(centre);
    (0..lat.num_sites()).map(|x| lat.face(x).distance(&c)).collect()
}

/// Sites reachable from outside through empty sites.
fn reachable(lat: &HexLattice, cfg: &Configuration) -> Vec<bool> {
    let mut seen = vec![false; lat.num_sites()];
    let mut queue: VecDeque<usize> = lat.inner_boundary().iter().copied().filter(|&x| !cfg.get(x)).collect();
    queue.iter().for_each(|&x| seen[x] = true);
    while let Some(x) = queue.pop_front() {
        for y in lat.site_neighbors(x) {
            if !seen[y] && !cfg.get(y) {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Greedily turns `from` into `goal` without exceeding `ceiling`.
///
/// Surplus particles leave first, loosest first. Missing goal sites are
/// then filled from outside, preferring sites with more occupied
/// neighbours and never sealing off another missing site when that can
/// be avoided.
fn complete(lat: &HexLattice, p: &Params, from: &Configuration, goal: &Configuration, pot: &[u32], ceiling: Energy) -> Option<PathRecord> {
    let mut b = PathBuilder::new(lat, p, from);
    let within = |b: &PathBuilder, mark: usize| b.record().energies[mark..].iter().all(|&e| e <= ceiling);
    loop {
        let cur = b.current().clone();
        if cur == *goal {
            return Some(b.finish());
        }
        let mark = b.len();
        let nbrs = |x: usize| lat.site_neighbors(x).filter(|&y| cur.get(y)).count();
        let mut surplus: Vec<usize> = cur.occupied().filter(|&x| !goal.get(x)).collect();
        if !surplus.is_empty() {
            surplus.sort_by_key(|&x| (nbrs(x), std::cmp::Reverse(pot[x])));
            if !surplus.iter().any(|&x| b.take_out(x).is_ok()) {
                return None;
            }
        } else {
            let reach = reachable(lat, &cur);
            let missing: Vec<usize> = goal.occupied().filter(|&x| !cur.get(x)).collect();
            let mut candidates: Vec<usize> = missing.iter().copied().filter(|&x| reach[x]).collect();
            candidates.sort_by_key(|&x| (std::cmp::Reverse(nbrs(x)), pot[x]));
            let &first = candidates.first()?;
            let keeps_open = |c: usize| {
                let mut next = cur.clone();
                next.set(c, true);
                let after = reachable(lat, &next);
                missing.iter().all(|&y| y == c || !reach[y] || after[y])
            };
            let pick = candidates.iter().copied().find(|&c| keeps_open(c)).unwrap_or(first);
            b.bring_in(pick).ok()?;
        }
        if !within(&b, mark) {
            return None;
        }
    }
}

/// Arena of visited states.
pub(crate) struct Store {
    stride: usize,
    sites: usize,
    words: Vec<u64>,
    table: HashTable<u32>,
    hasher: FxBuildHasher,
    pub(crate) energy: Vec<Energy>,
    pub(crate) key: Vec<Energy>,
    pub(crate) parent: Vec<u32>,
    closed: Vec<bool>,
}

impl Store {
    fn new(sites: usize) -> Store {
        Store {
            stride: sites.div_ceil(64),
            sites,
            words: Vec::new(),
            table: HashTable::new(),
            hasher: FxBuildHasher,
            energy: Vec::new(),
            key: Vec::new(),
            parent: Vec::new(),
            closed: Vec::new(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.energy.len()
    }

    fn hash_words(&self, w: &[u64]) -> u64 {
        self.hasher.hash_one(w)
    }

    pub(crate) fn find(&self, w: &[u64]) -> Option<u32> {
        let h = self.hash_words(w);
        let (words, stride) = (&self.words, self.stride);
        self.table
            .find(h, |&i| &words[i as usize * stride..(i as usize + 1) * stride] == w)
            .copied()
    }

    fn insert(&mut self, w: &[u64], energy: Energy, key: Energy, parent: u32) -> u32 {
        let idx = self.len() as u32;
        let h = self.hash_words(w);
        self.words.extend_from_slice(w);
        self.energy.push(energy);
        self.key.push(key);
        self.parent.push(parent);
        self.closed.push(false);
        let (words, stride, hasher) = (&self.words, self.stride, &self.hasher);
        self.table
            .insert_unique(h, idx, |&i| hasher.hash_one(&words[i as usize * stride..(i as usize + 1) * stride]));
        idx
    }

    pub(crate) fn config(&self, idx: u32) -> Configuration {
        let i = idx as usize;
        Configuration::from_words(self.sites, &self.words[i * self.stride..(i + 1) * self.stride])
    }

    fn chain(&self, mut idx: u32) -> Vec<u32> {
        let mut out = vec![idx];
        while self.parent[idx as usize] != NO_PARENT {
            idx = self.parent[idx as usize];
            out.push(idx);
        }
        out.reverse();
        out
    }
}

enum Goal {
    Config(Configuration),
    Below(Energy),
    Nothing,
}

struct Outcome {
    store: Store,
    found: Option<(u32, Energy)>,
    pruned: bool,
    capped: bool,
    /// Key of the bucket being processed when the search stopped.
    frontier: Energy,
    /// A path from the start to the goal, when one was built directly
    /// rather than recovered from the parent chain.
    witness: Option<PathRecord>,
}

struct Engine<'a> {
    lat: &'a HexLattice,
    p: &'a Params,
    opts: SearchOptions,
    sym: Option<SymmetryTable>,
    forbid: Option<&'a dyn Fn(&Configuration) -> bool>,
}

impl<'a> Engine<'a> {
    fn new(lat: &'a HexLattice, p: &'a Params, opts: SearchOptions) -> Engine<'a> {
        let sym = opts.symmetry.then(|| SymmetryTable::new(lat));
        Engine {
            lat,
            p,
            opts,
            sym,
            forbid: None,
        }
    }

    fn rep(&self, cfg: Configuration) -> Configuration {
        match &self.sym {
            Some(t) => t.canonical(&cfg),
            None => cfg,
        }
    }

    fn run(&self, start: &Configuration, goal: Goal) -> Outcome {
        let lat = self.lat;
        let mut store = Store::new(lat.num_sites());
        let h0 = hamiltonian(lat, start, self.p);
        let start_rep = self.rep(start.clone());
        let goal = match goal {
            Goal::Config(c) => Goal::Config(self.rep(c)),
            g => g,
        };
        let s0 = store.insert(start_rep.words(), h0, h0, NO_PARENT);
        let mut outcome = Outcome {
            store,
            found: None,
            pruned: false,
            capped: false,
            frontier: h0,
            witness: None,
        };
        if let Goal::Config(g) = &goal {
            if *g == start_rep {
                outcome.found = Some((s0, h0));
                return outcome;
            }
        }
        let reached = |c: &Configuration, e: Energy| match &goal {
            Goal::Config(g) => g == c,
            Goal::Below(t) => e < *t,
            Goal::Nothing => false,
        };
        let p = self.p;
        let bonds = |c: &Configuration, e: Energy| (p.delta * c.count() as i64 - e) / p.u;
        let goal_bonds = match &goal {
            Goal::Config(g) => Some(bonds(g, hamiltonian(lat, g, p))),
            _ => None,
        };
        let distance = |c: &Configuration, e: Energy| goal_bonds.map_or(0, |b| (bonds(c, e) - b).abs());
        let pot = match &goal {
            Goal::Config(g) => potential(lat, g),
            _ => vec![0; lat.num_sites()],
        };
        let store = &mut outcome.store;
        let mut best_gap = i64::MAX;
        let mut buckets: BTreeMap<(Energy, i64, Energy, i64), VecDeque<u32>> = BTreeMap::new();
        buckets
            .entry((h0, distance(&start_rep, h0), h0, -(start.count() as i64)))
            .or_default()
            .push_back(s0);
        while let Some(mut entry) = buckets.first_entry() {
            let k = entry.key().0;
            outcome.frontier = k;
            let Some(idx) = entry.get_mut().pop_back() else {
                entry.remove();
                continue;
            };
            let i = idx as usize;
            if store.closed[i] || store.key[i] != k {
                continue;
            }
            store.closed[i] = true;
            let cfg = store.config(idx);
            let h = store.energy[i];
            if idx != s0 && reached(&cfg, h) {
                outcome.found = Some((idx, k));
                return outcome;
            }
            if let Goal::Config(g) = &goal {
                let gap = distance(&cfg, h);
                if gap < best_gap {
                    best_gap = gap;
                    if let Some(tail) = complete(lat, p, &cfg, g, &pot, k) {
                        if let Some(w) = self.splice(store, start, idx, &tail) {
                            outcome.found = Some((idx, k));
                            outcome.witness = Some(w);
                            return outcome;
                        }
                    }
                }
            }
            let mut hit = None;
            let mut capped = false;
            for_each_move(lat, &cfg, self.p, |mv, dh| {
                if hit.is_some() || capped {
                    return;
                }
                let hn = h + dh;
                if let Some(c) = self.opts.cutoff {
                    if hn >= c {
                        outcome.pruned = true;
                        return;
                    }
                }
                let mut next = cfg.clone();
                mv.apply(&mut next);
                if let Some(f) = self.forbid {
                    if f(&next) {
                        outcome.pruned = true;
                        return;
                    }
                }
                let next = self.rep(next);
                let nk = k.max(hn);
                let order = (nk, distance(&next, hn), hn, -(next.count() as i64));
                let is_goal = reached(&next, hn);
                match store.find(next.words()) {
                    Some(j) => {
                        let j = j as usize;
                        if !store.closed[j] && nk < store.key[j] {
                            store.key[j] = nk;
                            store.parent[j] = idx;
                            buckets.entry(order).or_default().push_back(j as u32);
                        }
                        if is_goal && nk == k {
                            hit = Some(j as u32);
                        }
                    }
                    None => {
                        if store.len() >= self.opts.cap {
                            capped = true;
                            return;
                        }
                        let j = store.insert(next.words(), hn, nk, idx);
                        buckets.entry(order).or_default().push_back(j);
                        if is_goal && nk == k {
                            hit = Some(j);
                        }
                    }
                }
            });
            if let Some(j) = hit {
                outcome.found = Some((j, k));
                return outcome;
            }
            if capped {
                outcome.capped = true;
                return outcome;
            }
        }
        outcome
    }

    /// Joins the real path to stored state `end` with `tail`, a path that
    /// starts at the representative of `end`.
    fn splice(&self, store: &Store, start: &Configuration, end: u32, tail: &PathRecord) -> Option<PathRecord> {
        let mut path = self.realize(store, start, end).ok()?;
        let actual = path.end().clone();
        let s = Symmetry::all().find(|&s| {
            let mut image = Configuration::empty(self.lat);
            tail.start().occupied().for_each(|x| image.set(self.lat.transform_site(x, s), true));
            image == actual
        })?;
        let mut b = PathBuilder::new(self.lat, self.p, &actual);
        let map = |x| self.lat.transform_site(x, s);
        for mv in &tail.moves {
            let mv = match *mv {
                Move::Hop { from, to } => Move::Hop {
                    from: map(from),
                    to: map(to),
                },
                Move::Create(x) => Move::Create(map(x)),
                Move::Annihilate(x) => Move::Annihilate(map(x)),
            };
            b.push(mv).ok()?;
        }
        path.extend(&b.finish()).ok()?;
        Some(path)
    }

    /// Converts a chain of stored representatives into a real path.
    fn realize(&self, store: &Store, start: &Configuration, end: u32) -> Result<PathRecord> {
        let chain = store.chain(end);
        let mut b = PathBuilder::new(self.lat, self.p, start);
        for &idx in &chain[1..] {
            let target = store.config(idx);
            let mut chosen = None;
            for_each_move(self.lat, b.current(), self.p, |mv, _| {
                if chosen.is_some() {
                    return;
                }
                let mut c = b.current().clone();
                mv.apply(&mut c);
                if self.rep(c) == target {
                    chosen = Some(mv);
                }
            });
            let mv = chosen.ok_or_else(|| Error::InapplicableMove("search chain is not a path".into()))?;
            b.push(mv)?;
        }
        Ok(b.finish())
    }
}

/// Result of a communication-height query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LandscapeResult {
    /// Φ(a, b) when the search settled it.
    pub value: Option<Energy>,
    /// A certified lower bound on Φ(a, b).
    pub lower_bound: Energy,
    pub explored: usize,
    pub complete: bool,
    pub cap_reached: bool,
    pub witness: Option<PathRecord>,
}

/// Φ(a, b): the least path maximum over all paths from `a` to `b`.
///
/// With a cutoff, states with H at or above it are never entered, so an
/// unsuccessful search certifies Φ ≥ cutoff.
pub fn communication_height(lat: &HexLattice, p: &Params, a: &Configuration, b: &Configuration, opts: SearchOptions) -> Result<LandscapeResult> {
    communication_height_avoiding(lat, p, a, b, opts, None)
}

/// Φ(a, b) restricted to paths that never enter a state where `forbid` holds.
pub fn communication_height_avoiding(
    lat: &HexLattice,
    p: &Params,
    a: &Configuration,
    b: &Configuration,
    opts: SearchOptions,
    forbid: Option<&dyn Fn(&Configuration) -> bool>,
) -> Result<LandscapeResult> {
    a.check_lattice(lat)?;
    b.check_lattice(lat)?;
    let mut engine = Engine::new(lat, p, opts);
    engine.forbid = forbid;
    let out = engine.run(a, Goal::Config(b.clone()));
    let floor = hamiltonian(lat, a, p).max(hamiltonian(lat, b, p));
    let explored = out.store.len();
    match out.found {
        Some((idx, k)) => Ok(LandscapeResult {
            value: Some(k),
            lower_bound: k,
            explored,
            complete: true,
            cap_reached: false,
            witness: Some(match out.witness {
                Some(w) => w,
                None => engine.realize(&out.store, a, idx)?,
            }),
        }),
        None => {
            let mut lb = if out.capped { out.frontier } else { Energy::MAX };
            if out.pruned {
                lb = lb.min(opts.cutoff.unwrap_or(Energy::MAX));
            }
            Ok(LandscapeResult {
                value: None,
                lower_bound: lb.max(floor),
                explored,
                complete: !out.capped,
                cap_reached: out.capped,
                witness: None,
            })
        }
    }
}

/// Result of a stability-level query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityResult {
    /// V_σ, or `None` when no lower state was found.
    pub level: Option<Energy>,
    pub lower_bound: Energy,
    /// True when the search ran to completion: with `level == None` this
    /// means σ is a global minimum of the explored component.
    pub complete: bool,
    pub explored: usize,
    pub witness: Option<PathRecord>,
}

/// V_σ = Φ(σ, I_σ) − H(σ), where I_σ is the set of states strictly below σ.
pub fn stability_level(lat: &HexLattice, p: &Params, sigma: &Configuration, opts: SearchOptions) -> Result<StabilityResult> {
    sigma.check_lattice(lat)?;
    let h = hamiltonian(lat, sigma, p);
    let engine = Engine::new(lat, p, opts);
    let out = engine.run(sigma, Goal::Below(h));
    let explored = out.store.len();
    match out.found {
        Some((idx, k)) => Ok(StabilityResult {
            level: Some(k - h),
            lower_bound: k - h,
            complete: true,
            explored,
            witness: Some(engine.realize(&out.store, sigma, idx)?),
        }),
        None => {
            let mut lb = if out.capped { out.frontier - h } else { Energy::MAX };
            if out.pruned {
                lb = lb.min(opts.cutoff.unwrap_or(Energy::MAX) - h);
            }
            Ok(StabilityResult {
                level: None,
                lower_bound: lb,
                complete: !out.capped,
                explored,
                witness: None,
            })
        }
    }
}

/// The cycle of σ at a given energy: σ together with every state reachable
/// from σ through states with H strictly below `cutoff`.
pub struct CycleResult {
    store: Store,
    sym: Option<SymmetryTable>,
    /// False when the cap stopped the flood fill early.
    pub complete: bool,
    pub cutoff: Energy,
}

impl CycleResult {
    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.len() == 0
    }

    pub fn contains(&self, cfg: &Configuration) -> bool {
        let c = match &self.sym {
            Some(t) => t.canonical(cfg),
            None => cfg.clone(),
        };
        self.store.find(c.words()).is_some()
    }

    pub fn min_energy(&self) -> Energy {
        self.store.energy.iter().copied().min().expect("cycles contain their seed")
    }

    /// Members (canonical representatives under symmetry).
    pub fn members(&self) -> impl Iterator<Item = (Configuration, Energy)> + '_ {
        (0..self.store.len() as u32).map(|i| (self.store.config(i), self.store.energy[i as usize]))
    }
}

pub fn cycle(lat: &HexLattice, p: &Params, sigma: &Configuration, cutoff: Energy, opts: SearchOptions) -> Result<CycleResult> {
    sigma.check_lattice(lat)?;
    let engine = Engine::new(lat, p, opts.with_cutoff(cutoff));
    let out = engine.run(sigma, Goal::Nothing);
    Ok(CycleResult {
        store: out.store,
        sym: engine.sym,
        complete: !out.capped,
        cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_is_invariant() {
        let lat = HexLattice::new(2).unwrap();
        let t = SymmetryTable::new(&lat);
        let cfg = Configuration::from_sites(&lat, [0, 5, 17, 30]);
        let c = t.canonical(&cfg);
        for s in Symmetry::all() {
            let img = Configuration::from_sites(&lat, cfg.occupied().map(|x| lat.transform_site(x, s)));
            assert_eq!(t.canonical(&img), c);
        }
    }

    #[test]
    fn trivial_height() {
        let lat = HexLattice::new(1).unwrap();
        let p = Params::p1(1.0);
        let e = Configuration::empty(&lat);
        let r = communication_height(&lat, &p, &e, &e, SearchOptions::default()).unwrap();
        assert_eq!(r.value, Some(0));
    }
}
