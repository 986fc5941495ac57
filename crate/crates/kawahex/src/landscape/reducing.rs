//! Constructive paths that lower the energy of a configuration while never
//! climbing more than Δ + U above it.
//!
//! Every configuration other than □ and ■ falls into one of the structural
//! classes below; each class has a short move sequence that reaches a lower
//! state. When the constructive attempt does not validate (for instance
//! because a droplet is pressed against the boundary) a bounded minimax
//! search with the same ceiling takes over.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::path::{empty_route, PathBuilder, PathRecord};
use super::search::{stability_level, SearchOptions};
use crate::config::{clusters, free_particles, interacting, occupied_interior_neighbors, Cluster, Configuration};
use crate::dynamics::Move;
use crate::energy::{critical_quantities, hamiltonian, Energy, Params};
use crate::error::{Error, Result};
use crate::hexlattice::{FaceCoord, HexLattice, SiteId};
use crate::shapes::{canonical_shape, quasi_regular_faces, HexBounds, SIDE_NORMALS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureClass {
    FreeParticle,
    /// A triangle attached by a single edge.
    AnglePi3,
    /// An empty triangle sharing two or more edges with one cluster.
    Angle5Pi3,
    /// An empty triangle that, once filled, opens a 5π/3 pocket next to it.
    Angle4Pi3,
    Interacting,
    Hole,
    /// One quasi-regular hexagon with radius at most r* (Z1) or above (Z2).
    Z1,
    Z2,
    /// One convex hexagon that is not quasi-regular.
    R1,
    R2,
    /// Several convex hexagons.
    Y1,
    Y2,
    /// Anything else (non-convex clusters without the features above).
    Other,
}

/// A reducing path together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub class: StructureClass,
    pub strategy: String,
    pub path: PathRecord,
    /// max H along the path minus H(σ).
    pub max_excess: Energy,
    /// H(σ) minus the energy of the final state.
    pub drop: Energy,
}

/// Geometry of a convex cluster: tight hexagon bounds and side lengths.
#[derive(Clone, Copy, Debug)]
struct Hexagon {
    bounds: [i32; 6],
    sides: [i32; 6],
}

fn forms((i, j): (i32, i32)) -> [i32; 6] {
    [j, i + j, i, -j, -i - j, -i]
}

fn convex_hexagon(faces: &[FaceCoord]) -> Option<Hexagon> {
    let mut c = [i32::MIN; 6];
    for f in faces {
        for v in f.vertices() {
            for (k, x) in forms(v).into_iter().enumerate() {
                c[k] = c[k].max(x);
            }
        }
    }
    if HexBounds(c).faces().len() != faces.len() {
        return None;
    }
    let sides = std::array::from_fn(|k| c[(k + 5) % 6] + c[(k + 1) % 6] - c[k]);
    Some(Hexagon { bounds: c, sides })
}

/// Radius of the largest regular hexagon inside a convex cluster.
fn inner_radius(h: &Hexagon) -> i32 {
    *h.sides.iter().filter(|&&s| s > 0).min().unwrap_or(&0)
}

fn is_quasi_regular(faces: &[FaceCoord], h: &Hexagon) -> bool {
    let r = inner_radius(h);
    if r == 0 {
        return false;
    }
    let canon = canonical_shape(faces);
    (0..6).any(|i| {
        let q = quasi_regular_faces(r as u32, i);
        q.len() == faces.len() && canonical_shape(&q) == canon
    })
}

fn tangent_order(faces: &mut [FaceCoord], side: usize, reverse: bool) {
    let theta = (SIDE_NORMALS[side] - 90.0).to_radians();
    let (tx, ty) = (theta.cos(), theta.sin());
    faces.sort_by(|f, g| {
        let (fx, fy) = f.centroid();
        let (gx, gy) = g.centroid();
        (fx * tx + fy * ty).total_cmp(&(gx * tx + gy * ty))
    });
    if reverse {
        faces.reverse();
    }
}

/// Faces of the bar along side `k` of a convex cluster.
fn side_bar(h: &Hexagon, k: usize) -> Vec<FaceCoord> {
    let mut inner = h.bounds;
    inner[k] -= 1;
    let inner = HexBounds(inner);
    HexBounds(h.bounds).faces().into_iter().filter(|f| !inner.contains(f)).collect()
}

/// Faces that would extend the cluster by one row across side `k`.
fn outer_bar(h: &Hexagon, k: usize) -> Vec<FaceCoord> {
    let mut outer = h.bounds;
    outer[k] += 1;
    let own = HexBounds(h.bounds);
    HexBounds(outer).faces().into_iter().filter(|f| !own.contains(f)).collect()
}

struct Ctx<'a> {
    lat: &'a HexLattice,
    p: &'a Params,
    sigma: &'a Configuration,
    h0: Energy,
    ceiling: Energy,
}

impl Ctx<'_> {
    /// Cuts a candidate at its first state strictly below H(σ) and checks
    /// the ceiling.
    fn accept(&self, b: PathBuilder) -> Option<PathRecord> {
        let rec = b.finish();
        let end = rec.energies.iter().position(|&e| e < self.h0)?;
        let cut = PathRecord {
            configurations: rec.configurations[..=end].to_vec(),
            moves: rec.moves[..end].to_vec(),
            energies: rec.energies[..=end].to_vec(),
        };
        (cut.max_energy() <= self.ceiling).then_some(cut)
    }

    fn builder(&self) -> PathBuilder<'_> {
        PathBuilder::new(self.lat, self.p, self.sigma)
    }

    fn nbrs(&self, cfg: &Configuration, y: SiteId) -> usize {
        occupied_interior_neighbors(self.lat, cfg, y)
    }

    fn reachable_from_boundary(&self, cfg: &Configuration) -> Vec<bool> {
        let lat = self.lat;
        let mut seen = vec![false; lat.num_sites()];
        let mut queue = VecDeque::new();
        for &y in lat.inner_boundary() {
            if !cfg.get(y) {
                seen[y] = true;
                queue.push_back(y);
            }
        }
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

    fn free_particle(&self, x: SiteId) -> Option<PathRecord> {
        let mut b = self.builder();
        if b.take_out(x).is_ok() {
            if let Some(p) = self.accept(b) {
                return Some(p);
            }
        }
        let lat = self.lat;
        let cfg = self.sigma;
        let route = empty_route(lat, cfg, x, |y| {
            lat.is_interior(y) && self.nbrs(cfg, y) > usize::from(lat.site_neighbors(y).any(|z| z == x))
        })?;
        let mut b = self.builder();
        b.walk(x, *route.last()?).ok()?;
        self.accept(b)
    }

    fn detach(&self, x: SiteId) -> Option<PathRecord> {
        let mut b = self.builder();
        b.take_out(x).ok()?;
        self.accept(b)
    }

    fn fill(&self, sites: &[SiteId]) -> Option<PathRecord> {
        let mut b = self.builder();
        for &y in sites {
            b.bring_in(y).ok()?;
        }
        self.accept(b)
    }

    /// Slides the particles along `chain` one step towards its head, which
    /// must be empty, then fills the freed tail site from outside.
    fn migrate(&self, chain: &[SiteId]) -> Option<PathRecord> {
        let mut b = self.builder();
        for w in chain.windows(2) {
            b.push(Move::Hop { from: w[1], to: w[0] }).ok()?;
        }
        let tail = *chain.last()?;
        if self.nbrs(b.current(), tail) >= 2 {
            let _ = b.bring_in(tail);
        }
        self.accept(b)
    }

    fn bar_path(&self, faces: &[FaceCoord], remove: bool) -> Option<PathRecord> {
        let mut b = self.builder();
        for f in faces {
            let x = self.lat.site(f)?;
            if remove {
                b.take_out(x).ok()?;
            } else {
                if !self.lat.is_interior(x) {
                    return None;
                }
                b.bring_in(x).ok()?;
            }
            if b.energy() < self.h0 {
                break;
            }
        }
        self.accept(b)
    }

    /// Strips the row along side `k`, then continues on a neighbouring side
    /// of what is left, starting next to the removed row.
    fn dismantle(&self, h: &Hexagon, k: usize) -> Option<PathRecord> {
        let mut shrunk = *h;
        shrunk.bounds[k] -= 1;
        let mut bar = side_bar(h, k);
        [false, true].into_iter().find_map(|rev| {
            tangent_order(&mut bar, k, rev);
            self.bar_path(&bar, true).or_else(|| {
                [1, 5].into_iter().find_map(|d| {
                    let mut next = side_bar(&shrunk, (k + d) % 6);
                    next.sort_by_key(|f| bar.iter().map(|g| f.distance(g)).min());
                    let seq: Vec<FaceCoord> = bar.iter().chain(&next).copied().collect();
                    self.bar_path(&seq, true)
                })
            })
        })
    }

    /// Grows a row across side `k`, then continues on a neighbouring side of
    /// the grown hexagon starting next to the new row. On a regular hexagon
    /// the first row alone ends above H(σ).
    fn add(&self, h: &Hexagon, k: usize) -> Option<PathRecord> {
        let mut grown = *h;
        grown.bounds[k] += 1;
        let mut bar = outer_bar(h, k);
        [false, true].into_iter().find_map(|rev| {
            tangent_order(&mut bar, k, rev);
            [1, 5].into_iter().find_map(|d| {
                let mut next = outer_bar(&grown, (k + d) % 6);
                next.sort_by_key(|f| bar.iter().map(|g| f.distance(g)).min());
                let seq: Vec<FaceCoord> = bar.iter().chain(&next).copied().collect();
                self.bar_path(&seq, false)
            })
        })
    }
}

fn pi3_sites(lat: &HexLattice, cfg: &Configuration) -> Vec<SiteId> {
    cfg.occupied()
        .filter(|&x| lat.is_interior(x) && occupied_interior_neighbors(lat, cfg, x) == 1)
        .collect()
}

fn pocket_sites(ctx: &Ctx, cfg: &Configuration, cl: &[Cluster], open: &[bool]) -> Vec<SiteId> {
    let lat = ctx.lat;
    lat.interior()
        .iter()
        .copied()
        .filter(|&y| !cfg.get(y) && open[y])
        .filter(|&y| cl.iter().any(|c| lat.site_neighbors(y).filter(|&z| c.contains(z)).count() >= 2))
        .collect()
}

fn two_step_sites(ctx: &Ctx, cfg: &Configuration, open: &[bool]) -> Vec<(SiteId, SiteId)> {
    let lat = ctx.lat;
    let mut out = Vec::new();
    for &y1 in lat.interior() {
        if cfg.get(y1) || !open[y1] || ctx.nbrs(cfg, y1) != 1 {
            continue;
        }
        for y2 in lat.site_neighbors(y1) {
            if lat.is_interior(y2) && !cfg.get(y2) && open[y2] && ctx.nbrs(cfg, y2) == 1 {
                out.push((y1, y2));
            }
        }
    }
    out
}

fn interacting_sites(ctx: &Ctx, cfg: &Configuration, cl: &[Cluster]) -> Vec<SiteId> {
    let lat = ctx.lat;
    let mut out = Vec::new();
    for (a, c1) in cl.iter().enumerate() {
        for c2 in &cl[a + 1..] {
            if interacting(lat, c1, c2).unwrap_or(false) {
                for &y in lat.interior() {
                    if !cfg.get(y) && lat.site_neighbors(y).any(|z| c1.contains(z)) && lat.site_neighbors(y).any(|z| c2.contains(z)) {
                        out.push(y);
                    }
                }
            }
        }
    }
    out
}

/// Chains from an enclosed empty site through occupied sites to a particle
/// that touches the open exterior.
fn hole_chains(ctx: &Ctx, cfg: &Configuration, cl: &[Cluster], open: &[bool]) -> Vec<Vec<SiteId>> {
    let lat = ctx.lat;
    let mut out = Vec::new();
    for c in cl {
        for hole in c.holes(lat) {
            for &h in &hole {
                let mut prev: Vec<Option<SiteId>> = vec![None; lat.num_sites()];
                prev[h] = Some(h);
                let mut queue = VecDeque::from([h]);
                let mut found = None;
                while let Some(x) = queue.pop_front() {
                    if x != h && lat.site_neighbors(x).any(|z| open[z]) {
                        found = Some(x);
                        break;
                    }
                    for y in lat.site_neighbors(x) {
                        if prev[y].is_none() && cfg.get(y) && lat.is_interior(y) {
                            prev[y] = Some(x);
                            queue.push_back(y);
                        }
                    }
                }
                if let Some(mut z) = found {
                    let mut chain = vec![z];
                    while z != h {
                        z = prev[z].expect("visited");
                        chain.push(z);
                    }
                    chain.reverse();
                    out.push(chain);
                }
            }
        }
    }
    out
}

fn has_holes(lat: &HexLattice, cl: &[Cluster]) -> bool {
    cl.iter().any(|c| !c.holes(lat).is_empty())
}

/// Structural class of σ, in the order the constructions are tried.
pub fn classify(lat: &HexLattice, p: &Params, sigma: &Configuration) -> Result<StructureClass> {
    let r_star = critical_quantities(p)?.r_star as i32;
    let ctx = Ctx {
        lat,
        p,
        sigma,
        h0: 0,
        ceiling: 0,
    };
    let cl = clusters(lat, sigma);
    let open = ctx.reachable_from_boundary(sigma);
    if !free_particles(lat, sigma).is_empty() {
        return Ok(StructureClass::FreeParticle);
    }
    if !pi3_sites(lat, sigma).is_empty() {
        return Ok(StructureClass::AnglePi3);
    }
    if !pocket_sites(&ctx, sigma, &cl, &open).is_empty() {
        return Ok(StructureClass::Angle5Pi3);
    }
    if !two_step_sites(&ctx, sigma, &open).is_empty() {
        return Ok(StructureClass::Angle4Pi3);
    }
    if !interacting_sites(&ctx, sigma, &cl).is_empty() {
        return Ok(StructureClass::Interacting);
    }
    if has_holes(lat, &cl) {
        return Ok(StructureClass::Hole);
    }
    let hexes: Vec<(Vec<FaceCoord>, Hexagon)> = cl
        .iter()
        .filter_map(|c| {
            let f = c.faces(lat);
            convex_hexagon(&f).map(|h| (f, h))
        })
        .collect();
    if hexes.len() != cl.len() || cl.is_empty() {
        return Ok(StructureClass::Other);
    }
    let small = hexes.iter().all(|(_, h)| inner_radius(h) <= r_star);
    Ok(match hexes.len() {
        1 if is_quasi_regular(&hexes[0].0, &hexes[0].1) => {
            if small {
                StructureClass::Z1
            } else {
                StructureClass::Z2
            }
        }
        1 => {
            if small {
                StructureClass::R1
            } else {
                StructureClass::R2
            }
        }
        _ => {
            if small {
                StructureClass::Y1
            } else {
                StructureClass::Y2
            }
        }
    })
}

const CANDIDATES: usize = 12;

fn hexagon_attempts(ctx: &Ctx, cl: &[Cluster], class: StructureClass, r_star: i32) -> Vec<(String, Option<PathRecord>)> {
    let lat = ctx.lat;
    let mut out = Vec::new();
    let mut hexes: Vec<Hexagon> = cl.iter().filter_map(|c| convex_hexagon(&c.faces(lat))).collect();
    // Large droplets grow, so try them first in the supercritical classes.
    hexes.sort_by_key(inner_radius);
    if matches!(class, StructureClass::Z2 | StructureClass::R2 | StructureClass::Y2) {
        hexes.reverse();
    }
    for h in hexes {
        let mut order: Vec<usize> = (0..6).filter(|&k| h.sides[k] > 0).collect();
        order.sort_by_key(|&k| h.sides[k]);
        let shortest = order[0];
        let longest = *order.last().expect("a hexagon has sides");
        let s = h.sides[shortest];
        let grow_side = if is_quasi_regular(&HexBounds(h.bounds).faces(), &h) {
            longest
        } else {
            shortest
        };
        let dismantle_first = if inner_radius(&h) <= r_star { true } else { 2 * s - 1 < 2 * r_star + 1 };
        let d = || (format!("dismantle side {shortest}"), ctx.dismantle(&h, shortest));
        let a = || (format!("add bar on side {grow_side}"), ctx.add(&h, grow_side));
        if dismantle_first {
            out.push(d());
            out.push(a());
        } else {
            out.push(a());
            out.push(d());
        }
        if out.iter().any(|(_, p)| p.is_some()) {
            break;
        }
    }
    out
}

/// A path from σ to a strictly lower state whose maximum stays within
/// H(σ) + Δ + U. Falls back to a bounded search (capped at `cap` states)
/// when the constructive attempt fails.
pub fn reducing_path(lat: &HexLattice, p: &Params, sigma: &Configuration, cap: usize) -> Result<Reduction> {
    sigma.check_lattice(lat)?;
    if sigma.is_empty() {
        return Err(Error::Unclassified(Box::new(sigma.clone())));
    }
    let r_star = critical_quantities(p)?.r_star as i32;
    let h0 = hamiltonian(lat, sigma, p);
    let ctx = Ctx {
        lat,
        p,
        sigma,
        h0,
        ceiling: h0 + p.delta + p.u,
    };
    let class = classify(lat, p, sigma)?;
    let cl = clusters(lat, sigma);
    let open = ctx.reachable_from_boundary(sigma);
    let mut attempts: Vec<(String, Option<PathRecord>)> = Vec::new();
    let mut tried = HashSet::new();
    let mut run = |name: &str, attempts: &mut Vec<(String, Option<PathRecord>)>, f: &dyn Fn() -> Vec<(String, Option<PathRecord>)>| {
        if tried.insert(name.to_string()) {
            attempts.extend(f());
        }
        attempts.iter().any(|(_, p)| p.is_some())
    };
    let free = || {
        free_particles(lat, sigma)
            .into_iter()
            .take(CANDIDATES)
            .map(|x| (format!("remove free particle at {x}"), ctx.free_particle(x)))
            .collect()
    };
    let pi3 = || {
        pi3_sites(lat, sigma)
            .into_iter()
            .take(CANDIDATES)
            .map(|x| (format!("detach corner particle at {x}"), ctx.detach(x)))
            .collect()
    };
    let pocket = || {
        pocket_sites(&ctx, sigma, &cl, &open)
            .into_iter()
            .take(CANDIDATES)
            .map(|y| (format!("fill pocket at {y}"), ctx.fill(&[y])))
            .collect()
    };
    let two = || {
        two_step_sites(&ctx, sigma, &open)
            .into_iter()
            .take(CANDIDATES)
            .map(|(a, b)| (format!("fill {a} then {b}"), ctx.fill(&[a, b])))
            .collect()
    };
    let inter = || {
        interacting_sites(&ctx, sigma, &cl)
            .into_iter()
            .take(CANDIDATES)
            .map(|y| (format!("bridge clusters at {y}"), ctx.fill(&[y])))
            .collect()
    };
    let hole = || {
        hole_chains(&ctx, sigma, &cl, &open)
            .into_iter()
            .take(CANDIDATES)
            .map(|c| (format!("migrate vacancy from {} to {}", c[0], c[c.len() - 1]), ctx.migrate(&c)))
            .collect()
    };
    let hex = || hexagon_attempts(&ctx, &cl, class, r_star);
    type Attempt<'f> = (&'static str, &'f dyn Fn() -> Vec<(String, Option<PathRecord>)>);
    let all: [Attempt; 7] = [
        ("free", &free),
        ("pi3", &pi3),
        ("pocket", &pocket),
        ("two", &two),
        ("inter", &inter),
        ("hole", &hole),
        ("hex", &hex),
    ];
    let first = match class {
        StructureClass::FreeParticle => 0,
        StructureClass::AnglePi3 => 1,
        StructureClass::Angle5Pi3 => 2,
        StructureClass::Angle4Pi3 => 3,
        StructureClass::Interacting => 4,
        StructureClass::Hole => 5,
        _ => 6,
    };
    let mut done = run(all[first].0, &mut attempts, all[first].1);
    for (name, f) in all.iter() {
        if done {
            break;
        }
        done = run(name, &mut attempts, *f);
    }
    let finish = |strategy: String, path: PathRecord| {
        let max_excess = path.max_energy() - h0;
        let drop = h0 - path.energies.last().copied().expect("non-empty");
        Reduction {
            class,
            strategy,
            path,
            max_excess,
            drop,
        }
    };
    if let Some((name, Some(path))) = attempts.into_iter().find(|(_, p)| p.is_some()) {
        return Ok(finish(name, path));
    }
    let opts = SearchOptions::default().with_cap(cap).with_cutoff(ctx.ceiling + 1);
    let res = stability_level(lat, p, sigma, opts)?;
    match res.witness {
        Some(path) => Ok(finish("bounded search".into(), path)),
        None if !res.complete => Err(Error::CapExceeded { cap, explored: res.explored }),
        None => Err(Error::Unclassified(Box::new(sigma.clone()))),
    }
}
