use std::collections::VecDeque;
use std::process::ExitCode;

use anyhow::{anyhow, ensure, Result};
use kawahex::config::{clusters, free_particles};
use kawahex::dynamics::{apply_bond, transition_prob};
use kawahex::energy::{critical_quantities, gibbs, hamiltonian, validate_regime, Energy};
use kawahex::landscape::{communication_height, reducing_path, reference_path, segment_max, stability_level, Direction, SearchOptions};
use kawahex::shapes::{bar_size, canonical_shape, closed_form_energy, energie_table, place_faces, standard_faces};
use kawahex::{Configuration, HexLattice, Params};
use serde_json::json;

use crate::ModelArgs;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String>) -> Outcome {
    match f() {
        Ok(detail) => Outcome { name, pass: true, detail },
        Err(e) => Outcome {
            name,
            pass: false,
            detail: format!("{e:#}"),
        },
    }
}

fn energie(p: &Params) -> Result<String> {
    let mut rows = 0;
    for r in 1..=2u32 {
        let lat = HexLattice::new(r as i64 + 3)?;
        for (area, h) in energie_table(r, p) {
            let direct = hamiltonian(&lat, &place_faces(&standard_faces(area), &lat)?, p);
            ensure!(direct == h, "r={r} area={area}: table {} vs direct {}", p.value(h), p.value(direct));
            ensure!(closed_form_energy(area, p) == h, "r={r} area={area}: closed form disagrees with table");
            rows += 1;
        }
    }
    Ok(format!("{rows} rows agree"))
}

fn gamma(p: &Params) -> Result<String> {
    let cq = critical_quantities(p)?;
    let lat = HexLattice::new(cq.r_star + 4)?;
    let s = place_faces(&standard_faces(cq.a_star - 1), &lat)?;
    let h = hamiltonian(&lat, &s, p) + p.delta;
    ensure!(h == cq.gamma, "H(S(A*-1)) + Delta = {} but Gamma = {}", p.value(h), p.value(cq.gamma));
    Ok(format!("Gamma = {}", p.value(cq.gamma)))
}

fn refpath(p: &Params) -> Result<String> {
    let cq = critical_quantities(p)?;
    let lat = HexLattice::new((2 * cq.r_star + 4).max(6))?;
    let path = reference_path(&lat, p)?;
    path.validate(&lat, p)?;
    ensure!(path.end() == &Configuration::full(&lat), "path does not end at the full configuration");
    ensure!(
        path.max_energy() == cq.gamma,
        "max {} differs from Gamma {}",
        p.value(path.max_energy()),
        p.value(cq.gamma)
    );
    let critical = canonical_shape(&standard_faces(cq.a_star - 1));
    let argmax = path.argmax();
    for &i in &argmax {
        let c = &path.configurations[i];
        let cl = clusters(&lat, c);
        ensure!(free_particles(&lat, c).len() == 1, "argmax {i} does not carry exactly one free particle");
        ensure!(
            cl.len() == 1 && canonical_shape(&cl[0].faces(&lat)) == critical,
            "argmax {i} cluster is not S(A*-1)"
        );
    }
    Ok(format!("max {} at {} states", p.value(path.max_energy()), argmax.len()))
}

fn segments(p: &Params) -> Result<String> {
    let cq = critical_quantities(p)?;
    let mut n = 0;
    for r in 1..=(cq.r_star as u32 + 2) {
        for i in 0..=5 {
            if bar_size(r, i + 1) < 3 {
                continue;
            }
            let s = segment_max(r, i, p, Direction::Growth)?;
            ensure!(s.index == 2, "r={r}, bar {}: maximum after {} insertions", i + 1, s.index);
            n += 1;
        }
    }
    Ok(format!("{n} segments peak at n=2"))
}

fn reducing(p: &Params) -> Result<String> {
    let lat = HexLattice::new(6)?;
    let bound = p.delta + p.u;
    let mut n = 0;
    for area in 1..=60 {
        let sigma = place_faces(&standard_faces(area), &lat)?;
        let r = reducing_path(&lat, p, &sigma, 1_000_000)?;
        r.path.validate(&lat, p)?;
        ensure!(r.max_excess <= bound, "S({area}): excess {} above Delta+U", p.value(r.max_excess));
        ensure!(r.drop > 0, "S({area}): path does not end below H(sigma)");
        n += 1;
    }
    Ok(format!("{n} standard droplets reduced within Delta+U"))
}

/// The move graph of a lattice small enough to list every state, built
/// straight from the oriented-bond list.
struct SmallSpace {
    energy: Vec<Energy>,
    adj: Vec<Vec<u32>>,
}

impl SmallSpace {
    fn new(lat: &HexLattice, p: &Params) -> Result<SmallSpace> {
        let n = lat.num_sites();
        ensure!(n <= 16, "lattice too large for enumeration");
        let states = 1usize << n;
        let mut energy = Vec::with_capacity(states);
        let mut adj = Vec::with_capacity(states);
        for w in 0..states as u64 {
            let c = Configuration::from_words(n, &[w]);
            energy.push(hamiltonian(lat, &c, p));
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
        Ok(SmallSpace { energy, adj })
    }

    fn reach(&self, from: u32, level: Energy) -> Vec<bool> {
        let mut seen = vec![false; self.energy.len()];
        if self.energy[from as usize] > level {
            return seen;
        }
        seen[from as usize] = true;
        let mut q = VecDeque::from([from]);
        while let Some(x) = q.pop_front() {
            for &y in &self.adj[x as usize] {
                if !seen[y as usize] && self.energy[y as usize] <= level {
                    seen[y as usize] = true;
                    q.push_back(y);
                }
            }
        }
        seen
    }

    fn levels(&self) -> Vec<Energy> {
        let mut l = self.energy.clone();
        l.sort_unstable();
        l.dedup();
        l
    }

    fn phi(&self, a: u32, b: u32) -> Energy {
        self.levels()
            .into_iter()
            .find(|&t| self.reach(a, t)[b as usize])
            .expect("the state space is connected")
    }

    fn stability(&self, s: u32) -> Option<Energy> {
        let h = self.energy[s as usize];
        self.levels()
            .into_iter()
            .filter(|&t| t >= h)
            .find(|&t| self.reach(s, t).iter().zip(&self.energy).any(|(&r, &e)| r && e < h))
            .map(|t| t - h)
    }
}

fn oracles(p: &Params) -> Result<String> {
    let lat = HexLattice::new(1)?;
    let n = lat.num_sites();
    let space = SmallSpace::new(&lat, p)?;
    let states = space.energy.len() as u64;
    let mut x = 0x9E37_79B9_7F4A_7C15u64;
    let mut next = || {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((x >> 33) % states) as u32
    };
    for _ in 0..10 {
        let (a, b) = (next(), next());
        let ca = Configuration::from_words(n, &[a as u64]);
        let cb = Configuration::from_words(n, &[b as u64]);
        let got = communication_height(&lat, p, &ca, &cb, SearchOptions::default())?;
        ensure!(got.value == Some(space.phi(a, b)), "Phi({a:#x}, {b:#x}) disagrees with enumeration");
        let s = stability_level(&lat, p, &ca, SearchOptions::default())?;
        ensure!(s.level == space.stability(a), "V({a:#x}) disagrees with enumeration");
    }
    Ok("10 Phi and 10 V queries match enumeration on L=1".into())
}

fn detailed_balance(p: &Params) -> Result<String> {
    let lat = HexLattice::new(1)?;
    let n = lat.num_sites();
    let z: f64 = (0..1u64 << n).map(|w| gibbs(&lat, &Configuration::from_words(n, &[w]), p)).sum();
    let mut worst = 0.0f64;
    for w in 0..1u64 << n {
        let a = Configuration::from_words(n, &[w]);
        let ma = gibbs(&lat, &a, p) / z;
        for bond in lat.oriented_bonds() {
            let b = apply_bond(&a, bond);
            let mb = gibbs(&lat, &b, p) / z;
            let d = (ma * transition_prob(&lat, &a, &b, p) - mb * transition_prob(&lat, &b, &a, p)).abs();
            worst = worst.max(d);
        }
    }
    ensure!(worst < 1e-12, "largest flux imbalance {worst:e}");
    Ok(format!("largest flux imbalance {worst:e}"))
}

type Check = (&'static str, fn(&Params) -> Result<String>);

pub fn run(model: &ModelArgs) -> Result<ExitCode> {
    let p = model.params()?;
    let checks: Vec<Check> = vec![
        ("regime", |p| {
            let r = validate_regime(p)?;
            let cq = critical_quantities(p)?;
            Ok(format!(
                "r* = {}, delta = {}/{}, {} warnings",
                cq.r_star,
                cq.delta_num,
                cq.delta_den,
                r.warnings.len()
            ))
        }),
        ("energie_table", energie),
        ("gamma_consistency", gamma),
        ("refpath_argmax", refpath),
        ("segment_n2", segments),
        ("reducing_paths", reducing),
        ("l1_oracles", oracles),
        ("detailed_balance", detailed_balance),
    ];
    let results: Vec<Outcome> = checks.into_iter().map(|(name, f)| check(name, || f(&p))).collect();
    for r in &results {
        eprintln!("{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let passed = results.iter().all(|r| r.pass);
    let report = json!({
        "U": p.u_value(),
        "Delta": p.delta_value(),
        "passed": passed,
        "checks": results.iter().map(|r| json!({ "name": r.name, "pass": r.pass, "detail": r.detail })).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&report).map_err(|e| anyhow!(e))?);
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
