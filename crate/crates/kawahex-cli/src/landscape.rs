use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use kawahex::config::{clusters, free_particles};
use kawahex::energy::{critical_quantities, hamiltonian, validate_regime};
use kawahex::experiments::StartSpec;
use kawahex::landscape::{
    communication_height, cycle, gate_set, reducing_path, reference_path, segment_max, stability_level, Direction, PathRecord, SearchOptions,
    DEFAULT_CAP,
};
use kawahex::shapes::{bar_size, canonical_shape, standard_faces};
use kawahex::{Configuration, HexLattice, Params};
use serde_json::{json, Value};

use crate::{emit_json, ModelArgs};

#[derive(Args, Clone, Debug)]
pub struct SearchArgs {
    /// States at or above this energy are never entered.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Maximum number of stored states.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Identify configurations related by a lattice symmetry.
    #[arg(long)]
    symmetry: bool,
    /// Write the full witness path (every configuration) as JSON here.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Query {
    /// Communication height Φ(from, to).
    Phi {
        /// empty | full | shape spec | hex:<bitmap>
        #[arg(long, default_value = "empty")]
        from: String,
        #[arg(long, default_value = "full")]
        to: String,
        /// Also report whether the witness passes through the gate set C.
        #[arg(long)]
        gate_check: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Stability level V_σ.
    Stability {
        #[arg(long)]
        sigma: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// The cycle of states below a threshold connected to σ.
    Cycle {
        #[arg(long)]
        sigma: String,
        /// Energy threshold; members have H strictly below it.
        #[arg(long)]
        threshold: f64,
        /// List the members as hex bitmaps.
        #[arg(long)]
        members: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// The protocritical set K and gate C = K plus a free particle.
    Gate {
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        symmetry: bool,
    },
    /// A constructive path from σ to a lower state.
    Reduce {
        #[arg(long)]
        sigma: String,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Same as the top-level `refpath` command.
    Refpath(RefpathArgs),
}

#[derive(Args, Clone, Debug)]
pub struct RefpathArgs {
    /// Include the list of moves.
    #[arg(long)]
    moves: bool,
    /// Largest radius for the bar-segment table.
    #[arg(long, default_value_t = 3)]
    max_r: u32,
}

/// A configuration from `hex:<bitmap>` or any start spec.
fn parse_config(lat: &HexLattice, text: &str, seed: u64) -> Result<Configuration> {
    match text.strip_prefix("hex:") {
        Some(h) => Ok(Configuration::from_hex(lat, h)?),
        None => {
            let spec: StartSpec = text.parse().with_context(|| format!("parsing configuration {text:?}"))?;
            Ok(spec.build(lat, seed)?)
        }
    }
}

fn options(p: &Params, s: &SearchArgs) -> Result<SearchOptions> {
    let mut o = SearchOptions::default().with_cap(s.cap).with_symmetry(s.symmetry);
    if let Some(c) = s.cutoff {
        o = o.with_cutoff(p.units(c)?);
    }
    Ok(o)
}

fn path_json(p: &Params, path: &PathRecord, moves: bool) -> Value {
    let mut v = json!({
        "length": path.len(),
        "start": path.start().to_hex(),
        "end": path.end().to_hex(),
        "max_energy": p.value(path.max_energy()),
        "argmax": path.argmax(),
    });
    if moves {
        v["moves"] = json!(path.moves);
        v["energies"] = json!(path.energies.iter().map(|&e| p.value(e)).collect::<Vec<_>>());
    }
    v
}

fn save_witness(lat: &HexLattice, target: &Option<PathBuf>, path: Option<&PathRecord>) -> Result<()> {
    if let (Some(file), Some(w)) = (target, path) {
        let dump: Vec<_> = w.configurations.iter().map(|c| c.to_json(lat)).collect();
        let text = serde_json::to_string(&json!({ "moves": w.moves, "energies": w.energies, "configurations": dump }))?;
        fs::write(file, text).with_context(|| format!("writing {}", file.display()))?;
    }
    Ok(())
}

pub fn run(model: &ModelArgs, query: &Query) -> Result<()> {
    let p = model.params()?;
    let lat = HexLattice::new(model.radius())?;
    let (seed, _) = model.seed()?;
    let out = match query {
        Query::Phi {
            from,
            to,
            gate_check,
            search,
        } => {
            let a = parse_config(&lat, from, seed)?;
            let b = parse_config(&lat, to, seed)?;
            let r = communication_height(&lat, &p, &a, &b, options(&p, search)?)?;
            save_witness(&lat, &search.witness, r.witness.as_ref())?;
            let mut v = json!({
                "value": r.value.map(|e| p.value(e)),
                "lower_bound": p.value(r.lower_bound),
                "witness_path": r.witness.as_ref().map(|w| path_json(&p, w, true)),
                "explored": r.explored,
                "complete": r.complete,
                "cap_reached": r.cap_reached,
            });
            if *gate_check {
                let gate = gate_set(&lat, &p, search.symmetry, search.cap)?;
                let hit = r.witness.as_ref().map(|w| w.configurations.iter().any(|c| gate.in_c(&lat, c)));
                v["witness_in_gate"] = json!(hit);
            }
            v
        }
        Query::Stability { sigma, search } => {
            let s = parse_config(&lat, sigma, seed)?;
            let r = stability_level(&lat, &p, &s, options(&p, search)?)?;
            save_witness(&lat, &search.witness, r.witness.as_ref())?;
            json!({
                "value": r.level.map(|e| p.value(e)),
                "lower_bound": p.value(r.lower_bound),
                "witness_path": r.witness.as_ref().map(|w| path_json(&p, w, true)),
                "explored": r.explored,
                "complete": r.complete,
            })
        }
        Query::Cycle {
            sigma,
            threshold,
            members,
            search,
        } => {
            let s = parse_config(&lat, sigma, seed)?;
            let r = cycle(&lat, &p, &s, p.units(*threshold)?, options(&p, search)?)?;
            let mut v = json!({
                "value": r.len(),
                "min_energy": p.value(r.min_energy()),
                "threshold": p.value(r.cutoff),
                "explored": r.len(),
                "complete": r.complete,
            });
            if *members {
                v["members"] = json!(r
                    .members()
                    .map(|(c, e)| json!({ "hex": c.to_hex(), "energy": p.value(e) }))
                    .collect::<Vec<_>>());
            }
            v
        }
        Query::Gate { cap, symmetry } => {
            let g = gate_set(&lat, &p, *symmetry, *cap)?;
            json!({
                "value": g.len(),
                "particles": g.particles,
                "seed_energy": p.value(g.seed_energy),
                "gate_energy": p.value(g.seed_energy + p.delta),
                "shape_classes": g.shape_classes.len(),
                "explored": g.explored,
                "complete": true,
                "warnings": g.warnings,
            })
        }
        Query::Reduce { sigma, cap } => {
            let s = parse_config(&lat, sigma, seed)?;
            let r = reducing_path(&lat, &p, &s, *cap)?;
            json!({
                "value": p.value(r.max_excess),
                "class": r.class,
                "strategy": r.strategy,
                "drop": p.value(r.drop),
                "witness_path": path_json(&p, &r.path, true),
                "complete": true,
            })
        }
        Query::Refpath(args) => return refpath(model, args),
    };
    emit_json(None, &out)
}

pub fn refpath(model: &ModelArgs, args: &RefpathArgs) -> Result<()> {
    let p = model.params()?;
    validate_regime(&p)?;
    let cq = critical_quantities(&p)?;
    let lat = HexLattice::new(model.radius())?;
    let path = reference_path(&lat, &p)?;
    let critical = canonical_shape(&standard_faces(cq.a_star - 1));
    let saddles: Vec<Value> = path
        .argmax()
        .into_iter()
        .map(|i| {
            let c = &path.configurations[i];
            let free = free_particles(&lat, c).len();
            let cl = clusters(&lat, c);
            let areas: Vec<usize> = cl.iter().map(|k| k.area()).collect();
            let standard = cl.len() == 1 && canonical_shape(&cl[0].faces(&lat)) == critical;
            json!({ "index": i, "free_particles": free, "cluster_areas": areas, "standard_critical": standard })
        })
        .collect();
    let mut segments = Vec::new();
    for r in 1..=args.max_r {
        for i in 0..=5 {
            let g = segment_max(r, i, &p, Direction::Growth)?;
            let d = segment_max(r, i + 1, &p, Direction::Removal)?;
            segments.push(json!({
                "r": r,
                "bar": i + 1,
                "bar_size": bar_size(r, i + 1),
                "growth": { "index": g.index, "energy": p.value(g.energy) },
                "removal": { "index": d.index, "energy": p.value(d.energy) },
            }));
        }
    }
    let mut v = json!({
        "gamma": p.value(cq.gamma),
        "a_star": cq.a_star,
        "end_energy": p.value(hamiltonian(&lat, path.end(), &p)),
        "witness_path": path_json(&p, &path, args.moves),
        "saddles": saddles,
        "segments": segments,
        "complete": true,
    });
    v["value"] = v["witness_path"]["max_energy"].clone();
    emit_json(None, &v)
}
