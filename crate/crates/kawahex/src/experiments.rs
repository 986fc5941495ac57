//! Replica experiments and their summaries: nucleation times, droplet
//! fates and recurrence.
//!
//! A plan is a plain-text `key = value` file. Replicas run in parallel but
//! every replica owns its seed, and results are collected in replica order,
//! so replaying a plan reproduces its CSV byte for byte.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::config::{clusters, Cluster, Configuration};
use crate::dynamics::{random_configuration, replica_seed, Both, GateMonitor, Kernel, NoMonitor, Reached, Simulation, Target};
use crate::energy::{critical_quantities, hamiltonian, validate_regime, Energy, Params};
use crate::error::{Error, Result};
use crate::hexlattice::HexLattice;
use crate::landscape::GateSet;
use crate::shapes::{build_shape, ShapeSpec};

/// Environment variable holding the default seed base.
pub const SEED_ENV: &str = "KAWAHEX_SEED";

/// Seed base used when neither a plan nor the environment gives one.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Where the seed base of a run came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Explicit,
    Environment,
    Default,
}

/// The seed base from `KAWAHEX_SEED`, or the built-in default.
pub fn env_seed() -> Result<(u64, SeedSource)> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(|v| (v, SeedSource::Environment))
            .map_err(|_| Error::Parse { what: "seed", input: s }),
        Err(_) => Ok((DEFAULT_SEED, SeedSource::Default)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Simulate,
    Nucleation,
    Fate,
    Recurrence,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Command> {
        Ok(match s {
            "simulate" => Command::Simulate,
            "nucleation" => Command::Nucleation,
            "fate" => Command::Fate,
            "recurrence" => Command::Recurrence,
            _ => {
                return Err(Error::Parse {
                    what: "command",
                    input: s.into(),
                })
            }
        })
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Nucleation => "nucleation",
            Command::Fate => "fate",
            Command::Recurrence => "recurrence",
        }
    }
}

/// Initial condition of a replica.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StartSpec {
    Empty,
    Full,
    /// Every site of Λ occupied independently with this probability.
    Random(f64),
    Shape(ShapeSpec),
}

impl FromStr for StartSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<StartSpec> {
        let s = s.trim();
        Ok(match s {
            "empty" => StartSpec::Empty,
            "full" => StartSpec::Full,
            "random" => StartSpec::Random(0.5),
            _ => match s.strip_prefix("random:") {
                Some(d) => {
                    let d: f64 = d.parse().map_err(|_| Error::Parse {
                        what: "density",
                        input: d.into(),
                    })?;
                    if !(0.0..=1.0).contains(&d) {
                        return Err(Error::Parse {
                            what: "density",
                            input: s.into(),
                        });
                    }
                    StartSpec::Random(d)
                }
                None => StartSpec::Shape(s.parse()?),
            },
        })
    }
}

impl std::fmt::Display for StartSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StartSpec::Empty => write!(f, "empty"),
            StartSpec::Full => write!(f, "full"),
            StartSpec::Random(d) => write!(f, "random:{d}"),
            StartSpec::Shape(s) => write!(f, "{s}"),
        }
    }
}

impl StartSpec {
    /// The start configuration of one replica.
    pub fn build(&self, lat: &HexLattice, seed: u64) -> Result<Configuration> {
        Ok(match self {
            StartSpec::Empty => Configuration::empty(lat),
            StartSpec::Full => Configuration::full(lat),
            StartSpec::Random(d) => random_configuration(lat, *d, seed ^ 0x5EED_57A7),
            StartSpec::Shape(s) => build_shape(s, lat)?,
        })
    }
}

fn parse_target(s: &str) -> Result<Target> {
    Ok(match s.trim() {
        "empty" => Target::Empty,
        "full" => Target::Full,
        "both" => Target::Both,
        _ => {
            return Err(Error::Parse {
                what: "target",
                input: s.into(),
            })
        }
    })
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::Empty => "empty",
        Target::Full => "full",
        Target::Both => "both",
    }
}

/// Everything needed to rerun an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub command: Command,
    pub u: f64,
    pub delta: f64,
    /// Energy grid; `None` means U/100.
    pub grid: Option<f64>,
    #[serde(rename = "L")]
    pub l: i64,
    pub betas: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub max_steps: u64,
    pub start: StartSpec,
    pub target: Target,
    /// Slack ε of the recurrence horizon e^{β(V*+ε)}.
    pub epsilon: f64,
    /// Track gate crossings (needs the gate set of the lattice).
    pub gate: bool,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    /// State cap for the gate-set closure.
    pub cap: usize,
}

impl ExperimentPlan {
    /// Defaults for a command at P1 on L = 6.
    pub fn new(command: Command, seed: u64) -> ExperimentPlan {
        let (start, target) = match command {
            Command::Nucleation => (StartSpec::Empty, Target::Full),
            Command::Recurrence => (StartSpec::Random(0.5), Target::Both),
            _ => (StartSpec::Empty, Target::Both),
        };
        ExperimentPlan {
            command,
            u: 1.0,
            delta: 1.36,
            grid: None,
            l: 6,
            betas: vec![3.5],
            reps: 30,
            seed,
            max_steps: 2_000_000_000,
            start,
            target,
            epsilon: 0.3,
            gate: false,
            out: None,
            summary: None,
            cap: 10_000_000,
        }
    }

    pub fn params(&self, beta: f64) -> Result<Params> {
        match self.grid {
            Some(g) => Params::with_grid(self.u, self.delta, beta, g),
            None => Params::new(self.u, self.delta, beta),
        }
    }

    /// Parses a plan file. Unknown keys are errors; missing keys keep the
    /// defaults of [`ExperimentPlan::new`].
    pub fn parse(text: &str) -> Result<ExperimentPlan> {
        let mut pairs = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                what: "plan line",
                input: line.into(),
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let command = pairs
            .iter()
            .find(|(k, _)| k == "command")
            .ok_or_else(|| Error::Parse {
                what: "plan",
                input: "missing command".into(),
            })?
            .1
            .parse()?;
        let mut plan = ExperimentPlan::new(command, DEFAULT_SEED);
        for (k, v) in pairs {
            plan.set(&k, &v)?;
        }
        Ok(plan)
    }

    /// Sets one plan key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(what: &'static str, v: &str) -> Result<T> {
            v.trim().parse().map_err(|_| Error::Parse { what, input: v.into() })
        }
        let path = |v: &str| if v.is_empty() || v == "-" { None } else { Some(PathBuf::from(v)) };
        match key {
            "command" => self.command = value.parse()?,
            "u" => self.u = num("u", value)?,
            "delta" => self.delta = num("delta", value)?,
            "grid" => self.grid = if value == "auto" { None } else { Some(num("grid", value)?) },
            "L" => self.l = num("L", value)?,
            "betas" | "beta" => {
                self.betas = value.split(',').map(|b| num("beta", b)).collect::<Result<_>>()?;
            }
            "reps" => self.reps = num("reps", value)?,
            "seed" => self.seed = num("seed", value)?,
            "max_steps" => self.max_steps = num::<f64>("max_steps", value)? as u64,
            "start" => self.start = value.parse()?,
            "target" => self.target = parse_target(value)?,
            "epsilon" => self.epsilon = num("epsilon", value)?,
            "gate" => self.gate = num("gate", value)?,
            "out" => self.out = path(value),
            "summary" => self.summary = path(value),
            "cap" => self.cap = num("cap", value)?,
            _ => {
                return Err(Error::Parse {
                    what: "plan key",
                    input: key.into(),
                })
            }
        }
        Ok(())
    }

    /// The plan as a file that [`ExperimentPlan::parse`] reads back unchanged.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command.name());
        let _ = writeln!(s, "u = {}", self.u);
        let _ = writeln!(s, "delta = {}", self.delta);
        let _ = writeln!(s, "grid = {}", self.grid.map_or("auto".to_string(), |g| g.to_string()));
        let _ = writeln!(s, "L = {}", self.l);
        let betas: Vec<String> = self.betas.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(s, "betas = {}", betas.join(","));
        let _ = writeln!(s, "reps = {}", self.reps);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "max_steps = {}", self.max_steps);
        let _ = writeln!(s, "start = {}", self.start);
        let _ = writeln!(s, "target = {}", target_name(self.target));
        let _ = writeln!(s, "epsilon = {}", self.epsilon);
        let _ = writeln!(s, "gate = {}", self.gate);
        let show = |p: &Option<PathBuf>| p.as_ref().map_or("-".to_string(), |p| p.display().to_string());
        let _ = writeln!(s, "out = {}", show(&self.out));
        let _ = writeln!(s, "summary = {}", show(&self.summary));
        let _ = writeln!(s, "cap = {}", self.cap);
        s
    }
}

/// Outcome of one replica; one CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    pub seed: u64,
    pub beta: f64,
    pub tau: u64,
    pub reached: String,
    pub gate_hit: Option<bool>,
    /// H of the crossing cluster plus the attaching free particle.
    pub crossing_energy: Option<f64>,
}

impl ReplicaRecord {
    pub fn completed(&self) -> bool {
        self.reached != "timeout"
    }
}

fn reached_name(r: Reached) -> &'static str {
    match r {
        Reached::Empty => "empty",
        Reached::Full => "full",
        Reached::Timeout => "timeout",
    }
}

fn cluster_energy(c: &Cluster, p: &Params) -> Energy {
    p.energy_of(c.area() as i64, c.bonds as i64)
}

/// Runs `reps` replicas at one β. Replica `i` uses seed
/// `replica_seed(base, i)`; the record stores that seed, so a single
/// replica can be replayed with `reps = 1` and the stored seed via
/// [`run_replica`].
#[allow(clippy::too_many_arguments)]
pub fn run_replicas(
    lat: &HexLattice,
    p: &Params,
    start: &StartSpec,
    target: Target,
    reps: usize,
    base: u64,
    max_steps: u64,
    gate: Option<&GateSet>,
) -> Result<Vec<ReplicaRecord>> {
    let kernel = Kernel::new(lat, p);
    (0..reps as u64)
        .into_par_iter()
        .map(|i| run_replica(&kernel, p, start, target, replica_seed(base, i), max_steps, gate))
        .collect()
}

/// One replica with an explicit RNG seed.
pub fn run_replica(
    kernel: &Kernel<'_>,
    p: &Params,
    start: &StartSpec,
    target: Target,
    seed: u64,
    max_steps: u64,
    gate: Option<&GateSet>,
) -> Result<ReplicaRecord> {
    let lat = kernel.lattice();
    let init = start.build(lat, seed)?;
    let mut sim = Simulation::new(kernel, &init, p, seed);
    let mut rec = ReplicaRecord {
        seed,
        beta: p.beta,
        tau: 0,
        reached: String::new(),
        gate_hit: None,
        crossing_energy: None,
    };
    match gate {
        None => {
            let r = sim.run_until(target, max_steps, &mut NoMonitor);
            rec.tau = r.steps;
            rec.reached = reached_name(r.reached).into();
        }
        Some(g) => {
            let mut mon = GateMonitor::new(lat, &init, g.particles + 1);
            let mut none = NoMonitor;
            let r = sim.run_until(target, max_steps, &mut Both(&mut mon, &mut none));
            rec.tau = r.steps;
            rec.reached = reached_name(r.reached).into();
            if r.reached == Reached::Full {
                if let Some(c) = &mon.last_crossing {
                    let largest = clusters(lat, &c.before).into_iter().max_by_key(Cluster::area);
                    let (hit, energy) = match largest {
                        Some(cl) => (
                            c.mover_free && g.shape_in_k(&cl.faces(lat)),
                            Some(p.value(cluster_energy(&cl, p) + p.delta)),
                        ),
                        None => (false, None),
                    };
                    rec.gate_hit = Some(hit);
                    rec.crossing_energy = energy;
                } else {
                    rec.gate_hit = Some(false);
                }
            }
        }
    }
    Ok(rec)
}

/// Writes replica records as CSV with columns seed, beta, tau, reached,
/// gate_hit, crossing_energy.
pub fn write_csv<W: std::io::Write>(w: W, records: &[ReplicaRecord]) -> Result<()> {
    let io = |e: csv::Error| Error::Parse {
        what: "csv output",
        input: e.to_string(),
    };
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        wr.serialize(r).map_err(io)?;
    }
    wr.flush().map_err(|e| Error::Parse {
        what: "csv output",
        input: e.to_string(),
    })?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<ReplicaRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    rd.deserialize()
        .map(|r| {
            r.map_err(|e: csv::Error| Error::Parse {
                what: "csv input",
                input: e.to_string(),
            })
        })
        .collect()
}

/// Two-sided 95% Wilson score interval for k successes out of n.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.975);
    let (k, n) = (k as f64, n as f64);
    let ph = k / n;
    let denom = 1.0 + z * z / n;
    let centre = (ph + z * z / (2.0 * n)) / denom;
    let half = z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Empirical T_β = inf{n : P̂(τ ≤ n) ≥ 1 − e⁻¹}, with timeouts counted as
/// never reaching the target. `None` when the quantile falls on a timeout.
pub fn empirical_t_beta(records: &[ReplicaRecord]) -> Option<u64> {
    let mut taus: Vec<u64> = records.iter().filter(|r| r.completed()).map(|r| r.tau).collect();
    taus.sort_unstable();
    let level = 1.0 - (-1.0f64).exp();
    let need = (level * records.len() as f64).ceil() as usize;
    if need == 0 {
        return taus.first().copied();
    }
    taus.get(need - 1).copied()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSummary {
    pub beta: f64,
    pub reps: usize,
    pub completed: usize,
    pub timeout_fraction: f64,
    /// Mean of the completed hitting times.
    pub mean_tau: Option<f64>,
    pub median_tau: Option<f64>,
    pub t_beta: Option<u64>,
    /// mean τ / T_β.
    pub ratio: Option<f64>,
    /// More than half the replicas timed out; excluded from the fit.
    pub flagged: bool,
    pub gate_hits: Option<usize>,
    pub gate_fraction: Option<f64>,
}

pub fn summarize_beta(beta: f64, records: &[ReplicaRecord]) -> BetaSummary {
    let mut taus: Vec<f64> = records.iter().filter(|r| r.completed()).map(|r| r.tau as f64).collect();
    taus.sort_by(f64::total_cmp);
    let n = records.len();
    let completed = taus.len();
    let mean_tau = (completed > 0).then(|| taus.iter().sum::<f64>() / completed as f64);
    let median_tau = (completed > 0).then(|| {
        if completed % 2 == 1 {
            taus[completed / 2]
        } else {
            0.5 * (taus[completed / 2 - 1] + taus[completed / 2])
        }
    });
    let t_beta = empirical_t_beta(records);
    let ratio = match (mean_tau, t_beta) {
        (Some(m), Some(t)) if t > 0 => Some(m / t as f64),
        _ => None,
    };
    let timeout_fraction = if n == 0 { 0.0 } else { (n - completed) as f64 / n as f64 };
    let gated: Vec<bool> = records.iter().filter_map(|r| r.gate_hit).collect();
    let gate_hits = (!gated.is_empty()).then(|| gated.iter().filter(|&&h| h).count());
    let gate_fraction = gate_hits.map(|h| h as f64 / gated.len() as f64);
    BetaSummary {
        beta,
        reps: n,
        completed,
        timeout_fraction,
        mean_tau,
        median_tau,
        t_beta,
        ratio,
        flagged: timeout_fraction > 0.5,
        gate_hits,
        gate_fraction,
    }
}

/// Least-squares line through (β, log mean τ) with a 95% t interval on the slope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    pub stderr: Option<f64>,
    pub ci: Option<(f64, f64)>,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Option<SlopeFit> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (stderr, ci) = if n > 2 {
        let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        let se = (rss / (nf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 2.0).expect("positive dof").inverse_cdf(0.975);
        (Some(se), Some((slope - t * se, slope + t * se)))
    } else {
        (None, None)
    };
    Some(SlopeFit {
        slope,
        intercept,
        points: n,
        stderr,
        ci,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NucleationSummary {
    pub plan: ExperimentPlan,
    pub seed_source: SeedSource,
    /// Γ in physical units.
    pub gamma: f64,
    pub per_beta: Vec<BetaSummary>,
    pub fit: Option<SlopeFit>,
}

/// Builds the gate oracle when the plan asks for it.
fn plan_gate(plan: &ExperimentPlan, lat: &HexLattice, p: &Params) -> Result<Option<GateSet>> {
    if plan.gate {
        Ok(Some(crate::landscape::gate_set(lat, p, false, plan.cap)?))
    } else {
        Ok(None)
    }
}

/// Runs every β of the plan and returns the raw records in schedule order.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<ReplicaRecord>> {
    let lat = HexLattice::new(plan.l)?;
    let p0 = plan.params(plan.betas.first().copied().unwrap_or(1.0))?;
    validate_regime(&p0)?;
    let gate = plan_gate(plan, &lat, &p0)?;
    let mut out = Vec::new();
    for (bi, &beta) in plan.betas.iter().enumerate() {
        let p = plan.params(beta)?;
        let max_steps = match plan.command {
            Command::Recurrence => recurrence_horizon(&p, plan.epsilon),
            _ => plan.max_steps,
        };
        let base = replica_seed(plan.seed, bi as u64);
        out.extend(run_replicas(
            &lat,
            &p,
            &plan.start,
            plan.target,
            plan.reps,
            base,
            max_steps,
            gate.as_ref(),
        )?);
    }
    Ok(out)
}

/// Summarises nucleation records per β and fits log mean τ against β.
pub fn summarize_nucleation(plan: &ExperimentPlan, seed_source: SeedSource, records: &[ReplicaRecord]) -> Result<NucleationSummary> {
    let p = plan.params(plan.betas.first().copied().unwrap_or(1.0))?;
    let cq = critical_quantities(&p)?;
    let per_beta: Vec<BetaSummary> = plan
        .betas
        .iter()
        .map(|&b| {
            let rs: Vec<ReplicaRecord> = records.iter().filter(|r| r.beta == b).cloned().collect();
            summarize_beta(b, &rs)
        })
        .collect();
    let points: Vec<(f64, f64)> = per_beta
        .iter()
        .filter(|s| !s.flagged && s.beta > 0.0)
        .filter_map(|s| s.mean_tau.filter(|&m| m > 0.0).map(|m| (s.beta, m.ln())))
        .collect();
    Ok(NucleationSummary {
        plan: plan.clone(),
        seed_source,
        gamma: p.value(cq.gamma),
        per_beta,
        fit: fit_slope(&points),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FateSummary {
    pub plan: ExperimentPlan,
    pub seed_source: SeedSource,
    pub start_energy: f64,
    pub beta: f64,
    pub reps: usize,
    pub shrink: usize,
    pub grow: usize,
    pub timeouts: usize,
    pub p_shrink: f64,
    pub p_grow: f64,
    pub ci_shrink: (f64, f64),
    pub ci_grow: (f64, f64),
}

pub fn summarize_fate(plan: &ExperimentPlan, seed_source: SeedSource, beta: f64, records: &[ReplicaRecord]) -> Result<FateSummary> {
    let lat = HexLattice::new(plan.l)?;
    let p = plan.params(beta)?;
    let start_energy = p.value(hamiltonian(&lat, &plan.start.build(&lat, plan.seed)?, &p));
    let rs: Vec<&ReplicaRecord> = records.iter().filter(|r| r.beta == beta).collect();
    let n = rs.len();
    let shrink = rs.iter().filter(|r| r.reached == "empty").count();
    let grow = rs.iter().filter(|r| r.reached == "full").count();
    let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    Ok(FateSummary {
        plan: plan.clone(),
        seed_source,
        start_energy,
        beta,
        reps: n,
        shrink,
        grow,
        timeouts: n - shrink - grow,
        p_shrink: frac(shrink),
        p_grow: frac(grow),
        ci_shrink: wilson_interval(shrink, n),
        ci_grow: wilson_interval(grow, n),
    })
}

/// e^{β(V* + ε)} with V* = Δ + U, rounded up.
pub fn recurrence_horizon(p: &Params, epsilon: f64) -> u64 {
    let v = p.value(p.delta + p.u) + epsilon;
    (p.beta * v).exp().ceil() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceRow {
    pub beta: f64,
    pub horizon: u64,
    pub reps: usize,
    pub hits: usize,
    pub fraction: f64,
    pub ci: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSummary {
    pub plan: ExperimentPlan,
    pub seed_source: SeedSource,
    pub rows: Vec<RecurrenceRow>,
}

pub fn summarize_recurrence(plan: &ExperimentPlan, seed_source: SeedSource, records: &[ReplicaRecord]) -> Result<RecurrenceSummary> {
    let mut rows = Vec::new();
    for &beta in &plan.betas {
        let p = plan.params(beta)?;
        let rs: Vec<&ReplicaRecord> = records.iter().filter(|r| r.beta == beta).collect();
        let hits = rs.iter().filter(|r| r.completed()).count();
        let n = rs.len();
        rows.push(RecurrenceRow {
            beta,
            horizon: recurrence_horizon(&p, plan.epsilon),
            reps: n,
            hits,
            fraction: if n == 0 { 0.0 } else { hits as f64 / n as f64 },
            ci: wilson_interval(hits, n),
        });
    }
    Ok(RecurrenceSummary {
        plan: plan.clone(),
        seed_source,
        rows,
    })
}
