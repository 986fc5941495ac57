use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kawahex::energy::{critical_quantities, validate_regime, Branch};
use kawahex::experiments::{
    env_seed, read_csv, run_plan, summarize_fate, summarize_nucleation, summarize_recurrence, write_csv, Command, ExperimentPlan, ReplicaRecord,
    SeedSource,
};
use kawahex::shapes::energie_table;
use kawahex::Params;
use serde_json::json;

mod landscape;
mod verify;

#[derive(Parser)]
#[command(
    name = "kawahex",
    version,
    about = "Kawasaki lattice gas on a hexagonal lattice: simulation and landscape analysis"
)]
struct Cli {
    #[command(flatten)]
    model: ModelArgs,
    #[command(subcommand)]
    command: Cmd,
}

/// Model parameters shared by every command. A params file is read first
/// and the flags override it.
#[derive(Args, Clone, Debug)]
struct ModelArgs {
    /// Plain-text file with keys U, Delta, beta, grid.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    #[arg(long, global = true)]
    u: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Inverse temperature, or a comma-separated schedule for experiments.
    #[arg(long, global = true)]
    beta: Option<String>,
    /// Energy grid unit; defaults to U/100.
    #[arg(long, global = true)]
    grid: Option<f64>,
    /// Lattice radius.
    #[arg(long = "L", global = true)]
    l: Option<i64>,
    /// Seed base; falls back to KAWAHEX_SEED, then a built-in default.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Critical radius, branch, Γ, A*, V* and the closed-form energy table.
    Critical,
    /// Raw replica runs written as CSV.
    Simulate(PlanArgs),
    /// Nucleation times per β and the fitted slope of log mean τ.
    Nucleation(PlanArgs),
    /// Shrink/grow probabilities of a start droplet.
    Fate(PlanArgs),
    /// Fraction of starts hitting {□, ■} within e^{β(V*+ε)} steps.
    Recurrence(PlanArgs),
    /// Recompute a summary from a CSV of raw records.
    Summarize {
        #[command(flatten)]
        plan: PlanArgs,
        /// CSV written by an earlier run.
        #[arg(long)]
        records: PathBuf,
    },
    /// Exact landscape queries.
    Landscape {
        #[command(subcommand)]
        query: landscape::Query,
    },
    /// The reference path from □ to ■ and its bar-segment maxima.
    Refpath(landscape::RefpathArgs),
    /// Cross-checks of energies, paths and the kernel; nonzero exit on failure.
    Verify,
}

#[derive(Args, Clone, Debug, Default)]
struct PlanArgs {
    /// Plan file (`key = value` lines); flags override its entries.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    max_steps: Option<String>,
    /// empty | full | random[:density] | shape such as E(2), EB(1,4), St(21)
    #[arg(long)]
    start: Option<String>,
    /// empty | full | both
    #[arg(long)]
    target: Option<String>,
    /// Slack ε of the recurrence horizon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Record whether each transition crosses the gate set.
    #[arg(long)]
    gate: bool,
    /// State cap for the gate-set closure.
    #[arg(long)]
    cap: Option<usize>,
    /// CSV of raw records.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary; stdout when absent.
    #[arg(long)]
    summary: Option<PathBuf>,
}

impl ModelArgs {
    /// Parameters from the params file and flags; `beta` defaults to 1.
    fn params(&self) -> Result<Params> {
        let base = match &self.params {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Params::parse_text(&text)?
            }
            None => Params::p1(1.0),
        };
        let u = self.u.unwrap_or(base.u_value());
        let delta = self.delta.unwrap_or(base.delta_value());
        let beta = match &self.beta {
            Some(b) => b.split(',').next().unwrap_or("").trim().parse().context("parsing --beta")?,
            None => base.beta,
        };
        let grid = match (self.grid, &self.params) {
            (Some(g), _) => g,
            (None, Some(_)) if self.u.is_none() => base.grid,
            _ => u / 100.0,
        };
        Ok(Params::with_grid(u, delta, beta, grid)?)
    }

    fn radius(&self) -> i64 {
        self.l.unwrap_or(6)
    }

    fn seed(&self) -> Result<(u64, SeedSource)> {
        match self.seed {
            Some(s) => Ok((s, SeedSource::Explicit)),
            None => Ok(env_seed()?),
        }
    }
}

/// Builds the plan: defaults, then the plan file, then flags.
fn build_plan(command: Command, model: &ModelArgs, args: &PlanArgs) -> Result<(ExperimentPlan, SeedSource)> {
    let (mut plan, file_seed) = match &args.plan {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let plan = ExperimentPlan::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
            let has_seed = text
                .lines()
                .any(|l| l.split('#').next().unwrap_or("").split('=').next().map(str::trim) == Some("seed"));
            (plan, has_seed)
        }
        None => (ExperimentPlan::new(command, 0), false),
    };
    plan.command = command;
    let source = if let Some(s) = model.seed {
        plan.seed = s;
        SeedSource::Explicit
    } else if file_seed {
        SeedSource::Explicit
    } else {
        let (s, src) = env_seed()?;
        plan.seed = s;
        src
    };
    if let Some(path) = &model.params {
        let p = Params::parse_text(&fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)?;
        plan.u = p.u_value();
        plan.delta = p.delta_value();
        plan.grid = Some(p.grid);
        plan.betas = vec![p.beta];
    }
    let mut set = |k: &str, v: String| plan.set(k, &v).with_context(|| format!("invalid value for {k}"));
    if let Some(v) = model.u {
        set("u", v.to_string())?;
    }
    if let Some(v) = model.delta {
        set("delta", v.to_string())?;
    }
    if let Some(v) = model.grid {
        set("grid", v.to_string())?;
    }
    if let Some(v) = &model.beta {
        set("betas", v.clone())?;
    }
    if let Some(v) = model.l {
        set("L", v.to_string())?;
    }
    if let Some(v) = args.reps {
        set("reps", v.to_string())?;
    }
    if let Some(v) = &args.max_steps {
        set("max_steps", v.clone())?;
    }
    if let Some(v) = &args.start {
        set("start", v.clone())?;
    }
    if let Some(v) = &args.target {
        set("target", v.clone())?;
    }
    if let Some(v) = args.epsilon {
        set("epsilon", v.to_string())?;
    }
    if args.gate {
        set("gate", "true".into())?;
    }
    if let Some(v) = args.cap {
        set("cap", v.to_string())?;
    }
    if let Some(v) = &args.out {
        set("out", v.display().to_string())?;
    }
    if let Some(v) = &args.summary {
        set("summary", v.display().to_string())?;
    }
    validate_regime(&plan.params(1.0)?)?;
    Ok((plan, source))
}

fn write_records(path: Option<&Path>, records: &[ReplicaRecord]) -> Result<()> {
    match path {
        Some(p) => write_csv(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?, records)?,
        None => write_csv(std::io::stdout().lock(), records)?,
    }
    Ok(())
}

fn emit_json(path: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => {
            if let Err(e) = writeln!(std::io::stdout().lock(), "{text}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

fn summary_json(plan: &ExperimentPlan, source: SeedSource, records: &[ReplicaRecord]) -> Result<serde_json::Value> {
    let mut v = match plan.command {
        Command::Simulate => json!({ "plan": plan, "seed_source": source, "records": records.len() }),
        Command::Nucleation => serde_json::to_value(summarize_nucleation(plan, source, records)?)?,
        Command::Fate => {
            let rows = plan
                .betas
                .iter()
                .map(|&b| summarize_fate(plan, source, b, records))
                .collect::<kawahex::Result<Vec<_>>>()?;
            if rows.len() == 1 {
                serde_json::to_value(&rows[0])?
            } else {
                serde_json::to_value(rows)?
            }
        }
        Command::Recurrence => serde_json::to_value(summarize_recurrence(plan, source, records)?)?,
    };
    if let Some(obj) = v.as_object_mut() {
        obj.insert("seed".into(), json!(plan.seed));
        obj.insert("seed_source".into(), json!(source));
    }
    Ok(v)
}

fn cmd_experiment(command: Command, model: &ModelArgs, args: &PlanArgs) -> Result<()> {
    let (plan, source) = build_plan(command, model, args)?;
    eprintln!("seed {} ({:?})", plan.seed, source);
    let records = run_plan(&plan)?;
    if command == Command::Simulate {
        write_records(plan.out.as_deref(), &records)?;
        return match &plan.summary {
            Some(path) => emit_json(Some(path), &summary_json(&plan, source, &records)?),
            None => Ok(()),
        };
    }
    if let Some(out) = &plan.out {
        write_records(Some(out), &records)?;
    }
    emit_json(plan.summary.as_deref(), &summary_json(&plan, source, &records)?)
}

fn cmd_summarize(model: &ModelArgs, args: &PlanArgs, records: &Path) -> Result<()> {
    let command = match &args.plan {
        Some(path) => ExperimentPlan::parse(&fs::read_to_string(path)?)?.command,
        None => bail!("summarize needs --plan to know which experiment produced the records"),
    };
    let (plan, source) = build_plan(command, model, args)?;
    let recs = read_csv(fs::File::open(records).with_context(|| format!("opening {}", records.display()))?)?;
    emit_json(plan.summary.as_deref(), &summary_json(&plan, source, &recs)?)
}

fn cmd_critical(model: &ModelArgs) -> Result<()> {
    let p = model.params()?;
    let report = validate_regime(&p)?;
    let cq = critical_quantities(&p)?;
    let table: Vec<_> = energie_table(cq.r_star as u32, &p)
        .into_iter()
        .enumerate()
        .map(|(n, (area, h))| json!({ "n": n, "area": area, "energy": p.value(h) }))
        .collect();
    let branch = match cq.branch {
        Branch::Low => "low",
        Branch::High => "high",
    };
    emit_json(
        None,
        &json!({
            "U": p.u_value(),
            "Delta": p.delta_value(),
            "grid": p.grid,
            "r_star": cq.r_star,
            "delta": { "num": cq.delta_num, "den": cq.delta_den, "value": cq.delta },
            "branch": branch,
            "gamma": p.value(cq.gamma),
            "a_star": cq.a_star,
            "a3_star": cq.a3_star,
            "v_star": p.value(cq.v_star),
            "r_bar": cq.r_bar,
            "energie_table": table,
            "warnings": report.warnings,
        }),
    )
}

fn run(cli: Cli) -> Result<ExitCode> {
    let model = &cli.model;
    match &cli.command {
        Cmd::Critical => cmd_critical(model)?,
        Cmd::Simulate(a) => cmd_experiment(Command::Simulate, model, a)?,
        Cmd::Nucleation(a) => cmd_experiment(Command::Nucleation, model, a)?,
        Cmd::Fate(a) => cmd_experiment(Command::Fate, model, a)?,
        Cmd::Recurrence(a) => cmd_experiment(Command::Recurrence, model, a)?,
        Cmd::Summarize { plan, records } => cmd_summarize(model, plan, records)?,
        Cmd::Landscape { query } => landscape::run(model, query)?,
        Cmd::Refpath(a) => landscape::refpath(model, a)?,
        Cmd::Verify => return verify::run(model),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
