use std::path::PathBuf;
use std::process::{Command, Output};

fn kawahex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kawahex"))
        .args(args)
        .env_remove("KAWAHEX_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kawahex-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn critical_reports_both_points() {
    let out = kawahex(&["critical"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["r_star"], 1);
    assert_eq!(v["a_star"], 22);
    assert!((v["gamma"].as_f64().unwrap() - 4.92).abs() < 1e-9);
    assert_eq!(v["branch"], "low");

    let v = json(&kawahex(&["--delta", "1.39", "critical"]));
    assert_eq!(v["a_star"], 30);
    assert!((v["gamma"].as_f64().unwrap() - 5.70).abs() < 1e-9);
    assert_eq!(v["branch"], "high");
}

#[test]
fn parameter_errors_exit_with_two() {
    for args in [
        &["--delta", "1.6", "critical"][..],
        &["--grid", "0.05", "critical"],
        &["--delta", "1.4", "critical"],
        &["--beta", "x", "critical"],
    ] {
        let out = kawahex(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn params_file_is_read() {
    let path = scratch("p2.txt");
    std::fs::write(&path, "U = 1\nDelta = 1.39\n").unwrap();
    let v = json(&kawahex(&["--params", path.to_str().unwrap(), "critical"]));
    assert_eq!(v["a_star"], 30);
}

#[test]
fn verify_passes_and_reports() {
    let out = kawahex(&["verify"]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().filter(|l| l.starts_with("PASS")).count(), 8, "{stderr}");
    let v = json(&out);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_fails_outside_the_regime() {
    let out = kawahex(&["--delta", "1.6", "verify"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn simulate_is_reproducible_and_echoes_its_seed() {
    let args = [
        "--L",
        "3",
        "--beta",
        "2",
        "--seed",
        "31",
        "simulate",
        "--reps",
        "4",
        "--max-steps",
        "200000",
        "--start",
        "random:0.5",
    ];
    let a = kawahex(&args);
    let b = kawahex(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8_lossy(&a.stdout);
    assert!(text.starts_with("seed,beta,tau,reached"));
    assert_eq!(text.lines().count(), 5);
    assert!(String::from_utf8_lossy(&a.stderr).contains("seed 31"));

    let summary = scratch("sim.json");
    let out = kawahex(&[&args[..], &["--summary", summary.to_str().unwrap()]].concat());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(v["seed"], 31);
    assert_eq!(v["seed_source"], "explicit");
}

#[test]
fn environment_seed_is_used_and_recorded() {
    let out = Command::new(env!("CARGO_BIN_EXE_kawahex"))
        .args([
            "--L",
            "2",
            "--beta",
            "1",
            "fate",
            "--reps",
            "3",
            "--max-steps",
            "100000",
            "--start",
            "E(1)",
        ])
        .env("KAWAHEX_SEED", "1234")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["seed"], 1234);
    assert_eq!(v["seed_source"], "environment");
}

#[test]
fn summarize_reproduces_the_summary() {
    let plan = scratch("plan.txt");
    let csv = scratch("recs.csv");
    std::fs::write(
        &plan,
        "command = fate\nL = 2\nbetas = 1\nreps = 5\nseed = 8\nmax_steps = 100000\nstart = E(1)\n",
    )
    .unwrap();
    let direct = kawahex(&["fate", "--plan", plan.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(direct.status.success(), "{}", String::from_utf8_lossy(&direct.stderr));
    let again = kawahex(&["summarize", "--plan", plan.to_str().unwrap(), "--records", csv.to_str().unwrap()]);
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
    let (mut a, mut b) = (json(&direct), json(&again));
    a.as_object_mut().unwrap().remove("plan");
    b.as_object_mut().unwrap().remove("plan");
    assert_eq!(a, b);
}

#[test]
fn landscape_phi_on_a_small_lattice() {
    let out = kawahex(&["--L", "1", "landscape", "phi", "--from", "empty", "--to", "full"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["complete"], true);
    assert!(v["value"].as_f64().is_some());
}
