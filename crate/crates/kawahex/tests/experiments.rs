use kawahex::dynamics::{Kernel, Target};
use kawahex::experiments::{
    fit_slope, read_csv, run_replica, run_replicas, summarize_beta, wilson_interval, write_csv, Command, ExperimentPlan, StartSpec,
};
use kawahex::{HexLattice, Params};
use proptest::prelude::*;

#[test]
fn plan_text_roundtrip() {
    let mut plan = ExperimentPlan::new(Command::Fate, 42);
    plan.set("beta", "2.5,3").unwrap();
    plan.set("start", "EB(2,1)").unwrap();
    plan.set("reps", "7").unwrap();
    plan.set("delta", "1.39").unwrap();
    let back = ExperimentPlan::parse(&plan.to_text()).unwrap();
    assert_eq!(back, plan);
    assert!(plan.set("nonsense", "1").is_err());
    assert!(plan.set("reps", "many").is_err());
}

#[test]
fn replicas_replay_from_their_seed() {
    let lat = HexLattice::new(3).unwrap();
    let p = Params::p1(2.0);
    let start: StartSpec = "random:0.4".parse().unwrap();
    let recs = run_replicas(&lat, &p, &start, Target::Both, 4, 77, 2_000_000, None).unwrap();
    let kernel = Kernel::new(&lat, &p);
    for r in &recs {
        let again = run_replica(&kernel, &p, &start, Target::Both, r.seed, 2_000_000, None).unwrap();
        assert_eq!(&again, r);
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &recs).unwrap();
    assert_eq!(read_csv(buf.as_slice()).unwrap(), recs);
    let s = summarize_beta(2.0, &recs);
    assert_eq!(s.reps, 4);
    assert_eq!(s.completed, recs.iter().filter(|r| r.completed()).count());
}

#[test]
fn start_spec_roundtrip() {
    for s in ["empty", "full", "random:0.25", "EB(1,4)", "S(21)@2+1,1"] {
        assert_eq!(s.parse::<StartSpec>().unwrap().to_string(), s);
    }
    assert!("random:1.5".parse::<StartSpec>().is_err());
}

#[test]
fn slope_of_an_exact_line() {
    let pts: Vec<(f64, f64)> = [2.0, 2.5, 3.0, 3.5].iter().map(|&b| (b, 4.92 * b - 1.0)).collect();
    let f = fit_slope(&pts).unwrap();
    assert!((f.slope - 4.92).abs() < 1e-12 && (f.intercept + 1.0).abs() < 1e-12);
    assert!(fit_slope(&pts[..1]).is_none());
}

proptest! {
    #[test]
    fn wilson_interval_brackets_the_estimate(n in 1usize..500, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let (lo, hi) = wilson_interval(k, n);
        let phat = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= phat + 1e-12 && phat <= hi + 1e-12 && hi <= 1.0);
    }
}
