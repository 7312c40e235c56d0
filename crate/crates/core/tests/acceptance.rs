//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! print.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use coop_noma::alternating::Scheme;
use coop_noma::harness::{emit_csv, run_experiment, ExperimentConfig, ExperimentKind, SchemeKind, SweepResult};
use coop_noma::verify;

const RHO_TOL: f64 = 1e-6;
const RHO_VALUE_TOL: f64 = 1e-10;
const GAP_TOL: f64 = 0.02;
const GRADIENT_TOL: f64 = 1e-3;
const FILTER_TOL: f64 = 1e-6;
const FILTER_RESIDUAL_TOL: f64 = 1e-8;
const MONOTONE_SHARE: f64 = 0.95;
const DOMINANCE_TOL: f64 = 1e-6;
const OUTAGE_DIRECT_FLOOR: f64 = 0.05;
const OUTAGE_SCHEME_GAP: f64 = 0.03;
const GOLDEN_TOL: f64 = 1e-6;
const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

/// Audit violations seen by each suite, collected for the audit criterion.
#[derive(Default)]
struct Audits {
    checked: usize,
    violations: usize,
}

impl Audits {
    fn add(&mut self, checked: usize, violations: usize) {
        self.checked += checked;
        self.violations += violations;
    }

    fn sweep(&mut self, r: &SweepResult) {
        self.add(r.meta.solves, r.meta.audit_violations);
    }
}

fn c1_rho_star() -> Outcome {
    let start = Instant::now();
    let cases = verify::rho_star_suite(1000, SEED);
    let t = start.elapsed();
    let re = max_of(cases.iter().map(|c| c.rho_error));
    let ve = max_of(cases.iter().map(|c| c.value_error));
    Outcome {
        pass: re <= RHO_TOL && ve <= RHO_VALUE_TOL && within(t, 5),
        detail: format!("1000 pairs, max |rho err| {re:.2e}, max |value err| {ve:.2e}, {:.1} s", t.as_secs_f64()),
    }
}

fn c2_duality_gap(audits: &mut Audits) -> Outcome {
    let start = Instant::now();
    let cases = verify::duality_gap_suite(50, SEED, &[0.5, 1.0, 2.0], coop_noma::oracle::DEFAULT_RESOLUTION);
    let t = start.elapsed();
    let worst = max_of(cases.iter().map(|c| c.relative_gap()));
    let feasible = cases.iter().filter(|c| c.solver.is_some()).count();
    audits.add(cases.len(), cases.iter().filter(|c| !c.audit_ok).count());
    Outcome {
        pass: worst <= GAP_TOL && within(t, 600),
        detail: format!(
            "{} cases ({feasible} feasible), worst relative gap {worst:.2e}, {:.0} s",
            cases.len(),
            t.as_secs_f64()
        ),
    }
}

fn c3_gradient() -> Outcome {
    let start = Instant::now();
    let cases = verify::gradient_suite(20, SEED);
    let t = start.elapsed();
    let worst = max_of(cases.iter().map(|c| c.relative_error()));
    Outcome {
        pass: cases.len() == 20 && worst <= GRADIENT_TOL && within(t, 120),
        detail: format!("{} instances, worst relative error {worst:.2e}, {:.1} s", cases.len(), t.as_secs_f64()),
    }
}

fn c4_filter() -> Outcome {
    let start = Instant::now();
    let cases = verify::filter_suite(100, SEED, 1_000_000);
    let t = start.elapsed();
    let worst = max_of(cases.iter().map(|c| c.relative_error()));
    let residual = max_of(cases.iter().map(|c| c.residual));
    let active = cases.iter().filter(|c| c.active).count();
    Outcome {
        pass: worst <= FILTER_TOL && residual <= FILTER_RESIDUAL_TOL && within(t, 60),
        detail: format!(
            "100 geometries ({active} binding), worst objective error {worst:.2e}, worst residual {residual:.2e}, {:.1} s",
            t.as_secs_f64()
        ),
    }
}

fn c5_alternation(audits: &mut Audits) -> Outcome {
    let start = Instant::now();
    let cases = verify::alternation_suite(200, SEED, &[Scheme::Optimal, Scheme::Zf]);
    let t = start.elapsed();
    let mut pass = within(t, 900);
    let mut parts = Vec::new();
    for scheme in [Scheme::Optimal, Scheme::Zf] {
        let s: Vec<_> = cases.iter().filter(|c| c.scheme == scheme).collect();
        let monotone = s.iter().filter(|c| c.monotone && !c.failed).count();
        let converged = s.iter().filter(|c| c.converged).count();
        pass &= s.len() == 200 && monotone == s.len() && converged as f64 >= MONOTONE_SHARE * s.len() as f64;
        parts.push(format!("{}: {} runs, {monotone} monotone, {converged} converged", scheme.name(), s.len()));
    }
    audits.add(cases.len(), cases.iter().filter(|c| !c.failed && !c.audit_ok).count());
    Outcome { pass, detail: format!("{}, {:.0} s", parts.join("; "), t.as_secs_f64()) }
}

fn rows_for(r: &SweepResult, scheme: SchemeKind) -> Vec<&coop_noma::harness::SweepRow> {
    r.rows.iter().filter(|row| row.scheme == scheme).collect()
}

fn reference_config() -> ExperimentConfig {
    ExperimentConfig {
        kind: ExperimentKind::RateRegion,
        fig2: true,
        rdmin_grid: "0:4:0.25".into(),
        schemes: vec![SchemeKind::Optimal, SchemeKind::Zf],
        ..Default::default()
    }
}

fn golden_mismatches(fresh: &str, golden: &str) -> usize {
    let (a, b): (Vec<&str>, Vec<&str>) = (fresh.lines().collect(), golden.lines().collect());
    if a.len() != b.len() {
        return a.len().max(b.len());
    }
    a.iter()
        .zip(&b)
        .filter(|(x, y)| {
            let (xs, ys): (Vec<&str>, Vec<&str>) = (x.split(',').collect(), y.split(',').collect());
            xs.len() != ys.len()
                || xs.iter().zip(&ys).any(|(u, v)| match (u.parse::<f64>(), v.parse::<f64>()) {
                    (Ok(p), Ok(q)) => (p - q).abs() > GOLDEN_TOL * (1.0 + q.abs()),
                    _ => u != v,
                })
        })
        .count()
}

fn c6_reference_channel(audits: &mut Audits, dir: &Path) -> Outcome {
    let res = run_experiment(&reference_config()).expect("valid config");
    audits.sweep(&res);
    let (opt, zf) = (rows_for(&res, SchemeKind::Optimal), rows_for(&res, SchemeKind::Zf));
    let dominated = opt.iter().zip(&zf).all(|(o, z)| o.mean_rate_r >= z.mean_rate_r - DOMINANCE_TOL);
    let first_out = |rows: &[&coop_noma::harness::SweepRow]| rows.iter().position(|r| r.outage_prob > 0.0);
    let (fo, fz) = (first_out(&opt), first_out(&zf));
    let steps_apart = match (fo, fz) {
        (Some(a), Some(b)) => Some(a.abs_diff(b)),
        _ => None,
    };
    let nonincreasing = opt.windows(2).all(|w| w[1].mean_rate_r <= w[0].mean_rate_r + DOMINANCE_TOL);
    let path = dir.join("reference.csv");
    emit_csv(&res, &path).expect("writable temp dir");
    let fresh = std::fs::read_to_string(&path).unwrap();
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/reference_rate_region.csv");
    let mismatches = match std::fs::read_to_string(&golden_path) {
        Ok(g) => golden_mismatches(&fresh, &g),
        Err(_) => usize::MAX,
    };
    let at = |i: Option<usize>| i.map_or("never".to_string(), |i| format!("{:.2}", opt[i].sweep_value));
    Outcome {
        pass: dominated && nonincreasing && steps_apart.is_some_and(|d| d <= 1) && mismatches == 0,
        detail: format!(
            "optimal >= zf everywhere: {dominated}, optimal nonincreasing: {nonincreasing}, infeasible from rd_min {} (optimal) / {} (zf), golden mismatched rows: {mismatches}",
            at(fo),
            at(fz)
        ),
    }
}

fn c7_outage(audits: &mut Audits) -> Outcome {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::OutageVsRate,
        trials: 500,
        ps_db: 30.0,
        rdmin_grid: "0:4:0.25".into(),
        schemes: vec![SchemeKind::Optimal, SchemeKind::Zf, SchemeKind::Direct],
        base_seed: SEED,
        ..Default::default()
    };
    let start = Instant::now();
    let res = run_experiment(&cfg).expect("valid config");
    let t = start.elapsed();
    audits.sweep(&res);
    let (opt, zf, direct) =
        (rows_for(&res, SchemeKind::Optimal), rows_for(&res, SchemeKind::Zf), rows_for(&res, SchemeKind::Direct));
    let mut above_direct = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for i in 0..opt.len() {
        if direct[i].outage_prob > OUTAGE_DIRECT_FLOOR && opt[i].outage_prob > direct[i].outage_prob {
            above_direct.push(format!(
                "{:.2} ({:.3} vs {:.3})",
                opt[i].sweep_value, opt[i].outage_prob, direct[i].outage_prob
            ));
        }
        worst_gap = worst_gap.max((opt[i].outage_prob - zf[i].outage_prob).abs());
    }
    let pass = above_direct.is_empty() && worst_gap <= OUTAGE_SCHEME_GAP && within(t, 1800) && !res.flagged();
    let above = if above_direct.is_empty() { "none".to_string() } else { above_direct.join(", ") };
    Outcome {
        pass,
        detail: format!(
            "optimal outage above direct at rd_min: {above}; max |optimal - zf| {worst_gap:.3}; {} failures; {:.0} s",
            res.meta.failures,
            t.as_secs_f64()
        ),
    }
}

fn antenna_config() -> ExperimentConfig {
    ExperimentConfig {
        kind: ExperimentKind::RateVsAntennas,
        trials: 200,
        antennas: vec![1, 2, 4, 8],
        rd_min: 2.0,
        schemes: vec![SchemeKind::Optimal, SchemeKind::Zf],
        base_seed: SEED,
        ..Default::default()
    }
}

fn c8_antennas(audits: &mut Audits, dir: &Path) -> (Outcome, std::path::PathBuf) {
    let start = Instant::now();
    let res = run_experiment(&antenna_config()).expect("valid config");
    let t = start.elapsed();
    audits.sweep(&res);
    let mut pass = within(t, 1200) && !res.flagged();
    let mut parts = Vec::new();
    for scheme in [SchemeKind::Optimal, SchemeKind::Zf] {
        let rows = rows_for(&res, scheme);
        let rates: Vec<f64> = rows.iter().map(|r| r.mean_rate_r).collect();
        // Growth per added antenna between consecutive counts.
        let slopes: Vec<f64> =
            rows.windows(2).map(|w| (w[1].mean_rate_r - w[0].mean_rate_r) / (w[1].sweep_value - w[0].sweep_value)).collect();
        let nondecreasing = rates.windows(2).all(|w| w[1] >= w[0]);
        let shrinking = slopes.windows(2).all(|w| w[1] <= w[0]);
        let outage_ok = rows.windows(2).all(|w| w[1].outage_prob <= w[0].outage_prob);
        pass &= nondecreasing && shrinking && outage_ok;
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join("/");
        parts.push(format!(
            "{}: rate {} (nondecreasing {nondecreasing}), per-antenna gain {} (shrinking {shrinking}), outage nonincreasing {outage_ok}",
            scheme.name(),
            fmt(&rates),
            fmt(&slopes)
        ));
    }
    let path = dir.join("antennas.csv");
    emit_csv(&res, &path).expect("writable temp dir");
    (Outcome { pass, detail: format!("{}; {:.0} s", parts.join("; "), t.as_secs_f64()) }, path)
}

fn c10_determinism(dir: &Path, first_antennas: &Path) -> Outcome {
    let mut identical = Vec::new();
    let rerun = dir.join("antennas_rerun.csv");
    emit_csv(&run_experiment(&antenna_config()).expect("valid config"), &rerun).unwrap();
    identical.push(std::fs::read(first_antennas).unwrap() == std::fs::read(&rerun).unwrap());
    let small = ExperimentConfig { trials: 40, base_seed: SEED, rdmin_grid: "0:3:0.5".into(), ..Default::default() };
    let (a, b) = (dir.join("small_a.csv"), dir.join("small_b.csv"));
    emit_csv(&run_experiment(&small).unwrap(), &a).unwrap();
    emit_csv(&run_experiment(&small).unwrap(), &b).unwrap();
    identical.push(std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap());
    Outcome {
        pass: identical.iter().all(|x| *x),
        detail: format!("byte-identical reruns: antenna sweep {}, outage sweep {}", identical[0], identical[1]),
    }
}

fn main() -> ExitCode {
    // Under `cargo test -- --list` or filters, the libtest protocol expects no
    // tests from this target.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let dir = tempfile::tempdir().expect("temp dir");
    let mut audits = Audits::default();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut record = |n: u32, name: &'static str, o: Outcome| {
        println!("criterion {n:>2} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };
    record(1, "closed-form power split", c1_rho_star());
    record(2, "duality gap against grid oracle", c2_duality_gap(&mut audits));
    record(3, "gamma gradient against finite differences", c3_gradient());
    record(4, "receive filter against grid", c4_filter());
    record(5, "alternating monotonicity", c5_alternation(&mut audits));
    record(6, "reference-channel rate region", c6_reference_channel(&mut audits, dir.path()));
    record(7, "outage against rate floor", c7_outage(&mut audits));
    let (o8, antenna_csv) = c8_antennas(&mut audits, dir.path());
    record(8, "antenna-count trends", o8);
    record(
        9,
        "constraint audits",
        Outcome {
            pass: audits.violations == 0,
            detail: format!("{} audited solves, {} violations", audits.checked, audits.violations),
        },
    );
    record(10, "determinism", c10_determinism(dir.path(), &antenna_csv));
    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
