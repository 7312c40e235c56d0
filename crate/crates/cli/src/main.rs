//! `coop-noma`: batch experiments and oracle checks from the command line.
//!
//! Exit codes: 0 success, 1 configuration error, 2 run flagged (more than 10%
//! failed solves, or a failed verify check), 3 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coop_noma::alternating::Scheme;
use coop_noma::harness::{
    emit_csv, emit_metadata, run_experiment, ExperimentConfig, ExperimentKind, HarnessError, SchemeKind,
};
use coop_noma::verify;

const EXIT_CONFIG: u8 = 1;
const EXIT_FLAGGED: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "coop-noma", version, about = "Transceiver design experiments for a wireless-powered NOMA relay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate of R against the rate floor of D.
    RateRegion(SweepArgs),
    /// Mean rate of R against the relay antenna count.
    RateAntennas(SweepArgs),
    /// Outage probability of D against its rate floor.
    OutageRate(SweepArgs),
    /// Outage probability of D against the relay antenna count.
    OutageAntennas(SweepArgs),
    /// Compare the solvers with the brute-force oracles.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file with experiment settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; trial k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Source power in dB.
    #[arg(long)]
    ps_db: Option<f64>,
    /// Rate-floor grid start:stop:step (stop inclusive).
    #[arg(long)]
    rdmin_grid: Option<String>,
    /// Comma-separated subset of optimal,zf,direct.
    #[arg(long)]
    schemes: Option<String>,
    /// Comma-separated relay antenna counts for antenna sweeps.
    #[arg(long)]
    antennas: Option<String>,
    /// Rate floor of D for antenna sweeps.
    #[arg(long)]
    rd_min: Option<f64>,
    /// Receive-filter starts per solve.
    #[arg(long)]
    restarts: Option<usize>,
    /// Use the fixed reference channel (single trial).
    #[arg(long)]
    fig2: bool,
    /// Record solve times in the wall_ms column.
    #[arg(long)]
    timing: bool,
    /// Output CSV path; metadata goes to <out>.meta.toml.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run the suites at full size instead of the quick defaults.
    #[arg(long)]
    full: bool,
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> Result<T, HarnessError>) -> Result<Vec<T>, HarnessError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(f).collect()
}

fn build_config(kind: ExperimentKind, args: &SweepArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.kind = kind;
    if let Some(v) = args.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = args.ps_db {
        cfg.ps_db = v;
    }
    if let Some(v) = &args.rdmin_grid {
        cfg.rdmin_grid = v.clone();
    }
    if let Some(v) = &args.schemes {
        cfg.schemes = parse_list(v, SchemeKind::parse)?;
    }
    if let Some(v) = &args.antennas {
        cfg.antennas = parse_list(v, |p| {
            p.trim().parse().map_err(|_| HarnessError::Config(format!("bad antenna count '{p}'")))
        })?;
    }
    if let Some(v) = args.rd_min {
        cfg.rd_min = v;
    }
    if let Some(v) = args.restarts {
        cfg.restarts = v;
    }
    cfg.fig2 |= args.fig2;
    cfg.timing |= args.timing;
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn default_out(kind: ExperimentKind) -> PathBuf {
    let stem = match kind {
        ExperimentKind::RateRegion => "rate_region",
        ExperimentKind::RateVsAntennas => "rate_antennas",
        ExperimentKind::OutageVsRate => "outage_rate",
        ExperimentKind::OutageVsAntennas => "outage_antennas",
    };
    PathBuf::from(format!("{stem}.csv"))
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.toml");
    PathBuf::from(s)
}

fn sweep(kind: ExperimentKind, args: &SweepArgs) -> Result<u8, HarnessError> {
    let cfg = build_config(kind, args)?;
    let out = cfg.out.clone().unwrap_or_else(|| default_out(kind));
    let result = run_experiment(&cfg)?;
    emit_csv(&result, &out)?;
    emit_metadata(&result, &meta_path(&out))?;
    let m = &result.meta;
    eprintln!(
        "wrote {} ({} rows, {} solves, {} failures, {} audit violations, {} ms)",
        out.display(),
        result.rows.len(),
        m.solves,
        m.failures,
        m.audit_violations,
        m.wall_ms
    );
    if result.flagged() {
        eprintln!("run flagged: more than 10% of solves failed");
        return Ok(EXIT_FLAGGED);
    }
    Ok(0)
}

fn report(name: &str, pass: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn run_verify(args: &VerifyArgs) -> u8 {
    let (pairs, gap_n, grad_n, filt_n, alt_n) = if args.full { (1000, 50, 20, 100, 200) } else { (200, 4, 5, 20, 20) };
    let s = args.seed;
    let mut ok = true;

    let rho = verify::rho_star_suite(pairs, s);
    let (re, ve) = (max_of(rho.iter().map(|c| c.rho_error)), max_of(rho.iter().map(|c| c.value_error)));
    ok &= report("rho_star", re <= 1e-6 && ve <= 1e-10, format!("max |rho err| {re:.2e}, max |value err| {ve:.2e}"));

    let gap = verify::duality_gap_suite(gap_n, s, &[0.5, 1.0, 2.0], coop_noma::oracle::DEFAULT_RESOLUTION);
    let worst = max_of(gap.iter().map(|c| c.relative_gap()));
    let audits = gap.iter().all(|c| c.audit_ok);
    ok &= report("duality_gap", worst <= 0.02 && audits, format!("{} cases, worst relative gap {worst:.2e}", gap.len()));

    let grad = verify::gradient_suite(grad_n, s);
    let worst = max_of(grad.iter().map(|c| c.relative_error()));
    ok &= report(
        "gamma_gradient",
        grad.len() == grad_n && worst <= 1e-3,
        format!("{} cases, worst relative error {worst:.2e}", grad.len()),
    );

    let filt = verify::filter_suite(filt_n, s, 1_000_000);
    let (fe, fr) = (max_of(filt.iter().map(|c| c.relative_error())), max_of(filt.iter().map(|c| c.residual)));
    ok &= report(
        "receive_filter",
        fe <= 1e-6 && fr <= 1e-8,
        format!("{} cases, worst objective error {fe:.2e}, worst residual {fr:.2e}", filt.len()),
    );

    let alt = verify::alternation_suite(alt_n, s, &[Scheme::Optimal, Scheme::Zf]);
    let monotone = alt.iter().all(|c| c.monotone && !c.failed && c.audit_ok);
    let conv = alt.iter().filter(|c| c.converged).count();
    ok &= report(
        "alternation",
        monotone && conv as f64 >= 0.95 * alt.len() as f64,
        format!("{} runs, monotone and audited: {monotone}, converged {conv}", alt.len()),
    );

    if ok {
        0
    } else {
        EXIT_FLAGGED
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::RateRegion(a) => sweep(ExperimentKind::RateRegion, a),
        Command::RateAntennas(a) => sweep(ExperimentKind::RateVsAntennas, a),
        Command::OutageRate(a) => sweep(ExperimentKind::OutageVsRate, a),
        Command::OutageAntennas(a) => sweep(ExperimentKind::OutageVsAntennas, a),
        Command::Verify(a) => Ok(run_verify(a)),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                HarnessError::Config(_) => EXIT_CONFIG,
                HarnessError::Io { .. } => EXIT_IO,
            })
        }
    }
}
