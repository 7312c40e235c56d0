//! Monte Carlo sweeps over the rate floor of `D` or the relay antenna count,
//! with CSV output.
//!
//! Every trial draws its channel from `base_seed + trial`, so a sweep is a
//! pure function of its configuration. Antenna sweeps draw each trial once at
//! the largest antenna count and truncate, so smaller relays see the leading
//! antennas of the same realization.
//!
//! An instance is in outage for a scheme when the scheme cannot meet `D`'s
//! rate floor. Solver errors and solutions failing the constraint audit also
//! count as outage and are tallied as failures. Mean rates average over all
//! trials with zero for outage.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::alternating::{alternate, alternate_from, direct_transmission_rate, Scheme};
use crate::error::SolveError;
use crate::model::{db_to_linear, fig2_channel, sample_channel, ChannelRealization, PathLossSpec, SystemParams};
use crate::numerics::{normalize, C64};
use crate::rates::{audit, rate_d, rate_r, TxSolution};

/// Audit tolerance applied to every solution the harness accepts.
pub const AUDIT_TOL: f64 = 1e-6;
/// Share of failed solves above which a run is flagged.
pub const FAILURE_FLAG_SHARE: f64 = 0.10;
/// CSV header; the column order is part of the output contract.
pub const CSV_HEADER: [&str; 8] =
    ["sweep_value", "scheme", "mean_rate_r", "mean_rate_d", "outage_prob", "trials", "failures", "wall_ms"];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    RateRegion,
    RateVsAntennas,
    OutageVsRate,
    OutageVsAntennas,
}

impl ExperimentKind {
    pub fn sweeps_antennas(self) -> bool {
        matches!(self, ExperimentKind::RateVsAntennas | ExperimentKind::OutageVsAntennas)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Optimal,
    Zf,
    Direct,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Optimal => "optimal",
            SchemeKind::Zf => "zf",
            SchemeKind::Direct => "direct",
        }
    }

    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s.trim() {
            "optimal" => Ok(SchemeKind::Optimal),
            "zf" => Ok(SchemeKind::Zf),
            "direct" => Ok(SchemeKind::Direct),
            other => Err(HarnessError::Config(format!("unknown scheme '{other}' (expected optimal, zf or direct)"))),
        }
    }
}

/// Full description of one experiment. Every field has a default, so a
/// config file only lists what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Source power in dB; the linear value is `10^{ps_db/10}`.
    pub ps_db: f64,
    pub sigma_d2: f64,
    pub sigma_r2: f64,
    pub sigma_r2_tilde: f64,
    pub eta: f64,
    pub m: usize,
    pub n: usize,
    pub pl_sr_db: f64,
    pub pl_sd_db: f64,
    pub pl_rd_db: f64,
    /// Rate floor of `D` for antenna sweeps.
    pub rd_min: f64,
    /// Rate-floor grid `start:stop:step` (stop inclusive) or a single value.
    pub rdmin_grid: String,
    /// Relay antenna counts for antenna sweeps.
    pub antennas: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub schemes: Vec<SchemeKind>,
    /// Use the fixed reference channel; forces a single trial.
    pub fig2: bool,
    pub max_iter: usize,
    pub tol: f64,
    /// Receive-filter starts per solve; starts after the first are random.
    pub restarts: usize,
    /// Record measured solve time in `wall_ms`; otherwise the column is zero
    /// so reruns are byte-identical.
    pub timing: bool,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        let pl = PathLossSpec::default();
        Self {
            kind: ExperimentKind::OutageVsRate,
            ps_db: 30.0,
            sigma_d2: p.sigma_d2,
            sigma_r2: p.sigma_r2,
            sigma_r2_tilde: p.sigma_r2_tilde,
            eta: p.eta,
            m: p.m,
            n: p.n,
            pl_sr_db: pl.pl_sr_db,
            pl_sd_db: pl.pl_sd_db,
            pl_rd_db: pl.pl_rd_db,
            rd_min: 2.0,
            rdmin_grid: "0:4:0.25".into(),
            antennas: vec![1, 2, 4, 8],
            trials: 500,
            base_seed: 0,
            schemes: vec![SchemeKind::Optimal, SchemeKind::Zf, SchemeKind::Direct],
            fig2: false,
            max_iter: crate::alternating::DEFAULT_MAX_ITER,
            tol: crate::alternating::DEFAULT_TOL,
            restarts: 1,
            timing: false,
            out: None,
        }
    }
}

/// Parses `start:stop:step` into an ascending grid including `stop`, or a
/// single number into a one-point grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, HarnessError> {
    let bad = |why: &str| HarnessError::Config(format!("bad grid '{s}': {why}"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad("expected numbers")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [v] if v.is_finite() => Ok(vec![*v]),
        [a, b, step] => {
            if !(a.is_finite() && b.is_finite() && step.is_finite()) {
                return Err(bad("values must be finite"));
            }
            if !(*step > 0.0) {
                return Err(bad("step must be positive"));
            }
            if b < a {
                return Err(bad("stop is below start"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|k| a + k as f64 * step).collect())
        }
        _ => Err(bad("expected start:stop:step")),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        Self::from_toml_str(&text)
    }

    pub fn params(&self) -> SystemParams {
        SystemParams {
            ps: db_to_linear(self.ps_db),
            sigma_d2: self.sigma_d2,
            sigma_r2: self.sigma_r2,
            sigma_r2_tilde: self.sigma_r2_tilde,
            eta: self.eta,
            rd_min: self.rd_min,
            m: self.m,
            n: self.n,
        }
    }

    pub fn path_loss(&self) -> PathLossSpec {
        PathLossSpec { pl_sr_db: self.pl_sr_db, pl_sd_db: self.pl_sd_db, pl_rd_db: self.pl_rd_db }
    }

    /// Sweep values in output order: rate floors, or antenna counts.
    pub fn sweep_values(&self) -> Result<Vec<f64>, HarnessError> {
        if self.kind.sweeps_antennas() {
            Ok(self.antennas.iter().map(|&n| n as f64).collect())
        } else {
            parse_grid(&self.rdmin_grid)
        }
    }

    pub fn effective_trials(&self) -> usize {
        if self.fig2 {
            1
        } else {
            self.trials
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let cfg = |m: String| HarnessError::Config(m);
        self.params().validate().map_err(|e| cfg(e.to_string()))?;
        self.path_loss().validate().map_err(|e| cfg(e.to_string()))?;
        if self.trials == 0 {
            return Err(cfg("trials must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(cfg("at least one scheme is required".into()));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(cfg(format!("scheme '{}' listed twice", s.name())));
            }
        }
        if self.max_iter == 0 || !(self.tol > 0.0) {
            return Err(cfg("max_iter must be at least 1 and tol positive".into()));
        }
        if self.restarts == 0 {
            return Err(cfg("restarts must be at least 1".into()));
        }
        let grid = self.sweep_values()?;
        if grid.is_empty() {
            return Err(cfg("sweep grid is empty".into()));
        }
        if self.kind.sweeps_antennas() {
            if self.antennas.iter().any(|&n| n == 0) {
                return Err(cfg("antenna counts must be positive".into()));
            }
            if self.fig2 {
                return Err(cfg("the reference channel has a fixed antenna count".into()));
            }
        } else if grid.iter().any(|v| *v < 0.0) {
            return Err(cfg("rate floors must be non-negative".into()));
        }
        if self.fig2 && (self.m != 2 || self.n != 4) {
            return Err(cfg("the reference channel needs m = 2 and n = 4".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical serialization, as lowercase hex.
    pub fn config_hash(&self) -> String {
        let text = toml::to_string(self).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub scheme: SchemeKind,
    pub mean_rate_r: f64,
    pub mean_rate_d: f64,
    pub outage_prob: f64,
    pub trials: usize,
    pub failures: usize,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMeta {
    pub base_seed: u64,
    pub config_hash: String,
    /// Measured duration of the whole sweep.
    pub wall_ms: u64,
    pub solves: usize,
    pub failures: usize,
    /// Solutions returned by a solver that failed the audit.
    pub audit_violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub meta: RunMeta,
}

impl SweepResult {
    /// More than [`FAILURE_FLAG_SHARE`] of the solves failed.
    pub fn flagged(&self) -> bool {
        self.meta.solves > 0 && self.meta.failures as f64 > FAILURE_FLAG_SHARE * self.meta.solves as f64
    }

    pub fn row(&self, sweep_value: f64, scheme: SchemeKind) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.scheme == scheme && (r.sweep_value - sweep_value).abs() < 1e-12)
    }
}

/// Result of one scheme on one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Solved { rate_r: f64, rate_d: f64 },
    Outage,
    /// Solver error or audit violation; counted as outage.
    Failed { audit_violation: bool },
}

#[derive(Debug, Clone, Copy)]
struct Timed {
    outcome: Outcome,
    nanos: u64,
}

/// Random unit filters for the extra restarts of one trial.
fn restart_filters(seed: u64, n: usize, count: usize) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x5eed);
    (0..count)
        .map(|_| {
            let v: Vec<C64> = (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re, im)
                })
                .collect();
            normalize(&v).unwrap_or_else(|_| {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[0] = C64::new(1.0, 0.0);
                e
            })
        })
        .collect()
}

fn better(a: Option<TxSolution>, b: TxSolution, ch: &ChannelRealization, p: &SystemParams) -> TxSolution {
    match a {
        Some(a) if rate_r(ch, &a, p) >= rate_r(ch, &b, p) => a,
        _ => b,
    }
}

/// Alternating design for one scheme with optional extra starts. `warm` is a
/// feasible solution the result must not fall below.
fn solve_scheme(
    ch: &ChannelRealization,
    params: &SystemParams,
    scheme: Scheme,
    cfg: &ExperimentConfig,
    extra_filters: &[Vec<C64>],
    warm: Option<&TxSolution>,
) -> Result<TxSolution, SolveError> {
    let mut best = alternate(ch, params, scheme, cfg.max_iter, cfg.tol).map(|r| r.0)?;
    for w_r in extra_filters {
        if let Ok((s, _)) = alternate_from(ch, params, scheme, w_r, None, cfg.max_iter, cfg.tol) {
            best = better(Some(best), s, ch, params);
        }
    }
    if let Some(w) = warm {
        if rate_r(ch, w, params) > rate_r(ch, &best, params) {
            if let Ok((s, _)) = alternate_from(ch, params, scheme, &w.w_r, Some(w), cfg.max_iter, cfg.tol) {
                best = better(Some(best), s, ch, params);
            }
        }
    }
    Ok(best)
}

fn classify(ch: &ChannelRealization, params: &SystemParams, res: Result<TxSolution, SolveError>) -> (Outcome, Option<TxSolution>) {
    match res {
        Ok(sol) => {
            if audit(ch, &sol, params, AUDIT_TOL).all_ok() {
                let o = Outcome::Solved { rate_r: rate_r(ch, &sol, params), rate_d: rate_d(ch, &sol, params) };
                (o, Some(sol))
            } else {
                (Outcome::Failed { audit_violation: true }, None)
            }
        }
        Err(SolveError::Infeasible(_)) => (Outcome::Outage, None),
        Err(_) => (Outcome::Failed { audit_violation: false }, None),
    }
}

/// Outcomes of every requested scheme on one instance, in `cfg.schemes`
/// order. `skip[i]` marks schemes already known to be infeasible.
fn solve_instance(
    ch: &ChannelRealization,
    params: &SystemParams,
    cfg: &ExperimentConfig,
    extra_filters: &[Vec<C64>],
    skip: &[bool],
) -> Vec<Timed> {
    let mut out: Vec<Option<Timed>> = vec![None; cfg.schemes.len()];
    let index = |k: SchemeKind| cfg.schemes.iter().position(|s| *s == k);
    // The zero-forcing design is feasible for the optimal problem, so it is
    // solved first and offered to the optimal design as a floor.
    let mut zf_solution = None;
    for kind in [SchemeKind::Direct, SchemeKind::Zf, SchemeKind::Optimal] {
        let Some(i) = index(kind) else { continue };
        let start = Instant::now();
        let outcome = if skip[i] {
            Outcome::Outage
        } else {
            match kind {
                SchemeKind::Direct => {
                    let rate = direct_transmission_rate(ch, params);
                    if rate >= params.rd_min {
                        Outcome::Solved { rate_r: 0.0, rate_d: rate }
                    } else {
                        Outcome::Outage
                    }
                }
                SchemeKind::Zf => {
                    let (o, s) = classify(ch, params, solve_scheme(ch, params, Scheme::Zf, cfg, extra_filters, None));
                    zf_solution = s;
                    o
                }
                SchemeKind::Optimal => {
                    let res = solve_scheme(ch, params, Scheme::Optimal, cfg, extra_filters, zf_solution.as_ref());
                    classify(ch, params, res).0
                }
            }
        };
        out[i] = Some(Timed { outcome, nanos: start.elapsed().as_nanos() as u64 });
    }
    out.into_iter().map(|t| t.expect("every scheme evaluated")).collect()
}

fn trial_seed(cfg: &ExperimentConfig, trial: usize) -> u64 {
    cfg.base_seed.wrapping_add(trial as u64)
}

/// Outcomes of one trial for every sweep value, indexed `[value][scheme]`.
fn run_trial(cfg: &ExperimentConfig, grid: &[f64], trial: usize) -> Vec<Vec<Timed>> {
    let seed = trial_seed(cfg, trial);
    let base = cfg.params();
    let pl = cfg.path_loss();
    let extra = cfg.restarts - 1;
    if cfg.kind.sweeps_antennas() {
        let n_max = cfg.antennas.iter().copied().max().unwrap_or(1);
        let full = sample_channel(&SystemParams { n: n_max, ..base }, &pl, seed);
        grid.iter()
            .map(|&nv| {
                let n = nv as usize;
                let ch = full.truncate_relay(n);
                let params = SystemParams { n, ..base };
                let filters = restart_filters(seed, n, extra);
                solve_instance(&ch, &params, cfg, &filters, &vec![false; cfg.schemes.len()])
            })
            .collect()
    } else {
        let ch = if cfg.fig2 { fig2_channel() } else { sample_channel(&base, &pl, seed) };
        let filters = restart_filters(seed, base.n, extra);
        // Feasibility only shrinks as the floor grows; the grid is ascending.
        let mut infeasible = vec![false; cfg.schemes.len()];
        grid.iter()
            .map(|&rd| {
                let params = base.with_rd_min(rd);
                let res = solve_instance(&ch, &params, cfg, &filters, &infeasible);
                for (flag, t) in infeasible.iter_mut().zip(&res) {
                    if t.outcome == Outcome::Outage {
                        *flag = true;
                    }
                }
                res
            })
            .collect()
    }
}

/// Runs the sweep described by `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let started = Instant::now();
    let grid = cfg.sweep_values()?;
    let trials = cfg.effective_trials();
    let per_trial: Vec<Vec<Vec<Timed>>> = (0..trials).into_par_iter().map(|t| run_trial(cfg, &grid, t)).collect();

    let mut rows = Vec::with_capacity(grid.len() * cfg.schemes.len());
    let (mut solves, mut failures, mut violations) = (0, 0, 0);
    for (g, &value) in grid.iter().enumerate() {
        for (s, &scheme) in cfg.schemes.iter().enumerate() {
            let (mut sum_r, mut sum_d, mut outage, mut failed, mut nanos) = (0.0, 0.0, 0usize, 0usize, 0u64);
            for trial in &per_trial {
                let t = trial[g][s];
                nanos += t.nanos;
                match t.outcome {
                    Outcome::Solved { rate_r, rate_d } => {
                        sum_r += rate_r;
                        sum_d += rate_d;
                    }
                    Outcome::Outage => outage += 1,
                    Outcome::Failed { audit_violation } => {
                        outage += 1;
                        failed += 1;
                        violations += usize::from(audit_violation);
                    }
                }
            }
            solves += trials;
            failures += failed;
            rows.push(SweepRow {
                sweep_value: value,
                scheme,
                mean_rate_r: sum_r / trials as f64,
                mean_rate_d: sum_d / trials as f64,
                outage_prob: outage as f64 / trials as f64,
                trials,
                failures: failed,
                wall_ms: if cfg.timing { nanos / 1_000_000 } else { 0 },
            });
        }
    }
    let meta = RunMeta {
        base_seed: cfg.base_seed,
        config_hash: cfg.config_hash(),
        wall_ms: started.elapsed().as_millis() as u64,
        solves,
        failures,
        audit_violations: violations,
    };
    Ok(SweepResult { rows, meta })
}

fn expect_kind(cfg: &ExperimentConfig, ok: &[ExperimentKind]) -> Result<(), HarnessError> {
    if ok.contains(&cfg.kind) {
        Ok(())
    } else {
        Err(HarnessError::Config(format!("experiment kind {:?} does not match this run", cfg.kind)))
    }
}

/// Rate-floor sweep recording the achieved `(R_D, R_R)` pairs.
pub fn run_rate_region(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    expect_kind(cfg, &[ExperimentKind::RateRegion])?;
    run_experiment(cfg)
}

/// Outage sweep over the rate floor or the relay antenna count.
pub fn run_outage(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    expect_kind(cfg, &[ExperimentKind::OutageVsRate, ExperimentKind::OutageVsAntennas])?;
    run_experiment(cfg)
}

/// Rate of `R` over the relay antenna count.
pub fn run_rate_vs_antennas(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    expect_kind(cfg, &[ExperimentKind::RateVsAntennas])?;
    run_experiment(cfg)
}

fn format_float(v: f64) -> String {
    format!("{v:.8e}")
}

/// Writes the rows as CSV with [`CSV_HEADER`]; floats carry nine significant
/// digits.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    let io = |e: &dyn std::fmt::Display| HarnessError::Io { path: path.to_path_buf(), message: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(|e| io(&e))?;
    w.write_record(CSV_HEADER).map_err(|e| io(&e))?;
    for r in &result.rows {
        w.write_record([
            format_float(r.sweep_value),
            r.scheme.name().to_string(),
            format_float(r.mean_rate_r),
            format_float(r.mean_rate_d),
            format_float(r.outage_prob),
            r.trials.to_string(),
            r.failures.to_string(),
            r.wall_ms.to_string(),
        ])
        .map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))
}

/// Writes the run metadata as TOML next to the CSV.
pub fn emit_metadata(result: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    let text = toml::to_string(&result.meta).expect("metadata serializes");
    std::fs::write(path, text).map_err(|e| HarnessError::Io { path: path.to_path_buf(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:4:0.25").unwrap().len(), 17);
        assert_eq!(parse_grid("2").unwrap(), vec![2.0]);
        assert!(parse_grid("1:0:0.5").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn config_defaults_and_overrides() {
        let cfg = ExperimentConfig::from_toml_str("trials = 7\nschemes = [\"zf\"]\nkind = \"rate_region\"").unwrap();
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.schemes, vec![SchemeKind::Zf]);
        assert_eq!(cfg.pl_sd_db, 30.0);
        assert!(ExperimentConfig::from_toml_str("bogus = 1").is_err());
        let bad = ExperimentConfig { trials: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_floor_has_no_outage() {
        let cfg = ExperimentConfig { trials: 3, rdmin_grid: "0".into(), ..Default::default() };
        let res = run_experiment(&cfg).unwrap();
        assert!(res.rows.iter().all(|r| r.outage_prob == 0.0));
        assert_eq!(res.rows.len(), 3);
    }
}
