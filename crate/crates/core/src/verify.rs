//! Measurement suites comparing the solvers with the brute-force oracles.
//!
//! Each suite returns raw per-case measurements; callers decide pass or fail
//! against their own tolerances. Instances are drawn from consecutive seeds so
//! every suite is reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::alternating::{alternate, init_receiver, Scheme, Termination, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::harness::AUDIT_TOL;
use crate::model::{gamma_threshold, sample_channel, ChannelRealization, PathLossSpec, SystemParams};
use crate::numerics::C64;
use crate::optimal_tx::{
    bisect_gamma, dinkelbach_optimal, gamma_gradient, ratio, recover_beamformers, solve_dual_p25, EffectiveChannels,
    DEFAULT_EPS,
};
use crate::oracle::{brute_force_p2, grid_filter, grid_min_rho};
use crate::rates::{audit, rate_r};
use crate::rx_filter::{optimal_receive_filter, sic_margin, FilterGeometry};

fn instance(params: &SystemParams, seed: u64) -> ChannelRealization {
    sample_channel(params, &PathLossSpec::default(), seed)
}

fn complex_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect()
}

/// Rate floor whose threshold is `gamma`.
fn rd_for_gamma(gamma: f64) -> f64 {
    0.5 * gamma.ln_1p() / std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoStarCase {
    pub b: f64,
    pub c: f64,
    /// `|ρ* − ρ_grid|`.
    pub rho_error: f64,
    /// `|value − (b + c + 2√(bc))|`.
    pub value_error: f64,
}

/// Closed-form `ρ*` against the numeric minimizer on `count` log-uniform
/// pairs in `(1e-3, 1e3)²`.
pub fn rho_star_suite(count: usize, seed: u64) -> Vec<RhoStarCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let b = 10f64.powf(rng.random_range(-3.0..3.0));
            let c = 10f64.powf(rng.random_range(-3.0..3.0));
            let (rho, value) = crate::optimal_tx::rho_star(b, c).expect("positive pair");
            let grid = grid_min_rho(b, c, 10_000);
            RhoStarCase {
                b,
                c,
                rho_error: (rho - grid).abs(),
                value_error: (value - (b + c + 2.0 * (b * c).sqrt())).abs(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCase {
    pub seed: u64,
    pub rd_min: f64,
    /// `R`'s rate from the dual route; `None` if reported infeasible.
    pub solver: Option<f64>,
    /// Best rate on the oracle grid; `None` if no grid point is feasible.
    pub oracle: Option<f64>,
    pub audit_ok: bool,
}

impl GapCase {
    /// Relative gap, zero when both sides agree the instance is infeasible and
    /// infinite when they disagree.
    pub fn relative_gap(&self) -> f64 {
        match (self.solver, self.oracle) {
            (None, None) => 0.0,
            (Some(s), Some(o)) => (s - o).abs() / o.abs().max(1e-12),
            _ => f64::INFINITY,
        }
    }
}

/// Dual-route transmit design against the primal grid oracle for the initial
/// receive filter, on `count` instances at each rate floor.
pub fn duality_gap_suite(count: usize, seed: u64, rd_mins: &[f64], resolution: usize) -> Vec<GapCase> {
    let cases: Vec<(u64, f64)> =
        (0..count as u64).flat_map(|i| rd_mins.iter().map(move |&rd| (seed + i, rd))).collect();
    cases
        .into_par_iter()
        .map(|(s, rd)| {
            let params = SystemParams::default().with_rd_min(rd);
            let ch = instance(&params, s);
            let w_r = init_receiver(&ch).expect("nonzero channel");
            let (solver, audit_ok) = match dinkelbach_optimal(&ch, &w_r, &params, DEFAULT_EPS) {
                Ok(sol) => (Some(rate_r(&ch, &sol, &params)), audit(&ch, &sol, &params, AUDIT_TOL).all_ok()),
                Err(_) => (None, true),
            };
            let oracle = brute_force_p2(&ch, &w_r, &params, resolution).ok().flatten();
            let oracle_ok = oracle.as_ref().map_or(true, |o| audit(&ch, &o.solution, &params, AUDIT_TOL).all_ok());
            GapCase { seed: s, rd_min: rd, solver, oracle: oracle.map(|o| o.rate_r), audit_ok: audit_ok && oracle_ok }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCase {
    pub seed: u64,
    pub gamma_split: f64,
    pub analytic: f64,
    pub numeric: f64,
}

impl GradientCase {
    pub fn relative_error(&self) -> f64 {
        (self.analytic - self.numeric).abs() / self.analytic.abs().max(self.numeric.abs()).max(1e-300)
    }
}

/// Analytic derivative of the dual value in `Γ` against a central difference,
/// on the first `count` instances where the test point is well defined.
///
/// The test point is offset from the optimal `Γ` (where the derivative
/// vanishes) and `t` is the optimal ratio.
pub fn gradient_suite(count: usize, seed: u64) -> Vec<GradientCase> {
    let params = SystemParams::default().with_rd_min(1.0);
    let gamma = gamma_threshold(&params);
    let mut out = Vec::with_capacity(count);
    let mut s = seed;
    while out.len() < count && s < seed + 50 * count as u64 {
        let ch = instance(&params, s);
        s += 1;
        let Ok(w_r) = init_receiver(&ch) else { continue };
        let Ok(sol) = dinkelbach_optimal(&ch, &w_r, &params, DEFAULT_EPS) else { continue };
        let t = ratio(&ch, &sol, &params);
        let eff = EffectiveChannels::new(&ch, &w_r);
        let Ok(search) = bisect_gamma(t, &eff, &params, 1e-6 * gamma, None) else { continue };
        let value = |g: f64| solve_dual_p25(t, g, &eff, &params).ok();
        for offset in [0.2, -0.2, 0.1, -0.1, 0.05, -0.05] {
            let g = search.gamma_split * (1.0 + offset);
            if !(g > 0.0 && g < gamma) {
                continue;
            }
            let h = 1e-4 * g;
            let (Some(mid), Some(up), Some(down)) = (value(g), value(g + h), value(g - h)) else { continue };
            let Ok(rec) = recover_beamformers(&mid, t, &eff, &params) else { continue };
            out.push(GradientCase {
                seed: s - 1,
                gamma_split: g,
                analytic: gamma_gradient(&mid, &rec, &eff, &params),
                numeric: (up.d_star - down.d_star) / (2.0 * h),
            });
            break;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterCase {
    pub closed_form: f64,
    pub grid: f64,
    /// The SIC condition binds at the closed-form filter.
    pub active: bool,
    /// `|g − f|` at the returned filter relative to the useful power `g`;
    /// zero when the condition does not bind.
    pub residual: f64,
}

impl FilterCase {
    pub fn relative_error(&self) -> f64 {
        (self.closed_form - self.grid).abs() / self.grid.abs().max(1e-300)
    }
}

/// Closed-form receive filter against a `points`-point grid over the
/// parametrization, on random geometries with `N = 4`. Thresholds are placed
/// both below the matched filter's SINR and between it and the best SINR, so
/// inactive and binding cases both occur.
pub fn filter_suite(count: usize, seed: u64, points: usize) -> Vec<FilterCase> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed + i);
            let geom = FilterGeometry::from_vectors(complex_vec(&mut rng, 4), complex_vec(&mut rng, 4));
            let rho: f64 = rng.random_range(0.05..1.0);
            let base = SystemParams::default();
            // SINR along the parametrization from the margin's affine form in γ'.
            let sinr = |l: f64| {
                let free = sic_margin(&geom, l, rho, &base.with_rd_min(0.0));
                let unit = sic_margin(&geom, l, rho, &base.with_rd_min(rd_for_gamma(1.0)));
                free / (free - unit)
            };
            let (s_u, s_1) = (sinr(geom.matched_lambda()), sinr(1.0));
            let target = if i % 2 == 0 {
                rng.random_range(0.05..0.95) * s_u
            } else {
                s_u + rng.random_range(0.05..0.95) * (s_1 - s_u)
            };
            let params = base.with_rd_min(rd_for_gamma(target));
            let sol = optimal_receive_filter(&geom, rho, &params).expect("threshold below the best SINR");
            let grid = grid_filter(&geom, rho, &params, points).expect("threshold below the best SINR");
            let useful = 2.0 * rho * params.ps * sol.lambda * geom.h2.iter().map(|v| v.norm_sqr()).sum::<f64>();
            let residual =
                if sol.active { sic_margin(&geom, sol.lambda, rho, &params).abs() / useful } else { 0.0 };
            FilterCase { closed_form: geom.objective(sol.lambda), grid: grid.value, active: sol.active, residual }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternationCase {
    pub seed: u64,
    pub rd_min: f64,
    pub scheme: Scheme,
    pub monotone: bool,
    pub converged: bool,
    pub rounds: usize,
    pub audit_ok: bool,
    /// The solver returned an error other than infeasibility.
    pub failed: bool,
}

/// Alternating optimization on the first `count` feasible instances for each
/// scheme, alternating the rate floor between 0.5 and 1.
pub fn alternation_suite(count: usize, seed: u64, schemes: &[Scheme]) -> Vec<AlternationCase> {
    let scan = (3 * count) as u64;
    let mut out = Vec::new();
    for &scheme in schemes {
        let mut cases: Vec<AlternationCase> = (0..scan)
            .into_par_iter()
            .filter_map(|i| {
                let rd = if i % 2 == 0 { 0.5 } else { 1.0 };
                let params = SystemParams::default().with_rd_min(rd);
                let ch = instance(&params, seed + i);
                let base = AlternationCase {
                    seed: seed + i,
                    rd_min: rd,
                    scheme,
                    monotone: false,
                    converged: false,
                    rounds: 0,
                    audit_ok: false,
                    failed: true,
                };
                match alternate(&ch, &params, scheme, DEFAULT_MAX_ITER, DEFAULT_TOL) {
                    Ok((sol, trace)) => Some(AlternationCase {
                        monotone: trace.is_monotone(crate::alternating::MONOTONE_TOL),
                        converged: trace.termination == Termination::Converged,
                        rounds: trace.records.len(),
                        audit_ok: audit(&ch, &sol, &params, AUDIT_TOL).all_ok(),
                        failed: false,
                        ..base
                    }),
                    Err(crate::error::SolveError::Infeasible(_)) => None,
                    Err(_) => Some(base),
                }
            })
            .collect();
        cases.truncate(count);
        out.extend(cases);
    }
    out
}
