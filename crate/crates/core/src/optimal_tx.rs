//! Optimal transmit design for a fixed receive filter.
//!
//! The beamformers and split are found through three nested searches:
//!
//! * a Dinkelbach iteration on the ratio `t` (the SINR of `R`),
//! * a bisection on `Γ`, the share of `D`'s SINR target carried by the direct
//!   link, driven by the derivative of the optimal value with respect to `Γ`,
//! * for each `(t, Γ)`, the Lagrange dual of the relaxed problem, whose
//!   optimal `ρ` has a closed form and whose beamformers are the null vectors
//!   of the two dual matrices `A*` and `B*`.
//!
//! The relaxed problem for fixed `(t, Γ)` is
//!
//! ```text
//! max  2ps·Tr(H̃W₁) − t(σR² + σ̃R²/ρ)
//! s.t. 2ps·Tr(H̃W₂) ≥ γ'(2ps·Tr(H̃W₁) + σR² + σ̃R²/ρ)      (λ₁)
//!      2ps·Tr(H_SD W₂) ≥ Γ(2ps·Tr(H_SD W₁) + σD²)          (λ₂)
//!      Tr(H̄(W₁ + W₂)) ≥ a/(1 − ρ)                           (λ₃)
//!      Tr(W₁ + W₂) ≤ 1                                      (λ₄)
//! ```
//!
//! with `H̃ = h̃h̃ᴴ`, `h̃ = H_SR w_R`, `H̄ = H_SR H_SRᴴ`, `H_SD = h_SD h_SDᴴ` and
//! `a = (γ' − Γ)σD² / (2η·ps·‖h_RD‖²)`.

use crate::error::{Result, SolveError};
use crate::feasibility::{best_power_split, matched_direction, transmit_feasible, QosModel};
use crate::model::{gamma_threshold, ChannelRealization, SystemParams};
use crate::numerics::{
    max_eigenvalue_hermitian, norm_sqr, normalize, null_space_unit_vector_scaled, scale_real, solve_lmi,
    AffineHermitian, HermitianMatrix, LmiProgram, NumericsError, C64,
};
use crate::rates::{audit, sinr_d_phase1, sinr_d_phase2, sinr_r_pair, TxSolution};

/// Barrier accuracy of every dual solve, relative to the dual value.
pub(crate) const DUAL_TOL: f64 = 1e-11;
/// Null vectors are accepted when the next eigenvalue is at least this far
/// from zero relative to the matrix norm.
pub(crate) const NULL_TOL: f64 = 1e-7;
/// Strict lower bound imposed on the energy multiplier inside the solver.
pub(crate) const MULTIPLIER_FLOOR: f64 = 1e-10;
/// Smallest multiplier accepted after a solve.
pub(crate) const MULTIPLIER_MIN: f64 = 1e-8;
/// Dinkelbach iteration cap.
pub const MAX_DINKELBACH: usize = 50;
/// Default Dinkelbach tolerance on the ratio `t`.
pub const DEFAULT_EPS: f64 = 1e-6;

/// Channel quantities seen by the transmitter for a fixed receive filter.
#[derive(Debug, Clone)]
pub struct EffectiveChannels {
    /// `h̃ = H_SR w_R`.
    pub h_sr_tilde: Vec<C64>,
    /// `h̃ h̃ᴴ`.
    pub h_tilde: HermitianMatrix,
    /// `H_SR H_SRᴴ`.
    pub h_bar: HermitianMatrix,
    /// `h_SD h_SDᴴ`.
    pub h_sd: HermitianMatrix,
    pub h_rd_gain: f64,
}

impl EffectiveChannels {
    pub fn new(ch: &ChannelRealization, w_r: &[C64]) -> Self {
        let h_sr_tilde = ch.h_sr.mul_vec(w_r);
        Self {
            h_tilde: HermitianMatrix::outer(&h_sr_tilde),
            h_sr_tilde,
            h_bar: HermitianMatrix::symmetrize(ch.h_sr.matmul(&ch.h_sr.adjoint())),
            h_sd: HermitianMatrix::outer(&ch.h_sd),
            h_rd_gain: ch.h_rd_gain(),
        }
    }

    pub fn m(&self) -> usize {
        self.h_sr_tilde.len()
    }

    /// `a(Γ)` of the energy constraint.
    pub fn energy_target(&self, gamma_split: f64, params: &SystemParams) -> f64 {
        (gamma_threshold(params) - gamma_split) * params.sigma_d2 / (2.0 * params.eta * params.ps * self.h_rd_gain)
    }
}

/// Multipliers of the SIC, direct-link, energy and power constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPoint {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
}

#[derive(Debug, Clone)]
pub struct DualSolveResult {
    pub duals: DualPoint,
    pub d_star: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rho_star: f64,
    pub t: f64,
    pub gamma_split: f64,
    pub a_star: HermitianMatrix,
    pub b_star: HermitianMatrix,
    /// Dual value after each barrier centering step.
    pub trace: Vec<f64>,
}

/// Rank-one beamformers recovered from the dual null spaces.
#[derive(Debug, Clone)]
pub struct RecoveredBeamformers {
    pub u1: Vec<C64>,
    pub u2: Vec<C64>,
    pub tau1: f64,
    pub tau2: f64,
    pub w1: Vec<C64>,
    pub w2: Vec<C64>,
}

/// Minimizer and minimum of `b/ρ + c/(1−ρ)` over `ρ ∈ (0, 1)`.
pub fn rho_star(b: f64, c: f64) -> Result<(f64, f64)> {
    if !(b > 0.0 && c > 0.0 && b.is_finite() && c.is_finite()) {
        return Err(SolveError::Domain(format!("rho_star needs b, c > 0, got b={b}, c={c}")));
    }
    let g = (b * c).sqrt();
    Ok((b / (b + g), b + c + 2.0 * g))
}

/// `A = 2ps(1 − λ₁γ')H̃ + λ₃H̄ − 2ps·λ₂Γ·H_SD − λ₄I`.
pub fn build_a(duals: &DualPoint, gamma_split: f64, eff: &EffectiveChannels, params: &SystemParams) -> HermitianMatrix {
    let gamma = gamma_threshold(params);
    let ps2 = 2.0 * params.ps;
    let id = HermitianMatrix::identity(eff.m());
    HermitianMatrix::combination(&[
        (ps2 * (1.0 - duals.lambda1 * gamma), &eff.h_tilde),
        (duals.lambda3, &eff.h_bar),
        (-ps2 * duals.lambda2 * gamma_split, &eff.h_sd),
        (-duals.lambda4, &id),
    ])
}

/// `B = 2ps·λ₁H̃ + λ₃H̄ + 2ps·λ₂H_SD − λ₄I`.
pub fn build_b(duals: &DualPoint, eff: &EffectiveChannels, params: &SystemParams) -> HermitianMatrix {
    let ps2 = 2.0 * params.ps;
    let id = HermitianMatrix::identity(eff.m());
    HermitianMatrix::combination(&[
        (ps2 * duals.lambda1, &eff.h_tilde),
        (duals.lambda3, &eff.h_bar),
        (ps2 * duals.lambda2, &eff.h_sd),
        (-duals.lambda4, &id),
    ])
}

/// Dual function value `−(b + c + 2√(bc)) − tσR² − λ₁γ'σR² − λ₂ΓσD² + λ₄`.
pub fn dual_objective_p25(
    duals: &DualPoint,
    t: f64,
    gamma_split: f64,
    eff: &EffectiveChannels,
    params: &SystemParams,
) -> f64 {
    let gamma = gamma_threshold(params);
    let b = (t + duals.lambda1 * gamma) * params.sigma_r2_tilde;
    let c = eff.energy_target(gamma_split, params) * duals.lambda3;
    -(b + c + 2.0 * (b * c).max(0.0).sqrt()) - t * params.sigma_r2 - duals.lambda1 * gamma * params.sigma_r2
        - duals.lambda2 * gamma_split * params.sigma_d2
        + duals.lambda4
}

fn lmi_error(err: NumericsError, what: &str) -> SolveError {
    match err {
        NumericsError::Unbounded => SolveError::Infeasible(format!("{what}: dual unbounded, primal infeasible")),
        NumericsError::NotConverged { steps, best, .. } => SolveError::NotConverged { iterations: steps, trace: best },
        other => SolveError::Numerics(other),
    }
}

/// 2×2 block `−[[b, s], [s, c]] ⪯ 0`, i.e. `s² ≤ bc` with `b, c ≥ 0`, as an
/// affine map of the variables; `b` and `c` are given by their constant and
/// per-variable coefficients.
pub(crate) fn epigraph_block(b_coef: (f64, &[f64]), c_coef: (f64, &[f64]), s_index: usize, n: usize) -> AffineHermitian {
    let entry = |b: f64, c: f64, s: f64| {
        HermitianMatrix::symmetrize(crate::numerics::CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(-b, 0.0), C64::new(-s, 0.0), C64::new(-s, 0.0), C64::new(-c, 0.0)],
        ))
    };
    let coefficients = (0..n)
        .map(|j| {
            let s = if j == s_index { 1.0 } else { 0.0 };
            entry(b_coef.1[j], c_coef.1[j], s)
        })
        .collect();
    AffineHermitian::new(entry(b_coef.0, c_coef.0, 0.0), coefficients).expect("uniform 2x2 block")
}

/// Solves the dual for fixed `(t, Γ)` by a log-barrier method on the
/// variables `(λ₁, λ₂, λ₃, λ₄, s)`, where `s ≤ √(bc)` is kept in epigraph form.
pub fn solve_dual_p25(t: f64, gamma_split: f64, eff: &EffectiveChannels, params: &SystemParams) -> Result<DualSolveResult> {
    let gamma = gamma_threshold(params);
    if !(t > 0.0 && t.is_finite()) {
        return Err(SolveError::Domain(format!("ratio t must be positive, got {t}")));
    }
    if !(gamma_split >= 0.0 && gamma_split < gamma) {
        return Err(SolveError::Domain(format!("gamma split {gamma_split} outside [0, {gamma})")));
    }
    let a = eff.energy_target(gamma_split, params);
    let (st, sr, sd) = (params.sigma_r2_tilde, params.sigma_r2, params.sigma_d2);
    let ps2 = 2.0 * params.ps;
    let m = eff.m();
    let id = HermitianMatrix::identity(m);
    let zero = HermitianMatrix::zeros(m);

    let block_a = AffineHermitian::new(
        eff.h_tilde.scaled(ps2),
        vec![
            eff.h_tilde.scaled(-ps2 * gamma),
            eff.h_sd.scaled(-ps2 * gamma_split),
            eff.h_bar.clone(),
            id.scaled(-1.0),
            zero.clone(),
        ],
    )?;
    let block_b = AffineHermitian::new(
        zero.clone(),
        vec![eff.h_tilde.scaled(ps2), eff.h_sd.scaled(ps2), eff.h_bar.clone(), id.scaled(-1.0), zero],
    )?;
    let epi = epigraph_block((t * st, &[gamma * st, 0.0, 0.0, 0.0, 0.0]), (0.0, &[0.0, 0.0, a, 0.0, 0.0]), 4, 5);
    let prog = LmiProgram {
        objective: vec![-gamma * (st + sr), -gamma_split * sd, -a, 1.0, -2.0],
        offset: -t * (st + sr),
        blocks: vec![block_a, block_b, epi],
        lower_bounds: vec![Some(0.0), Some(0.0), Some(MULTIPLIER_FLOOR), Some(0.0), None],
    };

    let mut start = DualPoint { lambda1: 0.1, lambda2: 0.1, lambda3: 1.0, lambda4: 0.0 };
    let top = max_eigenvalue_hermitian(&build_a(&start, gamma_split, eff, params))
        .max(max_eigenvalue_hermitian(&build_b(&start, eff, params)));
    start.lambda4 = top.max(0.0) * 1.1 + 1.0;
    let x0 = [start.lambda1, start.lambda2, start.lambda3, start.lambda4, 0.0];
    let sol = solve_lmi(&prog, &x0, DUAL_TOL).map_err(|e| lmi_error(e, "dual solve"))?;

    let duals = DualPoint { lambda1: sol.x[0], lambda2: sol.x[1], lambda3: sol.x[2], lambda4: sol.x[3] };
    if !(duals.lambda3 > MULTIPLIER_MIN) {
        return Err(SolveError::Internal(format!(
            "energy multiplier {:.3e} is not strictly positive",
            duals.lambda3
        )));
    }
    let b = (t + duals.lambda1 * gamma) * st;
    let c = a * duals.lambda3;
    let (rho, _) = rho_star(b, c)?;
    Ok(DualSolveResult {
        duals,
        d_star: dual_objective_p25(&duals, t, gamma_split, eff, params),
        a,
        b,
        c,
        rho_star: rho,
        t,
        gamma_split,
        a_star: build_a(&duals, gamma_split, eff, params),
        b_star: build_b(&duals, eff, params),
        trace: sol.trace,
    })
}

/// Unit vector spanning the (numerically) one-dimensional null space of a
/// negative semidefinite dual matrix.
pub(crate) fn dual_null_vector(m: &HermitianMatrix) -> Result<Vec<C64>> {
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    if m.dim() == 1 {
        return Ok(vec![C64::new(1.0, 0.0)]);
    }
    null_space_unit_vector_scaled(m, NULL_TOL, scale).map_err(|e| SolveError::Degenerate(e.to_string()))
}

/// Phase-one noise term `σR² + σ̃R²/ρ` of `R`'s SINR.
pub(crate) fn relay_noise(rho: f64, params: &SystemParams) -> f64 {
    params.sigma_r2 + params.sigma_r2_tilde / rho
}

/// Beamformers from complementary slackness: `w1 = τ₁u₁`, `w2 = τ₂u₂` with
/// `τ₁` set by the dual value and `τ₂` by the active energy constraint.
pub fn recover_beamformers(
    dsr: &DualSolveResult,
    t: f64,
    eff: &EffectiveChannels,
    params: &SystemParams,
) -> Result<RecoveredBeamformers> {
    let noise = t * relay_noise(dsr.rho_star, params);
    let num1 = dsr.d_star + noise;
    let u2 = dual_null_vector(&dsr.b_star)?;
    // A zero optimal W₁ leaves A* without a forced null space.
    let (u1, tau1_sq) = if num1 <= 1e-9 * noise {
        let e = crate::numerics::eigh(&dsr.a_star);
        (e.vector(e.values.len() - 1), 0.0)
    } else {
        let u1 = dual_null_vector(&dsr.a_star)?;
        let gain = eff.h_tilde.quad_form(&u1);
        if !(gain > 0.0) {
            return Err(SolveError::Degenerate("null vector of A* is orthogonal to the relay channel".into()));
        }
        (u1.clone(), num1 / (2.0 * params.ps * gain))
    };
    let energy = dsr.a / (1.0 - dsr.rho_star) - tau1_sq * eff.h_bar.quad_form(&u1);
    let tau2_sq = (energy / eff.h_bar.quad_form(&u2)).max(0.0);
    let (tau1, tau2) = (tau1_sq.sqrt(), tau2_sq.sqrt());
    Ok(RecoveredBeamformers {
        w1: scale_real(&u1, tau1),
        w2: scale_real(&u2, tau2),
        u1,
        u2,
        tau1,
        tau2,
    })
}

/// Derivative of the optimal value with respect to `Γ`:
/// `−2ps·λ₂·Tr(H_SD W₁) − λ₂σD² + λ₃σD² / (2η·ps·‖h_RD‖²(1 − ρ))`.
pub fn gamma_gradient(
    dsr: &DualSolveResult,
    rec: &RecoveredBeamformers,
    eff: &EffectiveChannels,
    params: &SystemParams,
) -> f64 {
    let d = &dsr.duals;
    let tr = eff.h_sd.quad_form(&rec.w1);
    -2.0 * params.ps * d.lambda2 * tr - d.lambda2 * params.sigma_d2
        + d.lambda3 * params.sigma_d2 / (2.0 * params.eta * params.ps * eff.h_rd_gain * (1.0 - dsr.rho_star))
}

/// Outcome of the one-dimensional search over `Γ`.
#[derive(Debug, Clone)]
pub struct GammaSearch {
    pub gamma_split: f64,
    pub dual: DualSolveResult,
    pub recovered: RecoveredBeamformers,
    pub gradient: f64,
    /// The search never left one end of its initial bracket.
    pub boundary: bool,
    pub iterations: usize,
}

/// Bracket of `Γ` values where the relaxed problem can be feasible at all:
/// the direct link cannot exceed full-power MRT and the relayed copy cannot
/// exceed full harvesting on the strongest eigenmode.
fn gamma_bracket(eff: &EffectiveChannels, params: &SystemParams) -> (f64, f64) {
    let gamma = gamma_threshold(params);
    let direct_max = 2.0 * params.ps * eff.h_sd.trace() / params.sigma_d2;
    let relay_max =
        2.0 * params.eta * params.ps * eff.h_rd_gain * max_eigenvalue_hermitian(&eff.h_bar) / params.sigma_d2;
    let lo = (gamma - relay_max).max(0.0);
    let hi = direct_max.min(gamma * (1.0 - 1e-6));
    (lo, hi)
}

fn evaluate_gamma(
    t: f64,
    gamma_split: f64,
    eff: &EffectiveChannels,
    params: &SystemParams,
) -> Result<(DualSolveResult, RecoveredBeamformers, f64)> {
    let run = |g: f64| -> Result<_> {
        let dsr = solve_dual_p25(t, g, eff, params)?;
        let rec = recover_beamformers(&dsr, t, eff, params)?;
        let grad = gamma_gradient(&dsr, &rec, eff, params);
        Ok((dsr, rec, grad))
    };
    match run(gamma_split) {
        Err(SolveError::Degenerate(_)) => {
            let nudged = gamma_split + 1e-9 * gamma_threshold(params);
            run(nudged.min(gamma_threshold(params) * (1.0 - 1e-6)))
        }
        other => other,
    }
}

/// Bisection on the sign of [`gamma_gradient`] until the bracket is narrower
/// than `delta`. `hint` is a `Γ` at which the relaxed problem is known to be
/// feasible; infeasible midpoints move the bracket toward it. Returns the
/// evaluated `Γ` with the largest dual value.
pub fn bisect_gamma(
    t: f64,
    eff: &EffectiveChannels,
    params: &SystemParams,
    delta: f64,
    hint: Option<f64>,
) -> Result<GammaSearch> {
    let (lo0, hi0) = gamma_bracket(eff, params);
    if lo0 > hi0 {
        return Err(SolveError::Infeasible("no split of the rate target between the links is feasible".into()));
    }
    let hint = hint.map(|h| h.clamp(lo0, hi0));
    let (mut lo, mut hi) = (lo0, hi0);
    let mut best: Option<(f64, DualSolveResult, RecoveredBeamformers, f64)> = None;
    let mut iterations = 0;
    let mut last_err = None;
    let delta = delta.max(f64::EPSILON * hi0.max(1.0));
    while hi - lo > delta {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        match evaluate_gamma(t, mid, eff, params) {
            Ok((dsr, rec, grad)) => {
                if grad >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if best.as_ref().map_or(true, |b| dsr.d_star > b.1.d_star) {
                    best = Some((mid, dsr, rec, grad));
                }
            }
            Err(e) => {
                match hint {
                    Some(h) if h < mid => hi = mid,
                    Some(_) => lo = mid,
                    None => {
                        return Err(e);
                    }
                }
                last_err = Some(e);
            }
        }
    }
    if best.is_none() {
        let g = hint.unwrap_or(0.5 * (lo + hi));
        match evaluate_gamma(t, g, eff, params) {
            Ok((dsr, rec, grad)) => best = Some((g, dsr, rec, grad)),
            Err(e) => return Err(last_err.unwrap_or(e)),
        }
    }
    let (gamma_split, dual, recovered, gradient) = best.expect("set above");
    let boundary = lo == lo0 || hi == hi0;
    Ok(GammaSearch { gamma_split, dual, recovered, gradient, boundary, iterations })
}

/// Result of a Dinkelbach run with its ratio trace.
#[derive(Debug, Clone)]
pub struct DinkelbachOutcome {
    pub solution: TxSolution,
    /// `t` at the start of each iteration followed by the final value.
    pub t_trace: Vec<f64>,
    /// Normalized `F(t)` per iteration.
    pub f_trace: Vec<f64>,
    pub iterations: usize,
}

/// SINR of `R` after SIC, which is the Dinkelbach ratio.
pub fn ratio(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams) -> f64 {
    sinr_r_pair(ch, sol, params).1
}

/// `Γ` at which `sol` is feasible for the relaxed problem: the middle of
/// `[γ' − γ_relayed, γ_direct]` clipped to the search interval.
pub(crate) fn feasible_split(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams) -> f64 {
    let gamma = gamma_threshold(params);
    let lo = (gamma - sinr_d_phase2(ch, sol, params)).max(0.0);
    let hi = sinr_d_phase1(ch, sol, params).min(gamma * (1.0 - 1e-6));
    (0.5 * (lo + hi)).clamp(0.0, gamma * (1.0 - 1e-6))
}

/// Accepts a candidate start or iterate when it meets every constraint.
pub(crate) const ACCEPT_TOL: f64 = 1e-9;

pub(crate) fn unit_filter(w_r: &[C64]) -> Result<Vec<C64>> {
    normalize(w_r).map_err(|_| SolveError::InvalidParams("receive filter is zero".into()))
}

/// Closed form with no rate floor for `D`: all power on `w1` along `direction`
/// and no power splitting.
pub(crate) fn unconstrained_solution(ch: &ChannelRealization, w_r: &[C64], direction: Vec<C64>) -> Result<TxSolution> {
    let m = ch.h_sd.len();
    TxSolution::new(ch, direction, vec![C64::new(0.0, 0.0); m], 1.0, w_r.to_vec())
}

/// Optimal transmit design by Dinkelbach iteration; see
/// [`dinkelbach_optimal_from`].
pub fn dinkelbach_optimal(ch: &ChannelRealization, w_r: &[C64], params: &SystemParams, eps: f64) -> Result<TxSolution> {
    dinkelbach_optimal_from(ch, w_r, params, eps, None).map(|o| o.solution)
}

/// Optimal transmit design starting from `start` when it is feasible for
/// `w_r`, otherwise from a certified feasible point with maximal power on `w1`
/// along `H_SR w_r`.
///
/// Each iteration solves the `Γ` search at the current `t`, re-optimizes the
/// power split along the recovered directions, and moves `t` to the best ratio
/// seen. It stops once `t` changes by at most `eps·max(1, t)`.
pub fn dinkelbach_optimal_from(
    ch: &ChannelRealization,
    w_r: &[C64],
    params: &SystemParams,
    eps: f64,
    start: Option<&TxSolution>,
) -> Result<DinkelbachOutcome> {
    params.validate()?;
    ch.validate(params)?;
    let w_r = unit_filter(w_r)?;
    let gamma = gamma_threshold(params);
    let direction = matched_direction(ch, &w_r, None);
    if gamma == 0.0 {
        let solution = unconstrained_solution(ch, &w_r, direction)?;
        let t = ratio(ch, &solution, params);
        return Ok(DinkelbachOutcome { solution, t_trace: vec![t], f_trace: vec![], iterations: 0 });
    }

    let mut best = initial_point(ch, &w_r, params, QosModel::Exact, &direction, start)?;
    let mut t = ratio(ch, &best, params);
    let eff = EffectiveChannels::new(ch, &w_r);
    let delta = 1e-4 * gamma;
    let mut t_trace = vec![t];
    let mut f_trace = Vec::new();

    for k in 0..MAX_DINKELBACH {
        let search = bisect_gamma(t.max(1e-12), &eff, params, delta, Some(feasible_split(ch, &best, params)))?;
        let rho = search.dual.rho_star;
        f_trace.push(search.dual.d_star / relay_noise(rho, params));
        let rec = &search.recovered;
        if let Some(cand) = best_power_split(ch, &rec.u1, &rec.u2, rho, &w_r, params, QosModel::Exact) {
            if audit(ch, &cand, params, ACCEPT_TOL).all_ok() && ratio(ch, &cand, params) > ratio(ch, &best, params) {
                best = cand;
            }
        }
        let t_next = ratio(ch, &best, params);
        t_trace.push(t_next);
        if (t_next - t).abs() <= eps * t.max(1.0) {
            return Ok(DinkelbachOutcome { solution: best, t_trace, f_trace, iterations: k + 1 });
        }
        t = t_next;
    }
    Err(SolveError::NotConverged { iterations: MAX_DINKELBACH, trace: t_trace })
}

/// Feasible start for a transmit design: `start` re-targeted to `w_r` when it
/// still meets the constraints of `model`, otherwise the certified point with
/// maximal power on `direction`.
pub(crate) fn initial_point(
    ch: &ChannelRealization,
    w_r: &[C64],
    params: &SystemParams,
    model: QosModel,
    direction: &[C64],
    start: Option<&TxSolution>,
) -> Result<TxSolution> {
    let gamma = gamma_threshold(params);
    let meets = |s: &TxSolution| {
        let rep = audit(ch, s, params, ACCEPT_TOL);
        rep.sic_ok
            && rep.power_ok
            && crate::feasibility::qos_sinr(ch, s, params, model) >= gamma - ACCEPT_TOL * gamma.max(1.0)
            && s.rho > 0.0
            && s.rho < 1.0
    };
    if let Some(s) = start {
        let s = TxSolution::new(ch, s.w1.clone(), s.w2.clone(), s.rho, w_r.to_vec())?;
        if meets(&s) {
            return Ok(s);
        }
    }
    let fp = transmit_feasible(ch, w_r, params, model)
        .ok_or_else(|| SolveError::Infeasible("rate floor of D cannot be met with this receive filter".into()))?;
    best_power_split(ch, direction, &fp.w2, fp.rho, w_r, params, model)
        .filter(|s| meets(s))
        .ok_or_else(|| SolveError::Internal("certified feasible point failed re-evaluation".into()))
}

/// `‖w1‖² + ‖w2‖²` of recovered beamformers.
pub fn recovered_power(rec: &RecoveredBeamformers) -> f64 {
    norm_sqr(&rec.w1) + norm_sqr(&rec.w2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alternating::init_receiver;
    use crate::model::fig2_channel;

    #[test]
    fn rho_star_examples() {
        let (r, v) = rho_star(1.0, 1.0).unwrap();
        assert_eq!((r, v), (0.5, 4.0));
        let (r, v) = rho_star(1.0, 4.0).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-15 && (v - 9.0).abs() < 1e-15);
        assert!(rho_star(0.0, 1.0).is_err());
        assert!(rho_star(1.0, -1.0).is_err());
    }

    #[test]
    fn a_reduces_with_single_multiplier() {
        let ch = fig2_channel();
        let p = SystemParams::default().with_rd_min(2.0);
        let eff = EffectiveChannels::new(&ch, &init_receiver(&ch).unwrap());
        let d = DualPoint { lambda1: 0.0, lambda2: 0.0, lambda3: 0.0, lambda4: 1.0 };
        let a = build_a(&d, 3.0, &eff, &p);
        let expect = eff.h_tilde.scaled(2.0 * p.ps).minus(&HermitianMatrix::identity(2));
        assert!(a.minus(&expect).frobenius_norm() < 1e-12);
    }

    #[test]
    fn fig2_optimal_design_is_feasible() {
        let ch = fig2_channel();
        let p = SystemParams::default().with_rd_min(1.0);
        let w_r = init_receiver(&ch).unwrap();
        let out = dinkelbach_optimal_from(&ch, &w_r, &p, DEFAULT_EPS, None).unwrap();
        assert!(audit(&ch, &out.solution, &p, 1e-6).all_ok());
        assert!(out.t_trace.windows(2).all(|w| w[1] >= w[0]));
    }
}
