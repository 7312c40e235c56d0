//! Zero-forcing transmit design for a fixed receive filter.
//!
//! `w1` is confined to the null space of `h_SDᴴ`, so `D` sees no phase-one
//! interference and the direct link no longer needs its own share of the
//! rate target. Scaling the phase-one SINR by `1 − ρ` turns the combined rate
//! floor into a single constraint linear in `(W₁, W₂)` over `1/(1 − ρ)`:
//!
//! ```text
//! max  2ps·Tr(H̃'W̃₁) − t(σR² + σ̃R²/ρ)
//! s.t. 2ps·Tr(H̃W₂) ≥ γ'(2ps·Tr(H̃'W̃₁) + σR² + σ̃R²/ρ)                  (λ₁)
//!      2ps·Tr(H_SD W₂) + 2η·ps·‖h_RD‖²·Tr(H̄'W̃₁ + H̄W₂) ≥ γ'σD²/(1 − ρ)   (λ₂)
//!      Tr(W̃₁ + W₂) ≤ 1                                                  (λ₃)
//! ```
//!
//! with `W₁ = ṼW̃₁Ṽᴴ` and primed matrices compressed to the null space. The
//! scaled rate floor is stricter than the exact one, so every solution also
//! meets the exact condition.

use crate::error::{Result, SolveError};
use crate::feasibility::{best_power_split, matched_direction, QosModel};
use crate::model::{gamma_threshold, ChannelRealization, SystemParams};
use crate::numerics::{
    eigh, max_eigenvalue_hermitian, null_space_of_row, scale_real, solve_lmi, AffineHermitian, CMatrix,
    HermitianMatrix, LmiProgram, NumericsError, C64,
};
use crate::optimal_tx::{
    dual_null_vector, epigraph_block, initial_point, ratio, relay_noise, rho_star, unconstrained_solution, unit_filter,
    DinkelbachOutcome, EffectiveChannels, RecoveredBeamformers, ACCEPT_TOL, DUAL_TOL, MAX_DINKELBACH,
    MULTIPLIER_FLOOR, MULTIPLIER_MIN,
};
use crate::rates::{audit, TxSolution};

/// Null-space basis of `h_SDᴴ` and the channel matrices compressed to it.
#[derive(Debug, Clone)]
pub struct ZfLifted {
    /// `M × (M−1)` orthonormal basis `Ṽ` with `h_SDᴴ Ṽ = 0`.
    pub v_tilde: CMatrix,
    /// `Ṽᴴ H̃ Ṽ`.
    pub h_tilde_p: HermitianMatrix,
    /// `Ṽᴴ H̄ Ṽ`.
    pub h_bar_p: HermitianMatrix,
}

impl ZfLifted {
    pub fn new(ch: &ChannelRealization, eff: &EffectiveChannels) -> Result<Self> {
        let v_tilde = null_space_of_row(&ch.h_sd).map_err(|e| match e {
            NumericsError::ZeroVector => SolveError::Degenerate("direct channel is zero".into()),
            other => SolveError::InvalidParams(format!("zero forcing needs M ≥ 2: {other}")),
        })?;
        Ok(Self {
            h_tilde_p: eff.h_tilde.congruence(&v_tilde),
            h_bar_p: eff.h_bar.congruence(&v_tilde),
            v_tilde,
        })
    }

    /// Lifts a null-space coordinate vector back to the antenna domain.
    pub fn lift(&self, w_tilde: &[C64]) -> Vec<C64> {
        self.v_tilde.mul_vec(w_tilde)
    }
}

/// Multipliers of the SIC, rate-floor and power constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZfDualPoint {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

#[derive(Debug, Clone)]
pub struct ZfDualSolveResult {
    pub duals: ZfDualPoint,
    pub d_star: f64,
    pub b: f64,
    pub c: f64,
    pub rho_star: f64,
    pub t: f64,
    /// `Ã*`, of dimension `M − 1`.
    pub a_star: HermitianMatrix,
    pub b_star: HermitianMatrix,
    pub trace: Vec<f64>,
}

fn relayed_gain(eff: &EffectiveChannels, params: &SystemParams) -> f64 {
    params.eta * eff.h_rd_gain
}

/// `Ã = 2ps(1 − λ₁γ')H̃' + 2ps·λ₂·η‖h_RD‖²·H̄' − λ₃I`.
pub fn build_a_tilde(d: &ZfDualPoint, eff: &EffectiveChannels, zf: &ZfLifted, params: &SystemParams) -> HermitianMatrix {
    let ps2 = 2.0 * params.ps;
    let id = HermitianMatrix::identity(zf.h_tilde_p.dim());
    HermitianMatrix::combination(&[
        (ps2 * (1.0 - d.lambda1 * gamma_threshold(params)), &zf.h_tilde_p),
        (ps2 * d.lambda2 * relayed_gain(eff, params), &zf.h_bar_p),
        (-d.lambda3, &id),
    ])
}

/// `B̃ = 2ps·λ₁H̃ + 2ps·λ₂(H_SD + η‖h_RD‖²·H̄) − λ₃I`.
pub fn build_b_tilde(d: &ZfDualPoint, eff: &EffectiveChannels, params: &SystemParams) -> HermitianMatrix {
    let ps2 = 2.0 * params.ps;
    let id = HermitianMatrix::identity(eff.m());
    HermitianMatrix::combination(&[
        (ps2 * d.lambda1, &eff.h_tilde),
        (ps2 * d.lambda2, &eff.h_sd),
        (ps2 * d.lambda2 * relayed_gain(eff, params), &eff.h_bar),
        (-d.lambda3, &id),
    ])
}

/// Dual function value `−(b + c + 2√(bc)) − tσR² − λ₁γ'σR² + λ₃` with
/// `b = (t + λ₁γ')σ̃R²` and `c = λ₂γ'σD²`.
pub fn dual_objective_p42(d: &ZfDualPoint, t: f64, params: &SystemParams) -> f64 {
    let gamma = gamma_threshold(params);
    let b = (t + d.lambda1 * gamma) * params.sigma_r2_tilde;
    let c = d.lambda2 * gamma * params.sigma_d2;
    -(b + c + 2.0 * (b * c).max(0.0).sqrt()) - t * params.sigma_r2 - d.lambda1 * gamma * params.sigma_r2 + d.lambda3
}

/// Solves the zero-forcing dual for fixed `t` on `(λ₁, λ₂, λ₃, s)`.
pub fn solve_dual_p42(
    t: f64,
    eff: &EffectiveChannels,
    zf: &ZfLifted,
    params: &SystemParams,
) -> Result<ZfDualSolveResult> {
    let gamma = gamma_threshold(params);
    if !(t > 0.0 && t.is_finite()) {
        return Err(SolveError::Domain(format!("ratio t must be positive, got {t}")));
    }
    if !(gamma > 0.0) {
        return Err(SolveError::Domain("zero-forcing dual needs a positive rate floor".into()));
    }
    let (st, sr, sd) = (params.sigma_r2_tilde, params.sigma_r2, params.sigma_d2);
    let ps2 = 2.0 * params.ps;
    let g = relayed_gain(eff, params);
    let mp = zf.h_tilde_p.dim();
    let m = eff.m();

    let block_a = AffineHermitian::new(
        zf.h_tilde_p.scaled(ps2),
        vec![
            zf.h_tilde_p.scaled(-ps2 * gamma),
            zf.h_bar_p.scaled(ps2 * g),
            HermitianMatrix::identity(mp).scaled(-1.0),
            HermitianMatrix::zeros(mp),
        ],
    )?;
    let block_b = AffineHermitian::new(
        HermitianMatrix::zeros(m),
        vec![
            eff.h_tilde.scaled(ps2),
            HermitianMatrix::combination(&[(ps2, &eff.h_sd), (ps2 * g, &eff.h_bar)]),
            HermitianMatrix::identity(m).scaled(-1.0),
            HermitianMatrix::zeros(m),
        ],
    )?;
    let epi = epigraph_block((t * st, &[gamma * st, 0.0, 0.0, 0.0]), (0.0, &[0.0, gamma * sd, 0.0, 0.0]), 3, 4);
    let prog = LmiProgram {
        objective: vec![-gamma * (st + sr), -gamma * sd, 1.0, -2.0],
        offset: -t * (st + sr),
        blocks: vec![block_a, block_b, epi],
        lower_bounds: vec![Some(0.0), Some(MULTIPLIER_FLOOR), Some(0.0), None],
    };

    let mut start = ZfDualPoint { lambda1: 0.1, lambda2: 1.0, lambda3: 0.0 };
    let top = max_eigenvalue_hermitian(&build_a_tilde(&start, eff, zf, params))
        .max(max_eigenvalue_hermitian(&build_b_tilde(&start, eff, params)));
    start.lambda3 = top.max(0.0) * 1.1 + 1.0;
    let x0 = [start.lambda1, start.lambda2, start.lambda3, 0.0];
    let sol = solve_lmi(&prog, &x0, DUAL_TOL).map_err(|e| match e {
        NumericsError::Unbounded => SolveError::Infeasible("zero-forcing dual unbounded, primal infeasible".into()),
        NumericsError::NotConverged { steps, best, .. } => SolveError::NotConverged { iterations: steps, trace: best },
        other => SolveError::Numerics(other),
    })?;

    let duals = ZfDualPoint { lambda1: sol.x[0], lambda2: sol.x[1], lambda3: sol.x[2] };
    if !(duals.lambda2 > MULTIPLIER_MIN) {
        return Err(SolveError::Internal(format!(
            "rate-floor multiplier {:.3e} is not strictly positive",
            duals.lambda2
        )));
    }
    let b = (t + duals.lambda1 * gamma) * st;
    let c = duals.lambda2 * gamma * sd;
    let (rho, _) = rho_star(b, c)?;
    Ok(ZfDualSolveResult {
        duals,
        d_star: dual_objective_p42(&duals, t, params),
        b,
        c,
        rho_star: rho,
        t,
        a_star: build_a_tilde(&duals, eff, zf, params),
        b_star: build_b_tilde(&duals, eff, params),
        trace: sol.trace,
    })
}

/// Beamformers from the dual null spaces. `u1` is returned lifted to the
/// antenna domain, so `w1 = τ₁u₁` is orthogonal to `h_SD`.
pub fn recover_zf_beamformers(
    dsr: &ZfDualSolveResult,
    t: f64,
    eff: &EffectiveChannels,
    zf: &ZfLifted,
    params: &SystemParams,
) -> Result<RecoveredBeamformers> {
    let gamma = gamma_threshold(params);
    let noise = t * relay_noise(dsr.rho_star, params);
    let num1 = dsr.d_star + noise;
    let u2 = dual_null_vector(&dsr.b_star)?;
    let (u1_tilde, tau1_sq) = if num1 <= 1e-9 * noise {
        let e = eigh(&dsr.a_star);
        (e.vector(e.values.len() - 1), 0.0)
    } else {
        let u = dual_null_vector(&dsr.a_star)?;
        let gain = zf.h_tilde_p.quad_form(&u);
        if !(gain > 0.0) {
            return Err(SolveError::Degenerate("null vector of the compressed dual is orthogonal to the relay channel".into()));
        }
        (u.clone(), num1 / (2.0 * params.ps * gain))
    };
    let g = relayed_gain(eff, params);
    let need = gamma * params.sigma_d2 / (2.0 * params.ps * (1.0 - dsr.rho_star))
        - tau1_sq * g * zf.h_bar_p.quad_form(&u1_tilde);
    let per_unit = eff.h_sd.quad_form(&u2) + g * eff.h_bar.quad_form(&u2);
    let tau2_sq = (need / per_unit).max(0.0);
    let u1 = zf.lift(&u1_tilde);
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

/// Zero-forcing transmit design by Dinkelbach iteration; see
/// [`dinkelbach_zf_from`].
pub fn dinkelbach_zf(ch: &ChannelRealization, w_r: &[C64], params: &SystemParams, eps: f64) -> Result<TxSolution> {
    dinkelbach_zf_from(ch, w_r, params, eps, None).map(|o| o.solution)
}

/// Zero-forcing design starting from `start` when it is feasible for `w_r`
/// and orthogonal to `h_SD`, otherwise from a certified feasible point with
/// maximal power on the compressed matched direction.
pub fn dinkelbach_zf_from(
    ch: &ChannelRealization,
    w_r: &[C64],
    params: &SystemParams,
    eps: f64,
    start: Option<&TxSolution>,
) -> Result<DinkelbachOutcome> {
    params.validate()?;
    ch.validate(params)?;
    let w_r = unit_filter(w_r)?;
    let eff = EffectiveChannels::new(ch, &w_r);
    let zf = ZfLifted::new(ch, &eff)?;
    let direction = matched_direction(ch, &w_r, Some(&zf.v_tilde));
    if gamma_threshold(params) == 0.0 {
        let solution = unconstrained_solution(ch, &w_r, direction)?;
        let t = ratio(ch, &solution, params);
        return Ok(DinkelbachOutcome { solution, t_trace: vec![t], f_trace: vec![], iterations: 0 });
    }

    let hsd_norm = crate::numerics::norm(&ch.h_sd);
    let start = start.filter(|s| crate::numerics::dot(&ch.h_sd, &s.w1).norm() <= 1e-10 * hsd_norm);
    let mut best = initial_point(ch, &w_r, params, QosModel::ZfRelaxed, &direction, start)?;
    let mut t = ratio(ch, &best, params);
    let mut t_trace = vec![t];
    let mut f_trace = Vec::new();

    for k in 0..MAX_DINKELBACH {
        let tt = t.max(1e-12);
        let dsr = solve_dual_p42(tt, &eff, &zf, params)?;
        f_trace.push(dsr.d_star / relay_noise(dsr.rho_star, params));
        let rec = recover_zf_beamformers(&dsr, tt, &eff, &zf, params)?;
        let cand = best_power_split(ch, &rec.u1, &rec.u2, dsr.rho_star, &w_r, params, QosModel::ZfRelaxed);
        if let Some(cand) = cand {
            let ok = audit(ch, &cand, params, ACCEPT_TOL).all_ok()
                && crate::feasibility::qos_sinr(ch, &cand, params, QosModel::ZfRelaxed) >= gamma_threshold(params);
            if ok && ratio(ch, &cand, params) > ratio(ch, &best, params) {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alternating::init_receiver;
    use crate::model::fig2_channel;
    use crate::numerics::{dot, norm};
    use crate::optimal_tx::{dinkelbach_optimal, DEFAULT_EPS};
    use crate::rates::rate_r;

    #[test]
    fn lifted_basis_is_orthonormal_and_orthogonal() {
        let ch = fig2_channel();
        let eff = EffectiveChannels::new(&ch, &init_receiver(&ch).unwrap());
        let zf = ZfLifted::new(&ch, &eff).unwrap();
        let g = zf.v_tilde.adjoint().matmul(&zf.v_tilde);
        assert!(g.minus(&CMatrix::identity(1)).frobenius_norm() < 1e-10);
        assert!(norm(&zf.v_tilde.adjoint_mul_vec(&ch.h_sd)) < 1e-10);
    }

    #[test]
    fn objective_matches_expansion() {
        let p = SystemParams::default();
        let d = ZfDualPoint { lambda1: 0.3, lambda2: 2.0, lambda3: 5.0 };
        let t = 4.0;
        let gamma = gamma_threshold(&p);
        let b = (t + 0.3 * gamma) * p.sigma_r2_tilde;
        let c = 2.0 * gamma * p.sigma_d2;
        let expect = -(b + c + 2.0 * (b * c).sqrt() + t * p.sigma_r2 + 0.3 * gamma * p.sigma_r2) + 5.0;
        assert!((dual_objective_p42(&d, t, &p) - expect).abs() < 1e-10);
    }

    #[test]
    fn fig2_zf_design_is_feasible_and_dominated() {
        let ch = fig2_channel();
        let w_r = init_receiver(&ch).unwrap();
        for rd in [0.5, 1.0, 1.5] {
            let p = SystemParams::default().with_rd_min(rd);
            let out = dinkelbach_zf_from(&ch, &w_r, &p, DEFAULT_EPS, None).unwrap();
            let s = &out.solution;
            assert!(audit(&ch, s, &p, 1e-6).all_ok());
            assert!(dot(&ch.h_sd, &s.w1).norm() <= 1e-8);
            assert!(out.t_trace.windows(2).all(|w| w[1] >= w[0]));
            let opt = dinkelbach_optimal(&ch, &w_r, &p, DEFAULT_EPS).unwrap();
            assert!(rate_r(&ch, s, &p) <= rate_r(&ch, &opt, &p) + 1e-6);
        }
    }
}
