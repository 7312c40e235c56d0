//! SINR, rate and harvested-power evaluation, and constraint auditing.

use crate::error::{Result, SolveError};
use crate::model::{gamma_threshold, ChannelRealization, SystemParams};
use crate::numerics::{dot, norm, norm_sqr, scale_real, C64};

/// A complete transceiver configuration.
///
/// `w_d` is always the matched relay beamformer `h_RD/‖h_RD‖` and is computed
/// from the channel, never set independently.
#[derive(Debug, Clone, PartialEq)]
pub struct TxSolution {
    pub w1: Vec<C64>,
    pub w2: Vec<C64>,
    pub rho: f64,
    pub w_r: Vec<C64>,
    w_d: Vec<C64>,
}

impl TxSolution {
    pub fn new(ch: &ChannelRealization, w1: Vec<C64>, w2: Vec<C64>, rho: f64, w_r: Vec<C64>) -> Result<Self> {
        let m = ch.h_sd.len();
        if w1.len() != m || w2.len() != m || w_r.len() != ch.h_rd.len() {
            return Err(SolveError::InvalidParams(format!(
                "beamformer lengths ({}, {}, {}) do not match M={m}, N={}",
                w1.len(),
                w2.len(),
                w_r.len(),
                ch.h_rd.len()
            )));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(SolveError::InvalidParams(format!("power-splitting ratio {rho} outside [0, 1]")));
        }
        let g = norm(&ch.h_rd);
        let w_d = if g > 0.0 { scale_real(&ch.h_rd, 1.0 / g) } else { vec![C64::new(0.0, 0.0); ch.h_rd.len()] };
        Ok(Self { w1, w2, rho, w_r, w_d })
    }

    pub fn w_d(&self) -> &[C64] {
        &self.w_d
    }

    pub fn power(&self) -> f64 {
        norm_sqr(&self.w1) + norm_sqr(&self.w2)
    }
}

/// SINR of `D`'s message at `D` in phase one.
pub fn sinr_d_phase1(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams) -> f64 {
    let sig = 2.0 * params.ps * dot(&ch.h_sd, &sol.w2).norm_sqr();
    let intf = 2.0 * params.ps * dot(&ch.h_sd, &sol.w1).norm_sqr();
    sig / (intf + params.sigma_d2)
}

/// `(γ_{D→R}, γ_R)`: SINR at the relay for `D`'s message with `R`'s message
/// as interference, and SNR for `R`'s own message after SIC.
pub fn sinr_r_pair(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams) -> (f64, f64) {
    let rho = sol.rho;
    let g1 = dot(&sol.w_r, &ch.h_sr.adjoint_mul_vec(&sol.w1)).norm_sqr();
    let g2 = dot(&sol.w_r, &ch.h_sr.adjoint_mul_vec(&sol.w2)).norm_sqr();
    let noise = (rho * params.sigma_r2 + params.sigma_r2_tilde) * norm_sqr(&sol.w_r);
    let two_rho_ps = 2.0 * rho * params.ps;
    let gamma_d_to_r = two_rho_ps * g2 / (two_rho_ps * g1 + noise);
    let gamma_r = two_rho_ps * g1 / noise;
    (gamma_d_to_r, gamma_r)
}

/// Relay transmit power funded by the harvested energy.
pub fn relay_power(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams) -> f64 {
    let received = norm_sqr(&ch.h_sr.adjoint_mul_vec(&sol.w1)) + norm_sqr(&ch.h_sr.adjoint_mul_vec(&sol.w2));
    2.0 * params.eta * params.ps * (1.0 - sol.rho) * received
}

/// SNR at `D` of the relayed copy in phase two.
pub fn sinr_d_phase2(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams) -> f64 {
    relay_power(ch, sol, params) * ch.h_rd_gain() / params.sigma_d2
}

/// Maximal-ratio combination of both phases at `D`.
pub fn combined_sinr_d(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams) -> f64 {
    sinr_d_phase1(ch, sol, params) + sinr_d_phase2(ch, sol, params)
}

pub fn rate_r(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams) -> f64 {
    0.5 * sinr_r_pair(ch, sol, params).1.ln_1p() / std::f64::consts::LN_2
}

pub fn rate_d(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams) -> f64 {
    0.5 * combined_sinr_d(ch, sol, params).ln_1p() / std::f64::consts::LN_2
}

/// Constraint values and normalized slacks of a candidate solution.
///
/// SINR slacks are `(value − γ') / max(1, γ')`; the power slack is
/// `1 − ‖w1‖² − ‖w2‖²`. Each flag is `slack ≥ −tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintReport {
    pub sic_sinr: f64,
    pub sic_slack: f64,
    pub sic_ok: bool,
    pub d_combined_sinr: f64,
    pub d_slack: f64,
    pub d_ok: bool,
    pub power_used: f64,
    pub power_slack: f64,
    pub power_ok: bool,
}

impl ConstraintReport {
    pub fn all_ok(&self) -> bool {
        self.sic_ok && self.d_ok && self.power_ok
    }

    pub fn min_slack(&self) -> f64 {
        self.sic_slack.min(self.d_slack).min(self.power_slack)
    }
}

pub fn audit(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams, tol: f64) -> ConstraintReport {
    let gamma = gamma_threshold(params);
    let norm_by = gamma.max(1.0);
    let sic_sinr = sinr_r_pair(ch, sol, params).0;
    let d_combined_sinr = combined_sinr_d(ch, sol, params);
    let power_used = sol.power();
    let sic_slack = (sic_sinr - gamma) / norm_by;
    let d_slack = (d_combined_sinr - gamma) / norm_by;
    let power_slack = 1.0 - power_used;
    ConstraintReport {
        sic_sinr,
        sic_slack,
        sic_ok: sic_slack >= -tol,
        d_combined_sinr,
        d_slack,
        d_ok: d_slack >= -tol,
        power_used,
        power_slack,
        power_ok: power_slack >= -tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fig2_channel;
    use crate::numerics::CMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn toy() -> (ChannelRealization, SystemParams) {
        let ch = ChannelRealization {
            h_sr: CMatrix::identity(2),
            h_sd: vec![c(1.0, 0.0), c(0.0, 0.0)],
            h_rd: vec![c(1.0, 0.0), c(0.0, 0.0)],
        };
        let p = SystemParams { ps: 0.5, sigma_d2: 1.0, n: 2, ..Default::default() };
        (ch, p)
    }

    #[test]
    fn phase1_sinr_examples() {
        let (ch, p) = toy();
        let wr = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let s = |w1: Vec<C64>, w2: Vec<C64>| TxSolution::new(&ch, w1, w2, 0.5, wr.clone()).unwrap();
        assert_eq!(sinr_d_phase1(&ch, &s(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]), &p), 1.0);
        assert_eq!(sinr_d_phase1(&ch, &s(vec![c(0.3, 0.1), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]), &p), 0.0);
        let r = 0.5f64.sqrt();
        let v = sinr_d_phase1(&ch, &s(vec![c(r, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]), &p);
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn relay_power_examples() {
        let (ch, p) = toy();
        let p = SystemParams { eta: 1.0, ..p };
        let w1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let w2 = vec![c(0.0, 0.0), c(2f64.sqrt(), 0.0)];
        let wr = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let sol = TxSolution::new(&ch, w1.clone(), w2.clone(), 0.0, wr.clone()).unwrap();
        assert!((relay_power(&ch, &sol, &p) - 3.0).abs() < 1e-14);
        let full = TxSolution::new(&ch, w1, w2, 1.0, wr).unwrap();
        assert_eq!(relay_power(&ch, &full, &p), 0.0);
        assert_eq!(sinr_d_phase2(&ch, &full, &p), 0.0);
    }

    #[test]
    fn zero_beamformers_give_zero_rates() {
        let ch = fig2_channel();
        let p = SystemParams::default();
        let z = vec![c(0.0, 0.0); 2];
        let sol = TxSolution::new(&ch, z.clone(), z, 0.5, vec![c(0.5, 0.0); 4]).unwrap();
        assert_eq!(rate_r(&ch, &sol, &p), 0.0);
        assert_eq!(rate_d(&ch, &sol, &p), 0.0);
    }

    #[test]
    fn relay_sinr_against_scalar_arithmetic() {
        let ch = fig2_channel();
        let p = SystemParams::default();
        let r = 0.5f64.sqrt();
        let w = vec![c(r, 0.0), c(0.0, 0.0)];
        // H_SRᴴ w is r·conj(first row of H_SR).
        let h1: Vec<C64> = ch.h_sr.row(0).iter().map(|v| v.conj() * r).collect();
        let h1n: f64 = h1.iter().map(|v| v.norm_sqr()).sum();
        let wr: Vec<C64> = h1.iter().map(|v| v / h1n.sqrt()).collect();
        let sol = TxSolution::new(&ch, w.clone(), w, 0.5, wr).unwrap();
        let (g_dr, g_r) = sinr_r_pair(&ch, &sol, &p);
        // |w_rᴴ h1|² = ‖h1‖², noise = 0.5·1 + 1.
        let expect_r = 2.0 * 0.5 * 1000.0 * h1n / 1.5;
        let expect_dr = 2.0 * 0.5 * 1000.0 * h1n / (2.0 * 0.5 * 1000.0 * h1n + 1.5);
        assert!((g_r - expect_r).abs() <= 1e-12 * expect_r);
        assert!((g_dr - expect_dr).abs() <= 1e-12);
    }

    #[test]
    fn audit_flags() {
        let ch = fig2_channel();
        let p = SystemParams::default().with_rd_min(0.0);
        let w1 = vec![c(0.0, 0.0), c(0.0, 0.0)];
        let w2 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let sol = TxSolution::new(&ch, w1, w2, 0.5, vec![c(0.5, 0.0); 4]).unwrap();
        assert!(audit(&ch, &sol, &p, 1e-6).all_ok());

        let w = vec![c(1.1f64.sqrt(), 0.0), c(0.0, 0.0)];
        let heavy = TxSolution::new(&ch, w, vec![c(0.0, 0.0); 2], 0.5, vec![c(0.5, 0.0); 4]).unwrap();
        assert!(!audit(&ch, &heavy, &p, 1e-6).power_ok);
    }
}
