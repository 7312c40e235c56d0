//! Feasibility of the rate floor for `D`, feasible start points, and exact
//! power allocation along fixed beam directions.
//!
//! Putting power into `w1` never helps feasibility (it only adds interference
//! at `R` and `D`, and `w2` harvests the same energy), so the question reduces
//! to whether a single `w2` and a split `ρ` meet both the SIC condition at `R`
//! and the rate floor at `D`. For fixed `ρ` both are quadratic forms
//! `w2ᴴ Pᵢ w2 ≥ 1`; the joint numerical range of two Hermitian forms is convex,
//! so a unit `w2` exists iff `min_μ λmax(μ P₁ + (1−μ) P₂) ≥ 1`.

use crate::model::{gamma_threshold, ChannelRealization, SystemParams};
use crate::numerics::{
    eigh, golden_section_min, max_eigenvalue_hermitian, norm, normalize, scale_real, CMatrix, HermitianMatrix, C64,
};
use crate::rates::{sinr_d_phase1, sinr_d_phase2, sinr_r_pair, TxSolution};

/// Which form of `D`'s rate constraint a transmit design enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QosModel {
    /// Both phases combined as received.
    Exact,
    /// Phase-one SINR scaled by `1 − ρ`, as used by the zero-forcing design.
    ZfRelaxed,
}

/// Combined SINR at `D` under the given constraint model.
pub fn qos_sinr(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams, model: QosModel) -> f64 {
    let direct = sinr_d_phase1(ch, sol, params);
    let relayed = sinr_d_phase2(ch, sol, params);
    match model {
        QosModel::Exact => direct + relayed,
        QosModel::ZfRelaxed => (1.0 - sol.rho) * direct + relayed,
    }
}

/// A point meeting both rate conditions with `w1 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    /// Unit-norm beamformer for `D`.
    pub w2: Vec<C64>,
    pub rho: f64,
    /// Receive filter the point was certified for.
    pub w_r: Vec<C64>,
    /// `min(w2ᴴP₁w2, w2ᴴP₂w2)`; at least one.
    pub margin: f64,
}

struct Forms {
    sic: HermitianMatrix,
    h_sd: HermitianMatrix,
    h_bar: HermitianMatrix,
    h_rd_gain: f64,
    model: QosModel,
}

impl Forms {
    fn new(ch: &ChannelRealization, sic: HermitianMatrix, model: QosModel) -> Self {
        Self {
            sic,
            h_sd: HermitianMatrix::outer(&ch.h_sd),
            h_bar: HermitianMatrix::symmetrize(ch.h_sr.matmul(&ch.h_sr.adjoint())),
            h_rd_gain: ch.h_rd_gain(),
            model,
        }
    }

    /// `(P₁, P₂)` normalized so each condition reads `w2ᴴ Pᵢ w2 ≥ 1`.
    fn pair(&self, rho: f64, params: &SystemParams, gamma: f64) -> (HermitianMatrix, HermitianMatrix) {
        let ps = params.ps;
        let p1 = self.sic.scaled(2.0 * rho * ps / (gamma * (rho * params.sigma_r2 + params.sigma_r2_tilde)));
        let direct = match self.model {
            QosModel::Exact => 2.0 * ps,
            QosModel::ZfRelaxed => 2.0 * ps * (1.0 - rho),
        };
        let relayed = 2.0 * params.eta * ps * (1.0 - rho) * self.h_rd_gain;
        let p2 = HermitianMatrix::combination(&[
            (direct / (params.sigma_d2 * gamma), &self.h_sd),
            (relayed / (params.sigma_d2 * gamma), &self.h_bar),
        ]);
        (p1, p2)
    }

    /// `(min_μ λmax(μP₁ + (1−μ)P₂), μ*)`.
    fn margin(&self, rho: f64, params: &SystemParams, gamma: f64) -> (f64, f64) {
        let (p1, p2) = self.pair(rho, params, gamma);
        let f = |mu: f64| max_eigenvalue_hermitian(&HermitianMatrix::combination(&[(mu, &p1), (1.0 - mu, &p2)]));
        let (mu, v) = golden_section_min(f, 0.0, 1.0, 60);
        // The golden search never evaluates the endpoints themselves.
        [(0.0, f(0.0)), (1.0, f(1.0))]
            .into_iter()
            .fold((v, mu), |best, (m, val)| if val < best.0 { (val, m) } else { best })
    }

    fn witness(&self, rho: f64, mu: f64, params: &SystemParams, gamma: f64) -> Option<(Vec<C64>, f64)> {
        let (p1, p2) = self.pair(rho, params, gamma);
        let score = |w: &[C64]| {
            let n2: f64 = w.iter().map(|v| v.norm_sqr()).sum();
            p1.quad_form(w).min(p2.quad_form(w)) / n2
        };
        let top = |m: f64| {
            let e = eigh(&HermitianMatrix::combination(&[(m, &p1), (1.0 - m, &p2)]));
            e.vector(e.values.len() - 1)
        };
        let mut best = top(mu);
        let mut best_score = score(&best);
        if best_score >= 1.0 {
            return Some((best, best_score));
        }
        // At a kink of λmax the boundary point mixes the top eigenvectors on
        // either side of μ*.
        for delta in [1e-2, 1e-3, 1e-4, 1e-6] {
            let va = top((mu - delta).max(0.0));
            let vb = top((mu + delta).min(1.0));
            for i in 0..=64 {
                let theta = std::f64::consts::FRAC_PI_2 * i as f64 / 64.0;
                for j in 0..64 {
                    let phi = std::f64::consts::TAU * j as f64 / 64.0;
                    let e = C64::from_polar(theta.sin(), phi);
                    let w: Vec<C64> = va.iter().zip(&vb).map(|(a, b)| a * theta.cos() + b * e).collect();
                    let s = score(&w);
                    if s > best_score {
                        best_score = s;
                        best = w;
                    }
                }
            }
            if best_score >= 1.0 {
                let w = normalize(&best).ok()?;
                return Some((w, best_score));
            }
        }
        None
    }

    /// Maximizes the margin over `ρ` and returns a certified point.
    fn search(&self, params: &SystemParams, gamma: f64) -> Option<(Vec<C64>, f64, f64)> {
        const GRID: usize = 40;
        let grid: Vec<(f64, f64, f64)> = (0..GRID)
            .map(|i| {
                let rho = (i as f64 + 0.5) / GRID as f64;
                let (m, mu) = self.margin(rho, params, gamma);
                (rho, m, mu)
            })
            .collect();
        let (i_best, _) = grid
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
        let lo = if i_best == 0 { 1e-6 } else { grid[i_best - 1].0 };
        let hi = if i_best + 1 == GRID { 1.0 - 1e-6 } else { grid[i_best + 1].0 };
        let (rho_ref, neg) = golden_section_min(|r| -self.margin(r, params, gamma).0, lo, hi, 50);
        let (rho, margin) = if -neg > grid[i_best].1 { (rho_ref, -neg) } else { (grid[i_best].0, grid[i_best].1) };
        if !(margin >= 1.0) {
            return None;
        }
        let (_, mu) = self.margin(rho, params, gamma);
        let (w2, score) = self.witness(rho, mu, params, gamma)?;
        Some((w2, rho, score))
    }
}

/// Feasibility of the rate floor for a fixed receive filter `w_r`.
///
/// Returns `None` when no `(w2, ρ)` satisfies both conditions. With a zero
/// rate floor every point is feasible and the returned point puts full power
/// on the strongest direction to `R` with `ρ = 1/2`.
pub fn transmit_feasible(
    ch: &ChannelRealization,
    w_r: &[C64],
    params: &SystemParams,
    model: QosModel,
) -> Option<FeasiblePoint> {
    let h_tilde = ch.h_sr.mul_vec(w_r);
    let forms = Forms::new(ch, HermitianMatrix::outer(&h_tilde), model);
    let gamma = gamma_threshold(params);
    if gamma == 0.0 {
        let w2 = normalize(&h_tilde).unwrap_or_else(|_| unit(ch.h_sd.len()));
        return Some(FeasiblePoint { w2, rho: 0.5, w_r: w_r.to_vec(), margin: f64::INFINITY });
    }
    let (w2, rho, margin) = forms.search(params, gamma)?;
    Some(FeasiblePoint { w2, rho, w_r: w_r.to_vec(), margin })
}

/// Feasibility of the rate floor when the receive filter is free as well.
///
/// The best filter for a given `w2` is matched to `H_SRᴴ w2`, which turns the
/// SIC form into `H_SR H_SRᴴ`; the certified point carries that filter.
pub fn relay_feasible(ch: &ChannelRealization, params: &SystemParams, model: QosModel) -> Option<FeasiblePoint> {
    let h_bar = HermitianMatrix::symmetrize(ch.h_sr.matmul(&ch.h_sr.adjoint()));
    let forms = Forms::new(ch, h_bar, model);
    let gamma = gamma_threshold(params);
    let (w2, rho, margin) = if gamma == 0.0 {
        let e = eigh(&forms.h_bar);
        (e.vector(e.values.len() - 1), 0.5, f64::INFINITY)
    } else {
        forms.search(params, gamma)?
    };
    let w_r = normalize(&ch.h_sr.adjoint_mul_vec(&w2)).ok()?;
    Some(FeasiblePoint { w2, rho, w_r, margin })
}

fn unit(m: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); m];
    v[0] = C64::new(1.0, 0.0);
    v
}

/// Largest `p₁ ∈ [0, 1]` such that `w1 = √p₁·u1`, `w2 = √(1−p₁)·u2` meets the
/// SIC condition and the rate floor of `model` at split `rho`, as a full
/// solution. `None` if even `p₁ = 0` fails.
///
/// Full power is optimal: every constraint improves with `‖w2‖`. The SIC
/// SINR decreases in `p₁`; the rate-floor SINR is convex in `p₁`, so its
/// feasible set below the SIC limit is an initial segment once the limit
/// itself fails.
pub fn best_power_split(
    ch: &ChannelRealization,
    u1: &[C64],
    u2: &[C64],
    rho: f64,
    w_r: &[C64],
    params: &SystemParams,
    model: QosModel,
) -> Option<TxSolution> {
    let gamma = gamma_threshold(params);
    let build = |p1: f64| {
        let p1 = p1.clamp(0.0, 1.0);
        TxSolution::new(ch, scale_real(u1, p1.sqrt()), scale_real(u2, (1.0 - p1).sqrt()), rho, w_r.to_vec())
            .expect("dimensions fixed by the channel")
    };
    let sic_ok = |p1: f64| sinr_r_pair(ch, &build(p1), params).0 >= gamma;
    let qos_ok = |p1: f64| qos_sinr(ch, &build(p1), params, model) >= gamma;
    let bisect = |ok: &dyn Fn(f64) -> bool, mut lo: f64, mut hi: f64| {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if norm(u1) == 0.0 {
        return (sic_ok(0.0) && qos_ok(0.0)).then(|| build(0.0));
    }
    if !sic_ok(0.0) {
        return None;
    }
    let p_sic = if sic_ok(1.0) { 1.0 } else { bisect(&sic_ok, 0.0, 1.0) };
    let p = if qos_ok(p_sic) {
        p_sic
    } else if qos_ok(0.0) {
        bisect(&qos_ok, 0.0, p_sic)
    } else {
        return None;
    };
    Some(build(p))
}

/// Direction used for `w1` at the start of a transmit design: matched to
/// `H_SR w_r`, optionally projected onto the columns of `basis`.
pub fn matched_direction(ch: &ChannelRealization, w_r: &[C64], basis: Option<&CMatrix>) -> Vec<C64> {
    let h_tilde = ch.h_sr.mul_vec(w_r);
    let d = match basis {
        Some(v) => v.mul_vec(&v.adjoint_mul_vec(&h_tilde)),
        None => h_tilde,
    };
    normalize(&d).unwrap_or_else(|_| vec![C64::new(0.0, 0.0); ch.h_sd.len()])
}
