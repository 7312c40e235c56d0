//! Optimal receive filter at the relay for fixed `(w1, w2, ρ)`.
//!
//! With `h1 = H_SRᴴ w1` and `h2 = H_SRᴴ w2`, the filter maximizes `|h1ᴴ w_R|²`
//! subject to the SIC condition for `D`'s message. The optimum lies on
//!
//! ```text
//! w_R(λ) = √λ · Π_h2 h1/‖Π_h2 h1‖ + √(1−λ) · Π⊥_h2 h1/‖Π⊥_h2 h1‖,   λ ∈ [0, 1],
//! ```
//!
//! along which `|h1ᴴ w_R|² = (√λ·α + √(1−λ)·β)²` is concave with its peak at
//! the matched filter `λ_u = α²/(α² + β²)`, and `|h2ᴴ w_R|² = λ‖h2‖²`. The SIC
//! condition holds exactly on an interval `[λ*, 1]`, so the optimum is
//! `max(λ*, λ_u)`.

use crate::error::{Result, SolveError};
use crate::model::{gamma_threshold, ChannelRealization, SystemParams};
use crate::numerics::{dot, norm, normalize, project_onto, project_orth, scale_real, C64};

/// Projection geometry of the two effective relay channels.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterGeometry {
    pub h1: Vec<C64>,
    pub h2: Vec<C64>,
    /// `‖Π_h2 h1‖`.
    pub alpha: f64,
    /// `‖Π⊥_h2 h1‖`.
    pub beta: f64,
    /// Unit vector along `Π_h2 h1`, or along `h2` when `α = 0`.
    e1: Vec<C64>,
    /// Unit vector along `Π⊥_h2 h1`; zero when `β = 0`.
    e2: Vec<C64>,
}

impl FilterGeometry {
    pub fn new(ch: &ChannelRealization, w1: &[C64], w2: &[C64]) -> Self {
        Self::from_vectors(ch.h_sr.adjoint_mul_vec(w1), ch.h_sr.adjoint_mul_vec(w2))
    }

    pub fn from_vectors(h1: Vec<C64>, h2: Vec<C64>) -> Self {
        let n = h1.len();
        let zero = vec![C64::new(0.0, 0.0); n];
        let (par, perp) = match project_onto(&h1, &h2) {
            Ok(p) => {
                let q = project_orth(&h1, &h2).expect("h2 is nonzero");
                (p, q)
            }
            Err(_) => (zero.clone(), h1.clone()),
        };
        let alpha = norm(&par);
        let beta = norm(&perp);
        let e1 = if alpha > 0.0 {
            scale_real(&par, 1.0 / alpha)
        } else {
            normalize(&h2).unwrap_or_else(|_| zero.clone())
        };
        let e2 = if beta > 0.0 { scale_real(&perp, 1.0 / beta) } else { zero };
        Self { h1, h2, alpha, beta, e1, e2 }
    }

    /// `w_R(λ)`.
    pub fn filter(&self, lambda: f64) -> Vec<C64> {
        let l = lambda.clamp(0.0, 1.0);
        self.e1.iter().zip(&self.e2).map(|(a, b)| a * l.sqrt() + b * (1.0 - l).sqrt()).collect()
    }

    /// `|h1ᴴ w_R(λ)|²` from the closed form.
    pub fn objective(&self, lambda: f64) -> f64 {
        let l = lambda.clamp(0.0, 1.0);
        (l.sqrt() * self.alpha + (1.0 - l).sqrt() * self.beta).powi(2)
    }

    /// Unconstrained maximizer `α²/(α² + β²)`, the matched filter.
    pub fn matched_lambda(&self) -> f64 {
        let s = self.alpha * self.alpha + self.beta * self.beta;
        if s > 0.0 {
            self.alpha * self.alpha / s
        } else {
            1.0
        }
    }

    fn h2_gain(&self) -> f64 {
        self.h2.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// SIC slack `g(λ) − f(λ)` along the parametrization: the useful power
/// `2ρ·ps·λ‖h2‖²` minus the threshold `γ'(2ρ·ps·f̃(λ) + ρσR² + σ̃R²)`.
pub fn sic_margin(geom: &FilterGeometry, lambda: f64, rho: f64, params: &SystemParams) -> f64 {
    let gamma = gamma_threshold(params);
    let k = 2.0 * rho * params.ps;
    k * lambda * geom.h2_gain() - gamma * (k * geom.objective(lambda) + noise(rho, params))
}

/// Post-split noise `ρσR² + σ̃R²` behind a unit-norm filter.
fn noise(rho: f64, params: &SystemParams) -> f64 {
    rho * params.sigma_r2 + params.sigma_r2_tilde
}

/// Whether some unit filter meets the SIC condition: `g(1) ≥ f(1)`.
pub fn filter_feasible(geom: &FilterGeometry, rho: f64, params: &SystemParams) -> bool {
    gamma_threshold(params) == 0.0 || sic_margin(geom, 1.0, rho, params) >= 0.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSolution {
    pub w_r: Vec<C64>,
    /// Mixing parameter of the returned filter.
    pub lambda: f64,
    /// The SIC condition holds with equality.
    pub active: bool,
}

/// Smallest `λ` meeting the SIC condition, from the quadratic obtained by
/// squaring `Pλ − Q = R√(λ(1−λ))`, refined by Newton steps on the unsquared
/// equation.
fn boundary_lambda(geom: &FilterGeometry, rho: f64, params: &SystemParams) -> Result<f64> {
    let gamma = gamma_threshold(params);
    let k = 2.0 * rho * params.ps;
    let (a2, b2) = (geom.alpha * geom.alpha, geom.beta * geom.beta);
    let p = k * geom.h2_gain() - k * gamma * (a2 - b2);
    let q = k * gamma * b2 + gamma * noise(rho, params);
    let r = 2.0 * k * gamma * geom.alpha * geom.beta;

    let qa = p * p + r * r;
    let qb = -(2.0 * p * q + r * r);
    let qc = q * q;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    // Numerically stable pair of roots.
    let s = -0.5 * (qb + qb.signum() * disc);
    let candidates = [s / qa, if s != 0.0 { qc / s } else { f64::NAN }];
    let scale = q.abs().max(1.0);
    let mut root = candidates
        .iter()
        .copied()
        .filter(|l| l.is_finite() && (-1e-9..=1.0 + 1e-9).contains(l))
        .map(|l| l.clamp(0.0, 1.0))
        .filter(|&l| p * l - q >= -1e-9 * scale)
        .min_by(|x, y| {
            let rx = sic_margin(geom, *x, rho, params).abs();
            let ry = sic_margin(geom, *y, rho, params).abs();
            rx.total_cmp(&ry)
        });

    let h = |l: f64| sic_margin(geom, l, rho, params);
    // The slack is convex with h(0) < 0 ≤ h(1): a unique crossing.
    let crossing_ok = |l: f64| h(l).abs() <= 1e-10 * (q + k * gamma * geom.objective(l));
    if !root.is_some_and(crossing_ok) {
        let (mut lo, mut hi) = (0.0, 1.0);
        if let Some(l) = root {
            if h(l) >= 0.0 {
                hi = l;
            } else {
                lo = l;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        root = Some(hi);
    }
    let l = root.ok_or_else(|| SolveError::Internal("no filter root in [0, 1] despite feasibility".into()))?;
    if h(l) < 0.0 {
        // Move onto the feasible side of the crossing.
        let mut hi = 1.0;
        let mut lo = l;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Ok(hi);
    }
    Ok(l)
}

/// Optimal unit-norm receive filter.
///
/// Returns the matched filter `h1/‖h1‖` when it already meets the SIC
/// condition (always the case when `γ' = 0`), and otherwise the filter on the
/// SIC boundary closest to it.
pub fn optimal_receive_filter(geom: &FilterGeometry, rho: f64, params: &SystemParams) -> Result<FilterSolution> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(SolveError::Domain(format!("power-splitting ratio {rho} outside (0, 1]")));
    }
    let h1_norm = norm(&geom.h1);
    let gamma = gamma_threshold(params);
    if geom.beta == 0.0 && h1_norm > 0.0 {
        // h1 ∥ h2: one-dimensional family, the filter is h1's direction.
        let w_r = normalize(&geom.h1)?;
        if gamma > 0.0 && sic_margin(geom, 1.0, rho, params) < 0.0 {
            return Err(SolveError::Infeasible("SIC condition cannot be met by any receive filter".into()));
        }
        return Ok(FilterSolution { w_r, lambda: 1.0, active: false });
    }
    if !filter_feasible(geom, rho, params) {
        return Err(SolveError::Infeasible("SIC condition cannot be met by any receive filter".into()));
    }
    let lambda_u = geom.matched_lambda();
    if gamma == 0.0 || sic_margin(geom, lambda_u, rho, params) >= 0.0 {
        let w_r = if h1_norm > 0.0 { normalize(&geom.h1)? } else { geom.filter(1.0) };
        return Ok(FilterSolution { w_r, lambda: lambda_u, active: false });
    }
    let lambda = boundary_lambda(geom, rho, params)?.max(lambda_u);
    let w_r = normalize(&geom.filter(lambda))?;
    Ok(FilterSolution { w_r, lambda, active: true })
}

/// `|h1ᴴ w|²` for an arbitrary filter.
pub fn filter_gain(geom: &FilterGeometry, w_r: &[C64]) -> f64 {
    dot(&geom.h1, w_r).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_floor_gives_matched_filter() {
        let p = SystemParams::default().with_rd_min(0.0);
        let g = FilterGeometry::from_vectors(vec![c(1.0, 1.0), c(0.5, 0.0)], vec![c(0.0, 1.0), c(2.0, 0.0)]);
        assert!(filter_feasible(&g, 0.5, &p));
        let f = optimal_receive_filter(&g, 0.5, &p).unwrap();
        let gain = filter_gain(&g, &f.w_r);
        assert!((gain - 2.25).abs() < 1e-12);
    }

    #[test]
    fn zero_h2_is_infeasible() {
        let p = SystemParams::default().with_rd_min(1.0);
        let g = FilterGeometry::from_vectors(vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 0.0); 2]);
        assert!(!filter_feasible(&g, 0.5, &p));
        assert!(optimal_receive_filter(&g, 0.5, &p).is_err());
    }

    #[test]
    fn boundary_case_has_root_at_one() {
        // α = 0: g(1) − f(1) = k‖h2‖² − γ'(ρσR² + σ̃R²) = 0 with k = 2ρps.
        let p = SystemParams { ps: 1.0, ..Default::default() }.with_rd_min(0.5);
        // k = 1 and ‖h2‖² = 1 + 0.25 + 0.25 = 1.5 exactly, so the tie is exact.
        let g = FilterGeometry::from_vectors(
            vec![c(0.0, 0.0), c(1e-3, 0.0), c(-1e-3, 0.0)],
            vec![c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
        );
        assert!(g.alpha == 0.0);
        assert!(filter_feasible(&g, 0.5, &p));
        let f = optimal_receive_filter(&g, 0.5, &p).unwrap();
        assert!((f.lambda - 1.0).abs() < 1e-9, "{}", f.lambda);
    }

    #[test]
    fn parametrization_identities() {
        let g = FilterGeometry::from_vectors(vec![c(1.0, -0.3), c(0.2, 0.7), c(-0.4, 0.1)], vec![c(0.3, 0.3), c(-1.0, 0.2), c(0.0, 0.5)]);
        for l in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let w = g.filter(l);
            assert!((norm(&w) - 1.0).abs() < 1e-12);
            assert!((filter_gain(&g, &w) - g.objective(l)).abs() < 1e-12);
            let h2w = dot(&g.h2, &w).norm_sqr();
            assert!((h2w - l * g.h2_gain()).abs() < 1e-12);
        }
    }
}
