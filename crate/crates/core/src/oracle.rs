//! Brute-force reference solvers for small instances.
//!
//! These do not share code paths with the solvers they check: the transmit
//! oracles grid the beam directions and the split directly and evaluate the
//! constraints in scalar form, and the one-dimensional oracles grid their
//! variable densely before a local refinement.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, SolveError};
use crate::model::{gamma_threshold, ChannelRealization, SystemParams};
use crate::numerics::{dot, golden_section_min, norm_sqr, null_space_of_row, scale_real, C64};
use crate::rates::{audit, rate_r, TxSolution};
use crate::rx_filter::{sic_margin, FilterGeometry};

/// Levels of coarse-to-fine refinement in the transmit oracles.
pub const ORACLE_LEVELS: usize = 6;
/// Default grid points per dimension.
pub const DEFAULT_RESOLUTION: usize = 20;
/// Candidates carried from one refinement level to the next.
const KEEP: usize = 8;

/// Best point found by a transmit oracle.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub rate_r: f64,
    pub solution: TxSolution,
    /// Best rate after each refinement level, then after the final local
    /// search; nondecreasing.
    pub level_rates: Vec<f64>,
}

/// Unit vector `(cos θ, sin θ·e^{iφ})` with its scalar gains.
#[derive(Debug, Clone, Copy)]
struct Beam {
    theta: f64,
    phi: f64,
    /// `|h̃ᴴu|²`.
    relay: f64,
    /// `|h_SDᴴu|²`.
    direct: f64,
    /// `‖H_SRᴴu‖²`.
    energy: f64,
}

struct Gains<'a> {
    ch: &'a ChannelRealization,
    h_tilde: Vec<C64>,
}

impl Gains<'_> {
    fn vector(theta: f64, phi: f64) -> Vec<C64> {
        vec![C64::new(theta.cos(), 0.0), C64::from_polar(theta.sin(), phi)]
    }

    fn beam(&self, theta: f64, phi: f64) -> Beam {
        let u = Self::vector(theta, phi);
        Beam {
            theta,
            phi,
            relay: dot(&self.h_tilde, &u).norm_sqr(),
            direct: dot(&self.ch.h_sd, &u).norm_sqr(),
            energy: norm_sqr(&self.ch.h_sr.adjoint_mul_vec(&u)),
        }
    }

    fn fixed(&self, u: &[C64]) -> Beam {
        Beam {
            theta: f64::NAN,
            phi: f64::NAN,
            relay: dot(&self.h_tilde, u).norm_sqr(),
            direct: dot(&self.ch.h_sd, u).norm_sqr(),
            energy: norm_sqr(&self.ch.h_sr.adjoint_mul_vec(u)),
        }
    }
}

/// Scalar constraint evaluation for `w1 = √p₁·u1`, `w2 = √(1−p₁)·u2`.
struct Scalar<'a> {
    params: &'a SystemParams,
    gamma: f64,
    h_rd_gain: f64,
    zf: bool,
}

impl Scalar<'_> {
    fn sic(&self, u1: &Beam, u2: &Beam, p1: f64, rho: f64) -> bool {
        let k = 2.0 * rho * self.params.ps;
        let noise = rho * self.params.sigma_r2 + self.params.sigma_r2_tilde;
        k * (1.0 - p1) * u2.relay >= self.gamma * (k * p1 * u1.relay + noise)
    }

    fn qos(&self, u1: &Beam, u2: &Beam, p1: f64, rho: f64) -> bool {
        let p = self.params;
        let direct = 2.0 * p.ps * (1.0 - p1) * u2.direct / (2.0 * p.ps * p1 * u1.direct + p.sigma_d2);
        let direct = if self.zf { (1.0 - rho) * direct } else { direct };
        let harvested = 2.0 * p.eta * p.ps * (1.0 - rho) * (p1 * u1.energy + (1.0 - p1) * u2.energy);
        direct + harvested * self.h_rd_gain / p.sigma_d2 >= self.gamma
    }

    /// Relative shortfall of the SIC condition and the rate floor with
    /// `w1 = 0`; zero exactly when both hold.
    fn violation(&self, u2: &Beam, rho: f64) -> f64 {
        let p = self.params;
        let k = 2.0 * rho * p.ps;
        let noise = rho * p.sigma_r2 + p.sigma_r2_tilde;
        let sic = (1.0 - k * u2.relay / (self.gamma * noise)).max(0.0);
        let direct = if self.zf { (1.0 - rho) * k / rho * u2.direct / p.sigma_d2 } else { k / rho * u2.direct / p.sigma_d2 };
        let harvested = 2.0 * p.eta * p.ps * (1.0 - rho) * u2.energy * self.h_rd_gain / p.sigma_d2;
        let qos = (1.0 - (direct + harvested) / self.gamma).max(0.0);
        sic + qos
    }

    fn ratio(&self, u1: &Beam, p1: f64, rho: f64) -> f64 {
        let p = self.params;
        2.0 * rho * p.ps * p1 * u1.relay / (rho * p.sigma_r2 + p.sigma_r2_tilde)
    }

    /// Largest feasible `p₁`, or `None` if even `p₁ = 0` is infeasible.
    ///
    /// The SIC margin is affine and decreasing in `p₁`, so its feasible set is
    /// `[0, a]`. Cleared of its denominator, the rate floor is a quadratic in
    /// `p₁` that is nonnegative at zero; on `[0, a]` its feasible set is an
    /// interval from zero because the original expression is convex. Each end
    /// is solved in closed form and checked against the constraint itself.
    fn best_p1(&self, u1: &Beam, u2: &Beam, rho: f64) -> Option<f64> {
        if !(self.sic(u1, u2, 0.0, rho) && self.qos(u1, u2, 0.0, rho)) {
            return None;
        }
        let p = self.params;
        let k = 2.0 * rho * p.ps;
        let noise = rho * p.sigma_r2 + p.sigma_r2_tilde;
        let denom = k * (u2.relay + self.gamma * u1.relay);
        let a = if denom > 0.0 { ((k * u2.relay - self.gamma * noise) / denom).clamp(0.0, 1.0) } else { 1.0 };
        let a = settle(a, |x| self.sic(u1, u2, x, rho));
        if self.qos(u1, u2, a, rho) {
            return Some(a);
        }
        let big_d = 2.0 * p.ps;
        let z = if self.zf { 1.0 - rho } else { 1.0 };
        let hc = 2.0 * p.eta * p.ps * (1.0 - rho) * self.h_rd_gain / p.sigma_d2;
        let (h0, h1) = (hc * u2.energy - self.gamma, hc * (u1.energy - u2.energy));
        let qa = h1 * big_d * u1.direct;
        let qb = h0 * big_d * u1.direct + h1 * p.sigma_d2 - z * big_d * u2.direct;
        let qc = h0 * p.sigma_d2 + z * big_d * u2.direct;
        let root = smallest_root_in(qa, qb, qc, a).unwrap_or(0.0);
        Some(settle(root, |x| self.qos(u1, u2, x, rho)))
    }
}

/// Root of `ax² + bx + c` in `[0, hi]` given `c ≥ 0` and a sign change on the
/// interval.
fn smallest_root_in(a: f64, b: f64, c: f64, hi: f64) -> Option<f64> {
    let inside = |r: f64| r.is_finite() && (0.0..=hi).contains(&r);
    if a.abs() <= 1e-14 * (b.abs() + c.abs()) {
        let r = -c / b;
        return inside(r).then_some(r);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = (q / a, if q != 0.0 { c / q } else { f64::NAN });
    [r1, r2].into_iter().filter(|r| inside(*r)).min_by(f64::total_cmp)
}

/// Moves `x` down until `ok` holds; `ok(0)` must hold. Closed-form roots can
/// land a rounding error on the wrong side of the boundary.
fn settle(x: f64, ok: impl Fn(f64) -> bool) -> f64 {
    if ok(x) {
        return x;
    }
    let (mut lo, mut hi) = (0.0, x);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if ok(m) {
            lo = m;
        } else {
            hi = m;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    rate: f64,
    t1: f64,
    f1: f64,
    t2: f64,
    f2: f64,
    rho: f64,
    p1: f64,
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64).collect()
}

/// Compass search over `(θ₁, φ₁, θ₂, φ₂, ρ)` with step halving, maximizing
/// the candidate score: `R`'s ratio when feasible, `−1 − violation` otherwise.
struct Polish<'a> {
    gains: &'a Gains<'a>,
    scalar: &'a Scalar<'a>,
    zf_dir: Option<&'a [C64]>,
}

impl Polish<'_> {
    const INITIAL_STEP: f64 = 0.05;
    const MIN_STEP: f64 = 1e-12;
    const MAX_SWEEPS: usize = 400;
    const RANDOM_DIRECTIONS: usize = 8;
    const RHO_WINDOW: f64 = 0.05;
    const RHO_SCAN: usize = 16;

    fn evaluate(&self, x: [f64; 5]) -> Candidate {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let (t1, t2) = (x[0].clamp(0.0, half_pi), x[2].clamp(0.0, half_pi));
        let rho = x[4].clamp(1e-9, 1.0 - 1e-9);
        let b1 = match self.zf_dir {
            Some(u) => self.gains.fixed(u),
            None => self.gains.beam(t1, x[1]),
        };
        let b2 = self.gains.beam(t2, x[3]);
        let at = |rho: f64| match self.scalar.best_p1(&b1, &b2, rho) {
            Some(p1) => (self.scalar.ratio(&b1, p1, rho), p1),
            None => (-1.0 - self.scalar.violation(&b2, rho), 0.0),
        };
        // For fixed beams the split is a one-dimensional problem: the SIC
        // limit on p₁ rises with ρ and the rate-floor limit falls, so the
        // best ρ sits on a kink that direction moves cannot follow.
        let (mut rho, (mut rate, mut p1)) = (rho, at(rho));
        let width = Self::RHO_WINDOW;
        let (lo, hi) = ((rho - width).max(1e-9), (rho + width).min(1.0 - 1e-9));
        for k in 0..=Self::RHO_SCAN {
            let r = lo + (hi - lo) * k as f64 / Self::RHO_SCAN as f64;
            let v = at(r);
            if v.0 > rate {
                (rho, rate, p1) = (r, v.0, v.1);
            }
        }
        let cell = (hi - lo) / Self::RHO_SCAN as f64;
        let (r, _) = golden_section_min(|r| -at(r).0, (rho - cell).max(1e-9), (rho + cell).min(1.0 - 1e-9), 60);
        let v = at(r);
        if v.0 > rate {
            (rho, rate, p1) = (r, v.0, v.1);
        }
        Candidate { rate, t1, f1: x[1], t2, f2: x[3], rho, p1 }
    }

    fn run(&self, start: &Candidate) -> Candidate {
        let mut x = [start.t1, start.f1, start.t2, start.f2, start.rho];
        let mut cur = self.evaluate(x);
        let first = if self.zf_dir.is_some() { 2 } else { 0 };
        let mut rng = ChaCha8Rng::seed_from_u64(0x0a11ce);
        let mut step = Self::INITIAL_STEP;
        for _ in 0..Self::MAX_SWEEPS {
            // Coordinate directions plus random ones: the score is a minimum of
            // smooth constraint boundaries, and coordinate moves alone stall on
            // the ridge where both bind.
            let mut dirs: Vec<[f64; 5]> = (first..4)
                .map(|i| {
                    let mut d = [0.0; 5];
                    d[i] = 1.0;
                    d
                })
                .collect();
            for _ in 0..Self::RANDOM_DIRECTIONS {
                let mut d = [0.0; 5];
                for v in d.iter_mut().take(4).skip(first) {
                    *v = StandardNormal.sample(&mut rng);
                }
                let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                dirs.push(d.map(|v| v / n));
            }
            let mut improved = false;
            for d in &dirs {
                for sign in [1.0, -1.0] {
                    let y: [f64; 5] = std::array::from_fn(|i| x[i] + sign * step * d[i]);
                    let cand = self.evaluate(y);
                    if cand.rate > cur.rate {
                        x = [cand.t1, cand.f1, cand.t2, cand.f2, cand.rho];
                        cur = cand;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
                if step < Self::MIN_STEP {
                    break;
                }
            }
        }
        cur
    }
}

struct Box5 {
    t1: (f64, f64),
    f1: (f64, f64),
    t2: (f64, f64),
    f2: (f64, f64),
    rho: (f64, f64),
}

fn transmit_oracle(
    ch: &ChannelRealization,
    w_r: &[C64],
    params: &SystemParams,
    resolution: usize,
    zf: bool,
) -> Result<Option<OracleResult>> {
    if ch.h_sd.len() != 2 {
        return Err(SolveError::InvalidParams(format!("oracle needs M = 2, got {}", ch.h_sd.len())));
    }
    let resolution = resolution.max(4);
    let gains = Gains { ch, h_tilde: ch.h_sr.mul_vec(w_r) };
    let scalar = Scalar { params, gamma: gamma_threshold(params), h_rd_gain: ch.h_rd_gain(), zf };
    let zf_dir = if zf {
        let v = null_space_of_row(&ch.h_sd).map_err(|e| SolveError::Degenerate(e.to_string()))?;
        Some(v.column(0))
    } else {
        None
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let two_pi = 2.0 * std::f64::consts::PI;

    let mut boxes = vec![Box5 { t1: (0.0, half_pi), f1: (0.0, two_pi), t2: (0.0, half_pi), f2: (0.0, two_pi), rho: (0.0, 1.0) }];
    let mut best: Option<Candidate> = None;
    let mut frontier: Vec<Candidate> = Vec::new();
    let mut level_rates = Vec::new();
    for level in 0..ORACLE_LEVELS {
        // Refinement boxes span two cells of the previous level.
        let res = if level == 0 { resolution } else { (resolution / 2).max(4) };
        let cell = |r: (f64, f64)| (r.1 - r.0) / res as f64;
        let mut found: Vec<Candidate> = Vec::new();
        for bx in &boxes {
            let beams1: Vec<Beam> = match &zf_dir {
                Some(u) => vec![gains.fixed(u)],
                None => grid(bx.t1.0, bx.t1.1, res)
                    .iter()
                    .flat_map(|&t| grid(bx.f1.0, bx.f1.1, res).into_iter().map(move |f| (t, f)))
                    .map(|(t, f)| gains.beam(t, f))
                    .collect(),
            };
            let beams2: Vec<Beam> = grid(bx.t2.0, bx.t2.1, res)
                .iter()
                .flat_map(|&t| grid(bx.f2.0, bx.f2.1, res).into_iter().map(move |f| (t, f)))
                .map(|(t, f)| gains.beam(t, f))
                .collect();
            let top_relay = beams1.iter().fold(0.0f64, |m, b| m.max(b.relay));
            for &rho in &grid(bx.rho.0.max(0.0), bx.rho.1.min(1.0), res) {
                let bound = scalar.ratio(&Beam { relay: top_relay, ..beams2[0] }, 1.0, rho);
                let floor = found.iter().map(|c| c.rate).fold(best.map_or(0.0, |b| b.rate), f64::max);
                if bound <= floor * 0.999 {
                    continue;
                }
                for b2 in &beams2 {
                    // w1 = 0 must already be feasible for any p₁ to be. While
                    // nothing feasible is known, near-misses are kept, scored by
                    // their violation, so refinement can home in on a thin
                    // feasible region the coarse grid stepped over.
                    if !(scalar.sic(b2, b2, 0.0, rho) && scalar.qos(b2, b2, 0.0, rho)) {
                        if best.is_none() {
                            let (t1, f1) = (0.5 * (bx.t1.0 + bx.t1.1), 0.5 * (bx.f1.0 + bx.f1.1));
                            let rate = -1.0 - scalar.violation(b2, rho);
                            found.push(Candidate { rate, t1, f1, t2: b2.theta, f2: b2.phi, rho, p1: 0.0 });
                        }
                        continue;
                    }
                    for b1 in &beams1 {
                        let Some(p1) = scalar.best_p1(b1, b2, rho) else { continue };
                        let rate = scalar.ratio(b1, p1, rho);
                        found.push(Candidate { rate, t1: b1.theta, f1: b1.phi, t2: b2.theta, f2: b2.phi, rho, p1 });
                    }
                }
                if found.len() > 50_000 {
                    found.sort_by(|a, b| b.rate.total_cmp(&a.rate));
                    found.truncate(KEEP);
                }
            }
        }
        found.sort_by(|a, b| b.rate.total_cmp(&a.rate));
        found.truncate(KEEP);
        if let Some(top) = found.first().filter(|c| c.rate >= 0.0) {
            if best.map_or(true, |b| top.rate > b.rate) {
                best = Some(*top);
            }
        }
        level_rates.push(best.map_or(f64::NEG_INFINITY, |b| b.rate));
        if found.is_empty() {
            break;
        }
        let prev = &boxes[0];
        let (c_t1, c_f1, c_t2, c_f2, c_rho) = (cell(prev.t1), cell(prev.f1), cell(prev.t2), cell(prev.f2), cell(prev.rho));
        let mut seeds = found.clone();
        if let Some(b) = best {
            seeds.push(b);
        }
        frontier = seeds.clone();
        boxes = seeds
            .iter()
            .map(|c| Box5 {
                t1: ((c.t1 - c_t1).max(0.0), (c.t1 + c_t1).min(half_pi)),
                f1: (c.f1 - c_f1, c.f1 + c_f1),
                t2: ((c.t2 - c_t2).max(0.0), (c.t2 + c_t2).min(half_pi)),
                f2: (c.f2 - c_f2, c.f2 + c_f2),
                rho: ((c.rho - c_rho).max(1e-9), (c.rho + c_rho).min(1.0 - 1e-9)),
            })
            .collect();
    }

    let search = Polish { gains: &gains, scalar: &scalar, zf_dir: zf_dir.as_deref() };
    for c in &frontier {
        let p = search.run(c);
        if p.rate >= 0.0 && best.map_or(true, |b| p.rate > b.rate) {
            best = Some(p);
        }
    }
    level_rates.push(best.map_or(f64::NEG_INFINITY, |b| b.rate));

    let Some(b) = best else { return Ok(None) };
    let u1 = match &zf_dir {
        Some(u) => u.clone(),
        None => Gains::vector(b.t1, b.f1),
    };
    let u2 = Gains::vector(b.t2, b.f2);
    let solution =
        TxSolution::new(ch, scale_real(&u1, b.p1.sqrt()), scale_real(&u2, (1.0 - b.p1).sqrt()), b.rho, w_r.to_vec())?;
    if !audit(ch, &solution, params, 1e-9).all_ok() {
        return Err(SolveError::Internal("oracle point failed the audit".into()));
    }
    Ok(Some(OracleResult { rate_r: rate_r(ch, &solution, params), solution, level_rates }))
}

/// Best rate of `R` over an exhaustive grid of transmit designs for a fixed
/// receive filter (`M = 2`), or `None` if no grid point is feasible.
///
/// Beams are `√p·(cos θ, sin θ·e^{iφ})`; the grid covers `(θ₁, φ₁, θ₂, φ₂, ρ)`
/// with `resolution` points each, and `p₁` is the largest feasible value with
/// `p₂ = 1 − p₁`. Each refinement level re-grids, at half the
/// resolution, boxes of one cell around the best candidates; while nothing
/// feasible is known, the least-violating points are refined instead. A
/// compass search from the final candidates polishes the result.
pub fn brute_force_p2(
    ch: &ChannelRealization,
    w_r: &[C64],
    params: &SystemParams,
    resolution: usize,
) -> Result<Option<OracleResult>> {
    transmit_oracle(ch, w_r, params, resolution, false)
}

/// As [`brute_force_p2`] with `w1` confined to the null space of `h_SDᴴ`
/// and the zero-forcing form of `D`'s rate floor.
pub fn brute_force_zf(
    ch: &ChannelRealization,
    w_r: &[C64],
    params: &SystemParams,
    resolution: usize,
) -> Result<Option<OracleResult>> {
    transmit_oracle(ch, w_r, params, resolution, true)
}

/// Minimizer of `b/ρ + c/(1−ρ)` over `(0, 1)` by a uniform grid followed by
/// golden-section refinement around the best grid point.
pub fn grid_min_rho(b: f64, c: f64, points: usize) -> f64 {
    let points = points.max(3);
    let f = |r: f64| b / r + c / (1.0 - r);
    let h = 1.0 / (points + 1) as f64;
    let k = (1..=points).min_by(|&i, &j| f(i as f64 * h).total_cmp(&f(j as f64 * h))).expect("nonempty grid");
    let lo = ((k - 1) as f64 * h).max(f64::EPSILON);
    let hi = ((k + 1) as f64 * h).min(1.0 - f64::EPSILON);
    golden_section_min(f, lo, hi, 200).0
}

/// Best grid point of the filter problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterGridPoint {
    pub lambda: f64,
    pub value: f64,
}

/// Maximum of `|h1ᴴw_R(λ)|²` over feasible `λ` on a `points`-point grid of
/// `[0, 1]`, with the feasibility boundary between adjacent grid points
/// located by bisection. `None` if no grid point is feasible.
pub fn grid_filter(geom: &FilterGeometry, rho: f64, params: &SystemParams, points: usize) -> Option<FilterGridPoint> {
    let points = points.max(2);
    let lam = |k: usize| k as f64 / (points - 1) as f64;
    let feasible = |l: f64| gamma_threshold(params) == 0.0 || sic_margin(geom, l, rho, params) >= 0.0;
    let mut best: Option<FilterGridPoint> = None;
    let mut prev_infeasible: Option<f64> = None;
    for k in 0..points {
        let l = lam(k);
        if !feasible(l) {
            prev_infeasible = Some(l);
            continue;
        }
        let mut cand = FilterGridPoint { lambda: l, value: geom.objective(l) };
        if let Some(lo) = prev_infeasible.take() {
            let (mut a, mut b) = (lo, l);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if feasible(m) {
                    b = m;
                } else {
                    a = m;
                }
            }
            let edge = FilterGridPoint { lambda: b, value: geom.objective(b) };
            if edge.value > cand.value {
                cand = edge;
            }
        }
        if best.map_or(true, |p| cand.value > p.value) {
            best = Some(cand);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alternating::init_receiver;
    use crate::model::fig2_channel;

    #[test]
    fn grid_min_rho_examples() {
        assert!((grid_min_rho(2.0, 2.0, 1000) - 0.5).abs() < 1e-7);
        assert!((grid_min_rho(1.0, 4.0, 1000) - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn grid_filter_without_floor_is_matched() {
        let p = SystemParams::default().with_rd_min(0.0);
        let g = FilterGeometry::from_vectors(
            vec![C64::new(1.0, 0.5), C64::new(-0.3, 0.2)],
            vec![C64::new(0.2, 0.0), C64::new(1.0, -1.0)],
        );
        let best = grid_filter(&g, 0.5, &p, 100_001).unwrap();
        let h1 = norm_sqr(&g.h1);
        assert!((best.value - h1).abs() <= 1e-8 * h1);
    }

    #[test]
    fn zero_floor_puts_all_power_on_w1() {
        let ch = fig2_channel();
        let p = SystemParams::default().with_rd_min(0.0);
        let w_r = init_receiver(&ch).unwrap();
        let r = brute_force_p2(&ch, &w_r, &p, 12).unwrap().unwrap();
        assert!(r.level_rates.windows(2).all(|w| w[1] >= w[0]));
        assert!(norm_sqr(&r.solution.w1) > 0.99);
    }

    #[test]
    fn huge_floor_is_oracle_infeasible() {
        let ch = fig2_channel();
        let p = SystemParams::default().with_rd_min(6.0);
        let w_r = init_receiver(&ch).unwrap();
        assert!(brute_force_p2(&ch, &w_r, &p, 8).unwrap().is_none());
    }
}
