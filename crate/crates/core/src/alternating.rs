//! Alternating optimization between transmit design and receive filter,
//! receiver initialization, and the direct-transmission baseline.
//!
//! Each round solves the transmit design for the current filter, warm-started
//! from the previous solution, then replaces the filter by the optimal one for
//! the new `(w1, w2, ρ)`. Both steps keep the previous point feasible and never
//! lower `R`'s rate, so the rate sequence is nondecreasing.

use crate::error::{Result, SolveError};
use crate::feasibility::{relay_feasible, QosModel};
use crate::model::{ChannelRealization, SystemParams};
use crate::numerics::{normalize, svd, C64};
use crate::optimal_tx::{dinkelbach_optimal_from, DinkelbachOutcome, DEFAULT_EPS};
use crate::rates::{audit, rate_d, rate_r, TxSolution};
use crate::rx_filter::{optimal_receive_filter, FilterGeometry};
use crate::zf_tx::dinkelbach_zf_from;

/// Slack allowed for a decrease of `R`'s rate between rounds.
pub const MONOTONE_TOL: f64 = 1e-8;
/// Default outer-round cap.
pub const DEFAULT_MAX_ITER: usize = 15;
/// Default stopping threshold on the change of `R`'s rate.
pub const DEFAULT_TOL: f64 = 1e-4;

/// Initial receive filter: the dominant right singular vector of `H_SR`,
/// which maximizes `‖H_SR w_R‖`.
pub fn init_receiver(ch: &ChannelRealization) -> Result<Vec<C64>> {
    let d = svd(&ch.h_sr);
    normalize(&d.v.column(0)).map_err(|_| SolveError::InvalidParams("relay channel is zero".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Optimal,
    Zf,
}

impl Scheme {
    pub fn qos_model(self) -> QosModel {
        match self {
            Scheme::Optimal => QosModel::Exact,
            Scheme::Zf => QosModel::ZfRelaxed,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Optimal => "optimal",
            Scheme::Zf => "zf",
        }
    }

    /// One transmit design for a fixed filter, warm-started from `start`.
    pub fn transmit(
        self,
        ch: &ChannelRealization,
        w_r: &[C64],
        params: &SystemParams,
        start: Option<&TxSolution>,
    ) -> Result<DinkelbachOutcome> {
        match self {
            Scheme::Optimal => dinkelbach_optimal_from(ch, w_r, params, DEFAULT_EPS, start),
            Scheme::Zf => dinkelbach_zf_from(ch, w_r, params, DEFAULT_EPS, start),
        }
    }
}

/// State after one transmit design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub rate_r: f64,
    pub rate_d: f64,
    pub rho: f64,
    pub sic_slack: f64,
    pub d_slack: f64,
    pub power_slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    /// The filter step produced no feasible filter; the last design is kept.
    FilterStalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    /// The initial filter admitted no feasible design and was replaced by the
    /// filter of a certified feasible point.
    pub reinitialized: bool,
}

impl IterationTrace {
    pub fn rates_r(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.rate_r).collect()
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.records.windows(2).all(|w| w[1].rate_r >= w[0].rate_r - tol)
    }
}

fn record(ch: &ChannelRealization, sol: &TxSolution, params: &SystemParams) -> IterationRecord {
    let rep = audit(ch, sol, params, 0.0);
    IterationRecord {
        rate_r: rate_r(ch, sol, params),
        rate_d: rate_d(ch, sol, params),
        rho: sol.rho,
        sic_slack: rep.sic_slack,
        d_slack: rep.d_slack,
        power_slack: rep.power_slack,
    }
}

/// Alternates transmit design and receive filter until `R`'s rate changes by
/// at most `tol` between rounds or `max_iter` transmit designs have run,
/// starting from [`init_receiver`].
///
/// If the initial filter admits no feasible design, the filter of a certified
/// feasible point is used instead; if none exists the instance is infeasible.
pub fn alternate(
    ch: &ChannelRealization,
    params: &SystemParams,
    scheme: Scheme,
    max_iter: usize,
    tol: f64,
) -> Result<(TxSolution, IterationTrace)> {
    let w_r = init_receiver(ch)?;
    alternate_from(ch, params, scheme, &w_r, None, max_iter, tol)
}

/// As [`alternate`], from the filter `w_r` and an optional warm start for the
/// first transmit design.
pub fn alternate_from(
    ch: &ChannelRealization,
    params: &SystemParams,
    scheme: Scheme,
    w_r: &[C64],
    start: Option<&TxSolution>,
    max_iter: usize,
    tol: f64,
) -> Result<(TxSolution, IterationTrace)> {
    params.validate()?;
    ch.validate(params)?;
    if max_iter == 0 {
        return Err(SolveError::InvalidParams("max_iter must be at least 1".into()));
    }
    let mut w_r = w_r.to_vec();
    let mut reinitialized = false;
    let mut sol = match scheme.transmit(ch, &w_r, params, start) {
        Ok(out) => out.solution,
        Err(SolveError::Infeasible(msg)) => {
            let fp = relay_feasible(ch, params, scheme.qos_model()).ok_or(SolveError::Infeasible(msg))?;
            w_r = fp.w_r;
            reinitialized = true;
            scheme.transmit(ch, &w_r, params, None)?.solution
        }
        Err(e) => return Err(e),
    };
    let mut records = vec![record(ch, &sol, params)];
    let mut termination = Termination::MaxIterations;

    for _ in 1..max_iter {
        let geom = FilterGeometry::new(ch, &sol.w1, &sol.w2);
        let filter = match optimal_receive_filter(&geom, sol.rho, params) {
            Ok(f) => f,
            Err(SolveError::Infeasible(_)) => {
                termination = Termination::FilterStalled;
                break;
            }
            Err(e) => return Err(e),
        };
        let moved = TxSolution::new(ch, sol.w1.clone(), sol.w2.clone(), sol.rho, filter.w_r.clone())?;
        let next = scheme.transmit(ch, &filter.w_r, params, Some(&moved))?.solution;
        let rec = record(ch, &next, params);
        let prev = records.last().expect("nonempty").rate_r;
        records.push(rec);
        if rec.rate_r < prev - MONOTONE_TOL {
            return Err(SolveError::Internal(format!(
                "rate of R decreased between rounds: {:?}",
                records.iter().map(|r| r.rate_r).collect::<Vec<_>>()
            )));
        }
        sol = next;
        if (rec.rate_r - prev).abs() <= tol {
            termination = Termination::Converged;
            break;
        }
    }
    Ok((sol, IterationTrace { records, termination, reinitialized }))
}

/// Rate of `D` when `S` serves it alone over the whole slot with full power.
pub fn direct_transmission_rate(ch: &ChannelRealization, params: &SystemParams) -> f64 {
    let g: f64 = ch.h_sd.iter().map(|v| v.norm_sqr()).sum();
    (params.ps * g / params.sigma_d2).ln_1p() / std::f64::consts::LN_2
}
