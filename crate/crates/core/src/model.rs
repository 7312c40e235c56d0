//! System constants, channel containers and channel generation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, SolveError};
use crate::numerics::{norm_sqr, CMatrix, C64};

/// Scalar constants of one system configuration. Powers and variances are
/// linear, rates are in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Source transmit power; the phase-one burst carries `2·ps`.
    pub ps: f64,
    pub sigma_d2: f64,
    pub sigma_r2: f64,
    /// Baseband conversion noise at the relay.
    pub sigma_r2_tilde: f64,
    /// Energy harvesting efficiency in `(0, 1]`.
    pub eta: f64,
    pub rd_min: f64,
    /// Source antennas.
    pub m: usize,
    /// Relay antennas.
    pub n: usize,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            ps: db_to_linear(30.0),
            sigma_d2: 1.0,
            sigma_r2: 1.0,
            sigma_r2_tilde: 1.0,
            eta: 0.8,
            rd_min: 1.0,
            m: 2,
            n: 4,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ps", self.ps),
            ("sigma_d2", self.sigma_d2),
            ("sigma_r2", self.sigma_r2),
            ("sigma_r2_tilde", self.sigma_r2_tilde),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolveError::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(SolveError::InvalidParams(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.rd_min >= 0.0 && self.rd_min.is_finite()) {
            return Err(SolveError::InvalidParams(format!("rd_min must be non-negative, got {}", self.rd_min)));
        }
        if self.m < 2 {
            return Err(SolveError::InvalidParams(format!("m must be at least 2, got {}", self.m)));
        }
        if self.n < 1 {
            return Err(SolveError::InvalidParams("n must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_rd_min(self, rd_min: f64) -> Self {
        Self { rd_min, ..self }
    }
}

/// Per-link path losses in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossSpec {
    pub pl_sr_db: f64,
    pub pl_sd_db: f64,
    pub pl_rd_db: f64,
}

impl Default for PathLossSpec {
    fn default() -> Self {
        Self {
            pl_sr_db: 10.0,
            pl_sd_db: 30.0,
            pl_rd_db: 25.0,
        }
    }
}

impl PathLossSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("pl_sr_db", self.pl_sr_db), ("pl_sd_db", self.pl_sd_db), ("pl_rd_db", self.pl_rd_db)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SolveError::InvalidParams(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

/// Channels of one coherence block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `M × N`, source to relay.
    pub h_sr: CMatrix,
    /// Length `M`, source to destination.
    pub h_sd: Vec<C64>,
    /// Length `N`, relay to destination.
    pub h_rd: Vec<C64>,
}

impl ChannelRealization {
    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        let (m, n) = (params.m, params.n);
        if self.h_sr.rows() != m || self.h_sr.cols() != n || self.h_sd.len() != m || self.h_rd.len() != n {
            return Err(SolveError::InvalidParams(format!(
                "channel dimensions H_SR {}x{}, h_SD {}, h_RD {} do not match M={m}, N={n}",
                self.h_sr.rows(),
                self.h_sr.cols(),
                self.h_sd.len(),
                self.h_rd.len()
            )));
        }
        let finite = |v: &C64| v.re.is_finite() && v.im.is_finite();
        if !self.h_sr.is_finite() || !self.h_sd.iter().all(finite) || !self.h_rd.iter().all(finite) {
            return Err(SolveError::InvalidParams("channel has non-finite entries".into()));
        }
        Ok(())
    }

    /// `‖h_RD‖²`, the only way the relay-destination link enters any formula.
    pub fn h_rd_gain(&self) -> f64 {
        norm_sqr(&self.h_rd)
    }

    /// Keeps the first `n` relay antennas.
    pub fn truncate_relay(&self, n: usize) -> Self {
        Self {
            h_sr: self.h_sr.leading_columns(n),
            h_sd: self.h_sd.clone(),
            h_rd: self.h_rd[..n.min(self.h_rd.len())].to_vec(),
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// SINR threshold `2^{2·rd_min} − 1` matching the half-slot rate target.
pub fn gamma_threshold(params: &SystemParams) -> f64 {
    (2.0 * params.rd_min).exp2() - 1.0
}

const STREAM_SR: u64 = 1;
const STREAM_SD: u64 = 2;
const STREAM_RD: u64 = 3;

fn complex_gaussian(rng: &mut ChaCha8Rng, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(s * re, s * im)
}

fn link_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws i.i.d. `CN(0, 10^{−PL/10})` entries for every link.
///
/// Each link uses its own random stream and `H_SR` is filled column by
/// column, so the realization for `N` relay antennas is the leading part of
/// the realization for any larger `N` under the same seed.
pub fn sample_channel(params: &SystemParams, pl: &PathLossSpec, seed: u64) -> ChannelRealization {
    let (m, n) = (params.m, params.n);
    let v_sr = db_to_linear(-pl.pl_sr_db);
    let v_sd = db_to_linear(-pl.pl_sd_db);
    let v_rd = db_to_linear(-pl.pl_rd_db);

    let mut rng = link_rng(seed, STREAM_SR);
    let mut h_sr = CMatrix::zeros(m, n);
    for c in 0..n {
        for r in 0..m {
            h_sr[(r, c)] = complex_gaussian(&mut rng, v_sr);
        }
    }
    let mut rng = link_rng(seed, STREAM_SD);
    let h_sd = (0..m).map(|_| complex_gaussian(&mut rng, v_sd)).collect();
    let mut rng = link_rng(seed, STREAM_RD);
    let h_rd = (0..n).map(|_| complex_gaussian(&mut rng, v_rd)).collect();
    ChannelRealization { h_sr, h_sd, h_rd }
}

/// Fixed two-antenna source, four-antenna relay reference channel with
/// `‖h_RD‖² = 0.0723`, its direction set to the all-ones vector.
pub fn fig2_channel() -> ChannelRealization {
    let c = C64::new;
    let h_sr = CMatrix::from_row_slice(
        2,
        4,
        &[
            c(0.4035, 0.1087),
            c(0.2944, 0.2835),
            c(-0.3285, -0.2116),
            c(0.7751, 0.0767),
            c(-0.1413, 0.0740),
            c(0.3469, 0.2438),
            c(0.0396, -0.0981),
            c(-0.0480, -0.0131),
        ],
    );
    let h_sd = vec![c(-0.0137, 0.0123), c(0.0054, 0.0105)];
    let amp = (0.0723f64 / 4.0).sqrt();
    let h_rd = vec![c(amp, 0.0); 4];
    ChannelRealization { h_sr, h_sd, h_rd }
}
