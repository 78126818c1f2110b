//! Stability and instability margins, envelope exponents, and the
//! three-way classification of switching signals.
//!
//! With rate scalars `λ_p` and edge gains `μ_pq` from a certificate set,
//!
//! ```text
//! margin = ν Σ_(p,q) ρ_pq ln μ_pq − Σ_p λ_p η_p
//! ```
//!
//! using `(λ̂, μ̂)` for the stability margin and `(λ̌, μ̌)` for the
//! instability margin. Because `λ_p` carries its sign (negative for
//! unstable subsystems), the mode sum is `−Σ_S |λ_p| η_p + Σ_U |λ_p| η_p`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certkit::CertificateSet;
use crate::family::{Edge, ModeId};
use crate::sigkit::{SignalError, SignalStatistics, SwitchingRates, SwitchingSignal};

/// Margins within this distance of zero are treated as zero.
pub const ZERO_BAND: f64 = 1e-9;
/// Uniform sample count in the tail window of [`empirical_margins`].
pub const TAIL_SAMPLES: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerdictError {
    #[error("no gains for edge {0}")]
    MissingEdgeGain(Edge),
    #[error("no certificate for subsystem {0}")]
    UnknownMode(ModeId),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("tail window [{from}, {to}] sees none of the signal's switches")]
    EmptyTail { from: f64, to: f64 },
    #[error("tail fraction must lie in (0, 1), got {0}")]
    InvalidTailFraction(f64),
    #[error("horizon must be positive and finite, got {0}")]
    BadHorizon(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Stabilizing,
    Destabilizing,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationMode {
    Asymptotic,
    EmpiricalTail,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub phi_hat_margin: f64,
    pub phi_check_margin: f64,
    pub evaluation_mode: EvaluationMode,
    pub classification: Classification,
}

impl MarginReport {
    pub fn new(phi_hat_margin: f64, phi_check_margin: f64, evaluation_mode: EvaluationMode) -> Self {
        let classification = if phi_hat_margin < -ZERO_BAND {
            Classification::Stabilizing
        } else if phi_check_margin > ZERO_BAND {
            Classification::Destabilizing
        } else {
            Classification::Undetermined
        };
        MarginReport { phi_hat_margin, phi_check_margin, evaluation_mode, classification }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeExponents {
    pub t: f64,
    pub psi: f64,
    pub phi: f64,
}

#[derive(Clone, Copy)]
enum Scalars {
    Hat,
    Check,
}

fn rate(certs: &CertificateSet, p: ModeId, which: Scalars) -> Result<f64, VerdictError> {
    let c = certs.certificate(p).ok_or(VerdictError::UnknownMode(p))?;
    Ok(match which {
        Scalars::Hat => c.lambda_hat,
        Scalars::Check => c.lambda_check,
    })
}

fn ln_gain(certs: &CertificateSet, e: Edge, which: Scalars) -> Result<f64, VerdictError> {
    let g = certs.edge_gains(e).ok_or(VerdictError::MissingEdgeGain(e))?;
    Ok(match which {
        Scalars::Hat => g.mu_hat.ln(),
        Scalars::Check => g.mu_check.ln(),
    })
}

fn margin(stats: &impl SwitchingRates, certs: &CertificateSet, which: Scalars) -> Result<f64, VerdictError> {
    let mut edge_sum = 0.0;
    for (&e, &r) in stats.rho() {
        edge_sum += r * ln_gain(certs, e, which)?;
    }
    let edge_term = if stats.nu() > 0.0 { stats.nu() * edge_sum } else { 0.0 };
    let mut mode_term = 0.0;
    for (&p, &eta) in stats.eta() {
        mode_term += rate(certs, p, which)? * eta;
    }
    Ok(edge_term - mode_term)
}

/// The stability functional, with `(λ̂, μ̂)`. Negative in the limit means
/// the signal is stabilizing.
pub fn stability_margin(stats: &impl SwitchingRates, certs: &CertificateSet) -> Result<f64, VerdictError> {
    margin(stats, certs, Scalars::Hat)
}

/// The instability functional, with `(λ̌, μ̌)`. Positive in the limit
/// means the signal is destabilizing.
pub fn instability_margin(stats: &impl SwitchingRates, certs: &CertificateSet) -> Result<f64, VerdictError> {
    margin(stats, certs, Scalars::Check)
}

/// Classifies a signal whose statistics converge to `asym`.
pub fn classify(asym: &impl SwitchingRates, certs: &CertificateSet) -> Result<MarginReport, VerdictError> {
    Ok(MarginReport::new(stability_margin(asym, certs)?, instability_margin(asym, certs)?, EvaluationMode::Asymptotic))
}

/// `ψ = Σ N_pq ln μ̌_pq − Σ λ̌_p T_p` and the same with hat scalars for
/// `φ`, from counts rather than rates so `N = 0` needs no special case.
pub fn exponents_from_stats(
    stats: &SignalStatistics,
    certs: &CertificateSet,
) -> Result<EnvelopeExponents, VerdictError> {
    let mut psi = 0.0;
    let mut phi = 0.0;
    for (&e, &n) in &stats.n_pq {
        psi += n as f64 * ln_gain(certs, e, Scalars::Check)?;
        phi += n as f64 * ln_gain(certs, e, Scalars::Hat)?;
    }
    for (&p, &tp) in &stats.t_p {
        psi -= rate(certs, p, Scalars::Check)? * tp;
        phi -= rate(certs, p, Scalars::Hat)? * tp;
    }
    Ok(EnvelopeExponents { t: stats.t, psi, phi })
}

/// Envelope exponents of `signal` at time `t > 0`:
/// `e^ψ(t) V(0) ≤ V_σ(t)(x(t)) ≤ e^φ(t) V(0)`.
pub fn envelope_exponents(
    signal: &SwitchingSignal,
    certs: &CertificateSet,
    t: f64,
) -> Result<EnvelopeExponents, VerdictError> {
    exponents_from_stats(&signal.stats_at(t)?, certs)
}

/// Finite-horizon stand-in for the limsup/liminf of the margins: samples
/// both margins on `[tail_fraction·horizon, horizon]` at every switching
/// instant and at [`TAIL_SAMPLES`] uniform times, and reports the sup of
/// the stability margin and the inf of the instability margin.
pub fn empirical_margins(
    signal: &SwitchingSignal,
    certs: &CertificateSet,
    horizon: f64,
    tail_fraction: f64,
) -> Result<MarginReport, VerdictError> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(VerdictError::InvalidTailFraction(tail_fraction));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(VerdictError::BadHorizon(horizon));
    }
    let from = tail_fraction * horizon;
    if signal.first_switch().is_some_and(|t| t > horizon) {
        return Err(VerdictError::EmptyTail { from, to: horizon });
    }
    let mut times = signal.switch_times_in(from, horizon);
    let step = (horizon - from) / (TAIL_SAMPLES - 1) as f64;
    times.extend((0..TAIL_SAMPLES).map(|k| if k + 1 == TAIL_SAMPLES { horizon } else { from + k as f64 * step }));
    let mut sup_hat = f64::NEG_INFINITY;
    let mut inf_check = f64::INFINITY;
    for t in times {
        let stats = signal.stats_at(t)?;
        sup_hat = sup_hat.max(stability_margin(&stats, certs)?);
        inf_check = inf_check.min(instability_margin(&stats, certs)?);
    }
    Ok(MarginReport::new(sup_hat, inf_check, EvaluationMode::EmpiricalTail))
}
