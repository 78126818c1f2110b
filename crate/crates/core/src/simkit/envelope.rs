use serde::Serialize;

use super::{SimError, Trajectory};
use crate::certkit::CertificateSet;
use crate::sigkit::SwitchingSignal;
use crate::verdikt::{exponents_from_stats, EnvelopeExponents};

/// Allowed violation of each bound, in natural-log units (≈ relative).
pub const ENVELOPE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeBound {
    /// `e^ψ V(0) ≤ V(t)`
    Lower,
    /// `V(t) ≤ e^φ V(0)`
    Upper,
    /// `α_lo ‖x‖² ≤ V(t)`
    NormLower,
    /// `V(t) ≤ α_hi ‖x‖²`
    NormUpper,
}

/// Smallest log-scale slack of each bound over the whole trajectory.
/// Nonnegative slacks mean the bound held everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub samples_checked: usize,
    pub worst_lower_slack: f64,
    pub worst_upper_slack: f64,
    pub worst_norm_lower_slack: f64,
    pub worst_norm_upper_slack: f64,
}

/// `(ψ(t), φ(t))` at every sample time, with `ψ(0) = φ(0) = 0`.
pub fn envelope_series(
    traj: &Trajectory,
    signal: &SwitchingSignal,
    certs: &CertificateSet,
) -> Result<Vec<EnvelopeExponents>, SimError> {
    traj.samples
        .iter()
        .map(|s| {
            if s.t == 0.0 {
                Ok(EnvelopeExponents { t: 0.0, psi: 0.0, phi: 0.0 })
            } else {
                Ok(exponents_from_stats(&signal.stats_at(s.t)?, certs)?)
            }
        })
        .collect()
}

/// Verifies the two-sided exponential envelope and the quadratic norm
/// bounds at every sample, all in log space.
pub fn check_envelopes(
    traj: &Trajectory,
    signal: &SwitchingSignal,
    certs: &CertificateSet,
) -> Result<EnvelopeReport, SimError> {
    let exps = envelope_series(traj, signal, certs)?;
    let ln_v0 = traj.initial().v.ln();
    let ln_lo = certs.alpha_lower().ln();
    let ln_hi = certs.alpha_upper().ln();
    let mut report = EnvelopeReport {
        samples_checked: 0,
        worst_lower_slack: f64::INFINITY,
        worst_upper_slack: f64::INFINITY,
        worst_norm_lower_slack: f64::INFINITY,
        worst_norm_upper_slack: f64::INFINITY,
    };
    for (index, (s, e)) in traj.samples.iter().zip(&exps).enumerate() {
        let ln_v = s.v.ln();
        let ln_n2 = 2.0 * s.norm_x.ln();
        let slacks = [
            (EnvelopeBound::Lower, ln_v - ln_v0 - e.psi),
            (EnvelopeBound::Upper, ln_v0 + e.phi - ln_v),
            (EnvelopeBound::NormLower, ln_v - ln_lo - ln_n2),
            (EnvelopeBound::NormUpper, ln_hi + ln_n2 - ln_v),
        ];
        for (bound, slack) in slacks {
            #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail
            if !(slack >= -ENVELOPE_TOL) {
                return Err(SimError::EnvelopeViolation { index, t: s.t, bound, excess: -slack });
            }
        }
        report.worst_lower_slack = report.worst_lower_slack.min(slacks[0].1);
        report.worst_upper_slack = report.worst_upper_slack.min(slacks[1].1);
        report.worst_norm_lower_slack = report.worst_norm_lower_slack.min(slacks[2].1);
        report.worst_norm_upper_slack = report.worst_norm_upper_slack.min(slacks[3].1);
        report.samples_checked += 1;
    }
    Ok(report)
}
