//! Trajectory simulation by per-dwell matrix exponentials, envelope checks,
//! and finite-horizon convergence verdicts.

mod envelope;
mod propagate;
mod trace;
mod verdict;

use thiserror::Error;

use crate::family::ModeId;
use crate::numkit::NumError;
use crate::sigkit::SignalError;
use crate::verdikt::VerdictError;

pub use envelope::{check_envelopes, envelope_series, EnvelopeBound, EnvelopeReport, ENVELOPE_TOL};
pub use propagate::{propagate, random_initial_states, Sample, SimConfig, Trajectory, DEFAULT_OVERFLOW_CAP};
pub use trace::{write_trace, TRACE_HEADER};
pub use verdict::{divergence_verdict, log_norm_slope, DivergenceVerdict, MIN_SAMPLES, SLOPE_THRESHOLD};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("initial state has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("initial state is the zero vector")]
    ZeroInitialState,
    #[error("invalid simulation settings: {0}")]
    BadConfig(String),
    #[error("no certificate for subsystem {0}")]
    UnknownMode(ModeId),
    #[error(transparent)]
    Numeric(#[from] NumError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Verdict(#[from] VerdictError),
    #[error("{bound:?} envelope violated at sample {index} (t = {t}) by {excess:e} in log scale")]
    EnvelopeViolation { index: usize, t: f64, bound: EnvelopeBound, excess: f64 },
    #[error("need at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("writing trace: {0}")]
    Csv(#[from] csv::Error),
}
