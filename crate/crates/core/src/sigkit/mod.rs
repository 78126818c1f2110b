//! Switching signals, admissibility, and the switching statistics
//! `N(t)`, `N_pq(t)`, `T_p(t)`, `ν(t)`, `ρ_pq(t)`, `η_p(t)`.

mod euler;
mod random;
mod signal;
mod stats;

use thiserror::Error;

use crate::family::{ModeId, SubsystemFamily};

pub use euler::{cycle_from_circuit, eulerian_transition_cycle};
pub use random::{random_admissible, RandomSignalSpec};
pub use signal::{CycleSpec, Segment, Segments, Switch, SwitchingSignal};
pub use stats::{AsymptoticStatistics, SignalStatistics, SwitchingRates, RATE_SUM_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("switch {index} at t = {time} is not after the previous one")]
    NonIncreasing { index: usize, time: f64 },
    #[error("switch {index} re-enters the active mode {mode}")]
    RepeatedMode { index: usize, mode: ModeId },
    #[error("cycle has no entries")]
    EmptyCycle,
    #[error("cycle entry {index} has invalid dwell {dwell}")]
    BadDwell { index: usize, dwell: f64 },
    #[error("cycle entry {index} repeats the preceding mode")]
    CycleRepeatsMode { index: usize },
    #[error("transition {index} from {from} to {to} is not admissible")]
    InadmissibleTransition { index: usize, from: ModeId, to: ModeId },
    #[error("mode {0} is not part of the family")]
    UnknownMode(ModeId),
    #[error("statistics requested at nonpositive time {0}")]
    NonpositiveTime(f64),
    #[error("graph is not Eulerian: vertex {vertex} has in-degree {in_degree} and out-degree {out_degree}")]
    NotEulerian { vertex: ModeId, in_degree: usize, out_degree: usize },
    #[error("edges do not form a single connected component")]
    Disconnected,
    #[error("edge set is empty")]
    NoEdges,
    #[error("no dwell time given for mode {0}")]
    MissingDwell(ModeId),
    #[error("mode {0} has no admissible successor")]
    DeadEnd(ModeId),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("invalid statistics: {0}")]
    BadStatistics(String),
}

/// Checks that every mode exists in `family` and every transition is an
/// edge of it. Periodic signals are checked over one period including the
/// wrap-around transition.
pub fn validate(signal: &SwitchingSignal, family: &SubsystemFamily) -> Result<(), SignalError> {
    for m in signal.modes() {
        if !family.contains(m) {
            return Err(SignalError::UnknownMode(m));
        }
    }
    for (index, e) in signal.transitions() {
        if !family.has_edge(e) {
            return Err(SignalError::InadmissibleTransition { index, from: e.from, to: e.to });
        }
    }
    Ok(())
}

/// The periodic signal of `spec` with its exact asymptotic statistics,
/// after checking admissibility against `family`.
pub fn periodic_from_cycle(
    spec: &CycleSpec,
    family: &SubsystemFamily,
) -> Result<(SwitchingSignal, AsymptoticStatistics), SignalError> {
    let signal = SwitchingSignal::periodic(spec.clone());
    validate(&signal, family)?;
    Ok((signal, AsymptoticStatistics::of_cycle(spec)))
}
