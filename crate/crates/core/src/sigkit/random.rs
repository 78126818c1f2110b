use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use super::{SignalError, Switch, SwitchingSignal};
use crate::family::{ModeId, SubsystemFamily};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSignalSpec {
    pub seed: u64,
    pub mean_dwell: f64,
    pub horizon: f64,
    /// Drawn uniformly from the family when absent.
    #[serde(default)]
    pub initial_mode: Option<ModeId>,
}

/// A random walk on the transition graph with exponentially distributed
/// dwell times, covering `[0, horizon]`. Driven by SplitMix64 so a seed
/// always produces the same signal.
pub fn random_admissible(family: &SubsystemFamily, spec: &RandomSignalSpec) -> Result<SwitchingSignal, SignalError> {
    if !(spec.mean_dwell > 0.0 && spec.mean_dwell.is_finite()) {
        return Err(SignalError::BadParameter(format!("mean_dwell = {}", spec.mean_dwell)));
    }
    if !(spec.horizon > 0.0 && spec.horizon.is_finite()) {
        return Err(SignalError::BadParameter(format!("horizon = {}", spec.horizon)));
    }
    let mut rng = SplitMix64::seed_from_u64(spec.seed);
    let dwell = Exp::new(1.0 / spec.mean_dwell).map_err(|e| SignalError::BadParameter(e.to_string()))?;
    let mut mode = match spec.initial_mode {
        Some(m) if family.contains(m) => m,
        Some(m) => return Err(SignalError::UnknownMode(m)),
        None => ModeId(rng.random_range(1..=family.len())),
    };
    let initial = mode;
    let mut t = 0.0;
    let mut switches = Vec::new();
    loop {
        let d: f64 = dwell.sample(&mut rng);
        t += d;
        if t > spec.horizon {
            break;
        }
        if d <= 0.0 {
            continue;
        }
        let succ: Vec<ModeId> = family.successors(mode).collect();
        if succ.is_empty() {
            return Err(SignalError::DeadEnd(mode));
        }
        mode = succ[rng.random_range(0..succ.len())];
        switches.push(Switch { time: t, mode });
    }
    SwitchingSignal::from_switches(initial, switches)
}
