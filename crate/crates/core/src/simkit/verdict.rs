use serde::{Deserialize, Serialize};

use super::{SimError, Trajectory};

/// Log-norm slopes within `±SLOPE_THRESHOLD` are inconclusive.
pub const SLOPE_THRESHOLD: f64 = 1e-3;
pub const MIN_SAMPLES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceVerdict {
    Converging,
    Diverging,
    Inconclusive,
}

/// Least-squares slope of `ln ‖x(t)‖` against `t` over the final half of
/// the samples.
pub fn log_norm_slope(traj: &Trajectory) -> Result<f64, SimError> {
    let n = traj.samples.len();
    if n < MIN_SAMPLES {
        return Err(SimError::TooFewSamples(n));
    }
    let tail = &traj.samples[n / 2..];
    let m = tail.len() as f64;
    let mean_t = tail.iter().map(|s| s.t).sum::<f64>() / m;
    let mean_y = tail.iter().map(|s| s.norm_x.ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for s in tail {
        let dt = s.t - mean_t;
        sxy += dt * (s.norm_x.ln() - mean_y);
        sxx += dt * dt;
    }
    Ok(sxy / sxx)
}

/// Finite-horizon reading of the trajectory: saturated runs diverge,
/// otherwise the sign of [`log_norm_slope`] decides.
pub fn divergence_verdict(traj: &Trajectory) -> Result<DivergenceVerdict, SimError> {
    if traj.saturated {
        return Ok(DivergenceVerdict::Diverging);
    }
    let slope = log_norm_slope(traj)?;
    Ok(if slope > SLOPE_THRESHOLD {
        DivergenceVerdict::Diverging
    } else if slope < -SLOPE_THRESHOLD {
        DivergenceVerdict::Converging
    } else {
        DivergenceVerdict::Inconclusive
    })
}
