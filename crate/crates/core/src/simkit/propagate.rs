use std::collections::hash_map::Entry;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::certkit::CertificateSet;
use crate::family::ModeId;
use crate::numkit::{expm, Mat, NumError};
use crate::sigkit::{validate, SwitchingSignal};

pub const DEFAULT_OVERFLOW_CAP: f64 = 1e300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub horizon: f64,
    pub sample_step: f64,
    #[serde(default = "default_cap")]
    pub overflow_cap: f64,
}

fn default_cap() -> f64 {
    DEFAULT_OVERFLOW_CAP
}

impl SimConfig {
    pub fn new(horizon: f64, sample_step: f64) -> Self {
        SimConfig { horizon, sample_step, overflow_cap: DEFAULT_OVERFLOW_CAP }
    }

    fn check(&self) -> Result<(), SimError> {
        let ok = self.horizon > 0.0
            && self.horizon.is_finite()
            && self.sample_step > 0.0
            && self.sample_step <= self.horizon
            && self.overflow_cap > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SimError::BadConfig(format!(
                "horizon = {}, sample_step = {}, overflow_cap = {}",
                self.horizon, self.sample_step, self.overflow_cap
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub norm_x: f64,
    pub mode: ModeId,
    /// `V_mode(x)`.
    pub v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Set when the state left the representable range; `samples` then stops
    /// at the last finite state.
    pub saturated: bool,
}

impl Trajectory {
    pub fn initial(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the initial sample")
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `count` initial states drawn uniformly from `[lo, hi]^dim`, reproducible
/// per seed.
pub fn random_initial_states(count: usize, dim: usize, lo: f64, hi: f64, seed: u64) -> Result<Vec<Vec<f64>>, SimError> {
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(SimError::BadConfig(format!("initial state range [{lo}, {hi}]")));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    Ok((0..count).map(|_| (0..dim).map(|_| rng.random_range(lo..=hi)).collect()).collect())
}

/// Integrates `ẋ = A_σ(t) x` on `[0, horizon]`.
///
/// Each dwell is split into equal substeps no longer than `sample_step` and
/// advanced by `e^{A h}`, so every switching instant is a sample point. The
/// sample at a switching instant carries the newly entered mode.
pub fn propagate(
    certs: &CertificateSet,
    signal: &SwitchingSignal,
    x0: &[f64],
    config: &SimConfig,
) -> Result<Trajectory, SimError> {
    config.check()?;
    let family = certs.family();
    let d = family.dim();
    if x0.len() != d {
        return Err(SimError::DimensionMismatch { expected: d, got: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(SimError::BadConfig("initial state is not finite".into()));
    }
    if x0.iter().all(|&v| v == 0.0) {
        return Err(SimError::ZeroInitialState);
    }
    validate(signal, family)?;

    let value = |mode: ModeId, x: &[f64]| -> Result<f64, SimError> {
        Ok(certs.certificate(mode).ok_or(SimError::UnknownMode(mode))?.value(x))
    };
    let mut cache: HashMap<(ModeId, u64), Mat> = HashMap::new();
    let mut x = x0.to_vec();
    let mut samples = Vec::new();
    let m0 = signal.initial_mode();
    samples.push(Sample { t: 0.0, norm_x: norm(&x), v: value(m0, &x)?, x: x.clone(), mode: m0 });

    for (i, seg) in signal.segments().enumerate() {
        if i > 0 {
            let last = samples.last_mut().expect("nonempty");
            last.mode = seg.mode;
            last.v = value(seg.mode, &last.x)?;
        }
        if seg.start >= config.horizon {
            break;
        }
        let end = seg.end.min(config.horizon);
        let len = end - seg.start;
        let n = ((len / config.sample_step).ceil() as usize).max(1);
        let h = len / n as f64;
        let a = family.matrix(seg.mode).ok_or(SimError::UnknownMode(seg.mode))?;
        let step = match cache.entry((seg.mode, h.to_bits())) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => match expm(a, h) {
                Ok(m) => e.insert(m),
                Err(NumError::Overflow) => {
                    return Ok(Trajectory { samples, saturated: true });
                }
                Err(err) => return Err(err.into()),
            },
        };
        for k in 1..=n {
            x = step.mul_vec(&x);
            let nx = norm(&x);
            if !nx.is_finite() || nx > config.overflow_cap {
                return Ok(Trajectory { samples, saturated: true });
            }
            let t = if k == n { end } else { seg.start + k as f64 * h };
            samples.push(Sample { t, norm_x: nx, v: value(seg.mode, &x)?, x: x.clone(), mode: seg.mode });
        }
        // a switch landing exactly on the horizon still updates the mode
        if seg.end > config.horizon {
            break;
        }
    }
    Ok(Trajectory { samples, saturated: false })
}
