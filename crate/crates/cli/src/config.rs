//! The JSON problem description and its translation into library types.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use switch_verdict::certkit::{CertificateOptions, QChoice, DEFAULT_EPS_OFFSET};
use switch_verdict::family::{Edge, ModeId, SubsystemFamily};
use switch_verdict::numkit::{Mat, SpdMat};
use switch_verdict::sigkit::{
    cycle_from_circuit, eulerian_transition_cycle, periodic_from_cycle, random_admissible, validate,
    AsymptoticStatistics, CycleSpec, RandomSignalSpec, Switch, SwitchingSignal,
};
use switch_verdict::simkit::random_initial_states;

/// A matrix entry: a JSON number, or a decimal string such as `"-0.7565"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Text(String),
}

impl Entry {
    fn value(&self) -> Result<f64> {
        match self {
            Entry::Number(v) => Ok(*v),
            Entry::Text(s) => s.trim().parse().with_context(|| format!("bad matrix entry {s:?}")),
        }
    }
}

/// Row-major nested arrays.
pub type MatrixSpec = Vec<Vec<Entry>>;

fn to_mat(spec: &MatrixSpec, d: usize, what: &str) -> Result<Mat> {
    ensure!(spec.len() == d && spec.iter().all(|r| r.len() == d), "{what} must be {d}x{d}");
    let rows = spec
        .iter()
        .map(|r| r.iter().map(Entry::value).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()
        .with_context(|| what.to_string())?;
    Mat::from_rows(&rows).with_context(|| what.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub family: FamilyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificates: Option<CertificateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifyConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub d: usize,
    pub subsystems: Vec<SubsystemConfig>,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsystemConfig {
    pub id: usize,
    #[serde(rename = "A")]
    pub a: MatrixSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    #[serde(rename = "Q", default)]
    pub q: QSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_offset: Option<f64>,
}

/// `"identity"` or a map from subsystem id to `Q_p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QSpec {
    Named(String),
    PerSubsystem(BTreeMap<String, MatrixSpec>),
}

impl Default for QSpec {
    fn default() -> Self {
        QSpec::Named("identity".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SignalConfig {
    /// Explicit switching instants `[time, mode]` after `initial_mode`.
    Schedule {
        initial_mode: usize,
        #[serde(default)]
        switches: Vec<(f64, usize)>,
    },
    /// A repeated cycle, either listed as `[mode, dwell]` entries or
    /// built as an Eulerian circuit of the transition graph with one dwell
    /// per mode.
    Cycle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        entries: Option<Vec<(usize, f64)>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eulerian_dwell: Option<BTreeMap<String, f64>>,
    },
    /// Limit statistics only; `rho` holds `[p, q, value]` triples.
    Asymptotic {
        nu: f64,
        rho: Vec<(usize, usize, f64)>,
        eta: BTreeMap<String, f64>,
    },
    Random(RandomSignalSpec),
}

/// A list of initial states, or `"random:k:lo:hi:seed"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum X0Spec {
    List(Vec<Vec<Entry>>),
    Random(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub x0: X0Spec,
    pub horizon: f64,
    pub sample_step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifyMode {
    Asymptotic,
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    /// Defaults to `asymptotic` when limit statistics are available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ClassifyMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    /// Observation horizon for the empirical mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;

/// The signal after resolution: either a concrete switching signal (with
/// its limit statistics when it is periodic) or limit statistics alone.
pub enum Signal {
    Realized {
        signal: SwitchingSignal,
        limits: Option<AsymptoticStatistics>,
        /// Natural observation horizon, if the description implies one.
        horizon: Option<f64>,
    },
    Limits(AsymptoticStatistics),
}

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing config")
    }

    pub fn family(&self) -> Result<SubsystemFamily> {
        let f = &self.family;
        ensure!(f.d > 0, "family.d must be positive");
        let mut subs = f.subsystems.clone();
        subs.sort_by_key(|s| s.id);
        let mats = subs
            .iter()
            .map(|s| Ok((ModeId(s.id), to_mat(&s.a, f.d, &format!("A of subsystem {}", s.id))?)))
            .collect::<Result<Vec<_>>>()?;
        let edges = f.edges.iter().map(|&(p, q)| Edge::new(p, q));
        Ok(SubsystemFamily::new(mats, edges)?)
    }

    pub fn certificate_options(&self) -> Result<CertificateOptions> {
        let Some(c) = &self.certificates else { return Ok(CertificateOptions::default()) };
        let q = match &c.q {
            QSpec::Named(name) if name == "identity" => QChoice::Identity,
            QSpec::Named(name) => bail!("unknown Q choice {name:?}"),
            QSpec::PerSubsystem(map) => QChoice::PerSubsystem(
                map.iter()
                    .map(|(id, m)| {
                        let id = parse_id(id)?;
                        let what = format!("Q of subsystem {id}");
                        let spd = SpdMat::new(to_mat(m, self.family.d, &what)?).context(what)?;
                        Ok((ModeId(id), spd))
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(CertificateOptions { q, eps_offset: c.eps_offset.unwrap_or(DEFAULT_EPS_OFFSET) })
    }

    pub fn signal(&self, family: &SubsystemFamily) -> Result<Signal> {
        let spec = self.signal.as_ref().ok_or_else(|| anyhow!("config has no signal block"))?;
        let periodic = |cycle: CycleSpec| -> Result<Signal> {
            let (signal, limits) = periodic_from_cycle(&cycle, family)?;
            Ok(Signal::Realized { signal, limits: Some(limits), horizon: None })
        };
        match spec {
            SignalConfig::Schedule { initial_mode, switches } => {
                let sw = switches.iter().map(|&(time, m)| Switch { time, mode: ModeId(m) }).collect();
                let signal = SwitchingSignal::from_switches(ModeId(*initial_mode), sw)?;
                validate(&signal, family)?;
                let horizon = switches.last().map(|s| s.0);
                Ok(Signal::Realized { signal, limits: None, horizon })
            }
            SignalConfig::Cycle { entries: Some(entries), eulerian_dwell: None } => {
                periodic(CycleSpec::new(entries.iter().map(|&(m, d)| (ModeId(m), d)).collect())?)
            }
            SignalConfig::Cycle { entries: None, eulerian_dwell: Some(dwell) } => {
                let circuit = eulerian_transition_cycle(family.edges())?;
                let dwell = dwell.iter().map(|(m, &d)| Ok((ModeId(parse_id(m)?), d))).collect::<Result<_>>()?;
                periodic(cycle_from_circuit(&circuit, &dwell)?)
            }
            SignalConfig::Cycle { .. } => bail!("cycle signal needs exactly one of `entries` or `eulerian_dwell`"),
            SignalConfig::Asymptotic { nu, rho, eta } => {
                let rho = rho.iter().map(|&(p, q, v)| (Edge::new(p, q), v)).collect();
                let eta = eta.iter().map(|(p, &v)| Ok((ModeId(parse_id(p)?), v))).collect::<Result<_>>()?;
                let stats = AsymptoticStatistics::new(*nu, rho, eta)?;
                if let Some(e) = stats.rho.keys().find(|e| !family.has_edge(**e)) {
                    bail!("asymptotic statistics use transition {e}, which is not admissible");
                }
                if let Some(p) = stats.eta.keys().find(|p| !family.contains(**p)) {
                    bail!("asymptotic statistics mention unknown subsystem {p}");
                }
                Ok(Signal::Limits(stats))
            }
            SignalConfig::Random(spec) => {
                let signal = random_admissible(family, spec)?;
                Ok(Signal::Realized { signal, limits: None, horizon: Some(spec.horizon) })
            }
        }
    }

    pub fn initial_states(&self) -> Result<Vec<Vec<f64>>> {
        let sim = self.simulate.as_ref().ok_or_else(|| anyhow!("config has no simulate block"))?;
        let states = match &sim.x0 {
            X0Spec::List(list) => {
                list.iter().map(|x| x.iter().map(Entry::value).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?
            }
            X0Spec::Random(text) => parse_random_x0(text, self.family.d)?,
        };
        ensure!(!states.is_empty(), "simulate.x0 is empty");
        Ok(states)
    }
}

/// Subsystem ids used as JSON object keys.
fn parse_id(key: &str) -> Result<usize> {
    key.trim().parse().with_context(|| format!("{key:?} is not a subsystem id"))
}

fn parse_random_x0(text: &str, d: usize) -> Result<Vec<Vec<f64>>> {
    let bad = || anyhow!("x0 {text:?} is not of the form random:k:lo:hi:seed");
    let parts: Vec<&str> = text.split(':').collect();
    let [tag, k, lo, hi, seed] = parts.as_slice() else { return Err(bad()) };
    ensure!(*tag == "random", bad());
    let k: usize = k.parse().map_err(|_| bad())?;
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let seed: u64 = seed.parse().map_err(|_| bad())?;
    Ok(random_initial_states(k, d, lo, hi, seed)?)
}
