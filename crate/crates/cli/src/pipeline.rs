//! certify → classify → simulate, and the report they fill in.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use switch_verdict::certkit::{build_certificate_set, CertificateSet, Stability};
use switch_verdict::family::ModeId;
use switch_verdict::simkit::{
    check_envelopes, divergence_verdict, envelope_series, log_norm_slope, propagate, write_trace, DivergenceVerdict,
    EnvelopeReport, SimConfig,
};
use switch_verdict::verdikt::{classify, empirical_margins, MarginReport};

use crate::config::{ClassifyMode, ProblemConfig, Signal, DEFAULT_TAIL_FRACTION};
use crate::reproduce::Check;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Certify,
    Classify,
    Simulate,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<CertificateTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margins: Option<MarginReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulations: Option<Vec<SimulationSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproduction: Option<Vec<Check>>,
}

#[derive(Debug, Serialize)]
pub struct Provenance {
    /// SHA-256 of the config in canonical (re-serialized) form.
    pub config_sha256: String,
    pub version: String,
}

#[derive(Debug, Serialize)]
pub struct CertificateTable {
    pub subsystems: Vec<SubsystemRow>,
    pub edges: Vec<EdgeRow>,
    pub alpha_lower: f64,
    pub alpha_upper: f64,
}

#[derive(Debug, Serialize)]
pub struct SubsystemRow {
    pub id: ModeId,
    pub stability: Stability,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub lambda_hat: f64,
    pub lambda_check: f64,
    pub p: Vec<Vec<f64>>,
    pub lyapunov_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct EdgeRow {
    pub from: ModeId,
    pub to: ModeId,
    pub mu_hat: f64,
    pub mu_check: f64,
    /// Recorded only; tight gains can fall below 1.
    pub mu_hat_at_least_one: bool,
}

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub index: usize,
    pub x0: Vec<f64>,
    pub final_t: f64,
    pub final_norm: f64,
    pub log_norm_slope: f64,
    pub saturated: bool,
    pub verdict: DivergenceVerdict,
    pub envelope: EnvelopeReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

pub fn digest(config: &ProblemConfig) -> String {
    let canonical = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&canonical))
}

pub fn certificate_table(certs: &CertificateSet) -> CertificateTable {
    let family = certs.family();
    let subsystems = certs
        .certificates()
        .iter()
        .map(|c| SubsystemRow {
            id: c.id,
            stability: c.stability,
            epsilon: (c.stability == Stability::Unstable).then_some(c.epsilon),
            lambda_hat: c.lambda_hat,
            lambda_check: c.lambda_check,
            p: c.p.as_mat().to_rows(),
            lyapunov_residual: c.relative_residual(family.matrix(c.id).expect("certified mode")),
        })
        .collect();
    let edges = certs
        .gains()
        .values()
        .map(|g| EdgeRow {
            from: g.edge.from,
            to: g.edge.to,
            mu_hat: g.mu_hat,
            mu_check: g.mu_check,
            mu_hat_at_least_one: g.mu_hat_at_least_one(),
        })
        .collect();
    CertificateTable { subsystems, edges, alpha_lower: certs.alpha_lower(), alpha_upper: certs.alpha_upper() }
}

fn margins(config: &ProblemConfig, signal: &Signal, certs: &CertificateSet) -> Result<MarginReport> {
    let opts = config.classify.as_ref();
    let limits = match signal {
        Signal::Limits(a) => Some(a),
        Signal::Realized { limits, .. } => limits.as_ref(),
    };
    let mode = opts.and_then(|c| c.mode).unwrap_or(if limits.is_some() {
        ClassifyMode::Asymptotic
    } else {
        ClassifyMode::Empirical
    });
    match (mode, signal) {
        (ClassifyMode::Asymptotic, _) => {
            let limits = limits.ok_or_else(|| {
                anyhow!("asymptotic classification needs a periodic or asymptotic signal; use mode \"empirical\"")
            })?;
            Ok(classify(limits, certs)?)
        }
        (ClassifyMode::Empirical, Signal::Limits(_)) => {
            bail!("empirical classification needs a realized signal, not limit statistics")
        }
        (ClassifyMode::Empirical, Signal::Realized { signal, horizon, .. }) => {
            let h = opts
                .and_then(|c| c.horizon)
                .or(config.simulate.as_ref().map(|s| s.horizon))
                .or(*horizon)
                .ok_or_else(|| anyhow!("empirical classification needs classify.horizon"))?;
            let tail = opts.and_then(|c| c.tail_fraction).unwrap_or(DEFAULT_TAIL_FRACTION);
            Ok(empirical_margins(signal, certs, h, tail)?)
        }
    }
}

fn simulate(
    config: &ProblemConfig,
    signal: &Signal,
    certs: &CertificateSet,
    out: Option<&Path>,
) -> Result<Vec<SimulationSummary>> {
    let Signal::Realized { signal, .. } = signal else {
        bail!("cannot simulate limit statistics; give a schedule, cycle or random signal")
    };
    let sim = config.simulate.as_ref().ok_or_else(|| anyhow!("config has no simulate block"))?;
    let sim_config = SimConfig::new(sim.horizon, sim.sample_step);
    config
        .initial_states()?
        .into_iter()
        .enumerate()
        .map(|(index, x0)| {
            let ctx = || format!("initial state {index}");
            let traj = propagate(certs, signal, &x0, &sim_config).with_context(ctx)?;
            let envelope = check_envelopes(&traj, signal, certs).with_context(ctx)?;
            let trace = match out {
                Some(dir) => {
                    let name = format!("trace_{index}.csv");
                    let file = File::create(dir.join(&name)).with_context(|| format!("creating {name}"))?;
                    write_trace(&traj, &envelope_series(&traj, signal, certs)?, BufWriter::new(file))?;
                    Some(name)
                }
                None => None,
            };
            let last = traj.last();
            Ok(SimulationSummary {
                index,
                final_t: last.t,
                final_norm: last.norm_x,
                log_norm_slope: log_norm_slope(&traj).with_context(ctx)?,
                saturated: traj.saturated,
                verdict: divergence_verdict(&traj).with_context(ctx)?,
                envelope,
                trace,
                x0,
            })
        })
        .collect()
}

/// Runs `command` on `config`. Trace files go to `out` when given.
pub fn run(command: Command, config: &ProblemConfig, out: Option<&Path>) -> Result<RunReport> {
    let family = config.family()?;
    let certs = build_certificate_set(&family, &config.certificate_options()?)?;
    let mut report = RunReport {
        command: format!("{command:?}").to_lowercase(),
        provenance: Provenance { config_sha256: digest(config), version: env!("CARGO_PKG_VERSION").to_string() },
        certificates: Some(certificate_table(&certs)),
        margins: None,
        simulations: None,
        reproduction: None,
    };
    match command {
        Command::Certify => {}
        Command::Classify => {
            let signal = config.signal(&family)?;
            report.margins = Some(margins(config, &signal, &certs)?);
        }
        Command::Simulate => {
            let signal = config.signal(&family)?;
            report.simulations = Some(simulate(config, &signal, &certs, out)?);
        }
    }
    Ok(report)
}
