//! Multiple Lyapunov-like certificates.
//!
//! Each subsystem `p` gets a quadratic form `V_p(ξ) = ξᵀP_pξ` with two rate
//! scalars sandwiching its evolution along the `p`-th flow,
//!
//! ```text
//! e^{-λ̌_p t} V_p(γ(0)) ≤ V_p(γ(t)) ≤ e^{-λ̂_p t} V_p(γ(0)),
//! ```
//!
//! and each admissible edge `(p, q)` gets two gains sandwiching the jump in
//! Lyapunov value, `μ̌_pq V_p(ξ) ≤ V_q(ξ) ≤ μ̂_pq V_p(ξ)`. The gains used here
//! are the tight ones: the extreme eigenvalues of `P_q P_p⁻¹`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::family::{Edge, ModeId, SubsystemFamily};
use crate::numkit::{
    lyapunov_residual, pencil_extrema, solve_lyapunov, spectral_abscissa, sym_eig_extrema, EigExtrema, Mat, NumError,
    SpdMat,
};

/// Matrices whose spectral abscissa is within this distance of zero are
/// neither certified stable nor unstable.
pub const BOUNDARY_TOL: f64 = 1e-9;
pub const DEFAULT_EPS_OFFSET: f64 = 1e-4;
const MAX_EPS_ATTEMPTS: usize = 60;
/// The offset never exceeds this multiple of `‖A‖_F`. Past that point
/// `2ε − λmax(Q)/λmin(P)` is a difference of nearly equal large numbers
/// and its sign is rounding noise.
const MAX_OFFSET_SCALE: f64 = 1e4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error("spectral abscissa {abscissa:e} is too close to zero to classify")]
    Boundary { abscissa: f64 },
    #[error(transparent)]
    Numeric(#[from] NumError),
    #[error("no shift epsilon made 2ε - λmax(Q)/λmin(P) nonnegative (last tried ε = {last_epsilon})")]
    EpsilonSearchFailed { last_epsilon: f64 },
    #[error("eps_offset must be positive and finite, got {0}")]
    BadOffset(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subsystem {id}: {source}")]
    Subsystem { id: ModeId, source: Box<CertError> },
    #[error("edge {edge}: {source}")]
    Edge { edge: Edge, source: Box<CertError> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

/// Hurwitz test on the spectral abscissa.
pub fn classify_subsystem(a: &Mat) -> Result<Stability, CertError> {
    let abscissa = spectral_abscissa(a)?;
    if abscissa.abs() < BOUNDARY_TOL {
        Err(CertError::Boundary { abscissa })
    } else if abscissa < 0.0 {
        Ok(Stability::Stable)
    } else {
        Ok(Stability::Unstable)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsystemCertificate {
    pub id: ModeId,
    pub stability: Stability,
    #[serde(rename = "Q")]
    pub q: SpdMat,
    pub epsilon: f64,
    #[serde(rename = "P")]
    pub p: SpdMat,
    pub lambda_hat: f64,
    pub lambda_check: f64,
    #[serde(skip)]
    pub p_extrema: EigExtrema,
}

impl SubsystemCertificate {
    /// `V_p(ξ) = ξᵀ P_p ξ`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.p.quad_form(x)
    }

    /// `‖AᵀP + PA + Q − 2εP‖_F / ‖Q‖_F`.
    pub fn relative_residual(&self, a: &Mat) -> f64 {
        let rhs = self.q.as_mat().sub(&self.p.as_mat().scale(2.0 * self.epsilon));
        lyapunov_residual(a, self.p.as_mat(), &rhs) / self.q.as_mat().frobenius_norm()
    }
}

/// Builds `(P_p, λ̂_p, λ̌_p)` for one subsystem.
///
/// Stable `A`: `AᵀP + PA = −Q`, `λ̂ = λmin(Q)/λmax(P)`, `λ̌ = λmax(Q)/λmin(P)`.
///
/// Unstable `A`: the shifted matrix `A − εI` with `ε = abscissa + offset`
/// is Hurwitz; solve its Lyapunov equation and take
/// `λ̂ = −(2ε − λmin(Q)/λmax(P))`, `λ̌ = −(2ε − λmax(Q)/λmin(P))`.
/// `λ̌ ≤ 0` is required; the offset is doubled until it holds. For large ε,
/// `λ̌` tends to `−2 λmin((A + Aᵀ)/2)` (with `Q = I`), so matrices whose
/// symmetric part is indefinite cannot be certified this way.
pub fn build_certificate(id: ModeId, a: &Mat, q: &SpdMat, eps_offset: f64) -> Result<SubsystemCertificate, CertError> {
    if !(eps_offset > 0.0 && eps_offset.is_finite()) {
        return Err(CertError::BadOffset(eps_offset));
    }
    if !a.is_square() || a.rows() != q.dim() {
        return Err(CertError::DimensionMismatch(format!("A is {}x{}, Q is {d}x{d}", a.rows(), a.cols(), d = q.dim())));
    }
    let q_ext = sym_eig_extrema(q.as_mat())?;
    let stability = classify_subsystem(a)?;
    match stability {
        Stability::Stable => {
            let p = solve_lyapunov(a, q)?;
            let p_ext = sym_eig_extrema(p.as_mat())?;
            Ok(SubsystemCertificate {
                id,
                stability,
                q: q.clone(),
                epsilon: 0.0,
                lambda_hat: q_ext.lambda_min / p_ext.lambda_max,
                lambda_check: q_ext.lambda_max / p_ext.lambda_min,
                p,
                p_extrema: p_ext,
            })
        }
        Stability::Unstable => {
            let abscissa = spectral_abscissa(a)?;
            let mut offset = eps_offset;
            let mut epsilon = abscissa + offset;
            let max_offset = MAX_OFFSET_SCALE * a.frobenius_norm();
            for _ in 0..MAX_EPS_ATTEMPTS {
                if offset > max_offset {
                    break;
                }
                epsilon = abscissa + offset;
                let p = solve_lyapunov(&a.shift_diag(-epsilon), q)?;
                let p_ext = sym_eig_extrema(p.as_mat())?;
                let lambda_check = -(2.0 * epsilon - q_ext.lambda_max / p_ext.lambda_min);
                if lambda_check <= 0.0 {
                    return Ok(SubsystemCertificate {
                        id,
                        stability,
                        q: q.clone(),
                        epsilon,
                        lambda_hat: -(2.0 * epsilon - q_ext.lambda_min / p_ext.lambda_max),
                        lambda_check,
                        p,
                        p_extrema: p_ext,
                    });
                }
                offset *= 2.0;
            }
            Err(CertError::EpsilonSearchFailed { last_epsilon: epsilon })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EdgeGains {
    pub edge: Edge,
    pub mu_hat: f64,
    pub mu_check: f64,
}

impl EdgeGains {
    /// Whether `μ̂ ≥ 1`. Tight gains can fall below one, so this is only
    /// reported.
    pub fn mu_hat_at_least_one(&self) -> bool {
        self.mu_hat >= 1.0
    }
}

/// `(μ̂_pq, μ̌_pq) = (λmax, λmin)(P_q P_p⁻¹)`.
pub fn edge_gains(cert_p: &SubsystemCertificate, cert_q: &SubsystemCertificate) -> Result<EdgeGains, CertError> {
    if cert_p.p.dim() != cert_q.p.dim() {
        return Err(CertError::DimensionMismatch(format!(
            "P_{} is {}-dimensional, P_{} is {}-dimensional",
            cert_p.id,
            cert_p.p.dim(),
            cert_q.id,
            cert_q.p.dim()
        )));
    }
    let e = pencil_extrema(&cert_p.p, &cert_q.p)?;
    Ok(EdgeGains { edge: Edge { from: cert_p.id, to: cert_q.id }, mu_hat: e.lambda_max, mu_check: e.lambda_min })
}

/// Which `Q_p` to use per subsystem; missing entries fall back to identity.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum QChoice {
    #[default]
    Identity,
    PerSubsystem(BTreeMap<ModeId, SpdMat>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateOptions {
    pub q: QChoice,
    pub eps_offset: f64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions { q: QChoice::Identity, eps_offset: DEFAULT_EPS_OFFSET }
    }
}

/// One certificate per subsystem and one gain pair per admissible edge.
#[derive(Clone, Debug)]
pub struct CertificateSet {
    family: SubsystemFamily,
    certificates: Vec<SubsystemCertificate>,
    gains: BTreeMap<Edge, EdgeGains>,
}

impl CertificateSet {
    pub fn family(&self) -> &SubsystemFamily {
        &self.family
    }

    pub fn certificates(&self) -> &[SubsystemCertificate] {
        &self.certificates
    }

    pub fn certificate(&self, id: ModeId) -> Option<&SubsystemCertificate> {
        id.0.checked_sub(1).and_then(|i| self.certificates.get(i))
    }

    pub fn gains(&self) -> &BTreeMap<Edge, EdgeGains> {
        &self.gains
    }

    pub fn edge_gains(&self, edge: Edge) -> Option<&EdgeGains> {
        self.gains.get(&edge)
    }

    /// `min_p λmin(P_p)`: `α(r) = α_lo·r² ≤ V_p(ξ)` for `‖ξ‖ = r`.
    pub fn alpha_lower(&self) -> f64 {
        self.certificates.iter().map(|c| c.p_extrema.lambda_min).fold(f64::INFINITY, f64::min)
    }

    /// `max_p λmax(P_p)`: `V_p(ξ) ≤ α_hi·‖ξ‖²`.
    pub fn alpha_upper(&self) -> f64 {
        self.certificates.iter().map(|c| c.p_extrema.lambda_max).fold(0.0, f64::max)
    }
}

pub fn build_certificate_set(
    family: &SubsystemFamily,
    options: &CertificateOptions,
) -> Result<CertificateSet, CertError> {
    let identity = SpdMat::identity(family.dim());
    let certificates = family
        .subsystems()
        .map(|(id, a)| {
            let q = match &options.q {
                QChoice::Identity => &identity,
                QChoice::PerSubsystem(map) => map.get(&id).unwrap_or(&identity),
            };
            build_certificate(id, a, q, options.eps_offset)
                .map_err(|e| CertError::Subsystem { id, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let gains = family
        .edges()
        .iter()
        .map(|&edge| {
            let cp = &certificates[edge.from.0 - 1];
            let cq = &certificates[edge.to.0 - 1];
            edge_gains(cp, cq).map(|g| (edge, g)).map_err(|e| CertError::Edge { edge, source: Box::new(e) })
        })
        .collect::<Result<BTreeMap<_, _>, _>>()?;
    Ok(CertificateSet { family: family.clone(), certificates, gains })
}
