//! Stability and instability certificates for switched linear systems
//! under constrained switching.

pub mod certkit;
pub mod family;
pub mod numkit;
pub mod sigkit;
pub mod simkit;
pub mod verdikt;

pub use certkit::{
    build_certificate, build_certificate_set, CertError, CertificateOptions, CertificateSet, EdgeGains, QChoice,
    Stability, SubsystemCertificate,
};
pub use family::{Edge, FamilyError, ModeId, SubsystemFamily};
pub use numkit::{Mat, NumError, SpdMat};
pub use sigkit::{
    AsymptoticStatistics, CycleSpec, SignalError, SignalStatistics, Switch, SwitchingRates, SwitchingSignal,
};
pub use simkit::{DivergenceVerdict, SimConfig, SimError, Trajectory};
pub use verdikt::{Classification, EnvelopeExponents, EvaluationMode, MarginReport, VerdictError};
