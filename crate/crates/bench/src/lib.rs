//! Shared fixtures for the benchmarks.

use switch_verdict::certkit::{build_certificate_set, CertificateOptions, CertificateSet};
use switch_verdict::family::{Edge, ModeId, SubsystemFamily};
use switch_verdict::numkit::Mat;
use switch_verdict::sigkit::{CycleSpec, SwitchingSignal};

fn m2(rows: [[f64; 2]; 2]) -> Mat {
    Mat::from_rows(&rows).expect("2x2")
}

/// Three stable subsystems and one unstable one on a 4-vertex cyclic graph.
pub fn four_mode_family() -> SubsystemFamily {
    let mats = [
        m2([[-0.1857, -0.7565], [-0.0707, -0.6500]]),
        m2([[-0.3509, -0.2683], [-0.3523, -0.5491]]),
        m2([[0.1734, -0.6091], [0.8314, -0.1966]]),
        m2([[0.6294, 0.8116], [-0.7460, 0.8268]]),
    ];
    let edges = [(1, 2), (1, 3), (2, 1), (2, 4), (3, 1), (3, 4), (4, 2), (4, 3)];
    SubsystemFamily::new(
        mats.into_iter().enumerate().map(|(i, a)| (ModeId(i + 1), a)),
        edges.into_iter().map(|(p, q)| Edge::new(p, q)),
    )
    .expect("valid family")
}

pub fn four_mode_certificates() -> CertificateSet {
    build_certificate_set(&four_mode_family(), &CertificateOptions::default()).expect("certifiable")
}

/// A periodic signal visiting every transition of [`four_mode_family`] once.
pub fn four_mode_signal() -> SwitchingSignal {
    let cycle = [(1, 10.0), (2, 10.0), (4, 30.0), (3, 30.0), (1, 10.0), (3, 30.0), (4, 30.0), (2, 10.0)];
    SwitchingSignal::periodic(
        CycleSpec::new(cycle.into_iter().map(|(m, d)| (ModeId(m), d)).collect()).expect("valid cycle"),
    )
}

/// A Hurwitz `d×d` matrix with a deterministic, non-normal structure.
pub fn test_matrix(d: usize) -> Mat {
    let mut a = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = ((i * 7 + j * 3) % 5) as f64 / 5.0 - 0.4;
        }
        a[(i, i)] -= 2.0;
    }
    a
}
