#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use switch_verdict::certkit::{build_certificate_set, CertificateOptions, CertificateSet};
use switch_verdict::family::{Edge, ModeId, SubsystemFamily};
use switch_verdict::numkit::{spectral_abscissa, Mat};
use switch_verdict::sigkit::{random_admissible, CycleSpec, RandomSignalSpec, SwitchingSignal};

pub fn m2(rows: [[f64; 2]; 2]) -> Mat {
    Mat::from_rows(&rows).unwrap()
}

pub fn cycle(entries: &[(usize, f64)]) -> CycleSpec {
    CycleSpec::new(entries.iter().map(|&(m, d)| (ModeId(m), d)).collect()).unwrap()
}

pub fn family(mats: Vec<Mat>, edges: &[(usize, usize)]) -> SubsystemFamily {
    SubsystemFamily::new(
        mats.into_iter().enumerate().map(|(i, a)| (ModeId(i + 1), a)),
        edges.iter().map(|&(p, q)| Edge::new(p, q)),
    )
    .unwrap()
}

pub fn certify(f: &SubsystemFamily) -> CertificateSet {
    build_certificate_set(f, &CertificateOptions::default()).unwrap()
}

pub struct Case {
    pub family: SubsystemFamily,
    pub cycle: CycleSpec,
    pub horizon: f64,
    pub x0: Vec<Vec<f64>>,
}

pub const FOUR_MODE_EDGES: [(usize, usize); 8] = [(1, 2), (1, 3), (2, 1), (2, 4), (3, 1), (3, 4), (4, 2), (4, 3)];

pub fn four_mode_a() -> [Mat; 4] {
    [
        m2([[-0.1857, -0.7565], [-0.0707, -0.6500]]),
        m2([[-0.3509, -0.2683], [-0.3523, -0.5491]]),
        m2([[0.1734, -0.6091], [0.8314, -0.1966]]),
        m2([[0.6294, 0.8116], [-0.7460, 0.8268]]),
    ]
}

/// Two stable oscillators, alternating every 10 time units.
pub fn oscillators() -> Case {
    Case {
        family: family(vec![m2([[-0.2, -0.4], [3.0, -0.2]]), m2([[-0.2, -3.0], [0.4, -0.2]])], &[(1, 2), (2, 1)]),
        cycle: cycle(&[(1, 10.0), (2, 10.0)]),
        horizon: 120.0,
        x0: vec![vec![-1.0883, 2.9263]],
    }
}

/// Three stable subsystems and one unstable one on a 4-vertex graph.
pub fn four_mode() -> Case {
    let mut rng = StdRng::seed_from_u64(2024);
    Case {
        family: family(four_mode_a().to_vec(), &FOUR_MODE_EDGES),
        cycle: cycle(&[(1, 10.0), (2, 10.0), (4, 30.0), (3, 30.0), (1, 10.0), (3, 30.0), (4, 30.0), (2, 10.0)]),
        horizon: 200.0,
        x0: (0..10).map(|_| vec![rng.random_range(-10.0..=10.0), rng.random_range(-10.0..=10.0)]).collect(),
    }
}

/// Subsystems 2 and 4 of `four_mode`, alternating every 10 time units.
pub fn stable_unstable() -> Case {
    let [_, a2, _, a4] = four_mode_a();
    Case {
        family: family(vec![a2, a4], &[(1, 2), (2, 1)]),
        cycle: cycle(&[(1, 10.0), (2, 10.0)]),
        horizon: 100.0,
        x0: vec![vec![9.0044, -9.3111]],
    }
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

// ---------------------------------------------------------------------------
// Independent reference integrator: adaptive Dormand-Prince 5(4).

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn rhs(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
}

/// Integrates `ẋ = A x` from 0 to `t` with relative tolerance `tol`.
#[allow(clippy::needless_range_loop)]
pub fn dopri(a: &Mat, x0: &[f64], t: f64, tol: f64) -> Vec<f64> {
    let a = a.to_rows();
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut s = 0.0;
    let mut h = (t / 100.0).min(0.01);
    while s < t {
        if s + h > t {
            h = t - s;
        }
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
        for i in 0..7 {
            let xi: Vec<f64> = (0..n).map(|j| x[j] + h * (0..i).map(|l| A[i][l] * k[l][j]).sum::<f64>()).collect();
            k.push(rhs(&a, &xi));
        }
        let x5: Vec<f64> = (0..n).map(|j| x[j] + h * (0..7).map(|l| B5[l] * k[l][j]).sum::<f64>()).collect();
        let x4: Vec<f64> = (0..n).map(|j| x[j] + h * (0..7).map(|l| B4[l] * k[l][j]).sum::<f64>()).collect();
        let scale = x5.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        let err = x5.iter().zip(&x4).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / (tol * scale);
        if err <= 1.0 {
            s += h;
            x = x5;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    x
}

/// Reference solution of the switched system at `horizon`, one dwell at a
/// time.
pub fn dopri_switched(f: &SubsystemFamily, sig: &SwitchingSignal, x0: &[f64], horizon: f64, tol: f64) -> Vec<f64> {
    let mut x = x0.to_vec();
    for seg in sig.segments() {
        if seg.start >= horizon {
            break;
        }
        let end = seg.end.min(horizon);
        x = dopri(f.matrix(seg.mode).unwrap(), &x, end - seg.start, tol);
        if seg.end >= horizon {
            break;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Fuzzing.

pub fn random_mat(rng: &mut StdRng, d: usize, scale: f64) -> Mat {
    Mat::from_vec(d, d, (0..d * d).map(|_| rng.random_range(-scale..scale)).collect()).unwrap()
}

/// Hurwitz matrix with abscissa in `[-1.0, -0.1]`.
pub fn random_stable(rng: &mut StdRng, d: usize) -> Mat {
    let m = random_mat(rng, d, 1.0);
    let shift = spectral_abscissa(&m).unwrap() + rng.random_range(0.1..1.0);
    m.shift_diag(-shift)
}

/// Anti-damped rotation plus a small perturbation, so the shifted Lyapunov
/// solution stays well conditioned.
pub fn random_unstable(rng: &mut StdRng, d: usize) -> Mat {
    let mut skew = Mat::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let w = rng.random_range(-2.0..2.0);
            skew[(i, j)] = w;
            skew[(j, i)] = -w;
        }
    }
    skew.shift_diag(rng.random_range(0.05..0.4)).add(&random_mat(rng, d, 0.05))
}

pub struct Fuzzed {
    pub family: SubsystemFamily,
    pub certs: CertificateSet,
    pub signal: SwitchingSignal,
    pub x0: Vec<f64>,
}

/// A fully connected family of `n` subsystems in dimension `d`, the first
/// one stable and the others stable or unstable at random.
pub fn fuzzed_family(rng: &mut StdRng, d: usize, n: usize) -> (SubsystemFamily, CertificateSet) {
    loop {
        let mats: Vec<Mat> = (0..n)
            .map(|i| if i == 0 || rng.random_bool(0.6) { random_stable(rng, d) } else { random_unstable(rng, d) })
            .collect();
        let Ok(family) = SubsystemFamily::fully_connected(mats) else { continue };
        let Ok(certs) = build_certificate_set(&family, &CertificateOptions::default()) else { continue };
        return (family, certs);
    }
}

/// [`fuzzed_family`] with 2 or 3 subsystems, plus a random admissible
/// signal on `[0, horizon]` and a random initial state.
pub fn fuzzed_case(seed: u64, d: usize, horizon: f64) -> Fuzzed {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(2..=3);
    let (family, certs) = fuzzed_family(&mut rng, d, n);
    let spec =
        RandomSignalSpec { seed: rng.random(), mean_dwell: rng.random_range(0.5..3.0), horizon, initial_mode: None };
    let signal = random_admissible(&family, &spec).unwrap();
    let x0: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
    Fuzzed { family, certs, signal, x0 }
}
