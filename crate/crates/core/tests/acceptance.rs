//! End-to-end acceptance checks. Each criterion prints one line per
//! comparison and a closing PASS/FAIL line; the process exits nonzero if
//! any criterion fails. Positional arguments filter criteria by name.

mod common;

use std::collections::BTreeMap;

use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use switch_verdict::certkit::CertificateSet;
use switch_verdict::family::{Edge, ModeId};
use switch_verdict::sigkit::{periodic_from_cycle, AsymptoticStatistics, SwitchingSignal};
use switch_verdict::simkit::{check_envelopes, divergence_verdict, propagate, DivergenceVerdict, SimConfig};
use switch_verdict::verdikt::{classify, instability_margin, stability_margin, Classification, ZERO_BAND};

const SAMPLE_STEP: f64 = 0.1;

/// Panic payload for a criterion whose FAIL line is already printed.
struct Reported;

struct Criterion {
    name: &'static str,
    checks: usize,
    failures: usize,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Criterion { name, checks: 0, failures: 0 }
    }

    fn check(&mut self, label: &str, ok: bool, detail: impl std::fmt::Display) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
        println!("  {} {label}: {detail}", if ok { "ok  " } else { "FAIL" });
    }

    fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        self.check(label, (got - want).abs() <= tol, format!("got {got:.6}, want {want} ± {tol}"));
    }

    fn close_rel(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let e = rel_err(got, want);
        self.check(label, e <= tol, format!("got {got:.6e}, want {want:e}, relative error {e:.2e} (tol {tol:e})"));
    }

    fn finish(self) {
        let verdict = if self.failures == 0 { "PASS" } else { "FAIL" };
        println!("{}: {verdict} ({} of {} checks failed)", self.name, self.failures, self.checks);
        if self.failures > 0 {
            std::panic::panic_any(Reported);
        }
    }
}

fn periodic(case: &Case, certs: &CertificateSet) -> (SwitchingSignal, AsymptoticStatistics) {
    periodic_from_cycle(&case.cycle, certs.family()).unwrap()
}

fn criterion_1_oscillator_certificates() {
    let mut c = Criterion::new("criterion 1");
    let certs = certify(&oscillators().family);
    let p1 = certs.certificate(ModeId(1)).unwrap().p.as_mat();
    let want = [[10.3629, 0.5242], [0.5242, 1.4516]];
    for (i, row) in want.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            c.close(&format!("P1[{i}][{j}]"), p1[(i, j)], w, 1e-3);
        }
    }
    for p in [1, 2] {
        let cert = certs.certificate(ModeId(p)).unwrap();
        c.close(&format!("lambda_hat_{p}"), cert.lambda_hat, 0.0962, 1e-3);
        c.close(&format!("lambda_check_{p}"), cert.lambda_check, 0.7038, 1e-3);
    }
    for e in [Edge::new(1, 2), Edge::new(2, 1)] {
        let g = certs.edge_gains(e).unwrap();
        c.close(&format!("mu_hat{e}"), g.mu_hat, 7.3149, 1e-2);
        c.close(&format!("mu_check{e}"), g.mu_check, 0.1367, 1e-3);
    }
    c.finish();
}

fn criterion_2_four_mode_certificates() {
    let mut c = Criterion::new("criterion 2");
    let certs = certify(&four_mode().family);
    for (p, want) in [(1, 1.5691), (2, 1.5486), (3, 0.0302), (4, -1.4562)] {
        c.close(&format!("lambda_check_{p}"), certs.certificate(ModeId(p)).unwrap().lambda_check, want, 1e-3);
    }
    let table = [
        ((1, 2), 0.2661),
        ((1, 3), 5.6395),
        ((2, 1), 0.6446),
        ((2, 4), 1.3875e3),
        ((3, 1), 0.0173),
        ((3, 4), 87.0252),
        ((4, 2), 1.4133e-4),
        ((4, 3), 0.0070),
    ];
    for ((p, q), want) in table {
        let e = Edge::new(p, q);
        c.close_rel(&format!("mu_check{e}"), certs.edge_gains(e).unwrap().mu_check, want, 1e-3);
    }
    c.finish();
}

fn criterion_3_margins() {
    let mut c = Criterion::new("criterion 3");
    let ce = oscillators();
    let certs = certify(&ce.family);
    let (_, asym) = periodic(&ce, &certs);
    c.close("oscillators stability margin", stability_margin(&asym, &certs).unwrap(), 0.1028, 2e-3);
    c.close("oscillators instability margin", instability_margin(&asym, &certs).unwrap(), -0.9028, 2e-3);

    let e1 = four_mode();
    let certs = certify(&e1.family);
    let (_, asym) = periodic(&e1, &certs);
    c.close("four_mode instability margin", instability_margin(&asym, &certs).unwrap(), 0.1064, 2e-3);

    let e2 = stable_unstable();
    let certs = certify(&e2.family);
    let (_, asym) = periodic(&e2, &certs);
    c.close("stable_unstable stability margin", stability_margin(&asym, &certs).unwrap(), 0.6839, 2e-3);
    c.close("stable_unstable instability margin", instability_margin(&asym, &certs).unwrap(), -0.1277, 2e-3);
    c.finish();
}

fn random_rates(rng: &mut StdRng, n: usize) -> AsymptoticStatistics {
    let nu = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..3.0) };
    let mut rho = BTreeMap::new();
    if nu > 0.0 {
        let w: Vec<(Edge, f64)> = (1..=n)
            .flat_map(|p| (1..=n).filter(move |&q| q != p).map(move |q| Edge::new(p, q)))
            .map(|e| (e, rng.random_range(0.0..1.0)))
            .collect();
        let total: f64 = w.iter().map(|x| x.1).sum();
        rho = w.into_iter().map(|(e, v)| (e, v / total)).collect();
    }
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = w.iter().sum();
    let eta = w.iter().enumerate().map(|(i, v)| (ModeId(i + 1), v / total)).collect();
    AsymptoticStatistics { nu, rho, eta }
}

fn criterion_4_classification() {
    let mut c = Criterion::new("criterion 4");
    for (name, case, want) in [
        ("four_mode", four_mode(), Classification::Destabilizing),
        ("oscillators", oscillators(), Classification::Undetermined),
        ("stable_unstable", stable_unstable(), Classification::Undetermined),
    ] {
        let certs = certify(&case.family);
        let (_, asym) = periodic(&case, &certs);
        let r = classify(&asym, &certs).unwrap();
        c.check(&format!("{name} classification"), r.classification == want, format!("{:?}", r.classification));
    }

    let mut rng = StdRng::seed_from_u64(4);
    let (mut instances, mut violations, mut both) = (0, 0, 0);
    for set in 0..1000 {
        let f = fuzzed_case(10_000 + set, 2 + (set as usize % 2), 1.0);
        for _ in 0..10 {
            let stats = random_rates(&mut rng, f.family.len());
            let hat = stability_margin(&stats, &f.certs).unwrap();
            let check = instability_margin(&stats, &f.certs).unwrap();
            instances += 1;
            if check > hat + 1e-12 * hat.abs().max(1.0) {
                violations += 1;
            }
            if hat < -ZERO_BAND && check > ZERO_BAND {
                both += 1;
            }
        }
    }
    c.check("domination", violations == 0, format!("{violations} violations in {instances} instances"));
    c.check("exclusivity", both == 0, format!("{both} instances both stabilizing and destabilizing"));
    c.finish();
}

fn verdicts(case: &Case) -> Vec<DivergenceVerdict> {
    let certs = certify(&case.family);
    let (sig, _) = periodic(case, &certs);
    case.x0
        .iter()
        .map(|x0| {
            let tr = propagate(&certs, &sig, x0, &SimConfig::new(case.horizon, SAMPLE_STEP)).unwrap();
            divergence_verdict(&tr).unwrap()
        })
        .collect()
}

fn criterion_5_simulation_verdicts() {
    let mut c = Criterion::new("criterion 5");
    let v = verdicts(&oscillators());
    c.check("oscillators", v == [DivergenceVerdict::Converging], format!("{v:?}"));
    let v = verdicts(&stable_unstable());
    c.check("stable_unstable", v == [DivergenceVerdict::Diverging], format!("{v:?}"));
    let v = verdicts(&four_mode());
    let diverging = v.iter().filter(|&&d| d == DivergenceVerdict::Diverging).count();
    c.check("four_mode x0 set", v.len() == 10 && diverging == 10, format!("{diverging} of {} diverging", v.len()));
    c.finish();
}

fn criterion_6_envelope_soundness() {
    let mut c = Criterion::new("criterion 6");
    for (name, case) in
        [("oscillators", oscillators()), ("four_mode", four_mode()), ("stable_unstable", stable_unstable())]
    {
        let certs = certify(&case.family);
        let (sig, _) = periodic(&case, &certs);
        let mut failures = Vec::new();
        for x0 in &case.x0 {
            let tr = propagate(&certs, &sig, x0, &SimConfig::new(case.horizon, SAMPLE_STEP)).unwrap();
            if let Err(e) = check_envelopes(&tr, &sig, &certs) {
                failures.push(e.to_string());
            }
        }
        c.check(name, failures.is_empty(), format!("{} runs, failures {failures:?}", case.x0.len()));
    }
    let mut failures = Vec::new();
    for k in 0..100u64 {
        let d = 2 + (k as usize % 2);
        let f = fuzzed_case(600 + k, d, 50.0);
        let tr = propagate(&f.certs, &f.signal, &f.x0, &SimConfig::new(50.0, SAMPLE_STEP)).unwrap();
        if let Err(e) = check_envelopes(&tr, &f.signal, &f.certs) {
            failures.push(format!("case {k}: {e}"));
        }
    }
    c.check("100 fuzzed families", failures.is_empty(), format!("failures {failures:?}"));
    c.finish();
}

fn criterion_7_oracle_equivalence() {
    let mut c = Criterion::new("criterion 7");
    let mut worst: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    for k in 0..50u64 {
        let f = fuzzed_case(900 + k, 2 + (k as usize % 2), 10.0);
        let tr = propagate(&f.certs, &f.signal, &f.x0, &SimConfig::new(10.0, SAMPLE_STEP)).unwrap();
        let want = dopri_switched(&f.family, &f.signal, &f.x0, 10.0, 1e-10);
        let got = &tr.last().x;
        let diff: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = want.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max(diff / scale);
        for (id, a) in f.family.subsystems() {
            worst_residual = worst_residual.max(f.certs.certificate(id).unwrap().relative_residual(a));
        }
    }
    for case in [oscillators(), four_mode(), stable_unstable()] {
        let certs = certify(&case.family);
        for (id, a) in case.family.subsystems() {
            worst_residual = worst_residual.max(certs.certificate(id).unwrap().relative_residual(a));
        }
    }
    c.check("terminal state vs Dormand-Prince", worst <= 1e-6, format!("worst relative error {worst:.2e}"));
    c.check("Lyapunov residuals", worst_residual <= 1e-8, format!("worst relative residual {worst_residual:.2e}"));
    c.finish();
}

fn criterion_8_envelope_growth() {
    let mut c = Criterion::new("criterion 8");
    let case = four_mode();
    let certs = certify(&case.family);
    let (sig, _) = periodic(&case, &certs);
    for (i, x0) in case.x0.iter().enumerate() {
        let tr = propagate(&certs, &sig, x0, &SimConfig::new(case.horizon, SAMPLE_STEP)).unwrap();
        let pts: Vec<(f64, f64)> =
            tr.samples.iter().filter(|s| s.t >= 100.0 && s.t <= 200.0).map(|s| (s.t, s.v.ln())).collect();
        let n = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        let slope = sxy / sxx;
        c.check(&format!("x0[{i}] slope of ln V"), slope >= 0.1064 - 0.02, format!("{slope:.4} (need >= 0.0864)"));
    }
    c.finish();
}

fn main() {
    let criteria: [(&str, fn()); 8] = [
        ("criterion_1_oscillator_certificates", criterion_1_oscillator_certificates),
        ("criterion_2_four_mode_certificates", criterion_2_four_mode_certificates),
        ("criterion_3_margins", criterion_3_margins),
        ("criterion_4_classification", criterion_4_classification),
        ("criterion_5_simulation_verdicts", criterion_5_simulation_verdicts),
        ("criterion_6_envelope_soundness", criterion_6_envelope_soundness),
        ("criterion_7_oracle_equivalence", criterion_7_oracle_equivalence),
        ("criterion_8_envelope_growth", criterion_8_envelope_growth),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    std::panic::set_hook(Box::new(|info| {
        if !info.payload().is::<Reported>() {
            eprintln!("{info}");
        }
    }));
    let mut failed = Vec::new();
    for (name, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        println!("{name}");
        if let Err(payload) = std::panic::catch_unwind(run) {
            if !payload.is::<Reported>() {
                println!("{name}: FAIL (aborted)");
            }
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}
