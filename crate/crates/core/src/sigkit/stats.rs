use std::collections::BTreeMap;

use super::signal::{CycleSpec, Schedule, SwitchingSignal};
use super::SignalError;
use crate::family::{Edge, ModeId};

/// Slack for `Σρ = 1` and `Ση = 1` when validating user-supplied
/// statistics.
pub const RATE_SUM_TOL: f64 = 1e-9;

/// `ν`, `ρ_pq`, `η_p`, whether observed up to some time or asymptotic.
pub trait SwitchingRates {
    fn nu(&self) -> f64;
    fn rho(&self) -> &BTreeMap<Edge, f64>;
    fn eta(&self) -> &BTreeMap<ModeId, f64>;
}

/// Switching statistics on `]0, t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalStatistics {
    pub t: f64,
    pub n: u64,
    pub n_pq: BTreeMap<Edge, u64>,
    pub t_p: BTreeMap<ModeId, f64>,
    pub nu: f64,
    pub rho: BTreeMap<Edge, f64>,
    pub eta: BTreeMap<ModeId, f64>,
    /// `false` when `N(t) = 0`; `rho` then holds zeros.
    pub rho_defined: bool,
}

impl SwitchingRates for SignalStatistics {
    fn nu(&self) -> f64 {
        self.nu
    }
    fn rho(&self) -> &BTreeMap<Edge, f64> {
        &self.rho
    }
    fn eta(&self) -> &BTreeMap<ModeId, f64> {
        &self.eta
    }
}

/// Limits `ν_∞`, `ρ_∞`, `η_∞` of the switching statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticStatistics {
    pub nu: f64,
    pub rho: BTreeMap<Edge, f64>,
    pub eta: BTreeMap<ModeId, f64>,
}

impl SwitchingRates for AsymptoticStatistics {
    fn nu(&self) -> f64 {
        self.nu
    }
    fn rho(&self) -> &BTreeMap<Edge, f64> {
        &self.rho
    }
    fn eta(&self) -> &BTreeMap<ModeId, f64> {
        &self.eta
    }
}

impl AsymptoticStatistics {
    pub fn new(nu: f64, rho: BTreeMap<Edge, f64>, eta: BTreeMap<ModeId, f64>) -> Result<Self, SignalError> {
        let bad = |msg: String| Err(SignalError::BadStatistics(msg));
        if !(nu >= 0.0 && nu.is_finite()) {
            return bad(format!("nu = {nu} must be finite and nonnegative"));
        }
        if let Some((e, r)) = rho.iter().find(|(_, r)| !(**r >= 0.0 && r.is_finite())) {
            return bad(format!("rho{e} = {r} must be finite and nonnegative"));
        }
        if let Some((p, v)) = eta.iter().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return bad(format!("eta_{p} = {v} must be finite and nonnegative"));
        }
        let rho_sum: f64 = rho.values().sum();
        if nu > 0.0 && (rho_sum - 1.0).abs() > RATE_SUM_TOL {
            return bad(format!("rho sums to {rho_sum}, expected 1"));
        }
        let eta_sum: f64 = eta.values().sum();
        if (eta_sum - 1.0).abs() > RATE_SUM_TOL {
            return bad(format!("eta sums to {eta_sum}, expected 1"));
        }
        Ok(AsymptoticStatistics { nu, rho, eta })
    }

    /// Exact limits of the periodic repetition of `spec`.
    pub fn of_cycle(spec: &CycleSpec) -> Self {
        let period = spec.period();
        let mut eta = BTreeMap::new();
        for &(m, d) in spec.entries() {
            *eta.entry(m).or_insert(0.0) += d / period;
        }
        let transitions = spec.transitions();
        let mut rho = BTreeMap::new();
        for e in &transitions {
            *rho.entry(*e).or_insert(0.0) += 1.0 / transitions.len() as f64;
        }
        let nu = transitions.len() as f64 / period;
        AsymptoticStatistics { nu, rho, eta }
    }
}

#[derive(Default)]
struct Counts {
    n: u64,
    n_pq: BTreeMap<Edge, u64>,
    t_p: BTreeMap<ModeId, f64>,
}

impl Counts {
    fn switch(&mut self, from: ModeId, to: ModeId, times: u64) {
        self.n += times;
        *self.n_pq.entry(Edge { from, to }).or_insert(0) += times;
    }

    fn dwell(&mut self, mode: ModeId, duration: f64) {
        *self.t_p.entry(mode).or_insert(0.0) += duration;
    }

    fn finish(self, t: f64) -> SignalStatistics {
        let n = self.n;
        let rho_defined = n > 0;
        let rho = self.n_pq.iter().map(|(&e, &c)| (e, if rho_defined { c as f64 / n as f64 } else { 0.0 })).collect();
        let eta = self.t_p.iter().map(|(&m, &d)| (m, d / t)).collect();
        SignalStatistics { t, n, nu: n as f64 / t, rho, eta, rho_defined, n_pq: self.n_pq, t_p: self.t_p }
    }
}

impl SwitchingSignal {
    /// Statistics on `]0, t]`. A switch at exactly `t` is counted.
    pub fn stats_at(&self, t: f64) -> Result<SignalStatistics, SignalError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(SignalError::NonpositiveTime(t));
        }
        let mut c = Counts::default();
        match &self.schedule {
            Schedule::Finite(_) => {
                let mut prev: Option<ModeId> = None;
                for seg in self.segments() {
                    if seg.start > t {
                        break;
                    }
                    if let Some(p) = prev {
                        c.switch(p, seg.mode, 1);
                    }
                    c.dwell(seg.mode, seg.end.min(t) - seg.start);
                    prev = Some(seg.mode);
                }
            }
            Schedule::Periodic(p) => {
                let period = p.period();
                let mut k = (t / period).floor();
                if (k + 1.0) * period <= t {
                    k += 1.0;
                } else if k * period > t {
                    k -= 1.0;
                }
                let entries = p.cycle.entries();
                let full = k as u64;
                if full > 0 {
                    for e in p.cycle.transitions() {
                        c.switch(e.from, e.to, full);
                    }
                    for &(m, d) in entries {
                        c.dwell(m, k * d);
                    }
                }
                let base = k * period;
                for i in 0..entries.len() {
                    let start = base + p.starts[i];
                    if start > t {
                        break;
                    }
                    if i > 0 {
                        c.switch(entries[i - 1].0, entries[i].0, 1);
                    }
                    let end = (base + p.starts[i + 1]).min(t);
                    c.dwell(entries[i].0, end - start);
                }
            }
        }
        Ok(c.finish(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigkit::Switch;

    fn alt10() -> SwitchingSignal {
        SwitchingSignal::periodic(CycleSpec::new(vec![(ModeId(1), 10.0), (ModeId(2), 10.0)]).unwrap())
    }

    #[test]
    fn alternating_cycle_at_forty() {
        let s = alt10().stats_at(40.0).unwrap();
        assert_eq!(s.n, 4);
        assert!((s.nu - 0.1).abs() < 1e-15);
        assert_eq!(s.rho[&Edge::new(1, 2)], 0.5);
        assert_eq!(s.rho[&Edge::new(2, 1)], 0.5);
        assert_eq!(s.eta[&ModeId(1)], 0.5);
        assert_eq!(s.eta[&ModeId(2)], 0.5);
    }

    #[test]
    fn switch_at_t_is_counted() {
        let s = alt10();
        assert_eq!(s.stats_at(10.0).unwrap().n, 1);
        assert_eq!(s.stats_at(9.999).unwrap().n, 0);
        assert_eq!(s.stats_at(20.0).unwrap().n, 2);
        assert_eq!(s.stats_at(25.0).unwrap().n, 2);
    }

    #[test]
    fn constant_signal() {
        let s = SwitchingSignal::constant(ModeId(2)).stats_at(3.0).unwrap();
        assert_eq!(s.n, 0);
        assert!(!s.rho_defined);
        assert!(s.rho.is_empty());
        assert_eq!(s.eta[&ModeId(2)], 1.0);
    }

    #[test]
    fn irregular_schedule() {
        let sw = [(1.0, 2), (2.5, 1), (7.0, 2)].map(|(t, m)| Switch { time: t, mode: ModeId(m) });
        let s = SwitchingSignal::from_switches(ModeId(1), sw.to_vec()).unwrap().stats_at(10.0).unwrap();
        assert_eq!(s.n, 3);
        assert_eq!(s.n_pq[&Edge::new(1, 2)], 2);
        assert_eq!(s.n_pq[&Edge::new(2, 1)], 1);
        assert!((s.t_p[&ModeId(1)] - 5.5).abs() < 1e-12);
        assert!((s.t_p[&ModeId(2)] - 4.5).abs() < 1e-12);
    }

    #[test]
    fn periodic_matches_segment_walk() {
        let spec = CycleSpec::new(vec![(ModeId(1), 0.3), (ModeId(2), 1.1), (ModeId(3), 0.7)]).unwrap();
        let per = SwitchingSignal::periodic(spec);
        let explicit = per.shifted(0.0, 50.0);
        for t in [0.1, 0.3, 2.1, 4.2, 7.77, 19.0, 33.3] {
            let a = per.stats_at(t).unwrap();
            let b = explicit.stats_at(t).unwrap();
            assert_eq!(a.n, b.n, "t = {t}");
            assert_eq!(a.n_pq, b.n_pq, "t = {t}");
            for (m, d) in &a.t_p {
                assert!((d - b.t_p[m]).abs() < 1e-9, "t = {t}");
            }
        }
    }

    #[test]
    fn rejects_nonpositive_time() {
        assert!(matches!(alt10().stats_at(0.0), Err(SignalError::NonpositiveTime(_))));
    }

    #[test]
    fn asymptotic_validation() {
        let eta: BTreeMap<_, _> = [(ModeId(1), 0.5), (ModeId(2), 0.4)].into();
        assert!(AsymptoticStatistics::new(0.0, BTreeMap::new(), eta).is_err());
        let eta: BTreeMap<_, _> = [(ModeId(1), 1.0)].into();
        assert!(AsymptoticStatistics::new(0.0, BTreeMap::new(), eta.clone()).is_ok());
        assert!(AsymptoticStatistics::new(0.1, BTreeMap::new(), eta).is_err());
    }
}
