use serde::{Deserialize, Serialize};

use super::SignalError;
use crate::family::{Edge, ModeId};

/// Entering `mode` at `time`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Switch {
    pub time: f64,
    pub mode: ModeId,
}

/// Maximal interval `[start, end)` on which `mode` is active. `end` is
/// infinite for the last segment of a finite signal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub mode: ModeId,
}

/// One period of a periodic signal: modes visited in order with their dwell
/// times. The period wraps from the last entry back to the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(ModeId, f64)>", into = "Vec<(ModeId, f64)>")]
pub struct CycleSpec {
    entries: Vec<(ModeId, f64)>,
}

impl CycleSpec {
    pub fn new(entries: Vec<(ModeId, f64)>) -> Result<Self, SignalError> {
        if entries.is_empty() {
            return Err(SignalError::EmptyCycle);
        }
        for (i, &(_, dwell)) in entries.iter().enumerate() {
            if !(dwell > 0.0 && dwell.is_finite()) {
                return Err(SignalError::BadDwell { index: i, dwell });
            }
        }
        let n = entries.len();
        if n > 1 {
            for i in 0..n {
                if entries[i].0 == entries[(i + 1) % n].0 {
                    return Err(SignalError::CycleRepeatsMode { index: (i + 1) % n });
                }
            }
        }
        Ok(CycleSpec { entries })
    }

    pub fn entries(&self) -> &[(ModeId, f64)] {
        &self.entries
    }

    pub fn period(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Transitions of one period in cyclic order, wrap-around included.
    pub fn transitions(&self) -> Vec<Edge> {
        let n = self.entries.len();
        if n < 2 {
            return Vec::new();
        }
        (0..n).map(|i| Edge { from: self.entries[i].0, to: self.entries[(i + 1) % n].0 }).collect()
    }
}

impl TryFrom<Vec<(ModeId, f64)>> for CycleSpec {
    type Error = SignalError;

    fn try_from(v: Vec<(ModeId, f64)>) -> Result<Self, SignalError> {
        CycleSpec::new(v)
    }
}

impl From<CycleSpec> for Vec<(ModeId, f64)> {
    fn from(c: CycleSpec) -> Self {
        c.entries
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Periodic {
    pub(crate) cycle: CycleSpec,
    /// start of each entry within the period; `starts[len] = period`
    pub(crate) starts: Vec<f64>,
}

impl Periodic {
    pub(crate) fn period(&self) -> f64 {
        self.starts[self.starts.len() - 1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Schedule {
    Finite(Vec<Switch>),
    Periodic(Periodic),
}

/// Piecewise-constant, right-continuous map from `[0, ∞)` to subsystem ids.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchingSignal {
    initial_mode: ModeId,
    pub(crate) schedule: Schedule,
}

impl SwitchingSignal {
    pub fn constant(mode: ModeId) -> Self {
        SwitchingSignal { initial_mode: mode, schedule: Schedule::Finite(Vec::new()) }
    }

    /// A signal with finitely many switches; the last mode stays active
    /// forever.
    pub fn from_switches(initial_mode: ModeId, switches: Vec<Switch>) -> Result<Self, SignalError> {
        let mut prev_time = 0.0;
        let mut prev_mode = initial_mode;
        for (i, s) in switches.iter().enumerate() {
            if !s.time.is_finite() || s.time <= prev_time {
                return Err(SignalError::NonIncreasing { index: i, time: s.time });
            }
            if s.mode == prev_mode {
                return Err(SignalError::RepeatedMode { index: i, mode: s.mode });
            }
            prev_time = s.time;
            prev_mode = s.mode;
        }
        Ok(SwitchingSignal { initial_mode, schedule: Schedule::Finite(switches) })
    }

    /// The infinite repetition of `cycle`, starting with its first entry at
    /// `t = 0`. A one-entry cycle is a constant signal.
    pub fn periodic(cycle: CycleSpec) -> Self {
        let initial_mode = cycle.entries[0].0;
        if cycle.len() == 1 {
            return SwitchingSignal::constant(initial_mode);
        }
        let mut starts = Vec::with_capacity(cycle.len() + 1);
        let mut acc = 0.0;
        starts.push(0.0);
        for &(_, dwell) in cycle.entries() {
            acc += dwell;
            starts.push(acc);
        }
        SwitchingSignal { initial_mode, schedule: Schedule::Periodic(Periodic { cycle, starts }) }
    }

    pub fn initial_mode(&self) -> ModeId {
        self.initial_mode
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.schedule, Schedule::Periodic(_))
    }

    pub fn cycle(&self) -> Option<&CycleSpec> {
        match &self.schedule {
            Schedule::Periodic(p) => Some(&p.cycle),
            Schedule::Finite(_) => None,
        }
    }

    /// The explicit switch list of a finite signal.
    pub fn switches(&self) -> Option<&[Switch]> {
        match &self.schedule {
            Schedule::Finite(s) => Some(s),
            Schedule::Periodic(_) => None,
        }
    }

    /// Every transition the signal ever makes, in order of first
    /// occurrence for periodic signals (one period, wrap included).
    pub fn transitions(&self) -> Vec<(usize, Edge)> {
        match &self.schedule {
            Schedule::Finite(sw) => {
                let mut prev = self.initial_mode;
                sw.iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let e = Edge { from: prev, to: s.mode };
                        prev = s.mode;
                        (i, e)
                    })
                    .collect()
            }
            Schedule::Periodic(p) => p.cycle.transitions().into_iter().enumerate().collect(),
        }
    }

    /// All modes the signal visits.
    pub fn modes(&self) -> Vec<ModeId> {
        let mut m: Vec<ModeId> = match &self.schedule {
            Schedule::Finite(sw) => std::iter::once(self.initial_mode).chain(sw.iter().map(|s| s.mode)).collect(),
            Schedule::Periodic(p) => p.cycle.entries().iter().map(|e| e.0).collect(),
        };
        m.sort();
        m.dedup();
        m
    }

    pub fn first_switch(&self) -> Option<f64> {
        match &self.schedule {
            Schedule::Finite(sw) => sw.first().map(|s| s.time),
            Schedule::Periodic(p) => Some(p.starts[1]),
        }
    }

    pub fn segments(&self) -> Segments<'_> {
        Segments { signal: self, index: 0, period_index: 0 }
    }

    /// Mode active at `t` (a switch at exactly `t` has already happened).
    pub fn mode_at(&self, t: f64) -> ModeId {
        self.segments().take_while(|s| s.start <= t).last().map_or(self.initial_mode, |s| s.mode)
    }

    /// Switching instants in `[from, to]`.
    pub fn switch_times_in(&self, from: f64, to: f64) -> Vec<f64> {
        self.segments().skip(1).map(|s| s.start).take_while(|&t| t <= to).filter(|&t| t >= from).collect()
    }

    /// The signal seen from time `offset` on, as a finite schedule covering
    /// `[0, horizon]`.
    pub fn shifted(&self, offset: f64, horizon: f64) -> SwitchingSignal {
        let mut segs = self.segments().skip_while(|s| s.end <= offset);
        let first = segs.next().expect("segments never run out");
        let switches = segs
            .take_while(|s| s.start - offset <= horizon)
            .map(|s| Switch { time: s.start - offset, mode: s.mode })
            .collect();
        SwitchingSignal { initial_mode: first.mode, schedule: Schedule::Finite(switches) }
    }
}

/// Iterator over the activity segments of a signal; infinite for periodic
/// signals.
pub struct Segments<'a> {
    signal: &'a SwitchingSignal,
    index: usize,
    period_index: u64,
}

impl Iterator for Segments<'_> {
    type Item = Segment;

    fn next(&mut self) -> Option<Segment> {
        match &self.signal.schedule {
            Schedule::Finite(sw) => {
                if self.index > sw.len() {
                    return None;
                }
                let (start, mode) = if self.index == 0 {
                    (0.0, self.signal.initial_mode)
                } else {
                    (sw[self.index - 1].time, sw[self.index - 1].mode)
                };
                let end = sw.get(self.index).map_or(f64::INFINITY, |s| s.time);
                self.index += 1;
                Some(Segment { start, end, mode })
            }
            Schedule::Periodic(p) => {
                let base = self.period_index as f64 * p.period();
                let i = self.index;
                let seg =
                    Segment { start: base + p.starts[i], end: base + p.starts[i + 1], mode: p.cycle.entries()[i].0 };
                self.index += 1;
                if self.index == p.cycle.len() {
                    self.index = 0;
                    self.period_index += 1;
                }
                Some(seg)
            }
        }
    }
}
