use std::io::Write;

use super::{SimError, Trajectory};
use crate::verdikt::EnvelopeExponents;

pub const TRACE_HEADER: [&str; 6] = ["t", "mode", "norm_x", "V", "psi_env", "phi_env"];

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes one CSV row per sample. `psi_env = e^ψ V(0)` and
/// `phi_env = e^φ V(0)`; reals are printed with 17 significant digits.
pub fn write_trace<W: Write>(traj: &Trajectory, exponents: &[EnvelopeExponents], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    let v0 = traj.initial().v;
    for (s, e) in traj.samples.iter().zip(exponents) {
        w.write_record([
            fmt(s.t),
            s.mode.to_string(),
            fmt(s.norm_x),
            fmt(s.v),
            fmt(e.psi.exp() * v0),
            fmt(e.phi.exp() * v0),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::ModeId;
    use crate::simkit::Sample;

    #[test]
    fn header_and_precision() {
        let traj = Trajectory {
            samples: vec![Sample { t: 0.0, x: vec![1.0], norm_x: 1.0, mode: ModeId(1), v: 2.0 }],
            saturated: false,
        };
        let mut buf = Vec::new();
        write_trace(&traj, &[EnvelopeExponents { t: 0.0, psi: 0.0, phi: 0.0 }], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,mode,norm_x,V,psi_env,phi_env"));
        assert_eq!(
            lines.next(),
            Some("0.0000000000000000e0,1,1.0000000000000000e0,2.0000000000000000e0,2.0000000000000000e0,2.0000000000000000e0")
        );
    }
}
