use std::io::Write;

use super::{DisorderTrace, WallEvent};
use crate::error::Result;

pub const TRACE_HEADER: &str = "t,D_hat,K_orient,K_nn,chi2_orient,chi2_pos";
pub const EVENT_HEADER: &str = "t,particle_id,exit_theta,exit_phi,speed";

/// Trace as CSV. `preamble` lines are written first, each prefixed `# `.
pub fn write_trace_csv<W: Write>(mut w: W, trace: &DisorderTrace, preamble: &[String]) -> Result<()> {
    for line in preamble {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "{TRACE_HEADER}")?;
    for s in &trace.samples {
        writeln!(
            w,
            "{:e},{},{},{},{},{}",
            s.t, s.d_hat, s.k_orient, s.k_nn, s.chi2_orient.statistic, s.chi2_pos.statistic
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_event_log<W: Write>(mut w: W, events: &[WallEvent], preamble: &[String]) -> Result<()> {
    for line in preamble {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "{EVENT_HEADER}")?;
    for e in events {
        writeln!(w, "{:e},{},{},{},{}", e.t, e.particle_id, e.exit_theta, e.exit_phi, e.speed)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas_sim::{run_trace, InitMode, SimConfig, WallKind};
    use crate::physcore::{SpeciesId, SpeciesSpec};

    #[test]
    fn csv_shapes() {
        let mut c = SimConfig::cube(300, 0.01, 10.0, SpeciesSpec::get(SpeciesId::He3), WallKind::random_sites(), 1);
        c.duration = 3.0 * c.dt_out;
        let (trace, _) = run_trace(&c, InitMode::Beam).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &trace, &["manifest".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# manifest");
        assert_eq!(lines[1], TRACE_HEADER);
        assert_eq!(lines.len(), 2 + trace.samples.len());
        assert!(lines[2..].iter().all(|l| l.split(',').count() == 6));
    }
}
