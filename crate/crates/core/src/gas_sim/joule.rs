use serde::Serialize;

use super::disorder::trace_from;
use super::{init_sim, InitMode, SimConfig};
use crate::error::{QkmError, Result};
use crate::physcore::K_B;
use crate::thermostatics::{state_equations, GasSpec, Statistics};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JouleReport {
    pub volume_ratio: f64,
    /// Mean `D_hat` over the settled half of each phase.
    pub d_hat_before: f64,
    pub d_hat_after: f64,
    pub delta_d_hat: f64,
    /// `Delta S / (N k_B)` from the closed-form state equations.
    pub delta_s_closed_form: f64,
    /// Classical prediction `ln(volume_ratio)`.
    pub delta_s_classical: f64,
}

fn entropy_per_particle(config: &SimConfig, v: f64) -> Result<f64> {
    let n = config.n_particles as f64;
    let spec = GasSpec::new(config.t_wall, v, n, config.species, Statistics::Fermi)?;
    Ok(state_equations(&spec)?.s / (n * K_B))
}

/// Equilibrate in `V / volume_ratio` (the box shortened along x), remove
/// the partition, re-equilibrate in `V`. Each phase lasts `duration`.
pub fn run_joule_expansion(config: &SimConfig, volume_ratio: f64) -> Result<JouleReport> {
    if !(volume_ratio >= 1.0) || !volume_ratio.is_finite() {
        return Err(QkmError::domain("run_joule_expansion", format!("volume ratio {volume_ratio} < 1")));
    }
    let v_final = config.volume();
    let mut sub = config.clone();
    sub.box_size[0] /= volume_ratio;
    let mut state = init_sim(&sub, InitMode::Equilibrium)?;
    let before = trace_from(&mut state, &sub, config.duration, v_final)?;
    let d_hat_before = before.mean_d_hat_after(0.5 * config.duration).unwrap_or(0.0);
    if volume_ratio == 1.0 {
        return Ok(JouleReport {
            volume_ratio,
            d_hat_before,
            d_hat_after: d_hat_before,
            delta_d_hat: 0.0,
            delta_s_closed_form: 0.0,
            delta_s_classical: 0.0,
        });
    }
    state.set_box(config.box_size);
    let after = trace_from(&mut state, config, 2.0 * config.duration, v_final)?;
    let d_hat_after = after.mean_d_hat_after(1.5 * config.duration).unwrap_or(0.0);
    let delta_s_closed_form =
        entropy_per_particle(config, v_final)? - entropy_per_particle(config, v_final / volume_ratio)?;
    Ok(JouleReport {
        volume_ratio,
        d_hat_before,
        d_hat_after,
        delta_d_hat: d_hat_after - d_hat_before,
        delta_s_closed_form,
        delta_s_classical: volume_ratio.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas_sim::WallKind;
    use crate::physcore::{SpeciesId, SpeciesSpec};

    fn cfg(seed: u64) -> SimConfig {
        SimConfig::cube(2000, 0.01, 10.0, SpeciesSpec::get(SpeciesId::He3), WallKind::random_sites(), seed)
    }

    #[test]
    fn doubling_increases_disorder() {
        let r = run_joule_expansion(&cfg(1), 2.0).unwrap();
        assert!(r.delta_d_hat > 0.0, "{r:?}");
        assert!((r.delta_s_closed_form / 2f64.ln() - 1.0).abs() < 0.05);
    }

    #[test]
    fn unit_ratio_is_a_no_op() {
        let r = run_joule_expansion(&cfg(2), 1.0).unwrap();
        assert_eq!((r.delta_d_hat, r.delta_s_closed_form, r.delta_s_classical), (0.0, 0.0, 0.0));
        assert!(run_joule_expansion(&cfg(2), 0.5).is_err());
    }
}
