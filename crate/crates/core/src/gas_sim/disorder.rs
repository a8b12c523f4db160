use serde::Serialize;

use super::{init_sim, step_to, InitMode, SimConfig, SimState, WallEvent};
use crate::error::{QkmError, Result};
use crate::par::{self, Exec};
use crate::randomness::{default_width, estimate_with, quantize, Calibration, EncodedList, Estimator};
use crate::stats::{chi_square_uniform, ChiSquare};

/// Estimators applied to the particle lists.
pub const SIM_ESTIMATORS: [Estimator; 4] =
    [Estimator::Deflate, Estimator::DeflateAligned, Estimator::Order0, Estimator::DeltaDeflate];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisorderSample {
    pub t: f64,
    /// `K_orient * K_nn / l_nn` (bits).
    pub d_hat: f64,
    pub k_orient: f64,
    pub k_nn: f64,
    pub chi2_orient: ChiSquare,
    pub chi2_pos: ChiSquare,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderTrace {
    pub samples: Vec<DisorderSample>,
}

impl DisorderTrace {
    pub fn is_strictly_increasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].t > w[0].t)
    }

    /// Mean `D_hat` over samples with `t >= from`.
    pub fn mean_d_hat_after(&self, from: f64) -> Option<f64> {
        let tail: Vec<f64> = self.samples.iter().filter(|s| s.t >= from).map(|s| s.d_hat).collect();
        (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64)
    }
}

/// Equal-area orientation cell of `v` on `2^k` cells: `cos(theta)` bins
/// times `phi` bins.
pub fn orientation_cell(v: &[f64; 3], k: u32) -> u64 {
    let kc = k / 2;
    let kp = k - kc;
    let s = super::dot(v, v).sqrt();
    if s == 0.0 {
        return 0;
    }
    let c = (v[2] / s).clamp(-1.0, 1.0);
    let phi = v[1].atan2(v[0]).rem_euclid(2.0 * std::f64::consts::PI);
    let nc = 1u64 << kc;
    let np = 1u64 << kp;
    let ic = (((c + 1.0) * 0.5 * nc as f64) as u64).min(nc - 1);
    let ip = ((phi / (2.0 * std::f64::consts::PI) * np as f64) as u64).min(np - 1);
    (ic << kp) | ip
}

fn position_cell(p: &[f64; 3], l: &[f64; 3], bits: u32) -> u64 {
    let b = [bits / 3 + !bits.is_multiple_of(3) as u32, bits / 3 + (bits % 3 > 1) as u32, bits / 3];
    let mut idx = 0u64;
    for a in 0..3 {
        let m = 1u64 << b[a];
        let i = ((p[a] / l[a] * m as f64) as u64).min(m - 1);
        idx = (idx << b[a]) | i;
    }
    idx
}

/// Bits of the coarse grid used by the chi-square tests: about 20 expected
/// counts per cell.
fn chi_bits(n: usize) -> u32 {
    ((n as f64 / 20.0).log2().floor() as i64).clamp(1, 20) as u32
}

/// Distance from each particle to its nearest neighbour (uniform grid).
pub fn nearest_neighbour_distances(positions: &[[f64; 3]], l: &[f64; 3]) -> Vec<f64> {
    let n = positions.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let h = (l[0] * l[1] * l[2] / n as f64).cbrt();
    let dims: [usize; 3] = std::array::from_fn(|a| ((l[a] / h).floor() as usize).clamp(1, 1 << 10));
    let cell_of = |p: &[f64; 3]| -> [usize; 3] {
        std::array::from_fn(|a| ((p[a] / l[a] * dims[a] as f64) as usize).min(dims[a] - 1))
    };
    let flat = |c: [usize; 3]| (c[0] * dims[1] + c[1]) * dims[2] + c[2];
    let mut heads = vec![usize::MAX; dims[0] * dims[1] * dims[2]];
    let mut next = vec![usize::MAX; n];
    for (i, p) in positions.iter().enumerate() {
        let f = flat(cell_of(p));
        next[i] = heads[f];
        heads[f] = i;
    }
    let cell_w: [f64; 3] = std::array::from_fn(|a| l[a] / dims[a] as f64);
    let min_w = cell_w.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ring = *dims.iter().max().unwrap();
    positions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let c = cell_of(p);
            let mut best = f64::INFINITY;
            for r in 0..=max_ring {
                // points beyond ring r - 1 are at least (r - 1) min_w away
                if r > 0 && best <= ((r - 1) as f64 * min_w).powi(2) {
                    break;
                }
                let lo: [i64; 3] = std::array::from_fn(|a| c[a] as i64 - r as i64);
                let hi: [i64; 3] = std::array::from_fn(|a| c[a] as i64 + r as i64);
                for x in lo[0].max(0)..=hi[0].min(dims[0] as i64 - 1) {
                    for y in lo[1].max(0)..=hi[1].min(dims[1] as i64 - 1) {
                        for z in lo[2].max(0)..=hi[2].min(dims[2] as i64 - 1) {
                            let on_shell =
                                x == lo[0] || x == hi[0] || y == lo[1] || y == hi[1] || z == lo[2] || z == hi[2];
                            if !on_shell {
                                continue;
                            }
                            let mut j = heads[flat([x as usize, y as usize, z as usize])];
                            while j != usize::MAX {
                                if j != i {
                                    let q = positions[j];
                                    let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                                    best = best.min(d2);
                                }
                                j = next[j];
                            }
                        }
                    }
                }
            }
            best.sqrt()
        })
        .collect()
}

/// Encode the orientation and nearest-neighbour lists of `state` and score
/// them. Distances are quantised on `[0, 2 (ref_volume / n)^(1/3)]`.
pub fn sample_disorder(state: &SimState, ref_volume: f64) -> Result<DisorderSample> {
    let n = state.n();
    let k = default_width(n);
    let cal = Calibration::current();
    let orient: Vec<u64> = state.velocities.iter().map(|v| orientation_cell(v, k)).collect();
    let orient_list = EncodedList::encode(&orient, Some(k), "orientation")?;
    let d_ref = 2.0 * (ref_volume / n as f64).cbrt();
    let nn = nearest_neighbour_distances(&state.positions, &state.box_size);
    let nn_list = EncodedList::encode(&quantize(&nn, 0.0, d_ref, k), Some(k), "nearest-neighbour")?;
    let k_orient = estimate_with(&orient_list, &SIM_ESTIMATORS, cal)?.k_hat;
    let k_nn = estimate_with(&nn_list, &SIM_ESTIMATORS, cal)?.k_hat;
    let l_nn = nn_list.bit_len() as f64;

    let cb = chi_bits(n);
    let mut oc = vec![0u64; 1 << cb];
    for v in &state.velocities {
        oc[orientation_cell(v, cb) as usize] += 1;
    }
    let mut pc = vec![0u64; 1 << cb];
    for p in &state.positions {
        pc[position_cell(p, &state.box_size, cb) as usize] += 1;
    }
    Ok(DisorderSample {
        t: state.time,
        d_hat: k_orient * k_nn / l_nn,
        k_orient,
        k_nn,
        chi2_orient: chi_square_uniform(&oc),
        chi2_pos: chi_square_uniform(&pc),
    })
}

/// Sample `state` every `dt_out` until `until`, starting with the current
/// time.
pub(crate) fn trace_from(
    state: &mut SimState,
    config: &SimConfig,
    until: f64,
    ref_volume: f64,
) -> Result<DisorderTrace> {
    let mut samples = vec![sample_disorder(state, ref_volume)?];
    let start = state.time;
    let mut i = 1u64;
    loop {
        let t = start + i as f64 * config.dt_out;
        if t > until * (1.0 + 1e-12) {
            break;
        }
        step_to(state, t, config)?;
        samples.push(sample_disorder(state, ref_volume)?);
        i += 1;
    }
    Ok(DisorderTrace { samples })
}

/// Initialise, then sample every `dt_out` over `duration`.
pub fn run_trace(config: &SimConfig, mode: InitMode) -> Result<(DisorderTrace, SimState)> {
    let mut state = init_sim(config, mode)?;
    let trace = trace_from(&mut state, config, config.duration, config.volume())?;
    Ok((trace, state))
}

/// Mean `D_hat` of equilibrium-initialised runs over `seeds`.
pub fn equilibrium_plateau(config: &SimConfig, seeds: &[u64], exec: Exec) -> Result<f64> {
    if seeds.is_empty() {
        return Err(QkmError::domain("equilibrium_plateau", "no seeds"));
    }
    let means = par::map(exec, seeds, |&s| {
        run_trace(&config.with_seed(s), InitMode::Equilibrium).map(|(t, _)| t.mean_d_hat_after(0.0).unwrap_or(0.0))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(means.iter().sum::<f64>() / means.len() as f64)
}

/// First time `D_hat >= threshold * plateau`, in units of `t_b`.
pub fn relaxation_time(trace: &DisorderTrace, threshold: f64, plateau: f64, t_b: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold <= 1.0) || !(plateau > 0.0) || !(t_b > 0.0) {
        return Err(QkmError::domain("relaxation_time", "need 0 < threshold <= 1, plateau > 0, t_b > 0"));
    }
    let t0 = trace.samples.first().map_or(0.0, |s| s.t);
    trace.samples.iter().find(|s| s.d_hat >= threshold * plateau).map(|s| (s.t - t0) / t_b).ok_or(QkmError::NoPlateau)
}

/// Chi-square uniformity of exit directions logged up to `t_max`, binned
/// in the wall frame on cells of equal cosine-law flux: `sin^2(theta)`
/// times `phi`.
pub fn exit_uniformity(events: &[WallEvent], t_max: f64, bits: u32) -> ChiSquare {
    let kc = bits / 2;
    let kp = bits - kc;
    let (nc, np) = (1usize << kc, 1usize << kp);
    let mut counts = vec![0u64; 1 << bits];
    for e in events.iter().filter(|e| e.t <= t_max) {
        let u = e.exit_theta.sin().powi(2);
        let ic = ((u * nc as f64) as usize).min(nc - 1);
        let ip = ((e.exit_phi / (2.0 * std::f64::consts::PI) * np as f64) as usize).min(np - 1);
        counts[(ic << kp) | ip] += 1;
    }
    chi_square_uniform(&counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas_sim::WallKind;
    use crate::physcore::{SpeciesId, SpeciesSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(n: usize, wall: WallKind, seed: u64) -> SimConfig {
        SimConfig::cube(n, 0.01, 10.0, SpeciesSpec::get(SpeciesId::He3), wall, seed)
    }

    #[test]
    fn nn_grid_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let l = [1.0, 2.0, 0.5];
        let pts: Vec<[f64; 3]> =
            (0..700).map(|_| [rng.random::<f64>(), 2.0 * rng.random::<f64>(), 0.5 * rng.random::<f64>()]).collect();
        let fast = nearest_neighbour_distances(&pts, &l);
        for (i, p) in pts.iter().enumerate() {
            let brute = pts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(fast[i], brute);
        }
    }

    #[test]
    fn orientation_cells_cover_range() {
        assert_eq!(orientation_cell(&[0.0, 0.0, 1.0], 4), 0b1100);
        assert_eq!(orientation_cell(&[1.0, 0.0, -1e-9], 4), 0b0100);
        assert!(orientation_cell(&[0.0, -1.0, 0.0], 14) < 1 << 14);
    }

    #[test]
    fn equilibrium_start_passes_uniformity() {
        let passes = (0..100)
            .filter(|&s| {
                let st = init_sim(&cfg(2000, WallKind::random_sites(), s), InitMode::Equilibrium).unwrap();
                sample_disorder(&st, 1e-6).unwrap().chi2_orient.p_value > 0.05
            })
            .count();
        // Binomial(100, 0.95): fewer than 88 passes has probability < 1e-3
        assert!(passes >= 88, "{passes}");
    }

    #[test]
    fn beam_orientation_is_structured() {
        let c = cfg(4000, WallKind::random_sites(), 1);
        let st = init_sim(&c, InitMode::Beam).unwrap();
        let s = sample_disorder(&st, c.volume()).unwrap();
        assert!(s.k_orient < 0.01 * 4000.0 * 12.0, "{s:?}");
        assert!(s.d_hat < 0.01 * 4000.0 * 12.0);
    }

    #[test]
    fn half_box_fails_position_uniformity() {
        let c = cfg(4000, WallKind::random_sites(), 2);
        let st = init_sim(&c, InitMode::HalfBox).unwrap();
        assert!(sample_disorder(&st, c.volume()).unwrap().chi2_pos.p_value < 1e-6);
    }

    #[test]
    fn relaxation_contracts() {
        let c = cfg(2000, WallKind::random_sites(), 5);
        let tb = c.transit_time();
        let plateau = equilibrium_plateau(&c, &[11, 12], Exec::Sequential).unwrap();
        let (eq, _) = run_trace(&c, InitMode::Equilibrium).unwrap();
        assert!(eq.is_strictly_increasing());
        assert_eq!(relaxation_time(&eq, 0.95, plateau, tb).unwrap(), 0.0);
        let (beam, _) = run_trace(&c, InitMode::Beam).unwrap();
        let t = relaxation_time(&beam, 0.95, plateau, tb).unwrap();
        assert!((0.5..=4.0).contains(&t), "{t}");
        let (ctrl, _) = run_trace(&c.with_seed(6).with_wall(WallKind::smooth_specular()), InitMode::Beam).unwrap();
        assert!(matches!(relaxation_time(&ctrl, 0.95, plateau, tb), Err(QkmError::NoPlateau)));
    }

    #[test]
    fn exit_directions_uniform_within_two_transits() {
        let mut c = cfg(5000, WallKind::random_sites(), 8);
        c.log_events = true;
        let mut st = init_sim(&c, InitMode::Beam).unwrap();
        step_to(&mut st, 2.0 * c.transit_time(), &c).unwrap();
        assert!(exit_uniformity(&st.event_log, 2.0 * c.transit_time(), 8).p_value > 1e-3);
        let mut s = c.with_wall(WallKind::smooth_specular());
        s.log_events = true;
        let mut st = init_sim(&s, InitMode::Beam).unwrap();
        step_to(&mut st, 2.0 * s.transit_time(), &s).unwrap();
        assert!(exit_uniformity(&st.event_log, 2.0 * s.transit_time(), 8).p_value < 1e-6);
    }
}
