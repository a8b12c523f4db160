//! Collisionless gas in an axis-aligned box with randomising walls.
//!
//! Particles fly ballistically; every wall crossing is resolved exactly and
//! handed to the wall model. A run is single-threaded and fully determined
//! by its configuration and seed; batches of runs are spread over threads.

mod disorder;
mod io;
mod joule;

pub use disorder::{
    equilibrium_plateau, exit_uniformity, nearest_neighbour_distances, orientation_cell, relaxation_time, run_trace,
    sample_disorder, DisorderSample, DisorderTrace, SIM_ESTIMATORS,
};
pub use io::{write_event_log, write_trace_csv, EVENT_HEADER, TRACE_HEADER};
pub use joule::{run_joule_expansion, JouleReport};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{QkmError, Result};
use crate::par::{self, Exec};
use crate::physcore::{SpeciesSpec, K_B};
use crate::thermostatics::v_th;

/// Largest particle count accepted by [`SimConfig::validate`].
pub const MAX_PARTICLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WallKind {
    /// Mirror reflection about a site normal. With probability
    /// `site_randomness` the site is randomly oriented such that the exit
    /// direction follows the cosine law; otherwise the site lies flat.
    SpecularRandomSites { site_randomness: f64 },
    /// Re-emission at the wall temperature: flux-Maxwell speed, cosine-law
    /// direction.
    LangmuirThermal,
}

impl WallKind {
    pub fn random_sites() -> Self {
        WallKind::SpecularRandomSites { site_randomness: 1.0 }
    }

    /// Perfectly smooth box: the non-mixing control.
    pub fn smooth_specular() -> Self {
        WallKind::SpecularRandomSites { site_randomness: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub n_particles: usize,
    /// Box edge lengths (m); the box spans `[0, L_i]` on each axis.
    pub box_size: [f64; 3],
    pub t_wall: f64,
    pub species: SpeciesSpec,
    pub wall: WallKind,
    pub seed: u64,
    /// Sampling interval (s).
    pub dt_out: f64,
    /// Run length (s).
    pub duration: f64,
    /// Keep a record of every wall event.
    pub log_events: bool,
}

impl SimConfig {
    /// Cube of side `side` with a sampling grid expressed in transit times.
    pub fn cube(n_particles: usize, side: f64, t_wall: f64, species: SpeciesSpec, wall: WallKind, seed: u64) -> Self {
        let tb = side / v_th(t_wall, species.mass);
        SimConfig {
            n_particles,
            box_size: [side; 3],
            t_wall,
            species,
            wall,
            seed,
            dt_out: 0.1 * tb,
            duration: 5.0 * tb,
            log_events: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 || self.n_particles > MAX_PARTICLES {
            return Err(QkmError::range(
                "sim_config",
                format!("n_particles = {} outside 1..={MAX_PARTICLES}", self.n_particles),
            ));
        }
        if !self.box_size.iter().all(|&l| l > 0.0 && l.is_finite()) {
            return Err(QkmError::domain("sim_config", "box dimensions must be positive"));
        }
        if !(self.t_wall > 0.0) {
            return Err(QkmError::domain("sim_config", "wall temperature must be positive"));
        }
        if !(self.dt_out > 0.0) || !(self.duration >= 0.0) {
            return Err(QkmError::domain("sim_config", "need dt_out > 0 and duration >= 0"));
        }
        if let WallKind::SpecularRandomSites { site_randomness } = self.wall {
            if !(0.0..=1.0).contains(&site_randomness) {
                return Err(QkmError::domain("sim_config", "site_randomness must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        self.box_size.iter().product()
    }

    pub fn v_th(&self) -> f64 {
        v_th(self.t_wall, self.species.mass)
    }

    /// Transit time `t_b = L_x / v_th`.
    pub fn transit_time(&self) -> f64 {
        self.box_size[0] / self.v_th()
    }

    pub fn with_wall(&self, wall: WallKind) -> Self {
        SimConfig { wall, ..self.clone() }
    }

    /// Same configuration with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        SimConfig { seed, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Maxwell velocities at the wall temperature, uniform positions.
    Equilibrium,
    /// All velocities `+x` at `v_th`, uniform positions.
    Beam,
    /// Maxwell velocities, positions confined to `x < L_x / 2`.
    HalfBox,
}

/// One wall interaction. Angles are of the exit direction in the wall's
/// frame: `theta` from the inward normal, `phi` about it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WallEvent {
    pub t: f64,
    pub particle_id: usize,
    /// `2 axis + side`, side 0 at `x_i = 0` and 1 at `x_i = L_i`.
    pub wall: u8,
    pub exit_theta: f64,
    pub exit_phi: f64,
    pub speed: f64,
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub time: f64,
    pub box_size: [f64; 3],
    pub positions: Vec<[f64; 3]>,
    pub velocities: Vec<[f64; 3]>,
    pub event_log: Vec<WallEvent>,
    pub event_count: u64,
    rng: ChaCha8Rng,
}

impl SimState {
    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn kinetic_energy(&self, mass: f64) -> f64 {
        self.velocities.iter().map(|v| 0.5 * mass * dot(v, v)).sum()
    }

    pub fn speeds(&self) -> Vec<f64> {
        self.velocities.iter().map(|v| dot(v, v).sqrt()).collect()
    }

    /// Resize the box, keeping positions (e.g. removing a partition).
    pub fn set_box(&mut self, box_size: [f64; 3]) {
        self.box_size = box_size;
    }

    pub fn contains_all(&self, tol: f64) -> bool {
        self.positions.iter().all(|p| (0..3).all(|a| p[a] >= -tol && p[a] <= self.box_size[a] + tol))
    }
}

pub fn init_sim(config: &SimConfig, mode: InitMode) -> Result<SimState> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sigma = (K_B * config.t_wall / config.species.mass).sqrt();
    let normal = Normal::new(0.0, sigma).expect("positive scale");
    let l = config.box_size;
    let x_max = if mode == InitMode::HalfBox { 0.5 * l[0] } else { l[0] };
    let mut positions = Vec::with_capacity(config.n_particles);
    let mut velocities = Vec::with_capacity(config.n_particles);
    for _ in 0..config.n_particles {
        positions.push([rng.random::<f64>() * x_max, rng.random::<f64>() * l[1], rng.random::<f64>() * l[2]]);
        velocities.push(match mode {
            InitMode::Beam => [config.v_th(), 0.0, 0.0],
            _ => [normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng)],
        });
    }
    Ok(SimState { time: 0.0, box_size: l, positions, velocities, event_log: Vec::new(), event_count: 0, rng })
}

/// Advance every particle ballistically to time `t`, scattering at walls.
pub fn step_to(state: &mut SimState, t: f64, config: &SimConfig) -> Result<()> {
    if t < state.time {
        return Err(QkmError::domain("step_to", format!("target time {t} precedes state time {}", state.time)));
    }
    let l = state.box_size;
    let t0 = state.time;
    let mut events = Vec::new();
    for i in 0..state.positions.len() {
        let (mut p, mut v) = (state.positions[i], state.velocities[i]);
        let mut now = t0;
        loop {
            let (axis, dt) = next_wall(&p, &v, &l);
            if now + dt > t {
                let rest = t - now;
                for a in 0..3 {
                    p[a] = (p[a] + v[a] * rest).clamp(0.0, l[a]);
                }
                break;
            }
            for a in 0..3 {
                p[a] = (p[a] + v[a] * dt).clamp(0.0, l[a]);
            }
            now += dt;
            let side = (v[axis] > 0.0) as usize;
            p[axis] = if side == 1 { l[axis] } else { 0.0 };
            let mut inward = [0.0; 3];
            inward[axis] = if side == 1 { -1.0 } else { 1.0 };
            v = wall_scatter(&v, &inward, &config.wall, config.t_wall, config.species.mass, &mut state.rng);
            state.event_count += 1;
            if config.log_events {
                let (theta, phi) = local_angles(&v, axis, &inward);
                events.push(WallEvent {
                    t: now,
                    particle_id: i,
                    wall: (2 * axis + side) as u8,
                    exit_theta: theta,
                    exit_phi: phi,
                    speed: dot(&v, &v).sqrt(),
                });
            }
        }
        state.positions[i] = p;
        state.velocities[i] = v;
    }
    events.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.particle_id.cmp(&b.particle_id)));
    state.event_log.extend(events);
    state.time = t;
    Ok(())
}

fn next_wall(p: &[f64; 3], v: &[f64; 3], l: &[f64; 3]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for a in 0..3 {
        let dt = if v[a] > 0.0 {
            (l[a] - p[a]) / v[a]
        } else if v[a] < 0.0 {
            -p[a] / v[a]
        } else {
            f64::INFINITY
        };
        if dt < best.1 {
            best = (a, dt.max(0.0));
        }
    }
    best
}

/// New velocity of a particle leaving a wall with unit inward normal
/// `inward`.
pub fn wall_scatter<R: Rng + ?Sized>(
    v: &[f64; 3],
    inward: &[f64; 3],
    wall: &WallKind,
    t_wall: f64,
    mass: f64,
    rng: &mut R,
) -> [f64; 3] {
    match *wall {
        WallKind::SpecularRandomSites { site_randomness } => {
            let speed = dot(v, v).sqrt();
            if speed == 0.0 {
                return *v;
            }
            let site = if site_randomness > 0.0 && rng.random::<f64>() < site_randomness {
                let d = scale(v, 1.0 / speed);
                let o = cosine_direction(inward, rng);
                let h = sub(&o, &d);
                let hn = dot(&h, &h).sqrt();
                if hn > 0.0 {
                    scale(&h, 1.0 / hn)
                } else {
                    *inward
                }
            } else {
                *inward
            };
            let out = sub(v, &scale(&site, 2.0 * dot(v, &site)));
            // restore the speed exactly
            let s = dot(&out, &out).sqrt();
            scale(&out, speed / s)
        }
        WallKind::LangmuirThermal => {
            let (u1, u2): (f64, f64) = (rng.random(), rng.random());
            let s = -((1.0 - u1) * (1.0 - u2)).ln();
            let speed = (2.0 * K_B * t_wall * s / mass).sqrt();
            scale(&cosine_direction(inward, rng), speed)
        }
    }
}

/// Unit vector drawn from the cosine law about `normal`.
fn cosine_direction<R: Rng + ?Sized>(normal: &[f64; 3], rng: &mut R) -> [f64; 3] {
    let u: f64 = rng.random();
    let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let c = u.sqrt();
    let s = (1.0 - u).sqrt();
    let (e1, e2) = tangent_frame(normal);
    let mut d = [0.0; 3];
    for a in 0..3 {
        d[a] = c * normal[a] + s * (phi.cos() * e1[a] + phi.sin() * e2[a]);
    }
    d
}

fn tangent_frame(n: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = cross(n, &a);
    let e1 = scale(&e1, 1.0 / dot(&e1, &e1).sqrt());
    (e1, cross(n, &e1))
}

fn local_angles(v: &[f64; 3], axis: usize, inward: &[f64; 3]) -> (f64, f64) {
    let s = dot(v, v).sqrt();
    let c = (dot(v, inward) / s).clamp(-1.0, 1.0);
    let (b, d) = ((axis + 1) % 3, (axis + 2) % 3);
    (c.acos(), v[d].atan2(v[b]).rem_euclid(2.0 * std::f64::consts::PI))
}

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: &[f64; 3], k: f64) -> [f64; 3] {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Seeds for a batch of `count` runs derived from `base`.
pub fn seed_batch(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| par::member_seed(base, i)).collect()
}

/// Run `f` once per seed; results keep seed order whatever the policy.
pub fn run_batch<R, F>(exec: Exec, seeds: &[u64], f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    par::map(exec, seeds, |&s| f(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physcore::SpeciesId;
    use crate::stats::{ks_p_value, ks_statistic, maxwell_speed_cdf};

    fn he3() -> SpeciesSpec {
        SpeciesSpec::get(SpeciesId::He3)
    }

    fn cfg(n: usize, wall: WallKind, seed: u64) -> SimConfig {
        SimConfig::cube(n, 0.01, 10.0, he3(), wall, seed)
    }

    #[test]
    fn free_flight_without_walls() {
        let c = cfg(1, WallKind::random_sites(), 1);
        let mut s = init_sim(&c, InitMode::Equilibrium).unwrap();
        s.positions[0] = [0.005, 0.005, 0.005];
        s.velocities[0] = [10.0, -20.0, 5.0];
        step_to(&mut s, 1e-5, &c).unwrap();
        let p = s.positions[0];
        assert!((p[0] - 0.0051).abs() < 1e-15 && (p[1] - 0.0048).abs() < 1e-15 && (p[2] - 0.00505).abs() < 1e-15);
        assert_eq!(s.velocities[0], [10.0, -20.0, 5.0]);
        assert_eq!(s.event_count, 0);
        assert!(step_to(&mut s, 0.0, &c).is_err());
    }

    #[test]
    fn mirror_reflection_when_smooth() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let v = wall_scatter(&[3.0, 4.0, -1.0], &[-1.0, 0.0, 0.0], &WallKind::smooth_specular(), 10.0, 1.0, &mut rng);
        assert_eq!(v, [-3.0, 4.0, -1.0]);
    }

    #[test]
    fn random_site_exit_points_inward_and_keeps_speed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inward = [0.0, 0.0, 1.0];
        for _ in 0..10_000 {
            let v = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, -rng.random::<f64>() - 1e-3];
            let out = wall_scatter(&v, &inward, &WallKind::random_sites(), 10.0, 1.0, &mut rng);
            assert!(out[2] >= 0.0);
            assert!((dot(&out, &out).sqrt() - dot(&v, &v).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn deterministic_runs() {
        let mut c = cfg(500, WallKind::LangmuirThermal, 42);
        c.log_events = true;
        let run = || {
            let mut s = init_sim(&c, InitMode::Beam).unwrap();
            step_to(&mut s, 3.0 * c.transit_time(), &c).unwrap();
            s
        };
        let (a, b) = (run(), run());
        assert_eq!(a.event_log, b.event_log);
        assert_eq!(a.positions, b.positions);
    }

    #[test]
    fn containment_and_energy_in_specular_mode() {
        let c = cfg(2000, WallKind::random_sites(), 7);
        let mut s = init_sim(&c, InitMode::Equilibrium).unwrap();
        let e0 = s.kinetic_energy(c.species.mass);
        for k in 1..=20 {
            step_to(&mut s, k as f64 * 0.5 * c.transit_time(), &c).unwrap();
            assert!(s.contains_all(0.0));
        }
        let e1 = s.kinetic_energy(c.species.mass);
        assert!(((e1 - e0) / e0).abs() < 1e-12);
    }

    #[test]
    fn event_rate_matches_kinetic_estimate() {
        // wall hits per transit: n (vbar / 4)(6 / L) t_b = 1.5 n sqrt(8 / 3 pi)
        let c = cfg(20_000, WallKind::smooth_specular(), 3);
        let mut s = init_sim(&c, InitMode::Equilibrium).unwrap();
        step_to(&mut s, c.transit_time(), &c).unwrap();
        let expected = 1.5 * 20_000.0 * (8.0 / (3.0 * std::f64::consts::PI)).sqrt();
        assert!((s.event_count as f64 / expected - 1.0).abs() < 0.05, "{}", s.event_count);
    }

    #[test]
    fn langmuir_wall_thermalises() {
        let c = cfg(10_000, WallKind::LangmuirThermal, 9);
        let mut s = init_sim(&c, InitMode::Beam).unwrap();
        for v in s.velocities.iter_mut() {
            v[0] *= 0.3;
        }
        step_to(&mut s, 15.0 * c.transit_time(), &c).unwrap();
        assert!(s.event_count >= 10_000);
        let mean_ke = s.kinetic_energy(c.species.mass) / 10_000.0;
        assert!((mean_ke / (1.5 * K_B * c.t_wall) - 1.0).abs() < 0.02);
        let a = (K_B * c.t_wall / c.species.mass).sqrt();
        let d = ks_statistic(&s.speeds(), |v| maxwell_speed_cdf(v, a));
        assert!(ks_p_value(d, 10_000) > 1e-3);
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(10, WallKind::random_sites(), 0);
        c.n_particles = MAX_PARTICLES + 1;
        assert!(c.validate().is_err());
        let mut c = cfg(10, WallKind::random_sites(), 0);
        c.box_size[1] = 0.0;
        assert!(init_sim(&c, InitMode::Beam).is_err());
        let c = cfg(10, WallKind::SpecularRandomSites { site_randomness: 1.5 }, 0);
        assert!(c.validate().is_err());
    }
}
