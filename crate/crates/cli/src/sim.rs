use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;

use qkm_core::gas_sim::{
    equilibrium_plateau, relaxation_time, run_batch, run_joule_expansion, run_trace, seed_batch, write_event_log,
    write_trace_csv, InitMode, JouleReport, SimConfig, WallKind,
};
use qkm_core::physcore::species_lookup;
use qkm_core::thermostatics::{state_equations, GasSpec, Statistics};
use qkm_core::{Exec, QkmError, Result};

use crate::manifest::{write_json, RunManifest};

#[derive(Debug, Clone, Subcommand)]
pub enum SimCmd {
    /// Relaxation of D_hat towards its equilibrium plateau
    Relax(RelaxArgs),
    /// Free expansion into a larger box
    Joule(JouleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallArg {
    /// Mirror reflection about randomly oriented sites
    RandomSites,
    /// Flat mirror walls (non-mixing control)
    Smooth,
    /// Thermal re-emission at the wall temperature
    Langmuir,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    Equilibrium,
    Beam,
    HalfBox,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimArgs {
    #[arg(long, default_value = "he3")]
    pub gas: String,
    /// Particle count
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    /// Cube edge, m
    #[arg(long, default_value_t = 0.035)]
    pub side: f64,
    /// Wall temperature, K
    #[arg(long, default_value_t = 10.0)]
    pub temp: f64,
    #[arg(long, value_enum, default_value = "random-sites")]
    pub wall: WallArg,
    /// Fraction of randomly oriented sites (random-sites wall only)
    #[arg(long, default_value_t = 1.0)]
    pub site_randomness: f64,
    /// Base seed; batch members get seeds derived from it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of runs
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    /// Sampling interval in transit times
    #[arg(long, default_value_t = 0.1)]
    pub dt_out: f64,
    /// Run length (per phase for joule) in transit times
    #[arg(long, default_value_t = 5.0)]
    pub duration: f64,
    /// Directory for per-run traces, event logs and summary.json
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Record every wall event
    #[arg(long)]
    pub log_events: bool,
}

impl SimArgs {
    fn config(&self) -> Result<SimConfig> {
        let wall = match self.wall {
            WallArg::RandomSites => WallKind::SpecularRandomSites { site_randomness: self.site_randomness },
            WallArg::Smooth => WallKind::smooth_specular(),
            WallArg::Langmuir => WallKind::LangmuirThermal,
        };
        let mut c = SimConfig::cube(self.n, self.side, self.temp, species_lookup(&self.gas)?, wall, self.seed);
        let tb = c.transit_time();
        c.dt_out = self.dt_out * tb;
        c.duration = self.duration * tb;
        c.log_events = self.log_events;
        c.validate()?;
        if self.seeds == 0 {
            return Err(QkmError::Range { op: "sim", msg: "--seeds must be at least 1".into() });
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RelaxArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, value_enum, default_value = "beam")]
    pub init: InitArg,
    /// Fraction of the plateau that counts as relaxed
    #[arg(long, default_value_t = 0.95)]
    pub threshold: f64,
    /// Equilibrium-start runs used to measure the plateau
    #[arg(long, default_value_t = 10)]
    pub plateau_seeds: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct JouleArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Final to initial volume ratio (at least 1)
    #[arg(long, default_value_t = 2.0)]
    pub ratio: f64,
}

pub fn run(cmd: &SimCmd, exec: Exec) -> Result<()> {
    match cmd {
        SimCmd::Relax(a) => relax(a, exec),
        SimCmd::Joule(a) => joule(a, exec),
    }
}

/// Plateau runs use seeds from a separate stream so they never coincide
/// with batch members.
const PLATEAU_SALT: u64 = 0x5EED_0000_0000;

#[derive(Serialize)]
struct RelaxRun {
    seed: u64,
    /// in transit times; `None` if the plateau is never reached
    t_relax: Option<f64>,
    final_d_hat: f64,
    wall_events: u64,
}

#[derive(Serialize)]
struct RelaxSummary {
    t_b: f64,
    plateau: f64,
    threshold: f64,
    runs: Vec<RelaxRun>,
    /// runs with `t_relax` in [0.5, 4] transit times
    within_band: usize,
    total: usize,
}

fn summary_path(args: &SimArgs) -> Result<Option<PathBuf>> {
    match &args.out_dir {
        Some(d) => {
            fs::create_dir_all(d)?;
            Ok(Some(d.join("summary.json")))
        }
        None => Ok(None),
    }
}

fn relax(args: &RelaxArgs, exec: Exec) -> Result<()> {
    let base = args.sim.config()?;
    if !(args.threshold > 0.0 && args.threshold <= 1.0) {
        return Err(QkmError::Range { op: "sim relax", msg: format!("threshold {} outside (0, 1]", args.threshold) });
    }
    let init = match args.init {
        InitArg::Equilibrium => InitMode::Equilibrium,
        InitArg::Beam => InitMode::Beam,
        InitArg::HalfBox => InitMode::HalfBox,
    };
    let manifest = RunManifest::new("sim relax", args, args.sim.seed);
    let summary = summary_path(&args.sim)?;
    let tb = base.transit_time();
    let plateau_seeds = seed_batch(args.sim.seed ^ PLATEAU_SALT, args.plateau_seeds.max(1));
    let plateau = equilibrium_plateau(&base, &plateau_seeds, exec)?;
    let seeds = seed_batch(args.sim.seed, args.sim.seeds);
    let runs = run_batch(exec, &seeds, |s| -> Result<RelaxRun> {
        let (trace, state) = run_trace(&base.with_seed(s), init)?;
        if let Some(dir) = &args.sim.out_dir {
            let pre = manifest.preamble(s);
            write_trace_csv(BufWriter::new(File::create(dir.join(format!("trace-{s}.csv")))?), &trace, &pre)?;
            if base.log_events {
                let f = File::create(dir.join(format!("events-{s}.csv")))?;
                write_event_log(BufWriter::new(f), &state.event_log, &pre)?;
            }
        }
        let t_relax = match relaxation_time(&trace, args.threshold, plateau, tb) {
            Ok(t) => Some(t),
            Err(QkmError::NoPlateau) => None,
            Err(e) => return Err(e),
        };
        Ok(RelaxRun {
            seed: s,
            t_relax,
            final_d_hat: trace.samples.last().map_or(0.0, |x| x.d_hat),
            wall_events: state.event_count,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let within_band = runs.iter().filter(|r| r.t_relax.is_some_and(|t| (0.5..=4.0).contains(&t))).count();
    let out = RelaxSummary { t_b: tb, plateau, threshold: args.threshold, total: runs.len(), runs, within_band };
    write_json(summary.as_deref(), &manifest, &out)?;
    if summary.is_some() {
        write_json(None, &manifest, &out)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JouleRun {
    seed: u64,
    #[serde(flatten)]
    report: JouleReport,
}

#[derive(Serialize)]
struct JouleSummary {
    volume_ratio: f64,
    delta_s_closed_form: f64,
    delta_s_classical: f64,
    runs: Vec<JouleRun>,
    positive_delta_d_hat: usize,
    total: usize,
}

fn joule(args: &JouleArgs, exec: Exec) -> Result<()> {
    let base = args.sim.config()?;
    if !(args.ratio >= 1.0 && args.ratio.is_finite()) {
        return Err(QkmError::Range {
            op: "sim joule",
            msg: format!("volume ratio {} < 1: compression is not a free expansion", args.ratio),
        });
    }
    let manifest = RunManifest::new("sim joule", args, args.sim.seed);
    let summary = summary_path(&args.sim)?;
    let v = base.volume();
    let n = base.n_particles as f64;
    let s = |vol: f64| -> Result<f64> {
        let spec = GasSpec::new(base.t_wall, vol, n, base.species, Statistics::Fermi)?;
        Ok(state_equations(&spec)?.s / (n * qkm_core::physcore::K_B))
    };
    let delta_s_closed_form = s(v)? - s(v / args.ratio)?;
    let seeds = seed_batch(args.sim.seed, args.sim.seeds);
    let runs = run_batch(exec, &seeds, |seed| {
        run_joule_expansion(&base.with_seed(seed), args.ratio).map(|report| JouleRun { seed, report })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let positive_delta_d_hat = runs.iter().filter(|r| r.report.delta_d_hat > 0.0).count();
    let out = JouleSummary {
        volume_ratio: args.ratio,
        delta_s_closed_form,
        delta_s_classical: args.ratio.ln(),
        total: runs.len(),
        runs,
        positive_delta_d_hat,
    };
    write_json(summary.as_deref(), &manifest, &out)?;
    if summary.is_some() {
        write_json(None, &manifest, &out)?;
    }
    Ok(())
}
