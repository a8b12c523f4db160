use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use qkm_core::combinatorics::CLASSICAL_MIN_A;
use qkm_core::physcore::{species_lookup, to_angstrom};
use qkm_core::thermostatics::{
    degeneracy_parameter, grid, state_equations, sweep, Degeneracy, GasSpec, Spacing, Statistics, SweepVar, ThermoState,
};
use qkm_core::wall_regime::{classify_regime, LengthHierarchy};
use qkm_core::{Exec, Result};

use crate::manifest::{output, write_json, RunManifest};

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StatArg {
    Fermi,
    Bose,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GasArgs {
    /// he3 or he4
    #[arg(long, default_value = "he3")]
    pub gas: String,
    /// Temperature, K
    #[arg(long)]
    pub temp: f64,
    /// Volume, m^3
    #[arg(long)]
    pub volume: f64,
    /// Particle count
    #[arg(long)]
    pub count: f64,
    #[arg(long, value_enum, default_value = "fermi")]
    pub statistics: StatArg,
}

impl GasArgs {
    pub fn spec(&self) -> Result<GasSpec> {
        let stats = match self.statistics {
            StatArg::Fermi => Statistics::Fermi,
            StatArg::Bose => Statistics::Bose,
        };
        GasSpec::new(self.temp, self.volume, self.count, species_lookup(&self.gas)?, stats)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StateArgs {
    #[command(flatten)]
    pub gas: GasArgs,
    /// Container length b in m (default: cube root of the volume)
    #[arg(long)]
    pub box_length: Option<f64>,
    /// Write JSON here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Lengths {
    lambda_th_m: f64,
    lambda_th_angstrom: f64,
    ell_n_m: f64,
    ell_n_angstrom: f64,
    b_m: f64,
    b_angstrom: f64,
}

#[derive(Serialize)]
struct StateReport {
    spec: GasSpec,
    state: ThermoState,
    degeneracy: Degeneracy,
    hierarchy: LengthHierarchy,
    lengths: Lengths,
    warnings: Vec<String>,
}

pub fn cmd_state(args: &StateArgs) -> Result<()> {
    let spec = args.gas.spec()?;
    let state = state_equations(&spec)?;
    let degeneracy = degeneracy_parameter(&spec)?;
    let b = args.box_length.unwrap_or(spec.v.cbrt());
    let hierarchy = classify_regime(&spec, b)?;
    let mut warnings = Vec::new();
    let c = hierarchy.chain;
    for (ok, link) in [
        (c.mfp_ge_b, "l_mfp >= b"),
        (c.b_gt_ell_n, "b > ell_N"),
        (c.ell_n_gt_lambda, "ell_N > lambda_th"),
        (c.lambda_ge_a_lj, "lambda_th >= a_LJ"),
        (c.a_lj_gt_2a_b, "a_LJ > 2 a_B"),
    ] {
        if !ok {
            warnings.push(format!("length hierarchy link `{link}` fails"));
        }
    }
    if !hierarchy.cool {
        warnings.push("temperature outside the cool window above the critical point and at most 10 K".into());
    }
    if state.a < CLASSICAL_MIN_A {
        warnings.push(format!("A = {:.3} is small: far from the classical limit", state.a));
    }
    let lengths = Lengths {
        lambda_th_m: state.lambda_th,
        lambda_th_angstrom: to_angstrom(state.lambda_th),
        ell_n_m: degeneracy.ell_n,
        ell_n_angstrom: to_angstrom(degeneracy.ell_n),
        b_m: b,
        b_angstrom: to_angstrom(b),
    };
    let manifest = RunManifest::new("state", args, 0);
    let report = StateReport { spec, state, degeneracy, hierarchy, lengths, warnings };
    write_json(args.out.as_deref(), &manifest, &report)
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarArg {
    T,
    V,
    N,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingArg {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Fixed values; the swept one is ignored
    #[command(flatten)]
    pub gas: GasArgs,
    #[arg(long, value_enum)]
    pub var: VarArg,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "linear")]
    pub spacing: SpacingArg,
    /// Write CSV here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const SWEEP_HEADER: &str = "t,v,n,lambda_th,m,a,x,kappa,gamma,f,s,p,mu,u,c_v,e_t,e_v,e_n,lambda_v";

pub fn cmd_sweep(args: &SweepArgs, exec: Exec) -> Result<()> {
    let base = args.gas.spec()?;
    let spacing = match args.spacing {
        SpacingArg::Linear => Spacing::Linear,
        SpacingArg::Log => Spacing::Log,
    };
    let values = grid(args.from, args.to, args.points, spacing)?;
    let var = match args.var {
        VarArg::T => SweepVar::T,
        VarArg::V => SweepVar::V,
        VarArg::N => SweepVar::N,
    };
    let rows = sweep(&base, var, &values, exec).into_iter().collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest::new("sweep", args, 0);
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "# manifest {}", manifest.line())?;
    writeln!(w, "{SWEEP_HEADER}")?;
    for (val, s) in rows {
        let (t, v, n) = match var {
            SweepVar::T => (val, base.v, base.n),
            SweepVar::V => (base.t, val, base.n),
            SweepVar::N => (base.t, base.v, val),
        };
        let cols = [
            t,
            v,
            n,
            s.lambda_th,
            s.m,
            s.a,
            s.x,
            s.kappa,
            s.gamma,
            s.f,
            s.s,
            s.p,
            s.mu,
            s.u,
            s.c_v,
            s.e_t,
            s.e_v,
            s.e_n,
            s.lambda_v,
        ];
        let line: Vec<String> = cols.iter().map(|c| format!("{c:e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}
