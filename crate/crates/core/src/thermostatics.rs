//! State equations of the ideal quantum gas in natural variables `T, V, N`.
//!
//! Everything derives from the specific disorder `kappa` and its elasticity
//! `Gamma`. The fermion branch uses `x = g A` (`2A` for spin-1/2); the boson
//! branch substitutes `Gamma+(A) = A ln(1 + 1/A)` and `mu+ = -k_B T ln(A+1)`.
//! All derivatives are closed forms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::combinatorics::kappa;
use crate::error::{QkmError, Result};
use crate::par::{self, Exec};
use crate::physcore::{SpeciesSpec, H, K_B};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    #[default]
    Fermi,
    Bose,
}

/// A physical problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasSpec {
    /// K
    pub t: f64,
    /// m³
    pub v: f64,
    /// particle count (real valued)
    pub n: f64,
    pub species: SpeciesSpec,
    pub statistics: Statistics,
}

impl GasSpec {
    pub fn new(t: f64, v: f64, n: f64, species: SpeciesSpec, statistics: Statistics) -> Result<Self> {
        let spec = GasSpec { t, v, n, species, statistics };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, val) in [("T", self.t), ("V", self.v), ("N", self.n)] {
            if !(val > 0.0) || !val.is_finite() {
                return Err(QkmError::domain("GasSpec", format!("{name} must be positive, got {val}")));
            }
        }
        Ok(())
    }

    pub fn with_t(self, t: f64) -> Self {
        GasSpec { t, ..self }
    }

    pub fn with_v(self, v: f64) -> Self {
        GasSpec { v, ..self }
    }

    pub fn with_n(self, n: f64) -> Self {
        GasSpec { n, ..self }
    }

    /// Argument of the fermion functions, `g A`.
    pub fn x(&self) -> f64 {
        self.species.spin_degeneracy as f64 * degeneracy_a(self)
    }
}

/// `lambda_th = sqrt(h² / (2 pi m k_B T))`
pub fn thermal_length(t: f64, mass: f64) -> Result<f64> {
    if !(t > 0.0 && mass > 0.0) {
        return Err(QkmError::domain("thermal_length", format!("T and m must be positive, got T = {t}, m = {mass}")));
    }
    Ok(H / (2.0 * PI * mass * K_B * t).sqrt())
}

/// RMS thermal speed `sqrt(3 k_B T / m)`.
pub fn v_th(t: f64, mass: f64) -> f64 {
    (3.0 * K_B * t / mass).sqrt()
}

/// `(2 pi m k_B / h²)^(3/2)` so that `M = gamma V T^(3/2)`.
pub fn level_density_coefficient(mass: f64) -> f64 {
    (2.0 * PI * mass * K_B / (H * H)).powf(1.5)
}

fn degeneracy_a(spec: &GasSpec) -> f64 {
    level_count(spec) / spec.n
}

fn level_count(spec: &GasSpec) -> f64 {
    let lambda = H / (2.0 * PI * spec.species.mass * K_B * spec.t).sqrt();
    spec.v / (lambda * lambda * lambda)
}

/// Degeneracy parameter and level count of a gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Degeneracy {
    pub a: f64,
    pub m: f64,
    /// `(V/N)^(1/3)`
    pub ell_n: f64,
    /// `(ell_N / lambda_th)^3`, equal to `a` up to rounding.
    pub a_from_lengths: f64,
}

pub fn degeneracy_parameter(spec: &GasSpec) -> Result<Degeneracy> {
    spec.validate()?;
    let lambda = thermal_length(spec.t, spec.species.mass)?;
    let m = level_density_coefficient(spec.species.mass) * spec.v * spec.t.powf(1.5);
    let ell_n = (spec.v / spec.n).cbrt();
    Ok(Degeneracy { a: m / spec.n, m, ell_n, a_from_lengths: (ell_n / lambda).powi(3) })
}

fn check_x(op: &'static str, x: f64) -> Result<()> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(QkmError::domain(op, format!("requires x = 2A > 1, got {x}")));
    }
    Ok(())
}

/// Specific disorder `kappa(x) = ln(x-1) - x ln(1 - 1/x)`, nats per particle.
pub fn kappa_fd(x: f64) -> Result<f64> {
    check_x("kappa_fd", x)?;
    Ok(kappa(x))
}

/// Elasticity `Gamma-(x) = -x ln(1 - 1/x) = x dkappa/dx`.
pub fn gamma_fd(x: f64) -> Result<f64> {
    check_x("gamma_fd", x)?;
    Ok(gamma_fd_unchecked(x))
}

fn gamma_fd_unchecked(x: f64) -> f64 {
    if x <= 2.0 {
        // x (ln x - ln(x - 1)); 1 - 1/x cancels near x = 1
        let d = x - 1.0;
        x * (d.ln_1p() - d.ln())
    } else {
        -x * (-1.0 / x).ln_1p()
    }
}

/// `Gamma+(A) = A ln(1 + 1/A)`
pub fn gamma_be(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(QkmError::domain("gamma_be", format!("requires A > 0, got {a}")));
    }
    Ok(a * (1.0 / a).ln_1p())
}

/// `mu+ = -k_B T ln(A + 1)`
pub fn mu_be(a: f64, t: f64) -> Result<f64> {
    if !(a > 0.0) || !(t > 0.0) {
        return Err(QkmError::domain("mu_be", format!("requires A, T > 0, got A = {a}, T = {t}")));
    }
    Ok(-K_B * t * a.ln_1p())
}

/// Intensive generators of one statistics branch at a given state.
#[derive(Debug, Clone, Copy)]
struct Generators {
    kappa: f64,
    gamma: f64,
    /// `x dGamma/dx` (fermi) or `A dGamma/dA` (bose)
    gamma_elasticity: f64,
    /// `mu / (k_B T)`
    mu_reduced: f64,
}

fn generators(spec: &GasSpec, a: f64) -> Result<Generators> {
    match spec.statistics {
        Statistics::Fermi => {
            let x = spec.species.spin_degeneracy as f64 * a;
            if !(x > 1.0) {
                return Err(QkmError::Degenerate { x });
            }
            let gamma = gamma_fd_unchecked(x);
            Ok(Generators {
                kappa: kappa(x),
                gamma,
                gamma_elasticity: gamma - x / (x - 1.0),
                mu_reduced: -(x - 1.0).ln(),
            })
        }
        Statistics::Bose => {
            let gamma = a * (1.0 / a).ln_1p();
            Ok(Generators {
                kappa: a.ln_1p() + gamma,
                gamma,
                gamma_elasticity: gamma - a / (a + 1.0),
                mu_reduced: -a.ln_1p(),
            })
        }
    }
}

/// Fully evaluated equilibrium state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoState {
    pub statistics: Statistics,
    /// m
    pub lambda_th: f64,
    /// level count
    pub m: f64,
    pub a: f64,
    /// argument of the fermion functions (`g A`), or `A` for bosons
    pub x: f64,
    /// nats per particle
    pub kappa: f64,
    pub gamma: f64,
    /// J
    pub f: f64,
    /// J/K
    pub s: f64,
    /// Pa
    pub p: f64,
    /// J
    pub mu: f64,
    /// J
    pub u: f64,
    /// J/K
    pub c_v: f64,
    pub e_t: f64,
    pub e_v: f64,
    pub e_n: f64,
    /// Size-dependent length `N^(1/3) lambda_th`; reported only.
    pub lambda_v: f64,
}

/// Evaluate the complete state-equation set.
pub fn state_equations(spec: &GasSpec) -> Result<ThermoState> {
    spec.validate()?;
    let lambda_th = thermal_length(spec.t, spec.species.mass)?;
    let m = spec.v / lambda_th.powi(3);
    let a = m / spec.n;
    let gen = generators(spec, a)?;
    let nk = spec.n * K_B;
    let kt = K_B * spec.t;
    let x = match spec.statistics {
        Statistics::Fermi => spec.species.spin_degeneracy as f64 * a,
        Statistics::Bose => a,
    };
    Ok(ThermoState {
        statistics: spec.statistics,
        lambda_th,
        m,
        a,
        x,
        kappa: gen.kappa,
        gamma: gen.gamma,
        f: -kt * spec.n * gen.kappa,
        s: nk * (gen.kappa + 1.5 * gen.gamma),
        p: spec.n * kt / spec.v * gen.gamma,
        mu: kt * gen.mu_reduced,
        u: 1.5 * nk * spec.t * gen.gamma,
        c_v: 1.5 * nk * gen.gamma + 2.25 * nk * gen.gamma_elasticity,
        e_t: 1.5 * gen.gamma,
        e_v: gen.gamma,
        e_n: -gen.gamma,
        lambda_v: spec.n.cbrt() * lambda_th,
    })
}

/// Free energy alone, `-k_B T N kappa`.
pub fn free_energy(spec: &GasSpec) -> Result<f64> {
    Ok(state_equations(spec)?.f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSet {
    pub f: f64,
    /// grand potential `F - mu N`
    pub a_gc: f64,
    /// free enthalpy `F + P V`
    pub g: f64,
    /// `F + T S`
    pub u_of_s: f64,
}

pub fn legendre_potentials(state: &ThermoState, spec: &GasSpec) -> PotentialSet {
    PotentialSet {
        f: state.f,
        a_gc: state.f - state.mu * spec.n,
        g: state.f + state.p * spec.v,
        u_of_s: state.f + spec.t * state.s,
    }
}

/// Largest relative step in `V` or `N` treated as differential.
pub const DIFFERENTIAL_LIMIT: f64 = 1e-4;

/// One reversible step between neighbouring equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstLawStep {
    /// temperature change that makes `T dS = q`
    pub d_t: f64,
    pub d_u: f64,
    /// work done by the gas, `P dV - mu dN`
    pub w: f64,
    pub q: f64,
    /// `dU + w - q`
    pub residual: f64,
}

/// Energy balance across a reversible step with volume change `dv`,
/// particle change `dn` and heat `q` added at temperature `T`.
///
/// The final temperature is solved from `T (S1 - S0) = q`; the residual
/// `dU + w - q` then vanishes at second order in the step.
pub fn first_law_residual(spec: &GasSpec, dv: f64, dn: f64, q: f64) -> Result<FirstLawStep> {
    let step = |t: f64| spec.with_t(t).with_v(spec.v + dv).with_n(spec.n + dn);
    if dv.abs() / spec.v > DIFFERENTIAL_LIMIT || dn.abs() / spec.n > DIFFERENTIAL_LIMIT {
        return Err(QkmError::StepSize(format!(
            "|dV|/V = {:.3e}, |dN|/N = {:.3e}, limit {DIFFERENTIAL_LIMIT:e}",
            dv.abs() / spec.v,
            dn.abs() / spec.n
        )));
    }
    let s0 = state_equations(spec)?;
    let t0 = spec.t;
    if dv == 0.0 && dn == 0.0 && q == 0.0 {
        return Ok(FirstLawStep { d_t: 0.0, d_u: 0.0, w: 0.0, q: 0.0, residual: 0.0 });
    }
    // Newton on g(T1) = T0 (S(T1) - S0) - q, with dS/dT = c_V / T.
    let mut t1 = t0;
    let mut converged = false;
    for _ in 0..60 {
        let st = state_equations(&step(t1))?;
        let g = t0 * (st.s - s0.s) - q;
        let dg = t0 * st.c_v / t1;
        let next = t1 - g / dg;
        if !(next > 0.0) {
            return Err(QkmError::StepSize(format!("heat q = {q:e} drives T non-positive")));
        }
        if (next - t1).abs() <= 1e-15 * t0 {
            t1 = next;
            converged = true;
            break;
        }
        t1 = next;
    }
    if !converged {
        return Err(QkmError::StepSize("temperature solve did not converge".into()));
    }
    let s1 = state_equations(&step(t1))?;
    let d_u = s1.u - s0.u;
    let w = s0.p * dv - s0.mu * dn;
    Ok(FirstLawStep { d_t: t1 - t0, d_u, w, q, residual: d_u + w - q })
}

/// `g-(x) = exp(-(Gamma-(x) + ln(x - 1))) = exp(-kappa(x))`, in `(0, 1]`.
pub fn occupancy_qkm(x: f64) -> Result<f64> {
    check_x("occupancy_qkm", x)?;
    Ok((-kappa(x)).exp())
}

/// Fermi-Dirac occupation `1 / (exp((eps - mu)/k_B T) + 1)`.
pub fn occupancy_fd(eps: f64, mu: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(QkmError::domain("occupancy_fd", format!("requires T > 0, got {t}")));
    }
    Ok(1.0 / (((eps - mu) / (K_B * t)).exp() + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylModeLength {
    /// `(V/M)^(1/3)`, m
    pub lambda_qkm: f64,
    /// `eps_max / eps_mean` when the Weyl count equals `V / lambda_th³`
    pub eps_max_over_mean: f64,
}

/// Ratio `eps_max / eps_mean` from `(4 pi/3)(2 m eps_max/h²)^(3/2) = (2 pi m k_B T/h²)^(3/2)`
/// with `eps_mean = (3/2) k_B T`.
pub fn weyl_eps_ratio() -> f64 {
    PI * (3.0 / (4.0 * PI)).powf(2.0 / 3.0) / 1.5
}

pub fn weyl_mode_length(m: f64, v: f64) -> Result<WeylModeLength> {
    if !(m > 0.0 && v > 0.0) {
        return Err(QkmError::domain("weyl_mode_length", "M and V must be positive"));
    }
    Ok(WeylModeLength { lambda_qkm: (v / m).cbrt(), eps_max_over_mean: weyl_eps_ratio() })
}

/// Entropy in J/K from the three list complexities (bits) plus the
/// thermal-elasticity term.
pub fn s_qkm_from_complexities(k_m: f64, k_n: f64, k_mn: f64, n: f64, a: f64) -> Result<f64> {
    if k_m < 0.0 || k_n < 0.0 || k_mn < 0.0 {
        return Err(QkmError::domain("s_qkm_from_complexities", "complexities must be non-negative"));
    }
    let gamma = gamma_fd(2.0 * a)?;
    Ok(K_B * std::f64::consts::LN_2 * (k_m - k_n - k_mn) + 1.5 * n * K_B * gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    T,
    V,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Grid of `points` values from `from` to `to` inclusive.
pub fn grid(from: f64, to: f64, points: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(QkmError::range("sweep", "zero grid points"));
    }
    if !(from.is_finite() && to.is_finite()) || (spacing == Spacing::Log && !(from > 0.0 && to > 0.0)) {
        return Err(QkmError::range("sweep", format!("invalid range {from} .. {to}")));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / last;
            match spacing {
                Spacing::Linear => from + (to - from) * f,
                Spacing::Log => (from.ln() + (to.ln() - from.ln()) * f).exp(),
            }
        })
        .collect())
}

/// Evaluate the state equations along one variable. Grid points where the
/// state is undefined (degenerate fermions) are returned as errors in place.
pub fn sweep(base: &GasSpec, var: SweepVar, values: &[f64], exec: Exec) -> Vec<Result<(f64, ThermoState)>> {
    par::map(exec, values, |&val| {
        let spec = match var {
            SweepVar::T => base.with_t(val),
            SweepVar::V => base.with_v(val),
            SweepVar::N => base.with_n(val),
        };
        state_equations(&spec).map(|s| (val, s))
    })
}
