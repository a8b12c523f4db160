//! Length-scale hierarchy, collisionality and Langmuir wall models.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::combinatorics::net_disorder_fd;
use crate::error::{QkmError, Result};
use crate::physcore::{from_mev, SpeciesId, SpeciesSpec, H, K_B};
use crate::thermostatics::{thermal_length, v_th, GasSpec};

/// Default wall lattice spacing (copper), m.
pub const DEFAULT_LATTICE_SPACING: f64 = 3e-10;

/// Upper end of the "cool" window, K.
pub const COOL_T_MAX: f64 = 10.0;

/// Liquefaction temperature bounding the cool window from below, K.
pub fn critical_temperature(species: &SpeciesSpec) -> f64 {
    match species.id {
        SpeciesId::He3 => 3.3,
        SpeciesId::He4 => 5.2,
    }
}

/// `4 eps ((a/r)^12 - (a/r)^6)` in joules.
pub fn lennard_jones(r: f64, species: &SpeciesSpec) -> Result<f64> {
    if !(r > 0.0) {
        return Err(QkmError::domain("lennard_jones", format!("r must be positive, got {r}")));
    }
    let s6 = (species.a_lj / r).powi(6);
    Ok(4.0 * species.eps_joule() * (s6 * s6 - s6))
}

/// Hard-sphere mean free path `V / (sqrt2 pi N a²)`.
pub fn mean_free_path(v: f64, n: f64, a: f64) -> f64 {
    v / (SQRT_2 * PI * n * a * a)
}

/// Largest particle count for which `l_mfp >= b`.
pub fn collisionless_threshold(v: f64, b: f64, a: f64) -> f64 {
    v / (SQRT_2 * PI * b * a * a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Collisionality {
    Collisionless,
    Collisional,
}

/// Each link of `l_mfp >= b > ell_N > lambda_th >~ a_LJ > 2 a_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HierarchyChain {
    pub mfp_ge_b: bool,
    pub b_gt_ell_n: bool,
    pub ell_n_gt_lambda: bool,
    pub lambda_ge_a_lj: bool,
    pub a_lj_gt_2a_b: bool,
}

impl HierarchyChain {
    pub fn all(&self) -> bool {
        self.mfp_ge_b && self.b_gt_ell_n && self.ell_n_gt_lambda && self.lambda_ge_a_lj && self.a_lj_gt_2a_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthHierarchy {
    pub l_mfp: f64,
    pub b: f64,
    pub ell_n: f64,
    pub lambda_th: f64,
    pub a_lj: f64,
    pub a_b: f64,
    pub regime: Collisionality,
    pub cool: bool,
    pub chain: HierarchyChain,
    /// `N` at which the gas would turn collisional for this `V` and `b`.
    pub collisionless_threshold_n: f64,
}

/// Evaluate the length hierarchy with the Lennard-Jones length as the
/// collision cross-section radius.
pub fn classify_regime(spec: &GasSpec, b: f64) -> Result<LengthHierarchy> {
    spec.validate()?;
    if !(b > 0.0) {
        return Err(QkmError::domain("classify_regime", format!("b must be positive, got {b}")));
    }
    let sp = &spec.species;
    let l_mfp = mean_free_path(spec.v, spec.n, sp.a_lj);
    let ell_n = (spec.v / spec.n).cbrt();
    let lambda_th = thermal_length(spec.t, sp.mass)?;
    let chain = HierarchyChain {
        mfp_ge_b: l_mfp >= b,
        b_gt_ell_n: b > ell_n,
        ell_n_gt_lambda: ell_n > lambda_th,
        lambda_ge_a_lj: lambda_th >= sp.a_lj,
        a_lj_gt_2a_b: sp.a_lj > 2.0 * sp.a_b,
    };
    Ok(LengthHierarchy {
        l_mfp,
        b,
        ell_n,
        lambda_th,
        a_lj: sp.a_lj,
        a_b: sp.a_b,
        regime: if chain.mfp_ge_b { Collisionality::Collisionless } else { Collisionality::Collisional },
        cool: spec.t > critical_temperature(sp) && spec.t <= COOL_T_MAX,
        chain,
        collisionless_threshold_n: collisionless_threshold(spec.v, b, sp.a_lj),
    })
}

/// How atoms are held at a wall site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WallMode {
    /// binding well depth `u`, J
    Adsorption { u: f64 },
    /// `n_latt` lattice contacts; enters as `u / k_B T = n_latt - 1`
    LatticeTrap { n_latt: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WallModel {
    pub mode: WallMode,
    pub site_count: f64,
    /// m²
    pub wall_area: f64,
    /// m
    pub lattice_spacing: f64,
}

impl WallModel {
    pub fn new(mode: WallMode, wall_area: f64, lattice_spacing: f64) -> Result<Self> {
        match mode {
            WallMode::Adsorption { u } if !(u >= 0.0) => {
                return Err(QkmError::domain("WallModel", "well depth u must be >= 0"))
            }
            WallMode::LatticeTrap { n_latt } if n_latt < 1 => {
                return Err(QkmError::domain("WallModel", "n_latt must be >= 1"))
            }
            _ => {}
        }
        if !(wall_area > 0.0 && lattice_spacing > 0.0) {
            return Err(QkmError::domain("WallModel", "wall area and spacing must be positive"));
        }
        Ok(WallModel { mode, site_count: wall_area / (lattice_spacing * lattice_spacing), wall_area, lattice_spacing })
    }

    /// Reduced binding energy `u / k_B T`.
    pub fn u_over_kt(&self, t: f64) -> f64 {
        match self.mode {
            WallMode::Adsorption { u } => u / (K_B * t),
            WallMode::LatticeTrap { n_latt } => (n_latt - 1) as f64,
        }
    }
}

/// Langmuir Massieu function in nats: the combinatorial term of `Nc` atoms
/// on `Mc` sites plus `Nc u / k_B T`.
pub fn langmuir_massieu(mc: f64, nc: f64, u: f64, t: f64) -> Result<f64> {
    if !(nc > 0.0 && mc > nc) {
        return Err(QkmError::domain("langmuir_massieu", format!("requires Mc > Nc > 0, got Mc = {mc}, Nc = {nc}")));
    }
    if !(t > 0.0) {
        return Err(QkmError::domain("langmuir_massieu", "T must be positive"));
    }
    Ok(net_disorder_fd(mc, nc, 1)? + nc * u / (K_B * t))
}

/// Fraction of occupied sites `1 / (1 + A exp(-u/k_B T))`.
pub fn langmuir_isotherm(a: f64, u_over_kt: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(QkmError::domain("langmuir_isotherm", format!("requires A > 0, got {a}")));
    }
    // logistic in log space, no overflow of A e^{-u}
    let z = a.ln() - u_over_kt;
    Ok(if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    })
}

/// Pressure scale `(k_B T)^(5/2) (2 pi m / h²)^(3/2)` in Pa.
pub fn p0_reference(t: f64, mass: f64) -> Result<f64> {
    if !(t > 0.0 && mass > 0.0) {
        return Err(QkmError::domain("p0_reference", "T and m must be positive"));
    }
    Ok((K_B * t).powf(2.5) * (2.0 * PI * mass / (H * H)).powf(1.5))
}

/// Gaussian packet spread over one transit, `h t_b / (2 m lambda_th)` with
/// `t_b = b / v_packet` and `v_packet = h / (m lambda_th)`.
pub fn packet_spread(b: f64, t: f64, mass: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(QkmError::domain("packet_spread", "b must be positive"));
    }
    let lambda = thermal_length(t, mass)?;
    let v_packet = H / (mass * lambda);
    let t_b = b / v_packet;
    Ok(H * t_b / (2.0 * mass * lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WallFluxReport {
    /// `V^(1/3)`, m
    pub b: f64,
    /// rms thermal speed, m/s
    pub v_th: f64,
    /// `b / v_th`, s
    pub t_b: f64,
    /// atoms reaching the wall per second, `N / t_b`
    pub flux: f64,
    pub site_count: f64,
    pub atoms_per_site_per_transit: f64,
    pub free_to_occupied: f64,
}

pub fn wall_flux_report(spec: &GasSpec, wall_area: f64, lattice_spacing: f64) -> Result<WallFluxReport> {
    spec.validate()?;
    if !(wall_area > 0.0 && lattice_spacing > 0.0) {
        return Err(QkmError::domain("wall_flux_report", "wall area and spacing must be positive"));
    }
    let b = spec.v.cbrt();
    let v = v_th(spec.t, spec.species.mass);
    let t_b = b / v;
    let site_count = wall_area / (lattice_spacing * lattice_spacing);
    let per_site = spec.n / site_count;
    let occupied = per_site.min(1.0);
    Ok(WallFluxReport {
        b,
        v_th: v,
        t_b,
        flux: spec.n / t_b,
        site_count,
        atoms_per_site_per_transit: per_site,
        free_to_occupied: (1.0 - occupied) / occupied,
    })
}

/// Isotherm value quoted for copper walls near liquefaction.
pub const PRINTED_COPPER_FRACTION: f64 = 5.6e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsothermCheck {
    pub a: f64,
    pub u_over_kt: f64,
    pub fraction: f64,
    pub printed: f64,
    pub ratio_to_printed: f64,
    pub warning: Option<String>,
}

/// Evaluate the isotherm at `A = 3.2e8`, `u = 3 meV`, `(3/2) k_B T = 1 meV`
/// and compare with the printed fraction.
pub fn copper_isotherm_check() -> IsothermCheck {
    let a = 3.2e8;
    let kt = from_mev(1.0) / 1.5;
    let u_over_kt = from_mev(3.0) / kt;
    let fraction = langmuir_isotherm(a, u_over_kt).expect("positive A");
    let ratio = fraction / PRINTED_COPPER_FRACTION;
    let warning = (!(0.5..=2.0).contains(&ratio)).then(|| {
        format!(
            "isotherm formula gives {fraction:.3e}, printed value is {PRINTED_COPPER_FRACTION:.1e} \
             (factor {ratio:.1}); the formula is reported"
        )
    });
    IsothermCheck { a, u_over_kt, fraction, printed: PRINTED_COPPER_FRACTION, ratio_to_printed: ratio, warning }
}
