//! Physical constants and the built-in helium species.
//!
//! All quantities are SI. Ångström, bar and meV only appear in the
//! conversion helpers used at I/O boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{QkmError, Result};

/// CODATA 2018 values (h and k_B are exact by definition of the SI).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    /// Planck constant, J·s.
    pub h: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Atomic mass unit, kg.
    pub u_amu: f64,
}

pub const CONSTANTS: Constants = Constants { h: 6.626_070_15e-34, k_b: 1.380_649e-23, u_amu: 1.660_539_066_60e-27 };

pub const H: f64 = CONSTANTS.h;
pub const K_B: f64 = CONSTANTS.k_b;
pub const U_AMU: f64 = CONSTANTS.u_amu;

/// Elementary charge, used only for eV conversions.
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;
pub const ANGSTROM: f64 = 1e-10;
pub const BAR: f64 = 1e5;

pub fn to_angstrom(metres: f64) -> f64 {
    metres / ANGSTROM
}

pub fn to_mev(joules: f64) -> f64 {
    joules / ELECTRON_VOLT * 1e3
}

pub fn from_mev(mev: f64) -> f64 {
    mev * 1e-3 * ELECTRON_VOLT
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeciesId {
    He3,
    He4,
}

/// Single-atom data for a helium isotope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeciesSpec {
    pub id: SpeciesId,
    pub name: &'static str,
    /// kg
    pub mass: f64,
    /// 2 for spin-1/2, 1 for spin-0.
    pub spin_degeneracy: u32,
    /// Bohr radius of the ground-state orbital, m.
    pub a_b: f64,
    /// Lennard-Jones length, m.
    pub a_lj: f64,
    /// Lennard-Jones well depth expressed as a temperature, K.
    pub eps_lj: f64,
}

const HE3: SpeciesSpec = SpeciesSpec {
    id: SpeciesId::He3,
    name: "he3",
    mass: 3.016_029_3 * U_AMU,
    spin_degeneracy: 2,
    a_b: 0.53e-10,
    a_lj: 2.6e-10,
    eps_lj: 11.0,
};

const HE4: SpeciesSpec = SpeciesSpec {
    id: SpeciesId::He4,
    name: "he4",
    mass: 4.002_603_3 * U_AMU,
    spin_degeneracy: 1,
    a_b: 0.53e-10,
    a_lj: 2.6e-10,
    eps_lj: 11.0,
};

impl SpeciesSpec {
    pub fn get(id: SpeciesId) -> SpeciesSpec {
        match id {
            SpeciesId::He3 => HE3,
            SpeciesId::He4 => HE4,
        }
    }

    /// Well depth in joules.
    pub fn eps_joule(&self) -> f64 {
        self.eps_lj * K_B
    }
}

/// Look up a built-in species by name (`he3` or `he4`, case-insensitive).
pub fn species_lookup(name: &str) -> Result<SpeciesSpec> {
    match name.to_ascii_lowercase().as_str() {
        "he3" => Ok(HE3),
        "he4" => Ok(HE4),
        _ => Err(QkmError::UnknownSpecies(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn he3_record() {
        let s = species_lookup("he3").unwrap();
        assert!((s.mass / U_AMU - 3.016).abs() < 1e-3);
        assert_eq!(s.spin_degeneracy, 2);
        assert!((to_angstrom(s.a_b) - 0.53).abs() < 1e-12);
        assert!((to_angstrom(s.a_lj) - 2.6).abs() < 1e-12);
        assert!(s.a_lj > 2.0 * s.a_b);
    }

    #[test]
    fn he4_is_spin_zero() {
        assert_eq!(species_lookup("HE4").unwrap().spin_degeneracy, 1);
    }

    #[test]
    fn unknown_species() {
        assert!(matches!(species_lookup("xenon"), Err(QkmError::UnknownSpecies(_))));
    }

    #[test]
    fn lookup_is_pure() {
        let a = species_lookup("he3").unwrap();
        let b = species_lookup("he3").unwrap();
        assert_eq!(a.mass.to_bits(), b.mass.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn invariants_hold_for_builtins() {
        for id in [SpeciesId::He3, SpeciesId::He4] {
            let s = SpeciesSpec::get(id);
            assert!(s.mass > 0.0);
            assert!(s.spin_degeneracy == 1 || s.spin_degeneracy == 2);
            assert!(s.a_lj > s.a_b && s.a_b > 0.0);
        }
    }
}
