use serde::Serialize;

use super::encoding::EncodedList;
use super::estimator::{estimate_complexity, Estimator};
use crate::combinatorics::{half_log_term_bits, log2_binomial_exact, net_disorder_fd, EXACT_CAP};
use crate::error::{QkmError, Result};
use std::f64::consts::LN_2;

/// `kappa_0 = -K_hat(list) - log2_p`; with the uniform measure
/// `log2_p = -l` this is `l - K_hat`.
pub fn randomness_deficiency(list: &EncodedList, log2_p: f64, estimators: &[Estimator]) -> Result<f64> {
    if !(log2_p <= 0.0) {
        return Err(QkmError::domain(
            "randomness_deficiency",
            format!("log2 P = {log2_p} is not the logarithm of a probability"),
        ));
    }
    Ok(-estimate_complexity(list, estimators)?.k_hat - log2_p)
}

/// Log-probabilities of the fermion algorithmic partition function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdProbability {
    /// `log2 FD = -g log2 C(M, N/g)`.
    pub log2_fd: f64,
    /// `log2 z_C = D / ln 2`, the extensive part.
    pub log2_zc: f64,
    /// Non-extensive correction `g (1/2) log2(M / (N_s (M - N_s)))`,
    /// included in `log2_fd` on the exact path only. Zero when `M = N_s`.
    pub half_log_bits: f64,
    /// Whether `log2_fd` came from the exact big-integer path.
    pub exact: bool,
}

/// Algorithmic probability of an FD configuration with `N` particles,
/// `g` spin states and `M` modes per state.
pub fn fd_algorithmic_probability(m: f64, n: f64, g: u32) -> Result<FdProbability> {
    let d = net_disorder_fd(m, n, g)?;
    let ns = n / g as f64;
    let log2_zc = d / LN_2;
    let half_log_bits = if m > ns { g as f64 * half_log_term_bits(m, ns)? } else { 0.0 };
    let integral = |x: f64| x.fract() == 0.0 && x <= EXACT_CAP as f64;
    if integral(m) && integral(ns) {
        let l = log2_binomial_exact(m as u64, ns as u64)?;
        return Ok(FdProbability { log2_fd: -(g as f64) * l, log2_zc, half_log_bits, exact: true });
    }
    Ok(FdProbability { log2_fd: -log2_zc, log2_zc, half_log_bits, exact: false })
}

/// Bounds `l + c_low <= K <= l + K_hat(l) + c_high` on the complexity of a
/// string of length `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedgeBound {
    pub n: f64,
    pub lower: f64,
    pub upper: f64,
    /// `K_hat(l)`, kept separately: at large `l` it is below the ulp of `upper`.
    pub length_bits: f64,
}

impl WedgeBound {
    pub fn width_bits(&self) -> f64 {
        self.length_bits + WEDGE_C_HIGH - WEDGE_C_LOW
    }

    pub fn width_nats(&self) -> f64 {
        self.width_bits() * LN_2
    }
}

pub const WEDGE_C_LOW: f64 = 0.0;
pub const WEDGE_C_HIGH: f64 = 0.0;

/// Binary expansion of `l`, most significant bit first, no leading zeros.
pub fn binary_expansion(l: u128) -> Vec<bool> {
    if l == 0 {
        return vec![false];
    }
    let bits = 128 - l.leading_zeros();
    (0..bits).rev().map(|i| (l >> i) & 1 == 1).collect()
}

pub fn wedge_bounds(l: f64) -> Result<WedgeBound> {
    if !(l > 0.0) || l >= 2f64.powi(127) {
        return Err(QkmError::domain("wedge_bounds", format!("l = {l} outside (0, 2^127)")));
    }
    let li = l.round().max(1.0) as u128;
    let bin = EncodedList::from_bits(&binary_expansion(li), "wedge");
    let k = estimate_complexity(&bin, &Estimator::ALL)?.k_hat;
    Ok(WedgeBound { n: l, lower: l + WEDGE_C_LOW, upper: l + k + WEDGE_C_HIGH, length_bits: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermostatics::occupancy_qkm;

    #[test]
    fn exact_small_case() {
        let p = fd_algorithmic_probability(4.0, 2.0, 1).unwrap();
        assert!(p.exact);
        assert!((p.log2_fd + 6f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn spin_states_multiply() {
        let p1 = fd_algorithmic_probability(10.0, 3.0, 1).unwrap();
        let p2 = fd_algorithmic_probability(10.0, 6.0, 2).unwrap();
        assert!((p2.log2_fd - 2.0 * p1.log2_fd).abs() < 1e-9);
    }

    #[test]
    fn per_particle_probability_is_occupancy() {
        for &a in &[1.0, 3.0, 10.0, 1e3, 1e6] {
            let n = 1e20;
            let m = a * n;
            let p = fd_algorithmic_probability(m, n, 2).unwrap();
            let g_minus = 2f64.powf(p.log2_fd / n);
            let occ = occupancy_qkm(2.0 * a).unwrap();
            assert!((g_minus - occ).abs() <= 1e-6 * occ.max(1e-300), "A = {a}");
        }
    }

    #[test]
    fn deficiency_domain() {
        let l = EncodedList::from_bits(&[true, false], "t");
        assert!(randomness_deficiency(&l, 0.5, &Estimator::ALL).is_err());
        let z = EncodedList::from_bits(&vec![false; 20_000], "z");
        let d = randomness_deficiency(&z, -20_000.0, &Estimator::ALL).unwrap();
        assert!(d >= 0.99 * 20_000.0 - 64.0);
    }

    #[test]
    fn wedge_ordering() {
        for &l in &[1.0, 2.0, 1e3, 1.7e16, 6.1e24] {
            let w = wedge_bounds(l).unwrap();
            assert!(w.lower <= w.upper);
        }
        assert!(wedge_bounds(0.0).is_err());
        assert_eq!(binary_expansion(5), vec![true, false, true]);
    }
}
