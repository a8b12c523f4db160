use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::encoding::{default_width, quantize, EncodedList};
use crate::error::{QkmError, Result};
use crate::physcore::H;

/// Largest spectrum accepted by [`smooth_box_spectrum`].
pub const SPECTRUM_CAP: usize = 1_000_000;

/// The lowest `count` values of `nx^2 + ny^2 + nz^2`, `n_i >= 1`, ascending
/// and with degeneracies repeated.
pub fn smooth_box_levels(count: usize) -> Result<Vec<u64>> {
    if count > SPECTRUM_CAP {
        return Err(QkmError::range("smooth_box_spectrum", format!("count {count} exceeds cap {SPECTRUM_CAP}")));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    // octant volume (pi/6) s^{3/2}; start a little above it and grow
    let mut s_max = ((6.0 * count as f64 / std::f64::consts::PI).powf(2.0 / 3.0) * 1.3) as u64 + 12;
    loop {
        let n_max = (s_max as f64).sqrt() as u64 + 1;
        let mut levels = Vec::new();
        for nx in 1..=n_max {
            let sx = nx * nx;
            if sx + 2 > s_max {
                break;
            }
            for ny in 1..=n_max {
                let sxy = sx + ny * ny;
                if sxy + 1 > s_max {
                    break;
                }
                for nz in 1..=n_max {
                    let s = sxy + nz * nz;
                    if s > s_max {
                        break;
                    }
                    levels.push(s);
                }
            }
        }
        if levels.len() >= count {
            levels.sort_unstable();
            levels.truncate(count);
            return Ok(levels);
        }
        s_max *= 2;
    }
}

/// First `count` single-particle energies `(h^2 / 8 m L^2) s` of a cubic box.
pub fn smooth_box_spectrum(count: usize, side: f64, mass: f64) -> Result<Vec<f64>> {
    if !(side > 0.0 && mass > 0.0) {
        return Err(QkmError::domain("smooth_box_spectrum", "side and mass must be positive"));
    }
    let unit = H * H / (8.0 * mass * side * side);
    Ok(smooth_box_levels(count)?.into_iter().map(|s| unit * s as f64).collect())
}

/// Quantise an ascending energy list to `ceil(log2 n)` bits over `[0, max]`.
pub fn spectrum_list(energies: &[f64], source_tag: &str) -> Result<EncodedList> {
    let k = default_width(energies.len());
    let hi = energies.iter().copied().fold(0.0, f64::max);
    EncodedList::encode(&quantize(energies, 0.0, hi, k), Some(k), source_tag)
}

/// Smooth-box list of `count` levels at the default width.
pub fn smooth_box_list(count: usize) -> Result<EncodedList> {
    let levels: Vec<f64> = smooth_box_levels(count)?.into_iter().map(|s| s as f64).collect();
    spectrum_list(&levels, "smooth-box")
}

/// `n` uniform draws at width `k`, ascending: the random surrogate of an
/// energy list.
pub fn rng_sorted_list(n: usize, k: u32, seed: u64) -> Result<EncodedList> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<u64> = (0..n).map(|_| if k >= 64 { rng.random() } else { rng.random_range(0..1u64 << k) }).collect();
    v.sort_unstable();
    EncodedList::encode(&v, Some(k), format!("rng-sorted:{seed}"))
}

/// `n` uniform draws at the default width, unsorted.
pub fn rng_list(n: usize, seed: u64) -> Result<EncodedList> {
    let k = default_width(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<u64> = (0..n).map(|_| rng.random_range(0..1u64 << k)).collect();
    EncodedList::encode(&v, Some(k), format!("rng:{seed}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physcore::{SpeciesId, SpeciesSpec};
    use crate::randomness::estimator::{estimate_complexity, Estimator};

    #[test]
    fn ground_level_and_degeneracy() {
        let l = smooth_box_levels(10).unwrap();
        assert_eq!(l[0], 3);
        // (1,1,2) and permutations
        assert_eq!(&l[1..4], &[6, 6, 6]);
        let m = SpeciesSpec::get(SpeciesId::He3).mass;
        let e = smooth_box_spectrum(1, 0.01, m).unwrap();
        assert!((e[0] - 3.0 * H * H / (8.0 * m * 1e-4)).abs() < 1e-12 * e[0]);
    }

    #[test]
    fn brute_force_agrees() {
        let got = smooth_box_levels(2000).unwrap();
        let mut all = Vec::new();
        for a in 1..40u64 {
            for b in 1..40u64 {
                for c in 1..40u64 {
                    all.push(a * a + b * b + c * c);
                }
            }
        }
        all.sort_unstable();
        assert_eq!(got, all[..2000]);
    }

    #[test]
    fn cap_enforced() {
        assert!(smooth_box_levels(SPECTRUM_CAP + 1).is_err());
    }

    #[test]
    fn spectrum_is_compressible() {
        let n = 7693;
        let sb = smooth_box_list(n).unwrap();
        let r = estimate_complexity(&sb, &Estimator::ALL).unwrap();
        assert!(r.k_hat <= 0.5 * r.l_primitive, "{r:?}");
        let rng = rng_list(n, 1).unwrap();
        let rr = estimate_complexity(&rng, &Estimator::ALL).unwrap();
        assert!(r.k_hat < rr.k_hat);
    }
}
