use std::path::Path;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encoding::EncodedList;
use super::estimator::{estimate_with, Estimator};
use crate::error::{QkmError, Result};
use crate::par::{self, Exec};

/// Environment variable naming an alternative calibration file.
pub const CALIBRATION_ENV: &str = "QKM_CALIBRATION";

const EMBEDDED: &str = include_str!("../../calibration/estimators-v1.json");

/// Constants fixed by running the estimators over random corpora.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub version: u32,
    /// Worst observed `K_hat - l` on random payloads, rounded up. Also
    /// bounds how far `K_hat` may drop when data are appended.
    pub estimator_overhead_bits: f64,
    /// Random-like iff deficiency <= `random_slope * l + random_offset_bits`.
    pub random_slope: f64,
    pub random_offset_bits: f64,
    /// Structured iff deficiency >= `structured_fraction * l`.
    pub structured_fraction: f64,
    /// Standardised machine constant; metadata only.
    pub machine_constant_c: f64,
    pub corpus: CorpusSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub seeds: usize,
    pub payload_bits: usize,
    pub max_excess_bits: f64,
    pub mean_deficiency_bits: f64,
}

impl Calibration {
    pub fn embedded() -> Calibration {
        serde_json::from_str(EMBEDDED).expect("embedded calibration file is valid")
    }

    pub fn load(path: &Path) -> Result<Calibration> {
        let text = std::fs::read_to_string(path)?;
        let cal: Calibration = serde_json::from_str(&text)?;
        if cal.version != 1 {
            return Err(QkmError::Format(format!("unsupported calibration version {}", cal.version)));
        }
        Ok(cal)
    }

    /// The embedded constants, or the file named by `QKM_CALIBRATION`.
    pub fn from_env() -> Result<Calibration> {
        match std::env::var_os(CALIBRATION_ENV) {
            Some(p) => Calibration::load(Path::new(&p)),
            None => Ok(Calibration::embedded()),
        }
    }

    /// Process-wide calibration, read once. An unreadable override falls
    /// back to the embedded constants with a warning on stderr.
    pub fn current() -> &'static Calibration {
        static CURRENT: OnceLock<Calibration> = OnceLock::new();
        CURRENT.get_or_init(|| {
            Calibration::from_env().unwrap_or_else(|e| {
                eprintln!("warning: ignoring {CALIBRATION_ENV}: {e}");
                Calibration::embedded()
            })
        })
    }

    pub fn random_threshold(&self, l: f64) -> f64 {
        self.random_slope * l + self.random_offset_bits
    }

    pub fn is_random_like(&self, deficiency: f64, l: f64) -> bool {
        deficiency <= self.random_threshold(l)
    }

    pub fn is_structured(&self, deficiency: f64, l: f64) -> bool {
        deficiency >= self.structured_fraction * l
    }
}

/// Outcome of re-running the calibration corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRun {
    pub seeds: usize,
    pub payload_bits: usize,
    pub max_excess_bits: f64,
    pub mean_deficiency_bits: f64,
    pub max_deficiency_bits: f64,
}

/// Uniform random bit payload of `bits` bits from `seed`.
pub fn rng_payload(seed: u64, bits: usize) -> EncodedList {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b: Vec<bool> = (0..bits).map(|_| rng.random()).collect();
    EncodedList::from_bits(&b, format!("rng:{seed}"))
}

/// Score `seeds` random payloads of `bits` bits with every estimator.
pub fn calibrate(seeds: usize, bits: usize, base_seed: u64, exec: Exec) -> Result<CalibrationRun> {
    let cal = Calibration::embedded();
    let defs = par::map_range(exec, seeds, |i| {
        let list = rng_payload(par::member_seed(base_seed, i as u64), bits);
        estimate_with(&list, &Estimator::ALL, &cal).map(|r| r.deficiency)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let max_def = defs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_def = defs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CalibrationRun {
        seeds,
        payload_bits: bits,
        max_excess_bits: -min_def,
        mean_deficiency_bits: defs.iter().sum::<f64>() / seeds as f64,
        max_deficiency_bits: max_def,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_file_parses() {
        let c = Calibration::embedded();
        assert_eq!(c.version, 1);
        assert_eq!(c.random_slope, 0.01);
        assert_eq!(c.random_offset_bits, 64.0);
        assert_eq!(c.structured_fraction, 0.3);
        assert_eq!(c.machine_constant_c, 1066.0);
    }

    #[test]
    fn load_rejects_bad_files() {
        let dir = std::env::temp_dir().join(format!("qkm-cal-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad.json");
        std::fs::write(&p, "{").unwrap();
        assert!(Calibration::load(&p).is_err());
        let mut c = Calibration::embedded();
        c.version = 9;
        std::fs::write(&p, serde_json::to_string(&c).unwrap()).unwrap();
        assert!(matches!(Calibration::load(&p), Err(QkmError::Format(_))));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn rerun_matches_stored_constants() {
        let stored = Calibration::embedded();
        let run = calibrate(stored.corpus.seeds, stored.corpus.payload_bits, 0, Exec::Parallel).unwrap();
        assert!(run.max_excess_bits <= stored.estimator_overhead_bits, "{run:?}");
        assert!((run.max_excess_bits - stored.corpus.max_excess_bits).abs() < 1e-9, "{run:?}");
        assert!(run.max_deficiency_bits <= stored.random_threshold(run.payload_bits as f64));
    }
}
