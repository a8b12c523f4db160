//! Encoded data lists and computable upper bounds on their complexity.
//!
//! Kolmogorov complexity is not computable; everything here works with
//! `K_hat`, the shortest code length found by a fixed set of lossless
//! estimators, and with constants calibrated on random corpora.

mod balance;
pub mod calibration;
mod deficiency;
mod encoding;
mod estimator;
mod gap;
pub mod listfile;
mod spectrum;

pub use balance::{balance_profile, default_group_width, BalanceProfile};
pub use calibration::{calibrate, rng_payload, Calibration, CalibrationRun};
pub use deficiency::{
    binary_expansion, fd_algorithmic_probability, randomness_deficiency, wedge_bounds, FdProbability, WedgeBound,
    WEDGE_C_HIGH, WEDGE_C_LOW,
};
pub use encoding::{default_width, quantize, EncodedList};
pub use estimator::{
    estimate_complexity, estimate_with, estimator_id_bits, parse_estimators, ComplexityReport, Estimator, GapClass,
};
pub use gap::{gap_classify, gap_classify_with, prefix_trace, GapVerdict, TracePoint};
pub use listfile::{read_list, write_list, ListFormat};
pub use spectrum::{
    rng_list, rng_sorted_list, smooth_box_levels, smooth_box_list, smooth_box_spectrum, spectrum_list, SPECTRUM_CAP,
};

use crate::combinatorics::half_log_term_bits;
use crate::error::Result;
use crate::par::{self, Exec};

/// The non-extensive diagnostic `delta = (1/2) log2(M / (N (M - N)))`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HalfLogDiagnostic {
    pub delta_bits: f64,
    pub magnitude_bits: f64,
    /// Direct evaluation is negative whenever `N (M - N) > M`.
    pub negative: bool,
}

pub fn half_log_diagnostic(m: f64, n: f64) -> Result<HalfLogDiagnostic> {
    let d = half_log_term_bits(m, n)?;
    Ok(HalfLogDiagnostic { delta_bits: d, magnitude_bits: d.abs(), negative: d < 0.0 })
}

/// Score many lists at once; order of results follows `lists`.
pub fn score_corpus(lists: &[EncodedList], estimators: &[Estimator], exec: Exec) -> Result<Vec<ComplexityReport>> {
    let cal = Calibration::current();
    par::map(exec, lists, |l| estimate_with(l, estimators, cal)).into_iter().collect()
}
