use std::collections::HashMap;
use std::io::Write;
use std::str::FromStr;

use flate2::write::DeflateEncoder;
use flate2::Compression;
use serde::Serialize;

use super::calibration::Calibration;
use super::encoding::EncodedList;
use crate::error::{QkmError, Result};

/// Computable upper bounds on the complexity of a payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// DEFLATE over the raw packed payload.
    Deflate,
    /// DEFLATE over the data repacked to whole bytes.
    DeflateAligned,
    /// Adaptive order-0 code length over the datum alphabet.
    Order0,
    /// Adaptive order-1 code length, context = previous datum.
    Order1,
    /// Successive differences modulo `2^k`, then byte-aligned DEFLATE.
    DeltaDeflate,
}

impl Estimator {
    pub const ALL: [Estimator; 5] =
        [Estimator::Deflate, Estimator::DeflateAligned, Estimator::Order0, Estimator::Order1, Estimator::DeltaDeflate];

    pub fn id(self) -> &'static str {
        match self {
            Estimator::Deflate => "deflate",
            Estimator::DeflateAligned => "deflate-aligned",
            Estimator::Order0 => "order0",
            Estimator::Order1 => "order1",
            Estimator::DeltaDeflate => "delta-deflate",
        }
    }

    /// Code length in bits, excluding the estimator-id prefix.
    pub fn code_length(self, list: &EncodedList) -> f64 {
        match self {
            Estimator::Deflate => deflate_bits(list.payload()),
            Estimator::DeflateAligned => deflate_bits(&aligned_bytes(list.k(), list.decode())),
            Estimator::Order0 => kt_order0_bits(&list.decode(), list.k()),
            Estimator::Order1 => kt_order1_bits(&list.decode(), list.k()),
            Estimator::DeltaDeflate => deflate_bits(&aligned_bytes(list.k(), deltas(&list.decode(), list.k()))),
        }
    }
}

impl FromStr for Estimator {
    type Err = QkmError;

    fn from_str(s: &str) -> Result<Self> {
        Estimator::ALL.into_iter().find(|e| e.id() == s).ok_or_else(|| QkmError::UnknownEstimator(s.to_string()))
    }
}

/// Bits needed to name one estimator out of [`Estimator::ALL`].
pub fn estimator_id_bits() -> f64 {
    (Estimator::ALL.len() as f64).log2().ceil()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapClass {
    RandomLike,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub k_hat: f64,
    pub estimator_id: &'static str,
    /// Payload length in bits (`n ceil(log2 n)` at the default width).
    pub l_primitive: f64,
    /// `l_primitive - k_hat`, reported raw (may be negative).
    pub deficiency: f64,
    pub gap_class: GapClass,
}

/// `K_hat = min` over `estimators` of code length plus the id prefix.
pub fn estimate_complexity(list: &EncodedList, estimators: &[Estimator]) -> Result<ComplexityReport> {
    estimate_with(list, estimators, Calibration::current())
}

pub fn estimate_with(list: &EncodedList, estimators: &[Estimator], cal: &Calibration) -> Result<ComplexityReport> {
    if list.n() == 0 {
        return Err(QkmError::domain("estimate_complexity", "empty payload"));
    }
    if estimators.is_empty() {
        return Err(QkmError::UnknownEstimator(String::new()));
    }
    let id_bits = estimator_id_bits();
    let (k_hat, est) = estimators
        .iter()
        .map(|&e| (e.code_length(list) + id_bits, e))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("non-empty estimator set");
    let l = list.bit_len() as f64;
    let deficiency = l - k_hat;
    let gap_class = if cal.is_random_like(deficiency, l) { GapClass::RandomLike } else { GapClass::Structured };
    Ok(ComplexityReport { k_hat, estimator_id: est.id(), l_primitive: l, deficiency, gap_class })
}

/// Parse a comma-separated estimator list; `all` selects every estimator.
pub fn parse_estimators(spec: &str) -> Result<Vec<Estimator>> {
    if spec.trim() == "all" {
        return Ok(Estimator::ALL.to_vec());
    }
    spec.split(',').map(|s| s.trim().parse()).collect()
}

fn deflate_bits(bytes: &[u8]) -> f64 {
    let mut enc = DeflateEncoder::new(Vec::with_capacity(bytes.len() / 2 + 16), Compression::best());
    enc.write_all(bytes).expect("writing to a Vec cannot fail");
    let out = enc.finish().expect("writing to a Vec cannot fail");
    8.0 * out.len() as f64
}

fn aligned_bytes(k: u32, values: Vec<u64>) -> Vec<u8> {
    let width = k.div_ceil(8) as usize;
    let mut out = Vec::with_capacity(values.len() * width);
    for v in values {
        out.extend_from_slice(&v.to_be_bytes()[8 - width..]);
    }
    out
}

fn deltas(values: &[u64], k: u32) -> Vec<u64> {
    let mask = if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut prev = 0u64;
    values
        .iter()
        .map(|&v| {
            let d = v.wrapping_sub(prev) & mask;
            prev = v;
            d
        })
        .collect()
}

// Krichevsky-Trofimov sequential code: each symbol costs
// -log2((count + 1/2) / (total + |alphabet| / 2)); 2 bits cover the
// arithmetic-coder termination.
fn kt_order0_bits(values: &[u64], k: u32) -> f64 {
    let half_alpha = 2f64.powi(k as i32 - 1);
    let mut counts: HashMap<u64, u64> = HashMap::new();
    let mut bits = 2.0;
    for (t, &v) in values.iter().enumerate() {
        let c = counts.entry(v).or_insert(0);
        bits -= ((*c as f64 + 0.5) / (t as f64 + half_alpha)).log2();
        *c += 1;
    }
    bits
}

fn kt_order1_bits(values: &[u64], k: u32) -> f64 {
    let half_alpha = 2f64.powi(k as i32 - 1);
    let mut pair: HashMap<(u64, u64), u64> = HashMap::new();
    let mut ctx: HashMap<u64, u64> = HashMap::new();
    let mut bits = 2.0;
    let mut prev = u64::MAX;
    for &v in values {
        let c = pair.entry((prev, v)).or_insert(0);
        let t = ctx.entry(prev).or_insert(0);
        bits -= ((*c as f64 + 0.5) / (*t as f64 + half_alpha)).log2();
        *c += 1;
        *t += 1;
        prev = v;
    }
    bits
}
