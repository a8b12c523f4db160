use serde::Serialize;

use crate::error::{QkmError, Result};

/// Default datum width `ceil(log2 n)`, at least one bit.
pub fn default_width(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// A finite list of non-negative integers concatenated at a fixed width
/// into one bit sequence, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncodedList {
    n: usize,
    k: u32,
    #[serde(skip)]
    payload: Vec<u8>,
    source_tag: String,
}

impl EncodedList {
    /// Encode `values` at width `k` (default `ceil(log2 n)`).
    pub fn encode(values: &[u64], k: Option<u32>, source_tag: impl Into<String>) -> Result<Self> {
        let n = values.len();
        let k = k.unwrap_or_else(|| default_width(n));
        if k == 0 || k > 64 {
            return Err(QkmError::range("encode_list", format!("datum width {k} outside 1..=64")));
        }
        let mut w = BitWriter::with_capacity(n * k as usize);
        for &v in values {
            if k < 64 && v >> k != 0 {
                return Err(QkmError::Overflow { value: v, k });
            }
            w.push(v, k);
        }
        Ok(EncodedList { n, k, payload: w.finish(), source_tag: source_tag.into() })
    }

    /// Wrap an existing bit payload. Trailing pad bits must be zero.
    pub fn from_payload(n: usize, k: u32, payload: Vec<u8>, source_tag: impl Into<String>) -> Result<Self> {
        if k == 0 || k > 64 {
            return Err(QkmError::Format(format!("datum width {k} outside 1..=64")));
        }
        let bits = n * k as usize;
        if payload.len() != bits.div_ceil(8) {
            return Err(QkmError::Format(format!(
                "payload has {} bytes, expected {} for n = {n}, k = {k}",
                payload.len(),
                bits.div_ceil(8)
            )));
        }
        if !bits.is_multiple_of(8) {
            let pad_mask = 0xFFu8 >> (bits % 8);
            if payload.last().is_some_and(|b| b & pad_mask != 0) {
                return Err(QkmError::Format("non-zero padding bits".into()));
            }
        }
        Ok(EncodedList { n, k, payload, source_tag: source_tag.into() })
    }

    /// A bit string as a list of 1-bit data.
    pub fn from_bits(bits: &[bool], source_tag: impl Into<String>) -> Self {
        let mut w = BitWriter::with_capacity(bits.len());
        for &b in bits {
            w.push(b as u64, 1);
        }
        EncodedList { n: bits.len(), k: 1, payload: w.finish(), source_tag: source_tag.into() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    /// Payload length in bits, `n k`.
    pub fn bit_len(&self) -> usize {
        self.n * self.k as usize
    }

    /// Primitive length `n ceil(log2 n)` of a list with this many data.
    pub fn l_primitive(&self) -> usize {
        self.n * default_width(self.n) as usize
    }

    pub fn bit(&self, i: usize) -> bool {
        self.payload[i / 8] >> (7 - i % 8) & 1 == 1
    }

    pub fn datum(&self, i: usize) -> u64 {
        let start = i * self.k as usize;
        (0..self.k as usize).fold(0u64, |acc, j| (acc << 1) | self.bit(start + j) as u64)
    }

    pub fn decode(&self) -> Vec<u64> {
        let mut r = BitReader::new(&self.payload);
        (0..self.n).map(|_| r.read(self.k)).collect()
    }

    /// Concatenate another list of the same width.
    pub fn concat(&self, other: &EncodedList) -> Result<EncodedList> {
        if other.k != self.k {
            return Err(QkmError::range("concat", "datum widths differ"));
        }
        let mut values = self.decode();
        values.extend(other.decode());
        EncodedList::encode(&values, Some(self.k), self.source_tag.clone())
    }

    /// First `n` data as a new list.
    pub fn prefix(&self, n: usize) -> EncodedList {
        let values = self.decode();
        EncodedList::encode(&values[..n.min(self.n)], Some(self.k), self.source_tag.clone())
            .expect("prefix values fit the parent width")
    }
}

/// Quantise real values on `[lo, hi]` to `2^k` levels (clamped).
pub fn quantize(values: &[f64], lo: f64, hi: f64, k: u32) -> Vec<u64> {
    let levels = if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
    let span = hi - lo;
    values
        .iter()
        .map(|&v| {
            let f = if span > 0.0 { ((v - lo) / span).clamp(0.0, 1.0) } else { 0.0 };
            ((f * (levels as f64 + 1.0)).floor() as u64).min(levels)
        })
        .collect()
}

pub(crate) struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    nacc: u32,
}

impl BitWriter {
    pub(crate) fn with_capacity(bits: usize) -> Self {
        BitWriter { bytes: Vec::with_capacity(bits.div_ceil(8)), acc: 0, nacc: 0 }
    }

    pub(crate) fn push(&mut self, value: u64, k: u32) {
        for j in (0..k).rev() {
            self.acc = (self.acc << 1) | ((value >> j) & 1);
            self.nacc += 1;
            if self.nacc == 8 {
                self.bytes.push(self.acc as u8);
                self.acc = 0;
                self.nacc = 0;
            }
        }
    }

    pub(crate) fn finish(mut self) -> Vec<u8> {
        if self.nacc > 0 {
            self.bytes.push((self.acc << (8 - self.nacc)) as u8);
        }
        self.bytes
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    fn read(&mut self, k: u32) -> u64 {
        let mut v = 0u64;
        for _ in 0..k {
            let bit = self.bytes[self.pos / 8] >> (7 - self.pos % 8) & 1;
            v = (v << 1) | bit as u64;
            self.pos += 1;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn direct_encoding() {
        let l = EncodedList::encode(&[0, 1, 2, 3], None, "t").unwrap();
        assert_eq!(l.k(), 2);
        assert_eq!(l.bit_len(), 8);
        assert_eq!(l.payload(), &[0b0001_1011]);
        assert_eq!(l.l_primitive(), 8);
    }

    #[test]
    fn overflow_rejected() {
        assert!(matches!(EncodedList::encode(&[4], Some(2), "t"), Err(QkmError::Overflow { value: 4, k: 2 })));
    }

    #[test]
    fn widths() {
        assert_eq!(default_width(1), 1);
        assert_eq!(default_width(2), 1);
        assert_eq!(default_width(4), 2);
        assert_eq!(default_width(5), 3);
        assert_eq!(default_width(1 << 20), 20);
        assert_eq!(default_width((1 << 20) + 1), 21);
    }

    #[test]
    fn round_trip_many_random_lists() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let n = rng.random_range(1..40);
            let k = rng.random_range(1..=64u32);
            let vals: Vec<u64> =
                (0..n).map(|_| if k == 64 { rng.random() } else { rng.random_range(0..1u64 << k) }).collect();
            let l = EncodedList::encode(&vals, Some(k), "rng").unwrap();
            assert_eq!(l.decode(), vals);
        }
    }

    #[test]
    fn payload_validation() {
        assert!(EncodedList::from_payload(3, 3, vec![0xFF, 0x80], "x").is_ok());
        assert!(EncodedList::from_payload(3, 3, vec![0xFF, 0x81], "x").is_err());
        assert!(EncodedList::from_payload(3, 3, vec![0xFF], "x").is_err());
    }

    #[test]
    fn quantize_edges() {
        let q = quantize(&[-1.0, 0.0, 0.5, 1.0, 2.0], 0.0, 1.0, 3);
        assert_eq!(q, vec![0, 0, 4, 7, 7]);
    }

    proptest! {
        #[test]
        fn concat_then_decode(a in proptest::collection::vec(0u64..1024, 0..50),
                              b in proptest::collection::vec(0u64..1024, 0..50)) {
            let la = EncodedList::encode(&a, Some(10), "a").unwrap();
            let lb = EncodedList::encode(&b, Some(10), "b").unwrap();
            let mut ab = a.clone();
            ab.extend(&b);
            prop_assert_eq!(la.concat(&lb).unwrap().decode(), ab);
        }
    }
}
