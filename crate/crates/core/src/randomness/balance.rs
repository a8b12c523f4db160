use serde::Serialize;

use super::encoding::EncodedList;
use crate::error::{QkmError, Result};

/// Zero/one counts over consecutive groups of a payload.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceProfile {
    pub group_width: usize,
    /// Number of ones in each group.
    pub ones: Vec<usize>,
    /// Indices of groups with `|ones - zeros| <= sqrt(group_width)`.
    pub balanced_groups: Vec<usize>,
    /// Mean bit position of the near-balanced group centres.
    pub peak_bits: Option<f64>,
    /// No group is near balance (e.g. a constant payload).
    pub degenerate: bool,
}

impl BalanceProfile {
    pub fn total_bits(&self) -> usize {
        self.ones.len() * self.group_width
    }

    /// Peak position as a fraction of the payload length.
    pub fn peak_fraction(&self) -> Option<f64> {
        self.peak_bits.map(|p| p / self.total_bits() as f64)
    }
}

/// Group width `round(sqrt(m))` for a payload of `m` bits.
pub fn default_group_width(m: usize) -> usize {
    ((m as f64).sqrt().round() as usize).max(1)
}

pub fn balance_profile(list: &EncodedList, group_width: usize) -> Result<BalanceProfile> {
    let len = list.bit_len();
    if group_width == 0 || len == 0 || !len.is_multiple_of(group_width) {
        return Err(QkmError::Divisibility { len, group: group_width });
    }
    let ones: Vec<usize> = (0..len / group_width)
        .map(|g| (g * group_width..(g + 1) * group_width).filter(|&i| list.bit(i)).count())
        .collect();
    let tol = (group_width as f64).sqrt();
    let balanced_groups: Vec<usize> = ones
        .iter()
        .enumerate()
        .filter(|(_, &c)| (2.0 * c as f64 - group_width as f64).abs() <= tol)
        .map(|(i, _)| i)
        .collect();
    let peak_bits = (!balanced_groups.is_empty()).then(|| {
        balanced_groups.iter().map(|&i| (i as f64 + 0.5) * group_width as f64).sum::<f64>()
            / balanced_groups.len() as f64
    });
    Ok(BalanceProfile { group_width, degenerate: balanced_groups.is_empty(), ones, balanced_groups, peak_bits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_is_balanced_everywhere() {
        let bits: Vec<bool> = (0..10_000).map(|i| i % 2 == 1).collect();
        let p = balance_profile(&EncodedList::from_bits(&bits, "alt"), 100).unwrap();
        assert!(p.ones.iter().all(|&c| c == 50));
        assert_eq!(p.balanced_groups.len(), 100);
        assert_eq!(p.peak_bits, Some(5000.0));
        assert!(!p.degenerate);
    }

    #[test]
    fn all_ones_is_degenerate() {
        let p = balance_profile(&EncodedList::from_bits(&[true; 400], "ones"), 20).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.peak_bits, None);
    }

    #[test]
    fn divisibility_checked() {
        let l = EncodedList::from_bits(&[true; 10], "x");
        assert!(matches!(balance_profile(&l, 3), Err(QkmError::Divisibility { len: 10, group: 3 })));
        assert_eq!(default_group_width(10_000), 100);
    }
}
