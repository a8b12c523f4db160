use serde::Serialize;

use super::calibration::Calibration;
use super::encoding::EncodedList;
use super::estimator::{estimate_with, Estimator};
use crate::error::{QkmError, Result};
use crate::par::{self, Exec};

/// One point of a prefix-complexity trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub l: f64,
    pub k_hat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum GapVerdict {
    RandomLike,
    Structured,
    /// Switches regime once; `change_point` is the `l` at which the second
    /// regime starts.
    Transitioning {
        change_point: f64,
        structured_first: bool,
    },
}

/// `K_hat` of `segments` evenly spaced prefixes of `list`.
pub fn prefix_trace(
    list: &EncodedList,
    segments: usize,
    estimators: &[Estimator],
    exec: Exec,
) -> Result<Vec<TracePoint>> {
    if segments == 0 || list.n() < segments {
        return Err(QkmError::range("prefix_trace", "need at least one datum per segment"));
    }
    let cal = Calibration::current();
    par::map_range(exec, segments, |s| {
        let n = (s + 1) * list.n() / segments;
        let p = list.prefix(n);
        estimate_with(&p, estimators, cal).map(|r| TracePoint { l: p.bit_len() as f64, k_hat: r.k_hat })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Step {
    Random,
    Structured,
    Unclear,
}

/// Classify a trace by how the deficiency `l - K_hat` grows between points:
/// bounded growth is random-like, growth at a fixed fraction of `l` is
/// structured.
pub fn gap_classify(trace: &[TracePoint]) -> Result<GapVerdict> {
    gap_classify_with(trace, Calibration::current())
}

pub fn gap_classify_with(trace: &[TracePoint], cal: &Calibration) -> Result<GapVerdict> {
    if trace.is_empty() {
        return Err(QkmError::domain("gap_classify", "empty trace"));
    }
    // the first point is an increment from the empty string
    let mut prev = TracePoint { l: 0.0, k_hat: 0.0 };
    let mut steps = Vec::with_capacity(trace.len());
    for p in trace {
        let dl = p.l - prev.l;
        let dd = (p.l - p.k_hat) - (prev.l - prev.k_hat);
        let step = if dl <= 0.0 {
            Step::Unclear
        } else if cal.is_structured(dd, dl) {
            Step::Structured
        } else if cal.is_random_like(dd, dl) {
            Step::Random
        } else {
            Step::Unclear
        };
        steps.push((p.l - dl, step));
        prev = *p;
    }
    let clear: Vec<(f64, Step)> = steps.into_iter().filter(|s| s.1 != Step::Unclear).collect();
    let any_s = clear.iter().any(|s| s.1 == Step::Structured);
    let any_r = clear.iter().any(|s| s.1 == Step::Random);
    Ok(match (any_s, any_r) {
        (true, false) => GapVerdict::Structured,
        (false, _) => GapVerdict::RandomLike,
        (true, true) => {
            // best single split between the two regimes
            let (mut best, mut best_at, mut best_sf) = (usize::MAX, 0usize, true);
            for split in 1..clear.len() {
                for sf in [true, false] {
                    let (a, b) = if sf { (Step::Structured, Step::Random) } else { (Step::Random, Step::Structured) };
                    let miss = clear[..split].iter().filter(|s| s.1 != a).count()
                        + clear[split..].iter().filter(|s| s.1 != b).count();
                    if miss < best {
                        best = miss;
                        best_at = split;
                        best_sf = sf;
                    }
                }
            }
            GapVerdict::Transitioning { change_point: clear[best_at].0, structured_first: best_sf }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomness::calibration::rng_payload;

    fn tp(l: f64, k: f64) -> TracePoint {
        TracePoint { l, k_hat: k }
    }

    #[test]
    fn synthetic_traces() {
        let cal = Calibration::embedded();
        let rnd: Vec<_> = (1..=10).map(|i| tp(1e4 * i as f64, 1e4 * i as f64 + 30.0)).collect();
        assert_eq!(gap_classify_with(&rnd, &cal).unwrap(), GapVerdict::RandomLike);
        let st: Vec<_> = (1..=10).map(|i| tp(1e4 * i as f64, 100.0 * i as f64)).collect();
        assert_eq!(gap_classify_with(&st, &cal).unwrap(), GapVerdict::Structured);
        let mut mixed = st[..5].to_vec();
        for i in 6..=10 {
            mixed.push(tp(1e4 * i as f64, 500.0 + 1e4 * (i - 5) as f64));
        }
        assert_eq!(
            gap_classify_with(&mixed, &cal).unwrap(),
            GapVerdict::Transitioning { change_point: 5e4, structured_first: true }
        );
        assert!(gap_classify_with(&[], &cal).is_err());
    }

    #[test]
    fn rng_trace_is_random_like() {
        let l = rng_payload(5, 50_000);
        let t = prefix_trace(&l, 10, &Estimator::ALL, Exec::Parallel).unwrap();
        assert_eq!(gap_classify(&t).unwrap(), GapVerdict::RandomLike);
    }
}
