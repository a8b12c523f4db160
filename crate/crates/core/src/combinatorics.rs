//! Log-binomial combinatorics and detailed net disorder.
//!
//! Functions returning `bits` use base-2 logarithms, functions returning
//! `nats` use natural logarithms. Large arguments (M ~ 1e24) only go
//! through the real-valued expansions; the exact big-integer path is
//! capped at [`EXACT_CAP`].

use num_bigint::BigUint;

use crate::error::{QkmError, Result};
use crate::physcore::K_B;

/// Largest `M` accepted by [`log2_binomial_exact`].
pub const EXACT_CAP: u64 = 1_000_000;

/// First-order coefficient `c1` in `D/N = ln(2A) + 1 + c1/(2A) + O(A^-2)`,
/// obtained from the series of the intensive form.
pub const CLASSICAL_C1: f64 = -0.5;

/// Smallest `A` accepted by [`net_disorder_classical`].
pub const CLASSICAL_MIN_A: f64 = 10.0;

fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter_map(|(p, &is_p)| is_p.then_some(p as u64)).collect()
}

fn product_tree(mut factors: Vec<BigUint>) -> BigUint {
    if factors.is_empty() {
        return BigUint::from(1u32);
    }
    while factors.len() > 1 {
        let mut next = Vec::with_capacity(factors.len().div_ceil(2));
        let mut it = factors.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        factors = next;
    }
    factors.pop().unwrap()
}

/// Exact binomial coefficient via Legendre's prime-exponent formula and a
/// balanced product tree.
pub fn binomial_exact(m: u64, n: u64) -> Result<BigUint> {
    if n > m {
        return Err(QkmError::range("log2_binomial_exact", format!("N = {n} exceeds M = {m}")));
    }
    if m > EXACT_CAP {
        return Err(QkmError::range("log2_binomial_exact", format!("M = {m} exceeds the exact-path cap {EXACT_CAP}")));
    }
    let n = n.min(m - n);
    if n == 0 {
        return Ok(BigUint::from(1u32));
    }
    let mut factors = Vec::new();
    for p in primes_up_to(m) {
        let mut e = 0u32;
        let mut pk = p;
        loop {
            e += (m / pk - n / pk - (m - n) / pk) as u32;
            match pk.checked_mul(p) {
                Some(next) if next <= m => pk = next,
                _ => break,
            }
        }
        if e > 0 {
            factors.push(BigUint::from(p).pow(e));
        }
    }
    Ok(product_tree(factors))
}

/// Base-2 logarithm of a big unsigned integer, accurate to double precision.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        let v = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).iter_u64_digits().next().unwrap_or(0);
    shift as f64 + (top as f64).log2()
}

/// `log2 C(M, N)` from the exact integer binomial.
pub fn log2_binomial_exact(m: u64, n: u64) -> Result<f64> {
    Ok(log2_biguint(&binomial_exact(m, n)?))
}

/// Stirling form of `log2 C(M, N)` for `M > N > 0`, keeping the half-log
/// term and dropping only the O(1) remainder.
pub fn log2_binomial_fd_expansion(m: f64, n: f64) -> Result<f64> {
    if !(n > 0.0 && m > n) || !m.is_finite() {
        return Err(QkmError::domain(
            "log2_binomial_fd_expansion",
            format!("requires M > N > 0, got M = {m}, N = {n}"),
        ));
    }
    Ok((fd_extensive_nats(m, n) + 0.5 * half_log_nats(m, n)) / std::f64::consts::LN_2)
}

/// Stirling form of `log2 C(M + N, N)` (Bose-Einstein counting).
pub fn log2_binomial_be_expansion(m: f64, n: f64) -> Result<f64> {
    if !(m > 0.0 && n > 0.0) || !m.is_finite() || !n.is_finite() {
        return Err(QkmError::domain("log2_binomial_be_expansion", format!("requires M, N > 0, got M = {m}, N = {n}")));
    }
    // M ln((M+N)/M) + N ln((M+N)/N), the extensive part without cancellation.
    let ext = m * (n / m).ln_1p() + n * (m / n).ln_1p();
    let half = 0.5 * ((m + n).ln() - m.ln() - n.ln());
    Ok((ext + half) / std::f64::consts::LN_2)
}

/// `M ln M - n ln n - (M - n) ln(M - n)` rearranged as
/// `n ln(M/n) - (M - n) ln(1 - n/M)`; exact zero at `M = n`.
fn fd_extensive_nats(m: f64, n: f64) -> f64 {
    if m == n {
        return 0.0;
    }
    n * (m / n).ln() - (m - n) * (-n / m).ln_1p()
}

/// `ln(M / (n (M - n)))`
fn half_log_nats(m: f64, n: f64) -> f64 {
    m.ln() - n.ln() - (m - n).ln()
}

/// The non-extensive term `delta = (1/2) log2(M / (N (M - N)))` in bits.
pub fn half_log_term_bits(m: f64, n: f64) -> Result<f64> {
    if !(n > 0.0 && m > n) {
        return Err(QkmError::domain("half_log_term", format!("requires M > N > 0, got M = {m}, N = {n}")));
    }
    Ok(0.5 * half_log_nats(m, n) / std::f64::consts::LN_2)
}

/// Detailed net disorder summed over `g` equally populated spin species,
/// extensive terms only, in nats. `M = N/g` is the boundary where the
/// result is exactly zero (with `0 ln 0 = 0`).
pub fn net_disorder_fd(m: f64, n: f64, g: u32) -> Result<f64> {
    if g == 0 || !(m > 0.0 && n > 0.0) {
        return Err(QkmError::domain(
            "net_disorder_fd",
            format!("requires M, N > 0 and g >= 1, got M = {m}, N = {n}, g = {g}"),
        ));
    }
    let ns = n / g as f64;
    if m < ns {
        return Err(QkmError::domain("net_disorder_fd", format!("M = {m} < N/g = {ns}: fermions cannot be supported")));
    }
    Ok(g as f64 * fd_extensive_nats(m, ns))
}

/// Specific disorder `kappa(x) = ln(x - 1) - x ln(1 - 1/x)`, nats per particle.
pub(crate) fn kappa(x: f64) -> f64 {
    let d = x - 1.0;
    if x <= 2.0 {
        // x ln x - (x-1) ln(x-1), free of cancellation near x = 1
        x * d.ln_1p() - d * d.ln()
    } else {
        d.ln() - x * (-1.0 / x).ln_1p()
    }
}

/// Intensive form `N [ln(x - 1) - x ln(1 - 1/x)]` with `x = 2A`, in nats.
pub fn net_disorder_intensive(x: f64, n: f64) -> Result<f64> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(QkmError::domain("net_disorder_intensive", format!("requires x = 2A > 1, got {x}")));
    }
    Ok(n * kappa(x))
}

/// Classical-limit net disorder `N (ln 2A + 1 + c1/(2A))`, nats.
pub fn net_disorder_classical(a: f64, n: f64) -> Result<f64> {
    if !(a >= CLASSICAL_MIN_A) || !a.is_finite() {
        return Err(QkmError::domain(
            "net_disorder_classical",
            format!("classical limit needs A >= {CLASSICAL_MIN_A}, got {a}"),
        ));
    }
    let x = 2.0 * a;
    Ok(n * (x.ln() + 1.0 + CLASSICAL_C1 / x))
}

/// Statistical free energy `-k_B T N ln(M/N)` in joules.
pub fn f_stat(m: f64, n: f64, t: f64) -> Result<f64> {
    if !(n > 0.0 && t > 0.0) || m < n {
        return Err(QkmError::domain(
            "f_stat",
            format!("requires M >= N > 0 and T > 0, got M = {m}, N = {n}, T = {t}"),
        ));
    }
    Ok(-K_B * t * n * (m / n).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Independent oracle: multiplicative big-integer product.
    fn binom_product(m: u64, n: u64) -> BigUint {
        let mut acc = BigUint::from(1u32);
        for i in 0..n {
            acc *= m - i;
            acc /= i + 1;
        }
        acc
    }

    #[test]
    fn exact_matches_product_oracle() {
        for (m, n) in [(10, 3), (52, 5), (100, 50), (1000, 17), (4000, 1999)] {
            assert_eq!(binomial_exact(m, n).unwrap(), binom_product(m, n));
        }
        assert_relative_eq!(log2_binomial_exact(10, 3).unwrap(), 120f64.log2(), epsilon = 1e-12);
        assert_relative_eq!(log2_binomial_exact(10, 3).unwrap(), 6.9069, epsilon = 1e-4);
    }

    #[test]
    fn exact_edges() {
        assert_eq!(log2_binomial_exact(77, 0).unwrap(), 0.0);
        assert_eq!(log2_binomial_exact(77, 77).unwrap(), 0.0);
        assert!(log2_binomial_exact(3, 4).is_err());
        assert!(log2_binomial_exact(EXACT_CAP + 1, 2).is_err());
    }

    #[test]
    fn fd_expansion_close_to_exact() {
        let e = log2_binomial_exact(10_000, 100).unwrap();
        let a = log2_binomial_fd_expansion(1e4, 1e2).unwrap();
        assert!((e - a).abs() <= 2.0, "{e} vs {a}");
    }

    #[test]
    fn central_binomial_asymptotic() {
        // log2 C(2N, N) = 2N - (1/2) log2(pi N) + O(1/N); the expansion
        // drops the 2 pi inside the half-log term
        let offset = 0.5 * (2.0 * std::f64::consts::PI).log2();
        for n in [1e3, 1e6, 1e9] {
            let v = log2_binomial_fd_expansion(2.0 * n, n).unwrap();
            let oracle = 2.0 * n - 0.5 * (std::f64::consts::PI * n).log2();
            assert!((v - oracle - offset).abs() < 1e-3, "{n}: {v} vs {oracle}");
        }
    }

    #[test]
    fn fd_expansion_domain() {
        assert!(log2_binomial_fd_expansion(5.0, 5.0).is_err());
        assert!(log2_binomial_fd_expansion(4.0, 5.0).is_err());
    }

    #[test]
    fn be_expansion_close_to_exact_and_symmetric() {
        let e = log2_binomial_exact(10_100, 100).unwrap();
        let a = log2_binomial_be_expansion(1e4, 1e2).unwrap();
        assert!((e - a).abs() <= 2.0);
        let b = log2_binomial_be_expansion(1e2, 1e4).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-14);
        assert!(log2_binomial_be_expansion(0.0, 3.0).is_err());
    }

    #[test]
    fn net_disorder_boundary_is_zero() {
        assert_eq!(net_disorder_fd(50.0, 100.0, 2).unwrap(), 0.0);
        assert!(net_disorder_fd(49.0, 100.0, 2).is_err());
    }

    #[test]
    fn net_disorder_intensive_values() {
        assert_relative_eq!(
            net_disorder_intensive(2.0, 1.0).unwrap(),
            2.0 * std::f64::consts::LN_2,
            max_relative = 1e-15
        );
        assert!(net_disorder_intensive(1.0, 1.0).is_err());
        // x -> infinity: N (ln x + 1)
        let x = 1e12;
        assert_relative_eq!(net_disorder_intensive(x, 3.0).unwrap(), 3.0 * (x.ln() + 1.0), max_relative = 1e-12);
    }

    #[test]
    fn classical_limit() {
        let a = 1e8;
        let c = net_disorder_classical(a, 1.0).unwrap();
        let i = net_disorder_intensive(2.0 * a, 1.0).unwrap();
        assert!(((c - i) / i).abs() <= 1e-15);
        assert!(net_disorder_classical(1.0, 1.0).is_err());
    }

    #[test]
    fn f_stat_values() {
        let t = 7.0;
        let n = 1e5;
        assert_relative_eq!(f_stat(n * std::f64::consts::E, n, t).unwrap(), -K_B * t * n, max_relative = 1e-14);
        assert_eq!(f_stat(n, n, t).unwrap(), 0.0);
        assert!(f_stat(n - 1.0, n, t).is_err());
    }

    proptest! {
        #[test]
        fn positivity_above_boundary(ratio in 1.000_001f64..1e6, n in 1.0f64..1e20, g in 1u32..=2) {
            let m = ratio * n / g as f64;
            prop_assert!(net_disorder_fd(m, n, g).unwrap() > 0.0);
        }

        #[test]
        fn increasing_in_m(ratio in 1.01f64..1e6, n in 1.0f64..1e12) {
            let m = ratio * n / 2.0;
            let d0 = net_disorder_fd(m, n, 2).unwrap();
            let d1 = net_disorder_fd(m * 1.001, n, 2).unwrap();
            prop_assert!(d1 > d0);
        }

        #[test]
        fn stirling_remainder_bounded(m in 10u64..20_000, frac in 0.0f64..1.0) {
            let n = ((m - 1) as f64 * frac).floor().max(1.0) as u64;
            prop_assume!(n < m);
            let e = log2_binomial_exact(m, n).unwrap();
            let a = log2_binomial_fd_expansion(m as f64, n as f64).unwrap();
            prop_assert!((e - a).abs() <= 2.0);
        }
    }
}
