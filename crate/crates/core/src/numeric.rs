// SPDX-License-Identifier: Apache-2.0

//! Small numeric helpers shared by the checkers.
//!
//! Assertions against inequalities that involve `log2`, `e` or square roots
//! are evaluated in floating point with a relative tolerance of `1e-9`,
//! applied so that it can only tighten a check. A comparison that passes
//! with the tolerance also passes in exact arithmetic.

use num_rational::Ratio;

/// Exact rational type used for fibre averages, distances and budgets.
pub type Q = Ratio<i128>;

/// Relative tolerance applied to floating-point inequality checks.
pub const REL_TOL: f64 = 1e-9;

/// `lhs <= rhs`, tightened by [`REL_TOL`].
///
/// When `rhs == 0` this degenerates to `lhs <= 0`, so `0 <= 0` passes.
pub fn safe_le(lhs: f64, rhs: f64) -> bool {
    if rhs == 0.0 {
        return lhs <= 0.0;
    }
    lhs <= rhs - REL_TOL * rhs.abs()
}

/// `lhs >= rhs`, tightened by [`REL_TOL`].
pub fn safe_ge(lhs: f64, rhs: f64) -> bool {
    safe_le(rhs, lhs)
}

pub fn is_power_of_two(k: u32) -> bool {
    k.is_power_of_two()
}

/// `s` with `k = 2^s`, if `k` is a power of two.
pub fn log2_exact(k: u32) -> Option<u32> {
    k.is_power_of_two().then(|| k.trailing_zeros())
}

/// Binary entropy in bits with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

pub fn q(num: i128, den: i128) -> Q {
    Q::new(num, den)
}

pub fn q_to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// `base^exp` with overflow reported as `None`.
pub fn checked_pow_usize(base: u32, exp: u32) -> Option<usize> {
    (base as usize).checked_pow(exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn safe_le_tightens() {
        assert!(safe_le(0.0, 0.0));
        assert!(safe_le(1.0, 2.0));
        assert!(!safe_le(1.0, 1.0));
        assert!(!safe_le(1.0 + 1e-12, 1.0));
        assert!(!safe_le(1e-300, 0.0));
    }

    #[test]
    fn entropy_endpoints() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_log2() {
        assert_eq!(log2_exact(256), Some(8));
        assert_eq!(log2_exact(12), None);
        assert_eq!(log2_exact(1), Some(0));
    }
}
