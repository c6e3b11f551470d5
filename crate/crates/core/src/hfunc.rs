// SPDX-License-Identifier: Apache-2.0

//! Per-fibre cost functionals `h: {0,1}^[k] → R` and the interval bounds
//! for the binary-encoded fibre boundary.
//!
//! Every functional depends on a fibre `F` only through `ℓ = |F^{-1}(1)|`
//! and `m = |∂F|`, which is what [`h_from_counts`] takes. All of them
//! vanish on constant fibres.

use serde::{Deserialize, Serialize};

use crate::encode::tilde_fibre_boundary;
use crate::error::{Error, Result};
use crate::numeric::{binary_entropy, log2_exact, safe_le};

/// Which fibre functional to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HVariant {
    /// `1` on non-constant fibres.
    Indicator,
    /// `log2 k` on non-constant fibres.
    LogK,
    /// `log2 k · Var(F)`.
    VarianceLog,
    /// Binary entropy of `Pr[F = 1]`.
    Entropy,
    /// `k · |∂F|`.
    ScaledBoundary,
    /// `|∂F|`.
    MainBoundary,
    /// `Var(F) · log2(|∂F| / Var(F))` on non-constant fibres.
    HStar,
}

impl HVariant {
    pub const ALL: [HVariant; 7] = [
        HVariant::Indicator,
        HVariant::LogK,
        HVariant::VarianceLog,
        HVariant::Entropy,
        HVariant::ScaledBoundary,
        HVariant::MainBoundary,
        HVariant::HStar,
    ];

    pub fn position(self) -> usize {
        Self::ALL.iter().position(|&v| v == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            HVariant::Indicator => "indicator",
            HVariant::LogK => "log-k",
            HVariant::VarianceLog => "variance-log",
            HVariant::Entropy => "entropy",
            HVariant::ScaledBoundary => "scaled-boundary",
            HVariant::MainBoundary => "main-boundary",
            HVariant::HStar => "h-star",
        }
    }
}

/// `(ℓ/k)(1 - ℓ/k)`.
pub fn variance(k: u32, ell: u32) -> f64 {
    // ℓ(k-ℓ)/k² in one division keeps ν exact whenever it is dyadic.
    (ell as f64 * (k - ell) as f64) / (k as f64 * k as f64)
}

/// `(ℓ, m)` of a Boolean fibre given as values.
pub fn ell_and_boundary(values: &[u16]) -> (u32, u32) {
    let ell = values.iter().filter(|&&v| v != 0).count() as u32;
    let m = values.windows(2).filter(|w| w[0] != w[1]).count() as u32;
    (ell, m)
}

pub fn h_from_counts(k: u32, ell: u32, m: u32, variant: HVariant) -> f64 {
    if ell == 0 || ell == k {
        return 0.0;
    }
    let var = variance(k, ell);
    let log2k = (k as f64).log2();
    match variant {
        HVariant::Indicator => 1.0,
        HVariant::LogK => log2k,
        HVariant::VarianceLog => log2k * var,
        HVariant::Entropy => binary_entropy(ell as f64 / k as f64),
        HVariant::ScaledBoundary => k as f64 * m as f64,
        HVariant::MainBoundary => m as f64,
        HVariant::HStar => var * (m as f64 / var).log2(),
    }
}

fn require_fibre(values: &[u16]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::Precondition(format!("fibre of length {} (need k >= 2)", values.len())));
    }
    if let Some(i) = values.iter().position(|&v| v > 1) {
        return Err(Error::ValueOutOfRange { index: i, value: values[i], l: 2 });
    }
    Ok(())
}

/// Evaluates `variant` on the Boolean fibre `F(1..k)`.
pub fn h_eval(values: &[u16], variant: HVariant) -> Result<f64> {
    require_fibre(values)?;
    let (ell, m) = ell_and_boundary(values);
    Ok(h_from_counts(values.len() as u32, ell, m, variant))
}

/// Each domination inequality for `h*` on one fibre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim42Check {
    pub h_star: f64,
    /// `3 · Var · log2 k`.
    pub var_bound: f64,
    /// `|∂F|`.
    pub boundary: f64,
    /// `k · |∂F|`.
    pub scaled_bound: f64,
    /// `Ent(p)`, present when `|∂F| = 1`.
    pub entropy: Option<f64>,
}

impl Claim42Check {
    pub fn holds(&self) -> bool {
        safe_le(self.h_star, self.var_bound)
            && safe_le(self.h_star, self.boundary)
            && safe_le(self.h_star, self.scaled_bound)
            && self.entropy.is_none_or(|e| safe_le(self.h_star, e))
    }
}

pub fn claim42_details(values: &[u16]) -> Result<Claim42Check> {
    require_fibre(values)?;
    let k = values.len() as u32;
    let (ell, m) = ell_and_boundary(values);
    Ok(Claim42Check {
        h_star: h_from_counts(k, ell, m, HVariant::HStar),
        var_bound: 3.0 * variance(k, ell) * (k as f64).log2(),
        boundary: m as f64,
        scaled_bound: k as f64 * m as f64,
        entropy: (m == 1).then(|| binary_entropy(ell as f64 / k as f64)),
    })
}

/// `h*(F)` is dominated by the other functionals on `F`.
pub fn claim42_check(values: &[u16]) -> Result<bool> {
    Ok(claim42_details(values)?.holds())
}

/// Inclusive interval `{start, …, end}` of `[k]` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: u32,
    pub end: u32,
}

impl Interval {
    pub fn new(start: u32, end: u32) -> Self {
        debug_assert!(1 <= start && start <= end);
        Self { start, end }
    }

    pub fn len(&self) -> u32 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indicator(&self, k: u32) -> Vec<u16> {
        (1..=k).map(|z| (self.start <= z && z <= self.end) as u16).collect()
    }
}

/// Maximal runs of ones of a Boolean fibre, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalDecomposition {
    pub k: u32,
    pub intervals: Vec<Interval>,
}

impl IntervalDecomposition {
    pub fn count(&self) -> usize {
        self.intervals.len()
    }

    /// `m' ∈ {⌈m/2⌉, ⌈m/2⌉ + 1}` for a fibre with boundary `m`.
    pub fn count_in_range(&self, m: u32) -> bool {
        let lo = m.div_ceil(2) as usize;
        self.intervals.is_empty() && m == 0 || (lo..=lo + 1).contains(&self.count())
    }
}

pub fn interval_decompose(values: &[u16]) -> IntervalDecomposition {
    let mut intervals = Vec::new();
    let mut open: Option<u32> = None;
    for (z, &v) in values.iter().enumerate() {
        let z = z as u32 + 1;
        match (v != 0, open) {
            (true, None) => open = Some(z),
            (false, Some(s)) => {
                intervals.push(Interval::new(s, z - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        intervals.push(Interval::new(s, values.len() as u32));
    }
    IntervalDecomposition { k: values.len() as u32, intervals }
}

/// Binary-encoded boundary of one interval against `6|I| log2(k/|I|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalBoundCheck {
    pub interval: Interval,
    pub tilde: u64,
    pub bound: f64,
}

impl IntervalBoundCheck {
    pub fn holds(&self) -> bool {
        safe_le(self.tilde as f64, self.bound)
    }
}

fn interval_bound(k: u32, len: u32) -> f64 {
    6.0 * len as f64 * (k as f64 / len as f64).log2()
}

/// Checks the binary-encoded boundary of an interval `I ⊆ [k]`,
/// `0 < |I| <= k/2`, `k` a power of two.
pub fn interval_tilde_bound_check(k: u32, interval: Interval) -> Result<IntervalBoundCheck> {
    log2_exact(k).ok_or(Error::NotPowerOfTwo(k))?;
    if interval.start < 1 || interval.end > k || interval.start > interval.end {
        return Err(Error::Precondition(format!("{interval:?} is not an interval of [{k}]")));
    }
    if 2 * interval.len() > k {
        return Err(Error::Precondition(format!("|I| = {} exceeds k/2 = {}", interval.len(), k / 2)));
    }
    let tilde = tilde_fibre_boundary(&interval.indicator(k))?;
    Ok(IntervalBoundCheck { interval, tilde, bound: interval_bound(k, interval.len()) })
}

/// Binary-encoded boundary of a fibre against `6ℓ log2(mk/ℓ)`, together
/// with the intermediate quantities of the interval argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibreBoundCheck {
    pub k: u32,
    pub ell: u32,
    pub m: u32,
    pub decomposition: IntervalDecomposition,
    /// `|∂̃(F)|`.
    pub tilde: u64,
    /// `Σ_i |∂̃(I_i)|`.
    pub interval_tilde_sum: u64,
    /// Per-interval checks.
    pub intervals: Vec<IntervalBoundCheck>,
    /// `6 Σ_i |I_i| log2(k/|I_i|)`.
    pub interval_bound_sum: f64,
    /// `6ℓ log2(k m'/ℓ)`.
    pub concave_bound: f64,
    /// `6ℓ log2(m k/ℓ)`.
    pub bound: f64,
}

impl FibreBoundCheck {
    pub fn holds(&self) -> bool {
        self.tilde <= self.interval_tilde_sum
            && self.intervals.iter().all(IntervalBoundCheck::holds)
            && self.decomposition.count_in_range(self.m)
            && safe_le(self.tilde as f64, self.bound)
    }
}

/// Requires `k` a power of two and `0 < ℓ <= k/2`.
pub fn fibre_tilde_bound_check(values: &[u16]) -> Result<FibreBoundCheck> {
    require_fibre(values)?;
    let k = values.len() as u32;
    log2_exact(k).ok_or(Error::NotPowerOfTwo(k))?;
    let (ell, m) = ell_and_boundary(values);
    if ell == 0 || 2 * ell > k {
        return Err(Error::Precondition(format!("need 0 < ℓ <= k/2, got ℓ = {ell}, k = {k}")));
    }
    let decomposition = interval_decompose(values);
    let intervals = decomposition
        .intervals
        .iter()
        .map(|&i| interval_tilde_bound_check(k, i))
        .collect::<Result<Vec<_>>>()?;
    let tilde = tilde_fibre_boundary(values)?;
    let m_prime = decomposition.count() as f64;
    let (ellf, kf) = (ell as f64, k as f64);
    Ok(FibreBoundCheck {
        k,
        ell,
        m,
        tilde,
        interval_tilde_sum: intervals.iter().map(|c| c.tilde).sum(),
        interval_bound_sum: intervals.iter().map(|c| c.bound).sum(),
        concave_bound: 6.0 * ellf * (kf * m_prime / ellf).log2(),
        bound: 6.0 * ellf * (m as f64 * kf / ellf).log2(),
        intervals,
        decomposition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(k: u32, members: &[u32]) -> Vec<u16> {
        (1..=k).map(|z| members.contains(&z) as u16).collect()
    }

    #[test]
    fn constant_fibres_vanish() {
        for v in HVariant::ALL {
            assert_eq!(h_eval(&[0; 8], v).unwrap(), 0.0);
            assert_eq!(h_eval(&[1; 5], v).unwrap(), 0.0);
        }
    }

    #[test]
    fn h_star_examples() {
        assert_eq!(h_eval(&set(4, &[1, 2]), HVariant::HStar).unwrap(), 0.5);
        let v = h_eval(&set(4, &[1, 3]), HVariant::HStar).unwrap();
        assert!((v - 0.25 * 12f64.log2()).abs() < 1e-12);
        assert!((v - 0.896_240_625_180_289).abs() < 1e-12);
    }

    #[test]
    fn other_variants() {
        let f = set(4, &[1, 3]);
        assert_eq!(h_eval(&f, HVariant::Indicator).unwrap(), 1.0);
        assert_eq!(h_eval(&f, HVariant::LogK).unwrap(), 2.0);
        assert_eq!(h_eval(&f, HVariant::VarianceLog).unwrap(), 0.5);
        assert_eq!(h_eval(&f, HVariant::Entropy).unwrap(), 1.0);
        assert_eq!(h_eval(&f, HVariant::ScaledBoundary).unwrap(), 12.0);
        assert_eq!(h_eval(&f, HVariant::MainBoundary).unwrap(), 3.0);
        assert!(h_eval(&[0, 2, 1], HVariant::HStar).is_err());
    }

    #[test]
    fn h_star_monotone_example() {
        let c = claim42_details(&set(8, &[1, 2, 3, 4])).unwrap();
        assert_eq!(c.h_star, 0.5);
        assert_eq!(c.entropy, Some(1.0));
        assert!(c.holds());
        assert!(claim42_check(&[0; 8]).unwrap());
    }

    #[test]
    fn decomposition_examples() {
        let d = interval_decompose(&set(8, &[1, 2, 5, 6, 7]));
        assert_eq!(d.intervals, vec![Interval::new(1, 2), Interval::new(5, 7)]);
        assert!(d.count_in_range(3));

        let full = interval_decompose(&[1; 6]);
        assert_eq!(full.intervals, vec![Interval::new(1, 6)]);
        assert!(full.count_in_range(0));

        let single = interval_decompose(&set(4, &[2]));
        assert_eq!(single.intervals, vec![Interval::new(2, 2)]);
        assert!(single.count_in_range(2));

        assert!(interval_decompose(&[0; 4]).intervals.is_empty());
    }

    #[test]
    fn interval_bound_examples() {
        let c = interval_tilde_bound_check(4, Interval::new(1, 2)).unwrap();
        assert_eq!((c.tilde, c.bound), (2, 12.0));
        assert!(c.holds());
        for s in 1..=8u32 {
            let k = 1 << s;
            let c = interval_tilde_bound_check(k, Interval::new(1, 1)).unwrap();
            assert_eq!(c.tilde, s as u64);
            assert!(c.holds());
        }
        assert!(interval_tilde_bound_check(6, Interval::new(1, 1)).is_err());
        assert!(interval_tilde_bound_check(8, Interval::new(1, 5)).is_err());
    }

    #[test]
    fn fibre_bound_example() {
        let c = fibre_tilde_bound_check(&set(8, &[1, 3])).unwrap();
        // Boundary edges 1–2, 2–3 and 3–4 of the path.
        assert_eq!((c.ell, c.m), (2, 3));
        assert_eq!(c.tilde, 4);
        assert!((c.bound - 12.0 * 12f64.log2()).abs() < 1e-12);
        assert!(c.holds());
        assert!(fibre_tilde_bound_check(&set(8, &[1, 2, 3, 4, 5])).is_err());
        assert!(fibre_tilde_bound_check(&[0; 8]).is_err());
    }
}
