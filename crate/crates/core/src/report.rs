// SPDX-License-Identifier: Apache-2.0

//! Bound reports and the constants they are computed with.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::numeric::safe_le;

/// Cube junta constant, `2 + sqrt(3 ln 2)`.
pub fn c0() -> f64 {
    2.0 + (3.0 * std::f64::consts::LN_2).sqrt()
}

/// Grid junta constant, `16 + 8 sqrt(3 ln 2) = 8 C0`.
pub fn c1() -> f64 {
    16.0 + 8.0 * (3.0 * std::f64::consts::LN_2).sqrt()
}

/// Torus Lipschitz constant, `4 C1`.
pub fn c2() -> f64 {
    4.0 * c1()
}

/// Grid Lipschitz constant, `2 C1`.
pub fn c3() -> f64 {
    2.0 * c1()
}

/// Refined-cost constant. `24 C0` when `k` is a power of two; otherwise
/// `2 · (9/2) · 24 C0`, accounting for the halved accuracy on the
/// embedded grid and the factor lost when lifting `h*` averages.
pub fn c4(k_is_power_of_two: bool) -> f64 {
    if k_is_power_of_two {
        24.0 * c0()
    } else {
        2.0 * 4.5 * 24.0 * c0()
    }
}

/// A measured quantity next to the theoretical bound it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub label: String,
    pub measured: f64,
    pub bound: f64,
    /// Constants that entered `bound`, by name.
    pub constants: BTreeMap<String, f64>,
    /// Formula that produced `bound`.
    pub formula: String,
    /// `measured / bound` when `bound > 0`.
    pub ratio: Option<f64>,
}

impl BoundReport {
    pub fn new(
        label: impl Into<String>,
        measured: f64,
        bound: f64,
        formula: impl Into<String>,
        constants: &[(&str, f64)],
    ) -> Self {
        Self {
            label: label.into(),
            measured,
            bound,
            constants: constants.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            formula: formula.into(),
            ratio: (bound > 0.0).then(|| measured / bound),
        }
    }

    /// `measured <= bound` (tightened float comparison).
    pub fn holds(&self) -> bool {
        self.bound.is_infinite() && self.measured.is_finite() || safe_le(self.measured, self.bound)
    }
}

/// Resource caps. Operations that would exceed one refuse with
/// [`crate::Error::BudgetExceeded`] instead of truncating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest table (in points) an operation may materialise.
    pub max_points: usize,
    /// Largest number of coordinate subsets an exhaustive junta search may try.
    pub max_subsets: u64,
    /// Largest number of slices an exhaustive merge scan may visit.
    pub max_slices: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_points: 1 << 24, max_subsets: 1 << 20, max_slices: 1 << 20 }
    }
}

impl Budget {
    /// Default budget with `max_points` taken from `GRIDJUNTA_BUDGET` when set.
    pub fn from_env() -> Self {
        let mut b = Self::default();
        if let Some(p) = std::env::var("GRIDJUNTA_BUDGET").ok().and_then(|s| s.trim().parse().ok()) {
            b.max_points = p;
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((c1() - 8.0 * c0()).abs() < 1e-12);
        assert!((c0() - 3.442_026_886_6).abs() < 1e-9);
        assert_eq!(c4(false), 9.0 * c4(true));
    }

    #[test]
    fn ratio_and_holds() {
        let r = BoundReport::new("x", 2.0, 4.0, "f", &[("C0", c0())]);
        assert_eq!(r.ratio, Some(0.5));
        assert!(r.holds());
        let r = BoundReport::new("x", 5.0, f64::INFINITY, "f", &[]);
        assert_eq!(r.ratio, Some(0.0));
        assert!(r.holds());
        let r = BoundReport::new("x", 0.0, 0.0, "f", &[]);
        assert_eq!(r.ratio, None);
        assert!(r.holds());
    }
}
