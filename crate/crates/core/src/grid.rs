// SPDX-License-Identifier: Apache-2.0

//! Functions on the grid `[k]^n` and the torus `Z_k^n`.
//!
//! Points are stored with 0-based coordinates `z ∈ {0, …, k-1}`; the grid
//! element `z + 1 ∈ [k]` and the torus element `z ∈ Z_k` both map to `z`.
//! Tables use the little-endian mixed-radix index
//! `idx(x) = Σ_j x_j · k^j`, so a direction-`j` fibre is the strided slice
//! `start, start + k^j, …, start + (k-1)·k^j`.
//!
//! Boolean tables (`l = 2`) are bit-packed; wider alphabets use `u16`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hfunc::{self, HVariant};

/// Side length `k`, dimension `n` and value alphabet size `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridShape {
    pub k: u32,
    pub n: u32,
    pub l: u32,
}

impl GridShape {
    pub fn new(k: u32, n: u32, l: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidShape(format!("k = {k}, need k >= 2")));
        }
        if n < 1 {
            return Err(Error::InvalidShape("need n >= 1".into()));
        }
        if !(2..=u16::MAX as u32 + 1).contains(&l) {
            return Err(Error::InvalidShape(format!("l = {l}, need 2 <= l <= 65536")));
        }
        let points = (k as usize)
            .checked_pow(n)
            .ok_or_else(|| Error::InvalidShape(format!("{k}^{n} points do not fit in memory")))?;
        if points > isize::MAX as usize / 2 {
            return Err(Error::InvalidShape(format!("{k}^{n} points do not fit in memory")));
        }
        Ok(Self { k, n, l })
    }

    /// Boolean shape (`l = 2`).
    pub fn boolean(k: u32, n: u32) -> Result<Self> {
        Self::new(k, n, 2)
    }

    pub fn points(&self) -> usize {
        (self.k as usize).pow(self.n)
    }

    /// `k^j`, the index step along direction `j` (0-based).
    #[inline]
    pub fn stride(&self, j: usize) -> usize {
        (self.k as usize).pow(j as u32)
    }

    /// Number of fibres per direction, `k^(n-1)`.
    pub fn fibres_per_direction(&self) -> usize {
        (self.k as usize).pow(self.n - 1)
    }

    #[inline]
    pub fn digit(&self, idx: usize, j: usize) -> u32 {
        ((idx / self.stride(j)) % self.k as usize) as u32
    }

    pub fn point(&self, idx: usize) -> Vec<u32> {
        let mut out = vec![0; self.n as usize];
        self.point_into(idx, &mut out);
        out
    }

    pub fn point_into(&self, mut idx: usize, out: &mut [u32]) {
        let k = self.k as usize;
        for c in out.iter_mut() {
            *c = (idx % k) as u32;
            idx /= k;
        }
    }

    pub fn index(&self, point: &[u32]) -> usize {
        debug_assert_eq!(point.len(), self.n as usize);
        point
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.k as usize + c as usize)
    }

    /// Index of the first point of the direction-`j` fibre whose remaining
    /// coordinates are encoded (mixed radix over `[k]^(n-1)`) by `base`.
    #[inline]
    pub fn fibre_start(&self, j: usize, base: usize) -> usize {
        let stride = self.stride(j);
        let low = base % stride;
        let high = base / stride;
        low + high * stride * self.k as usize
    }

    pub fn with_l(&self, l: u32) -> Result<Self> {
        Self::new(self.k, self.n, l)
    }
}

/// Graph on `[k]^n`: the ℓ¹-grid or the torus with wraparound edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Grid,
    Torus,
}

/// Per-point distance used by [`l1_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Absolute,
    Cyclic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Table {
    Bits(Vec<u64>),
    Wide(Vec<u16>),
}

/// Dense value table over `[k]^n` with entries in `{0, …, l-1}`.
///
/// Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridFunction {
    shape: GridShape,
    table: Table,
}

impl GridFunction {
    pub fn from_fn(shape: GridShape, mut value: impl FnMut(usize) -> u16) -> Result<Self> {
        let points = shape.points();
        if shape.l == 2 {
            let mut words = vec![0u64; points.div_ceil(64)];
            for idx in 0..points {
                match value(idx) {
                    0 => {}
                    1 => words[idx >> 6] |= 1 << (idx & 63),
                    v => return Err(Error::ValueOutOfRange { index: idx, value: v, l: 2 }),
                }
            }
            Ok(Self { shape, table: Table::Bits(words) })
        } else {
            let mut values = Vec::with_capacity(points);
            for idx in 0..points {
                let v = value(idx);
                if v as u32 >= shape.l {
                    return Err(Error::ValueOutOfRange { index: idx, value: v, l: shape.l });
                }
                values.push(v);
            }
            Ok(Self { shape, table: Table::Wide(values) })
        }
    }

    pub fn from_values(shape: GridShape, values: &[u16]) -> Result<Self> {
        if values.len() != shape.points() {
            return Err(Error::ShapeMismatch(format!(
                "table has {} entries, shape needs {}",
                values.len(),
                shape.points()
            )));
        }
        Self::from_fn(shape, |i| values[i])
    }

    /// Indicator of the set of points (0-based coordinates) satisfying `member`.
    pub fn indicator(k: u32, n: u32, mut member: impl FnMut(&[u32]) -> bool) -> Result<Self> {
        let shape = GridShape::boolean(k, n)?;
        let mut point = vec![0u32; n as usize];
        Self::from_fn(shape, |idx| {
            shape.point_into(idx, &mut point);
            member(&point) as u16
        })
    }

    pub fn constant(shape: GridShape, value: u16) -> Result<Self> {
        Self::from_fn(shape, |_| value)
    }

    #[inline]
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.shape.points()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, idx: usize) -> u16 {
        match &self.table {
            Table::Bits(w) => ((w[idx >> 6] >> (idx & 63)) & 1) as u16,
            Table::Wide(v) => v[idx],
        }
    }

    pub fn at(&self, point: &[u32]) -> u16 {
        self.get(self.shape.index(point))
    }

    pub fn values(&self) -> impl Iterator<Item = u16> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u16> {
        self.values().collect()
    }

    pub fn is_boolean(&self) -> bool {
        self.shape.l == 2
    }

    pub fn require_boolean(&self) -> Result<()> {
        if self.is_boolean() {
            Ok(())
        } else {
            Err(Error::NotBoolean(self.shape.l))
        }
    }

    /// Number of points with a nonzero value (`|A|` for an indicator).
    pub fn support_size(&self) -> u64 {
        match &self.table {
            Table::Bits(w) => w.iter().map(|x| x.count_ones() as u64).sum(),
            Table::Wide(v) => v.iter().filter(|&&x| x != 0).count() as u64,
        }
    }

    /// Complement of a Boolean table.
    pub fn complement(&self) -> Result<Self> {
        self.require_boolean()?;
        Self::from_fn(self.shape, |i| 1 - self.get(i))
    }

    /// Same table viewed with a different alphabet size.
    pub fn relabel(&self, l: u32) -> Result<Self> {
        let shape = self.shape.with_l(l)?;
        Self::from_fn(shape, |i| self.get(i))
    }

    /// Values along the direction-`j` fibre with base index `base`.
    pub fn fibre_values(&self, j: usize, base: usize) -> Vec<u16> {
        let start = self.shape.fibre_start(j, base);
        let stride = self.shape.stride(j);
        (0..self.shape.k as usize).map(|z| self.get(start + z * stride)).collect()
    }
}

/// `min(|a-b|, modulus-|a-b|)`.
pub fn cyclic_distance(a: u32, b: u32, modulus: u32) -> Result<u32> {
    if a >= modulus || b >= modulus {
        return Err(Error::OutOfRange(format!("({a}, {b}) not below modulus {modulus}")));
    }
    Ok(cyclic_distance_unchecked(a, b, modulus))
}

#[inline]
pub(crate) fn cyclic_distance_unchecked(a: u32, b: u32, modulus: u32) -> u32 {
    let d = a.abs_diff(b);
    d.min(modulus - d)
}

#[inline]
pub(crate) fn point_distance(a: u16, b: u16, metric: Metric, modulus: u32) -> u64 {
    match metric {
        Metric::Absolute => a.abs_diff(b) as u64,
        Metric::Cyclic => cyclic_distance_unchecked(a as u32, b as u32, modulus) as u64,
    }
}

/// Normalised ℓ¹ distance kept as an exact fraction `numerator / points`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct L1Distance {
    pub numerator: u64,
    pub points: u64,
}

impl L1Distance {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.points as f64
    }

    /// Exact test of `numerator / points <= eps`.
    pub fn within(&self, eps: f64) -> bool {
        // `points` is a power of k below 2^53, so this product is exact
        // up to the rounding of eps itself.
        (self.numerator as f64) <= eps * self.points as f64
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }
}

/// `(1/k^n) Σ_x d(f(x), g(x))` with `d` absolute or cyclic (mod `l`).
pub fn l1_distance(f: &GridFunction, g: &GridFunction, metric: Metric) -> Result<L1Distance> {
    let (sf, sg) = (f.shape(), g.shape());
    if sf.k != sg.k || sf.n != sg.n {
        return Err(Error::ShapeMismatch(format!(
            "[{}]^{} vs [{}]^{}",
            sf.k, sf.n, sg.k, sg.n
        )));
    }
    if metric == Metric::Cyclic && sf.l != sg.l {
        return Err(Error::ShapeMismatch(format!(
            "cyclic metric needs a common modulus, got {} and {}",
            sf.l, sg.l
        )));
    }
    let numerator = (0..f.len())
        .map(|i| point_distance(f.get(i), g.get(i), metric, sf.l))
        .sum();
    Ok(L1Distance { numerator, points: f.len() as u64 })
}

/// Edge boundary of a Boolean table in the grid or torus, optionally
/// restricted to one direction `j` (0-based).
pub fn edge_boundary(f: &GridFunction, mode: Mode, direction: Option<usize>) -> Result<u64> {
    f.require_boolean()?;
    let n = f.shape().n as usize;
    match direction {
        Some(j) if j >= n => Err(Error::OutOfRange(format!("direction {j} with n = {n}"))),
        Some(j) => Ok(directional_boundary(f, mode, j)),
        None => Ok((0..n).map(|j| directional_boundary(f, mode, j)).sum()),
    }
}

fn directional_boundary(f: &GridFunction, mode: Mode, j: usize) -> u64 {
    let shape = f.shape();
    let k = shape.k as usize;
    let stride = shape.stride(j);
    // For k = 2 the wraparound pair coincides with the grid edge.
    let wrap = mode == Mode::Torus && k >= 3;
    let mut count = 0u64;
    for base in 0..shape.fibres_per_direction() {
        let start = shape.fibre_start(j, base);
        let mut prev = f.get(start);
        let first = prev;
        for z in 1..k {
            let cur = f.get(start + z * stride);
            count += (cur != prev) as u64;
            prev = cur;
        }
        if wrap {
            count += (prev != first) as u64;
        }
    }
    count
}

/// Boundary counts per direction.
pub fn boundary_by_direction(f: &GridFunction, mode: Mode) -> Result<Vec<u64>> {
    f.require_boolean()?;
    Ok((0..f.shape().n as usize).map(|j| directional_boundary(f, mode, j)).collect())
}

/// `|∂A| == |∂(A^c)|` in both grid and torus.
pub fn complement_boundary_check(f: &GridFunction) -> Result<bool> {
    let c = f.complement()?;
    Ok(edge_boundary(f, Mode::Grid, None)? == edge_boundary(&c, Mode::Grid, None)?
        && edge_boundary(f, Mode::Torus, None)? == edge_boundary(&c, Mode::Torus, None)?)
}

/// Lower bound on `|∂A|` for `|A| = t` in `[k]^n`.
///
/// Each term `T_r = t^(1-1/r) · r · k^(n/r - 1)` satisfies
/// `T_r^r = t^(r-1) · r^r · k^(n-r)`, an integer, so both the comparison
/// `b >= min_r T_r` and integrality of a term are decided exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoBound {
    /// Set size the bound is evaluated at (after complementation).
    pub effective_size: u64,
    pub k: u32,
    pub n: u32,
    /// Floating value of `min_r T_r`.
    pub value: f64,
    /// Minimising `r` (1-based).
    pub argmin_r: u32,
    /// `Some(v)` when the minimising term is exactly the integer `v`.
    pub exact: Option<u64>,
}

impl IsoBound {
    /// `boundary >= min_r T_r`, decided in integer arithmetic.
    pub fn admits(&self, boundary: u64) -> bool {
        if self.effective_size == 0 {
            return true;
        }
        (1..=self.n).any(|r| {
            let lhs = BigUint::from(boundary).pow(r);
            lhs >= iso_term_power(self.effective_size, self.k, self.n, r)
        })
    }

    /// Exact value of the `r` term when it is an integer.
    pub fn term_exact(&self, r: u32) -> Option<u64> {
        iso_term_exact(self.effective_size, self.k, self.n, r)
    }
}

fn iso_term_power(t: u64, k: u32, n: u32, r: u32) -> BigUint {
    BigUint::from(t).pow(r - 1) * BigUint::from(r).pow(r) * BigUint::from(k).pow(n - r)
}

fn iso_term_exact(t: u64, k: u32, n: u32, r: u32) -> Option<u64> {
    if t == 0 {
        return Some(0);
    }
    let x = iso_term_power(t, k, n, r);
    let root = x.nth_root(r);
    (root.pow(r) == x).then(|| root.to_u64()).flatten()
}

fn iso_term_f64(t: u64, k: u32, n: u32, r: u32) -> f64 {
    let (t, k, n, r) = (t as f64, k as f64, n as f64, r as f64);
    (t.ln() * (1.0 - 1.0 / r) + r.ln() + k.ln() * (n / r - 1.0)).exp()
}

/// Bollobás–Leader edge-isoperimetric lower bound for a set of size `t`.
///
/// Sizes above `k^n / 2` are replaced by `k^n - t`; `t ∈ {0, k^n}` gives 0.
pub fn bollobas_leader_bound(t: u64, k: u32, n: u32) -> Result<IsoBound> {
    let total = BigUint::from(k).pow(n);
    if BigUint::from(t) > total {
        return Err(Error::OutOfRange(format!("set size {t} exceeds {k}^{n}")));
    }
    let total = total.to_u64().ok_or_else(|| Error::OutOfRange(format!("{k}^{n} overflows")))?;
    let eff = if 2 * t > total { total - t } else { t };
    if eff == 0 {
        return Ok(IsoBound { effective_size: 0, k, n, value: 0.0, argmin_r: 1, exact: Some(0) });
    }
    let mut best_r = 1;
    let mut best = f64::INFINITY;
    for r in 1..=n {
        let v = iso_term_exact(eff, k, n, r).map_or_else(|| iso_term_f64(eff, k, n, r), |e| e as f64);
        // Strict improvement only: ties keep the smaller r.
        if v < best * (1.0 - 1e-12) {
            best = v;
            best_r = r;
        }
    }
    Ok(IsoBound {
        effective_size: eff,
        k,
        n,
        value: best,
        argmin_r: best_r,
        exact: iso_term_exact(eff, k, n, best_r),
    })
}

/// Summary of a Boolean function restricted to one fibre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibreStats {
    pub k: u32,
    /// `ℓ = |A ∩ a_j^x|`.
    pub ell: u32,
    /// `m = |∂(A ∩ a_j^x)|` in the path `G_{k,1}`.
    pub m: u32,
    /// `ν = (ℓ/k)(1 - ℓ/k)`.
    pub var: f64,
    /// Every h-functional, indexed as [`HVariant::ALL`].
    pub h: [f64; 7],
}

impl FibreStats {
    pub fn from_counts(k: u32, ell: u32, m: u32) -> Self {
        let h = HVariant::ALL.map(|v| hfunc::h_from_counts(k, ell, m, v));
        Self { k, ell, m, var: hfunc::variance(k, ell), h }
    }

    pub fn from_values(values: &[u16]) -> Self {
        let (ell, m) = hfunc::ell_and_boundary(values);
        Self::from_counts(values.len() as u32, ell, m)
    }

    pub fn h(&self, variant: HVariant) -> f64 {
        self.h[variant.position()]
    }
}

/// One fibre of a function, with its base point and direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreView {
    /// Base point in `[k]^(n-1)` (0-based coordinates, direction removed).
    pub base: Vec<u32>,
    /// Direction (0-based).
    pub direction: usize,
    /// `F(z)` for `z = 0..k`.
    pub values: Vec<u16>,
}

/// The direction-`j` fibre through the base point `base ∈ [k]^(n-1)`.
pub fn fibre(f: &GridFunction, j: usize, base: &[u32]) -> Result<FibreView> {
    let shape = f.shape();
    let n = shape.n as usize;
    if j >= n {
        return Err(Error::OutOfRange(format!("direction {j} with n = {n}")));
    }
    if base.len() != n - 1 || base.iter().any(|&c| c >= shape.k) {
        return Err(Error::OutOfRange(format!("base {base:?} is not a point of [{}]^{}", shape.k, n - 1)));
    }
    let base_idx = base
        .iter()
        .rev()
        .fold(0usize, |acc, &c| acc * shape.k as usize + c as usize);
    Ok(FibreView { base: base.to_vec(), direction: j, values: f.fibre_values(j, base_idx) })
}

pub fn fibre_stats(f: &GridFunction, j: usize, base: &[u32]) -> Result<FibreStats> {
    f.require_boolean()?;
    Ok(FibreStats::from_values(&fibre(f, j, base)?.values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slab_2x4() -> GridFunction {
        // A = [2] × [4] in [4]^2.
        GridFunction::indicator(4, 2, |x| x[0] < 2).unwrap()
    }

    #[test]
    fn shape_validation() {
        assert!(GridShape::new(1, 2, 2).is_err());
        assert!(GridShape::new(2, 0, 2).is_err());
        assert!(GridShape::new(2, 2, 1).is_err());
        assert!(GridShape::new(2, 200, 2).is_err());
        assert_eq!(GridShape::new(3, 4, 2).unwrap().points(), 81);
    }

    #[test]
    fn index_roundtrip_is_little_endian() {
        let s = GridShape::new(3, 3, 2).unwrap();
        assert_eq!(s.index(&[1, 0, 0]), 1);
        assert_eq!(s.index(&[0, 1, 0]), 3);
        assert_eq!(s.index(&[0, 0, 1]), 9);
        for i in 0..s.points() {
            assert_eq!(s.index(&s.point(i)), i);
        }
    }

    #[test]
    fn slab_boundaries() {
        let a = slab_2x4();
        assert_eq!(edge_boundary(&a, Mode::Grid, None).unwrap(), 4);
        assert_eq!(edge_boundary(&a, Mode::Torus, None).unwrap(), 8);
        assert_eq!(edge_boundary(&a, Mode::Grid, Some(1)).unwrap(), 0);
        assert!(complement_boundary_check(&a).unwrap());
    }

    #[test]
    fn trivial_sets_have_no_boundary() {
        for v in [0u16, 1] {
            let f = GridFunction::constant(GridShape::boolean(3, 3).unwrap(), v).unwrap();
            assert_eq!(edge_boundary(&f, Mode::Grid, None).unwrap(), 0);
            assert_eq!(edge_boundary(&f, Mode::Torus, None).unwrap(), 0);
            assert!(complement_boundary_check(&f).unwrap());
        }
    }

    #[test]
    fn boundary_rejects_wide_tables() {
        let f = GridFunction::constant(GridShape::new(3, 2, 3).unwrap(), 2).unwrap();
        assert!(matches!(edge_boundary(&f, Mode::Grid, None), Err(Error::NotBoolean(3))));
    }

    #[test]
    fn torus_equals_grid_for_k2() {
        let f = GridFunction::indicator(2, 3, |x| x[0] == 1 || x[2] == 0).unwrap();
        assert_eq!(
            edge_boundary(&f, Mode::Grid, None).unwrap(),
            edge_boundary(&f, Mode::Torus, None).unwrap()
        );
    }

    #[test]
    fn bl_bound_examples() {
        let b = bollobas_leader_bound(8, 4, 2).unwrap();
        assert_eq!(b.exact, Some(4));
        assert_eq!(b.argmin_r, 1);
        assert!((iso_term_f64(8, 4, 2, 2) - 2.0 * 8f64.sqrt()).abs() < 1e-12);
        assert!(b.admits(4) && !b.admits(3));

        let half = bollobas_leader_bound(32, 4, 3).unwrap();
        assert_eq!(half.exact, Some(16));
        assert_eq!(bollobas_leader_bound(0, 4, 3).unwrap().value, 0.0);
        assert_eq!(bollobas_leader_bound(64, 4, 3).unwrap().value, 0.0);
        assert!(bollobas_leader_bound(65, 4, 3).is_err());
        // complement: 48 → 16
        assert_eq!(bollobas_leader_bound(48, 4, 3).unwrap().effective_size, 16);
    }

    #[test]
    fn bl_irrational_term_is_compared_exactly() {
        // t = 2, k = 5, n = 2: T_1 = 5, T_2 = 2·sqrt(2) ≈ 2.83.
        let b = bollobas_leader_bound(2, 5, 2).unwrap();
        assert_eq!(b.argmin_r, 2);
        assert_eq!(b.exact, None);
        assert!(b.admits(3));
        assert!(!b.admits(2));
    }

    #[test]
    fn cyclic_distance_examples() {
        assert_eq!(cyclic_distance(0, 5, 6).unwrap(), 1);
        assert_eq!(cyclic_distance(3, 3, 6).unwrap(), 0);
        assert_eq!(cyclic_distance(1, 4, 6).unwrap(), 3);
        assert!(cyclic_distance(6, 0, 6).is_err());
    }

    #[test]
    fn l1_distance_examples() {
        let s = GridShape::new(3, 2, 5).unwrap();
        let zero = GridFunction::constant(s, 0).unwrap();
        let top = GridFunction::constant(s, 4).unwrap();
        assert!(l1_distance(&zero, &zero, Metric::Absolute).unwrap().is_zero());
        assert_eq!(l1_distance(&zero, &top, Metric::Cyclic).unwrap().value(), 1.0);
        assert_eq!(l1_distance(&zero, &top, Metric::Absolute).unwrap().value(), 4.0);

        let a = slab_2x4();
        let b = GridFunction::indicator(4, 2, |x| x[1] < 2).unwrap();
        // |A Δ B| = 8 of 16
        assert_eq!(l1_distance(&a, &b, Metric::Absolute).unwrap().numerator, 8);

        let other = GridFunction::constant(GridShape::new(4, 2, 2).unwrap(), 0).unwrap();
        assert!(l1_distance(&zero, &other, Metric::Absolute).is_err());
    }

    #[test]
    fn fibre_examples() {
        // F = 1_{1,2} and 1_{1,3} in [4]
        let f = GridFunction::indicator(4, 2, |x| x[0] < 2).unwrap();
        let st = fibre_stats(&f, 0, &[2]).unwrap();
        assert_eq!((st.ell, st.m), (2, 1));
        assert_eq!(st.var, 0.25);

        let g = GridFunction::indicator(4, 1, |x| x[0] == 0 || x[0] == 2).unwrap();
        let st = fibre_stats(&g, 0, &[]).unwrap();
        assert_eq!((st.ell, st.m), (2, 3));
        assert_eq!(st.var, 0.25);

        let c = GridFunction::constant(GridShape::boolean(4, 2).unwrap(), 1).unwrap();
        let st = fibre_stats(&c, 1, &[0]).unwrap();
        assert_eq!((st.ell, st.m, st.var), (4, 0, 0.0));

        let view = fibre(&f, 1, &[1]).unwrap();
        assert_eq!(view.values, vec![1, 1, 1, 1]);
        assert!(fibre(&f, 2, &[0]).is_err());
    }

    #[test]
    fn bit_packed_and_wide_agree() {
        let vals: Vec<u16> = (0..27).map(|i| ((i * 7 + 3) % 5 < 2) as u16).collect();
        let b = GridFunction::from_values(GridShape::new(3, 3, 2).unwrap(), &vals).unwrap();
        let w = b.relabel(3).unwrap();
        assert_eq!(b.to_vec(), w.to_vec());
        assert_eq!(b.support_size(), w.support_size());
    }
}
