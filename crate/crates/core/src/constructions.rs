// SPDX-License-Identifier: Apache-2.0

//! Generators for extremal and test sets, and for test maps.
//!
//! Randomised generators use `ChaCha8Rng::seed_from_u64(seed)` from
//! `rand_chacha`, so tables are byte-identical across platforms.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{bollobas_leader_bound, edge_boundary, GridFunction, GridShape, IsoBound, Mode};
use crate::lipschitz::TorusMap;
use crate::report::Budget;

fn check_points(k: u32, n: u32, budget: &Budget, what: &'static str) -> Result<()> {
    let needed = (k as u128).checked_pow(n).unwrap_or(u128::MAX);
    if needed > budget.max_points as u128 {
        return Err(Error::BudgetExceeded { what, needed, budget: budget.max_points as u128 });
    }
    Ok(())
}

/// Parameters of the tribes set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TribesSpec {
    pub k: u32,
    pub s: u32,
    pub t: u32,
    /// `1 + s + t 2^t`.
    pub n: u32,
    /// `2^(-s) / 6`.
    pub eps: f64,
    /// `1 + 6 ε t / e`.
    pub big_l: f64,
    /// Tribes as 0-based coordinate lists.
    pub tribes: Vec<Vec<usize>>,
}

impl TribesSpec {
    pub fn new(k: u32, s: u32, t: u32) -> Result<Self> {
        if k < 2 || k % 2 != 0 {
            return Err(Error::Precondition(format!("tribes need even k, got {k}")));
        }
        if s < 1 || t < 1 || t > 16 {
            return Err(Error::Precondition(format!("need s, t >= 1 (and t <= 16), got s = {s}, t = {t}")));
        }
        let count = 1usize << t;
        let n = 1 + s + t * count as u32;
        let eps = 0.5f64.powi(s as i32) / 6.0;
        let tribes = (0..count)
            .map(|i| (0..t as usize).map(|a| 1 + s as usize + i * t as usize + a).collect())
            .collect();
        Ok(Self { k, s, t, n, eps, big_l: 1.0 + 6.0 * eps * t as f64 / std::f64::consts::E, tribes })
    }

    /// `½ (1 - 2^(-s) (1 - 2^(-t))^(2^t))`.
    pub fn measure(&self) -> BigRational {
        let two = BigInt::from(2);
        let half = BigRational::new(BigInt::one(), two.clone());
        let inner = (BigRational::one() - BigRational::new(BigInt::one(), two.pow(self.t))).pow(1i32 << self.t);
        half.clone() * (BigRational::one() - BigRational::new(BigInt::one(), two.pow(self.s)) * inner)
    }

    /// `ε = 2^(-s)/6` exactly.
    pub fn eps_exact(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(6) * BigInt::from(2).pow(self.s))
    }

    /// `½ - 3ε < measure < ½`, exactly.
    pub fn window_holds(&self) -> bool {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let m = self.measure();
        half.clone() - BigRational::from_integer(BigInt::from(3)) * self.eps_exact() < m && m < half
    }
}

/// `A = {x_1 <= k/2} ∩ ({x_j <= k/2 for some j ∈ 2..=s+1} ∪ {some tribe
/// entirely <= k/2})`.
pub fn tribes_grid(k: u32, s: u32, t: u32, budget: &Budget) -> Result<(GridFunction, TribesSpec)> {
    let spec = TribesSpec::new(k, s, t)?;
    check_points(k, spec.n, budget, "tribes table")?;
    let low = |v: u32| v < k / 2;
    let f = GridFunction::indicator(k, spec.n, |x| {
        low(x[0])
            && (x[1..=s as usize].iter().any(|&v| low(v))
                || spec.tribes.iter().any(|tr| tr.iter().all(|&j| low(x[j]))))
    })?;
    Ok((f, spec))
}

/// A complete `k`-ary tree of depth `d` whose internal nodes are labelled
/// by coordinates in breadth-first order, with a random balanced leaf
/// valuation under every leaf-parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTreeSpec {
    pub k: u32,
    pub d: u32,
    /// `Σ_{s<d} k^s` internal nodes, one coordinate each.
    pub n: u32,
    pub seed: u64,
    /// `S(v)` per leaf-parent, in breadth-first order: the 0-based edge
    /// values leading to leaves valued 1.
    pub subsets: Vec<Vec<u32>>,
}

impl DecisionTreeSpec {
    pub fn new(k: u32, d: u32, seed: u64) -> Result<Self> {
        if k < 2 || k % 2 != 0 {
            return Err(Error::Precondition(format!("decision trees need even k, got {k}")));
        }
        if d < 1 {
            return Err(Error::Precondition("depth must be at least 1".into()));
        }
        let n: u64 = (0..d).map(|s| (k as u64).pow(s)).sum();
        let n = u32::try_from(n).map_err(|_| Error::OutOfRange(format!("tree with {n} nodes")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let subsets = (0..(k as usize).pow(d - 1))
            .map(|_| {
                let mut s: Vec<u32> = sample(&mut rng, k as usize, k as usize / 2).into_iter().map(|v| v as u32).collect();
                s.sort_unstable();
                s
            })
            .collect();
        Ok(Self { k, d, n, seed, subsets })
    }

    /// Coordinate (0-based) labelling the node at depth `s`, position `p`.
    pub fn label(&self, s: u32, p: usize) -> usize {
        (0..s).map(|r| (self.k as usize).pow(r)).sum::<usize>() + p
    }

    /// Coordinates labelling leaf-parents, in breadth-first order.
    pub fn leaf_parent_labels(&self) -> Vec<usize> {
        (0..self.subsets.len()).map(|p| self.label(self.d - 1, p)).collect()
    }

    /// Follows the path of `x` (0-based values) to a leaf.
    pub fn eval(&self, x: &[u32]) -> bool {
        let mut p = 0usize;
        for s in 0..self.d - 1 {
            p = p * self.k as usize + x[self.label(s, p)] as usize;
        }
        self.subsets[p].contains(&x[self.label(self.d - 1, p)])
    }
}

pub fn decision_tree_function(k: u32, d: u32, seed: u64, budget: &Budget) -> Result<(GridFunction, DecisionTreeSpec)> {
    let spec = DecisionTreeSpec::new(k, d, seed)?;
    check_points(k, spec.n, budget, "decision tree table")?;
    let f = GridFunction::indicator(k, spec.n, |x| spec.eval(x))?;
    Ok((f, spec))
}

/// `[a]^s × [k]^(n-s)`.
pub fn cuboid(a: u32, s: u32, k: u32, n: u32) -> Result<GridFunction> {
    if a < 1 || a >= k || s < 1 || s > n {
        return Err(Error::Precondition(format!("cuboid needs 1 <= a <= k-1 and 1 <= s <= n, got a = {a}, s = {s}, k = {k}, n = {n}")));
    }
    GridFunction::indicator(k, n, |x| x[..s as usize].iter().all(|&v| v < a))
}

/// `s a^(s-1) k^(n-s)`.
pub fn cuboid_boundary(a: u32, s: u32, k: u32, n: u32) -> u64 {
    s as u64 * (a as u64).pow(s - 1) * (k as u64).pow(n - s)
}

/// How a cuboid compares with the edge-isoperimetric bound at its size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuboidSharpness {
    pub a: u32,
    pub s: u32,
    pub k: u32,
    pub n: u32,
    pub size: u64,
    /// Enumerated `|∂A|`.
    pub boundary: u64,
    /// `s a^(s-1) k^(n-s)`.
    pub formula: u64,
    /// `|∂A| = |A|^(1-1/s) s k^(n/s-1)`, decided as `|∂A|^s = |A|^(s-1) s^s k^(n-s)`.
    pub attains_term: bool,
    /// The minimum over all `r` (after complementation) equals `|∂A|`.
    pub attains_min: bool,
    pub iso: IsoBound,
}

pub fn cuboid_sharpness(a: u32, s: u32, k: u32, n: u32) -> Result<CuboidSharpness> {
    let f = cuboid(a, s, k, n)?;
    let size = f.support_size();
    let boundary = edge_boundary(&f, Mode::Grid, None)?;
    let term = BigUint::from(size).pow(s - 1) * BigUint::from(s).pow(s) * BigUint::from(k).pow(n - s);
    let iso = bollobas_leader_bound(size, k, n)?;
    Ok(CuboidSharpness {
        a,
        s,
        k,
        n,
        size,
        boundary,
        formula: cuboid_boundary(a, s, k, n),
        attains_term: BigUint::from(boundary).pow(s) == term,
        attains_min: iso.exact == Some(boundary),
        iso,
    })
}

/// Independent Bernoulli(`p`) membership, one draw per point in index order.
pub fn random_set(k: u32, n: u32, p: f64, seed: u64) -> Result<GridFunction> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Precondition(format!("p = {p} is not a probability")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::from_fn(GridShape::boolean(k, n)?, |_| (rng.gen::<f64>() < p) as u16)
}

/// Parity of the coordinate sum (1-based coordinates).
pub fn parity_set(k: u32, n: u32) -> Result<GridFunction> {
    GridFunction::indicator(k, n, |x| (x.iter().map(|&v| v as u64).sum::<u64>() + n as u64) % 2 == 1)
}

/// `f_i(x) = x_i` on `Z_k^n → Z_k^n`.
pub fn identity_map(k: u32, n: u32) -> Result<TorusMap> {
    dictator_tuple_map(k, n, k, &(0..n as usize).collect::<Vec<_>>())
}

/// `f_i(x) = ⌊x_{picks[i]} · l / k⌋` (0-based values).
pub fn dictator_tuple_map(k: u32, n: u32, l: u32, picks: &[usize]) -> Result<TorusMap> {
    let shape = GridShape::new(k, n, l)?;
    if let Some(&j) = picks.iter().find(|&&j| j >= n as usize) {
        return Err(Error::OutOfRange(format!("coordinate {j} with n = {n}")));
    }
    TorusMap::new(
        picks
            .iter()
            .map(|&j| GridFunction::from_fn(shape, |i| (shape.digit(i, j) * l / k) as u16))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Independent uniform values, component by component.
pub fn random_map(k: u32, n: u32, l: u32, m: usize, seed: u64) -> Result<TorusMap> {
    let shape = GridShape::new(k, n, l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TorusMap::new(
        (0..m)
            .map(|_| GridFunction::from_fn(shape, |_| rng.gen_range(0..l) as u16))
            .collect::<Result<Vec<_>>>()?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tribes_small() {
        let (f, spec) = tribes_grid(4, 1, 1, &Budget::default()).unwrap();
        assert_eq!(spec.n, 4);
        assert_eq!(spec.tribes, vec![vec![2], vec![3]]);
        assert_eq!(spec.measure(), BigRational::new(7.into(), 16.into()));
        assert_eq!(spec.eps_exact(), BigRational::new(1.into(), 12.into()));
        assert!(spec.window_holds());
        assert_eq!(f.support_size(), 7 * 256 / 16);
        assert!(tribes_grid(3, 1, 1, &Budget::default()).is_err());
        let tiny = Budget { max_points: 100, ..Budget::default() };
        assert!(matches!(tribes_grid(4, 1, 1, &tiny), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn tree_is_balanced_under_leaf_parents() {
        let (f, spec) = decision_tree_function(4, 2, 7, &Budget::default()).unwrap();
        assert_eq!(spec.n, 5);
        assert_eq!(spec.leaf_parent_labels(), vec![1, 2, 3, 4]);
        let shape = f.shape();
        for (p, &j) in spec.leaf_parent_labels().iter().enumerate() {
            for base in 0..shape.fibres_per_direction() {
                let start = shape.fibre_start(j, base);
                // Only fibres whose path reaches this leaf-parent.
                if shape.digit(start, 0) as usize != p {
                    continue;
                }
                let ones: u16 = f.fibre_values(j, base).iter().sum();
                assert_eq!(ones, 2);
            }
        }
        let (g, _) = decision_tree_function(4, 2, 7, &Budget::default()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn cuboid_examples() {
        let c = cuboid(2, 2, 4, 3).unwrap();
        assert_eq!(c.support_size(), 16);
        assert_eq!(edge_boundary(&c, Mode::Grid, None).unwrap(), 16);
        assert_eq!(cuboid_boundary(2, 2, 4, 3), 16);
        let slab = cuboid(2, 1, 4, 3).unwrap();
        assert_eq!(edge_boundary(&slab, Mode::Grid, None).unwrap(), 16);
        let big = cuboid(3, 3, 4, 3).unwrap();
        assert_eq!(edge_boundary(&big, Mode::Grid, None).unwrap(), 3 * 9);
        assert!(cuboid(4, 1, 4, 3).is_err());
        assert!(cuboid(1, 4, 4, 3).is_err());
    }

    #[test]
    fn cuboid_term_versus_minimum() {
        let c = cuboid_sharpness(2, 2, 4, 3).unwrap();
        assert!(c.attains_term && c.attains_min);
        assert_eq!((c.size, c.boundary, c.formula), (16, 16, 16));
        // Two thin directions: the r = 3 term (about 7.56) undercuts |∂A| = 8.
        let c = cuboid_sharpness(1, 2, 4, 3).unwrap();
        assert!(c.attains_term && !c.attains_min);
        assert_eq!(c.boundary, 8);
        assert!(c.iso.value < 7.6);
        for a in 1..4 {
            for s in 1..=3 {
                assert!(cuboid_sharpness(a, s, 4, 3).unwrap().attains_term, "a = {a}, s = {s}");
            }
        }
    }

    #[test]
    fn random_and_parity() {
        assert_eq!(random_set(3, 3, 0.0, 1).unwrap().support_size(), 0);
        assert_eq!(random_set(3, 3, 1.0, 1).unwrap().support_size(), 27);
        assert_eq!(random_set(3, 3, 0.5, 9).unwrap(), random_set(3, 3, 0.5, 9).unwrap());
        let p = parity_set(5, 1).unwrap();
        assert_eq!(edge_boundary(&p, Mode::Grid, None).unwrap(), 4);
        assert_eq!(p.to_vec(), vec![1, 0, 1, 0, 1]);
    }

    #[test]
    fn maps() {
        let id = identity_map(6, 2).unwrap();
        assert_eq!(id.m(), 2);
        assert_eq!(id.component(1).get(6 * 4 + 1), 4);
        let d = dictator_tuple_map(4, 2, 3, &[1, 0]).unwrap();
        assert_eq!(d.component(0).to_vec()[12..16], [2, 2, 2, 2]);
        let r = random_map(4, 2, 3, 2, 5).unwrap();
        assert_eq!(r, random_map(4, 2, 3, 2, 5).unwrap());
    }
}
