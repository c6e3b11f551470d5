// SPDX-License-Identifier: Apache-2.0

//! Boolean functions on `{0,1}^N`, influences and junta extraction.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridShape};
use crate::junta::{plurality_junta, plurality_mismatch, Junta};
use crate::numeric::Q;
use crate::report::{c0, BoundReport};

/// A Boolean function on `{0,1}^N`; bit `i` of the index is `x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeFunction {
    grid: GridFunction,
}

impl CubeFunction {
    pub fn new(dim: u32, mut value: impl FnMut(usize) -> bool) -> Result<Self> {
        let shape = GridShape::boolean(2, dim)?;
        Ok(Self { grid: GridFunction::from_fn(shape, |i| value(i) as u16)? })
    }

    /// Views a Boolean table on `[2]^N` as a cube function.
    pub fn from_grid(grid: GridFunction) -> Result<Self> {
        grid.require_boolean()?;
        if grid.shape().k != 2 {
            return Err(Error::InvalidShape(format!("cube functions need k = 2, got {}", grid.shape().k)));
        }
        Ok(Self { grid })
    }

    pub fn dim(&self) -> u32 {
        self.grid.shape().n
    }

    pub fn get(&self, idx: usize) -> bool {
        self.grid.get(idx) == 1
    }

    pub fn as_grid(&self) -> &GridFunction {
        &self.grid
    }

    pub fn into_grid(self) -> GridFunction {
        self.grid
    }

    /// `#{x : f(x) != f(x ⊕ e_i)}` (0-based `i`).
    pub fn influence_count(&self, i: usize) -> Result<u64> {
        if i >= self.dim() as usize {
            return Err(Error::OutOfRange(format!("coordinate {i} with N = {}", self.dim())));
        }
        let bit = 1usize << i;
        let pairs = (0..self.grid.len())
            .filter(|&x| x & bit == 0 && self.grid.get(x) != self.grid.get(x | bit))
            .count() as u64;
        Ok(2 * pairs)
    }

    pub fn influence_counts(&self) -> Vec<u64> {
        (0..self.dim() as usize).map(|i| self.influence_count(i).unwrap()).collect()
    }

    /// `Inf_i(f)` as the exact fraction `count / 2^N`.
    pub fn influence(&self, i: usize) -> Result<Q> {
        Ok(Q::new(self.influence_count(i)? as i128, self.grid.len() as i128))
    }

    pub fn total_influence(&self) -> Q {
        let sum: u64 = self.influence_counts().iter().sum();
        Q::new(sum as i128, self.grid.len() as i128)
    }
}

/// Influence-threshold junta extraction.
///
/// Tries `J = ∅`, then `J(τ) = {i : Inf_i >= τ}` for each distinct
/// positive influence `τ` in decreasing order, and returns the plurality
/// junta of the first `J(τ)` within `eps`. The last candidate contains
/// every coordinate `f` depends on, so the search always succeeds.
///
/// The report compares `|J|` with `exp(C0 · Inf(f) / eps)`.
pub fn cube_junta_extract(f: &CubeFunction, eps: f64) -> Result<(Junta, BoundReport)> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps = {eps}, need eps > 0")));
    }
    let counts = f.influence_counts();
    let mut thresholds: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    thresholds.sort_unstable_by(|a, b| b.cmp(a));
    thresholds.dedup();

    let candidates = std::iter::once(Vec::new()).chain(thresholds.iter().map(|&tau| {
        (0..counts.len()).filter(|&i| counts[i] >= tau).collect::<Vec<_>>()
    }));
    let mut chosen = None;
    for coords in candidates {
        if plurality_mismatch(f.as_grid(), &coords)?.within(eps) {
            chosen = Some(coords);
            break;
        }
    }
    let coords = chosen.ok_or_else(|| {
        Error::ContractViolation("no influence threshold reproduced f within eps".into())
    })?;
    let junta = plurality_junta(f.as_grid(), &coords)?;
    let inf = crate::numeric::q_to_f64(&f.total_influence());
    let report = BoundReport::new(
        "cube-junta",
        junta.size() as f64,
        (c0() * inf / eps).exp(),
        "exp(C0*Inf(f)/eps)",
        &[("C0", c0())],
    );
    Ok((junta, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{edge_boundary, Mode};

    fn parity(n: u32) -> CubeFunction {
        CubeFunction::new(n, |x| x.count_ones() % 2 == 1).unwrap()
    }

    #[test]
    fn influence_examples() {
        let dictator = CubeFunction::new(3, |x| x & 1 == 1).unwrap();
        assert_eq!(dictator.influence(0).unwrap(), Q::from_integer(1));
        assert_eq!(dictator.influence(1).unwrap(), Q::from_integer(0));
        assert_eq!(dictator.total_influence(), Q::from_integer(1));
        let p = parity(5);
        assert!((0..5).all(|i| p.influence(i).unwrap() == Q::from_integer(1)));
        assert_eq!(p.total_influence(), Q::from_integer(5));
        let and = CubeFunction::new(2, |x| x == 3).unwrap();
        assert_eq!(and.influence(0).unwrap(), Q::new(1, 2));
        assert_eq!(and.influence(1).unwrap(), Q::new(1, 2));
        assert_eq!(and.total_influence(), Q::from_integer(1));
        assert!(and.influence(2).is_err());
    }

    #[test]
    fn total_influence_is_normalised_boundary() {
        for bits in 0u32..256 {
            let f = CubeFunction::new(3, |x| bits >> x & 1 == 1).unwrap();
            let b = edge_boundary(f.as_grid(), Mode::Grid, None).unwrap();
            assert_eq!(f.total_influence(), Q::new(b as i128, 4));
        }
    }

    #[test]
    fn extraction_examples() {
        let dictator = CubeFunction::new(4, |x| x & 1 == 1).unwrap();
        let (j, r) = cube_junta_extract(&dictator, 0.1).unwrap();
        assert_eq!(j.coords(), &[0]);
        assert!(r.holds());
        let constant = CubeFunction::new(4, |_| true).unwrap();
        let (j, _) = cube_junta_extract(&constant, 0.1).unwrap();
        assert_eq!(j.size(), 0);
        assert_eq!(j.table(), &[1]);
        assert!(cube_junta_extract(&constant, 0.0).is_err());
    }

    #[test]
    fn extraction_stops_at_first_threshold() {
        // Majority of three plus a weak fourth coordinate.
        let f = CubeFunction::new(4, |x| {
            let maj = (x & 7).count_ones() >= 2;
            if x == 0b1000 { true } else { maj }
        })
        .unwrap();
        let (j, r) = cube_junta_extract(&f, 0.1).unwrap();
        assert_eq!(j.coords(), &[0, 1, 2]);
        assert!(r.holds());
    }
}
