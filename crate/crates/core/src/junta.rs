// SPDX-License-Identifier: Apache-2.0

//! Juntas over `[k]^n`: plurality fitting and the exhaustive oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridShape, L1Distance};

/// A function on `[k]^n` that reads only the coordinates in `coords`.
///
/// `table` is indexed by the mixed-radix index of the `J`-projection,
/// `Σ_a x_{coords[a]} · k^a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Junta {
    shape: GridShape,
    coords: Vec<usize>,
    table: Vec<u16>,
}

impl Junta {
    /// `coords` are 0-based, strictly increasing and below `n`.
    pub fn new(shape: GridShape, coords: Vec<usize>, table: Vec<u16>) -> Result<Self> {
        check_coords(shape, &coords)?;
        let cells = cell_count(shape.k, coords.len())?;
        if table.len() != cells {
            return Err(Error::ShapeMismatch(format!(
                "junta on {} coordinates needs {cells} entries, got {}",
                coords.len(),
                table.len()
            )));
        }
        if let Some(i) = table.iter().position(|&v| v as u32 >= shape.l) {
            return Err(Error::ValueOutOfRange { index: i, value: table[i], l: shape.l });
        }
        Ok(Self { shape, coords, table })
    }

    pub fn constant(shape: GridShape, value: u16) -> Result<Self> {
        Self::new(shape, Vec::new(), vec![value])
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    /// The coordinate set `J`, 0-based.
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn coords_one_based(&self) -> Vec<u32> {
        self.coords.iter().map(|&c| c as u32 + 1).collect()
    }

    /// `|J|`.
    pub fn size(&self) -> usize {
        self.coords.len()
    }

    pub fn table(&self) -> &[u16] {
        &self.table
    }

    /// Projection cell of the point with table index `idx`.
    pub fn cell_of(&self, idx: usize) -> usize {
        let k = self.shape.k as usize;
        self.coords
            .iter()
            .rev()
            .fold(0, |acc, &j| acc * k + self.shape.digit(idx, j) as usize)
    }

    pub fn eval_index(&self, idx: usize) -> u16 {
        self.table[self.cell_of(idx)]
    }

    /// Value at a point given by 0-based coordinates.
    pub fn eval(&self, point: &[u32]) -> u16 {
        let k = self.shape.k as usize;
        let cell = self.coords.iter().rev().fold(0, |acc, &j| acc * k + point[j] as usize);
        self.table[cell]
    }

    pub fn to_grid_function(&self) -> Result<GridFunction> {
        let mut walker = CellWalker::new(self.shape, &self.coords);
        GridFunction::from_fn(self.shape, |_| self.table[walker.next_cell()])
    }
}

fn check_coords(shape: GridShape, coords: &[usize]) -> Result<()> {
    if coords.windows(2).any(|w| w[0] >= w[1]) || coords.last().is_some_and(|&c| c >= shape.n as usize) {
        return Err(Error::OutOfRange(format!(
            "coordinate set {coords:?} is not a strictly increasing subset of 0..{}",
            shape.n
        )));
    }
    Ok(())
}

fn cell_count(k: u32, size: usize) -> Result<usize> {
    (k as usize)
        .checked_pow(size as u32)
        .ok_or_else(|| Error::OutOfRange(format!("{k}^{size} junta cells")))
}

/// Walks table indices `0, 1, 2, …` in order and yields the `J`-cell of
/// each, updating the cell incrementally.
pub(crate) struct CellWalker {
    k: u32,
    digits: Vec<u32>,
    weights: Vec<usize>,
    cell: usize,
    started: bool,
}

impl CellWalker {
    pub(crate) fn new(shape: GridShape, coords: &[usize]) -> Self {
        let mut weights = vec![0usize; shape.n as usize];
        let mut w = 1usize;
        for &j in coords {
            weights[j] = w;
            w *= shape.k as usize;
        }
        Self { k: shape.k, digits: vec![0; shape.n as usize], weights, cell: 0, started: false }
    }

    pub(crate) fn next_cell(&mut self) -> usize {
        if !self.started {
            self.started = true;
            return self.cell;
        }
        for (d, &w) in self.digits.iter_mut().zip(&self.weights) {
            *d += 1;
            self.cell += w;
            if *d < self.k {
                break;
            }
            *d = 0;
            self.cell -= self.k as usize * w;
        }
        self.cell
    }
}

/// Per-cell value histograms of `f` over the `J`-projection.
struct CellCounts {
    l: usize,
    counts: Vec<u64>,
}

impl CellCounts {
    fn build(f: &GridFunction, coords: &[usize]) -> Result<Self> {
        let shape = f.shape();
        let cells = cell_count(shape.k, coords.len())?;
        let l = shape.l as usize;
        let size = cells
            .checked_mul(l)
            .filter(|&s| s <= 1 << 28)
            .ok_or_else(|| Error::BudgetExceeded {
                what: "plurality histogram",
                needed: cells as u128 * l as u128,
                budget: 1 << 28,
            })?;
        let mut counts = vec![0u64; size];
        let mut walker = CellWalker::new(shape, coords);
        for idx in 0..f.len() {
            counts[walker.next_cell() * l + f.get(idx) as usize] += 1;
        }
        Ok(Self { l, counts })
    }

    /// Most frequent value per cell; the smallest value wins ties.
    fn plurality(&self) -> Vec<u16> {
        self.counts
            .chunks(self.l)
            .map(|c| {
                let mut best = 0;
                for (v, &n) in c.iter().enumerate() {
                    if n > c[best] {
                        best = v;
                    }
                }
                best as u16
            })
            .collect()
    }

    /// Number of points disagreeing with the plurality table.
    fn mismatches(&self) -> u64 {
        self.counts
            .chunks(self.l)
            .map(|c| c.iter().sum::<u64>() - c.iter().max().unwrap())
            .sum()
    }
}

/// The `J`-junta taking the most frequent value of `f` on each `J`-cell
/// (ties to the smaller value). For Boolean `f` this is an ℓ¹-nearest
/// `J`-junta.
pub fn plurality_junta(f: &GridFunction, coords: &[usize]) -> Result<Junta> {
    check_coords(f.shape(), coords)?;
    let table = CellCounts::build(f, coords)?.plurality();
    Junta::new(f.shape(), coords.to_vec(), table)
}

/// Distance from `f` to its plurality `J`-junta, counted as disagreements.
///
/// Equals the ℓ¹ distance for Boolean `f`.
pub fn plurality_mismatch(f: &GridFunction, coords: &[usize]) -> Result<L1Distance> {
    check_coords(f.shape(), coords)?;
    Ok(L1Distance {
        numerator: CellCounts::build(f, coords)?.mismatches(),
        points: f.len() as u64,
    })
}

/// Best plurality distance among all coordinate sets of one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeProfile {
    pub size: usize,
    /// Lexicographically first set attaining `distance`.
    pub coords: Vec<usize>,
    pub distance: L1Distance,
}

/// Result of [`best_junta_search`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuntaSearch {
    /// First junta within `eps` in (size, lexicographic) order.
    pub found: Option<Junta>,
    /// One entry per size `0..=max_size` that was searched.
    pub profile: Vec<SizeProfile>,
}

impl JuntaSearch {
    /// Smallest size with a junta within `eps`.
    pub fn min_size(&self) -> Option<usize> {
        self.found.as_ref().map(Junta::size)
    }
}

/// `Σ_{m <= max} C(n, m)`, saturating.
pub fn subsets_up_to(n: usize, max: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for m in 0..=max.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul((n - m) as u128) / (m as u128 + 1);
    }
    total
}

/// Tries every coordinate set of size at most `max_size`, in order of
/// size and then lexicographically, fitting each by plurality.
///
/// Stops after the first size that has a junta within `eps`. Refuses when
/// the number of sets exceeds `max_subsets`.
pub fn best_junta_search(
    f: &GridFunction,
    max_size: usize,
    eps: f64,
    max_subsets: u64,
) -> Result<JuntaSearch> {
    f.require_boolean()?;
    let n = f.shape().n as usize;
    let max_size = max_size.min(n);
    let needed = subsets_up_to(n, max_size);
    if needed > max_subsets as u128 {
        return Err(Error::BudgetExceeded { what: "junta subsets", needed, budget: max_subsets as u128 });
    }
    let mut profile = Vec::new();
    for size in 0..=max_size {
        let sets: Vec<Vec<usize>> = itertools::Itertools::combinations(0..n, size).collect();
        let distances = sets
            .par_iter()
            .map(|s| plurality_mismatch(f, s))
            .collect::<Result<Vec<_>>>()?;
        // Sets are already in lexicographic order, so the first minimum wins.
        let best = (0..sets.len()).min_by_key(|&i| distances[i].numerator).unwrap();
        profile.push(SizeProfile { size, coords: sets[best].clone(), distance: distances[best] });
        if let Some(i) = distances.iter().position(|d| d.within(eps)) {
            let found = plurality_junta(f, &sets[i])?;
            return Ok(JuntaSearch { found: Some(found), profile });
        }
    }
    Ok(JuntaSearch { found: None, profile })
}
