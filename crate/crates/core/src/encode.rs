// SPDX-License-Identifier: Apache-2.0

//! Reductions from `[k]^n` to the cube.
//!
//! For `k = 2^s` the binary expansion `φ: {0,1}^s → [k]`,
//! `(x_1, …, x_s) ↦ 1 + Σ x_i 2^(i-1)`, lifts a grid function to
//! `{0,1}^(sn)`; grid coordinate `j` owns the cube bits `js .. js+s`
//! (0-based). With the little-endian grid index this lift leaves the table
//! unchanged.
//!
//! For other `k` the grid is blown up to `[l]^n`, `l` a power of two, by
//! replacing each point `x` with the rectangular block
//! `R_x = {y : ⌈y_j k / l⌉ = x_j for all j}`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::cube::CubeFunction;
use crate::error::{Error, Result};
use crate::grid::{edge_boundary, GridFunction, GridShape, Mode};
use crate::junta::Junta;
use crate::numeric::{log2_exact, q_to_f64, Q};
use crate::report::{BoundReport, Budget};

fn bits_per_coordinate(k: u32) -> Result<u32> {
    log2_exact(k).ok_or(Error::NotPowerOfTwo(k))
}

/// Binary expansion of `z ∈ [k]` (1-based), least significant bit first.
pub fn phi_encode(z: u32, k: u32) -> Result<Vec<u8>> {
    let s = bits_per_coordinate(k)?;
    if z < 1 || z > k {
        return Err(Error::OutOfRange(format!("{z} is not in [{k}]")));
    }
    Ok((0..s).map(|i| ((z - 1) >> i & 1) as u8).collect())
}

/// `1 + Σ x_i 2^(i-1)`.
pub fn phi_decode(bits: &[u8]) -> Result<u32> {
    if bits.len() > 31 || bits.iter().any(|&b| b > 1) {
        return Err(Error::OutOfRange(format!("{bits:?} is not a bit vector of length < 32")));
    }
    Ok(1 + bits.iter().enumerate().map(|(i, &b)| (b as u32) << i).sum::<u32>())
}

/// Grid coordinate (0-based) owning cube bit `bit` when `k = 2^s`.
pub fn block_of_bit(bit: usize, s: u32) -> usize {
    bit / s as usize
}

/// `f̃ = f ∘ φ_(n)` on `{0,1}^(sn)`.
pub fn lift_to_cube(f: &GridFunction) -> Result<CubeFunction> {
    f.require_boolean()?;
    let shape = f.shape();
    let s = bits_per_coordinate(shape.k)?;
    CubeFunction::new(s * shape.n, |i| f.get(i) == 1)
}

/// Transports a cube junta back to the grid: grid coordinate `j` is kept
/// when any bit of its block is.
pub fn grid_coords_of_cube_junta(junta: &Junta, s: u32) -> Vec<usize> {
    let mut coords: Vec<usize> = junta.coords().iter().map(|&b| block_of_bit(b, s)).collect();
    coords.dedup();
    coords
}

/// `#{(z, i) : bit i of z is 0, F(z) != F(z + 2^i)}` for a fibre
/// `F: [2^s] → {0,1}` given by its values (0-based `z`).
pub fn tilde_fibre_boundary(values: &[u16]) -> Result<u64> {
    let k = values.len() as u32;
    let s = bits_per_coordinate(k)?;
    let mut count = 0u64;
    for i in 0..s {
        let step = 1usize << i;
        count += (0..values.len())
            .filter(|&z| z & step == 0 && values[z] != values[z + step])
            .count() as u64;
    }
    Ok(count)
}

/// Total influence of the lifted function against `2 |∂A| / k^(n-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceTransfer {
    pub total_influence: Q,
    pub bound: Q,
    pub boundary: u64,
    pub report: BoundReport,
}

impl InfluenceTransfer {
    /// Exact comparison.
    pub fn holds(&self) -> bool {
        self.total_influence <= self.bound
    }
}

pub fn influence_transfer_report(f: &GridFunction) -> Result<InfluenceTransfer> {
    let cube = lift_to_cube(f)?;
    let shape = f.shape();
    let boundary = edge_boundary(f, Mode::Grid, None)?;
    let total_influence = cube.total_influence();
    let bound = Q::new(2 * boundary as i128, shape.fibres_per_direction() as i128);
    let report = BoundReport::new(
        "influence-transfer",
        q_to_f64(&total_influence),
        q_to_f64(&bound),
        "2*|dA|/k^(n-1)",
        &[],
    );
    Ok(InfluenceTransfer { total_influence, bound, boundary, report })
}

/// Smallest power of two `l > k` with `(1 + k/(l-k))^n <= 2`, i.e.
/// `l^n <= 2 (l-k)^n`, decided exactly.
pub fn choose_embedding_side(k: u32, n: u32) -> Result<u32> {
    if k < 2 || n < 1 {
        return Err(Error::InvalidShape(format!("k = {k}, n = {n}")));
    }
    let mut l: u64 = (k as u64 + 1).next_power_of_two();
    while l <= u32::MAX as u64 {
        let lhs = BigUint::from(l).pow(n);
        let rhs = BigUint::from(2u32) * BigUint::from(l - k as u64).pow(n);
        if lhs <= rhs {
            return Ok(l as u32);
        }
        l *= 2;
    }
    Err(Error::OutOfRange(format!("no 32-bit embedding side for k = {k}, n = {n}")))
}

/// Blow-up of `[k]^n` into `[l]^n` by rectangular blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockEmbedding {
    pub k: u32,
    pub n: u32,
    pub l: u32,
}

impl BlockEmbedding {
    /// Uses [`choose_embedding_side`].
    pub fn new(k: u32, n: u32) -> Result<Self> {
        Ok(Self { k, n, l: choose_embedding_side(k, n)? })
    }

    /// Any power of two `l > k` (the size condition is not checked).
    pub fn with_side(k: u32, n: u32, l: u32) -> Result<Self> {
        if l <= k || log2_exact(l).is_none() {
            return Err(Error::Precondition(format!("embedding side {l} must be a power of two above k = {k}")));
        }
        Ok(Self { k, n, l })
    }

    /// `(1 + k/(l-k))^n <= 2`, exactly.
    pub fn satisfies_size_condition(&self) -> bool {
        BigUint::from(self.l).pow(self.n) <= BigUint::from(2u32) * BigUint::from(self.l - self.k).pow(self.n)
    }

    /// `(1 + k/(l-k))^n`.
    pub fn amplification(&self) -> f64 {
        (self.l as f64 / (self.l - self.k) as f64).powi(self.n as i32)
    }

    /// 0-based cell of 0-based `y`: `⌈(y+1) k / l⌉ - 1`.
    #[inline]
    pub fn cell(&self, y: u32) -> u32 {
        ((y as u64 + 1) * self.k as u64).div_ceil(self.l as u64) as u32 - 1
    }

    /// The 0-based `y` in block `x`, as a half-open range.
    pub fn block(&self, x: u32) -> std::ops::Range<u32> {
        let start = (0..self.l).find(|&y| self.cell(y) == x).unwrap_or(self.l);
        let end = (start..self.l).find(|&y| self.cell(y) != x).unwrap_or(self.l);
        start..end
    }

    pub fn block_widths(&self) -> Vec<u32> {
        (0..self.k).map(|x| self.block(x).len() as u32).collect()
    }

    pub fn embedded_points(&self) -> u128 {
        (self.l as u128).pow(self.n)
    }
}

/// `Ă(y) = A(cell(y_1), …, cell(y_n))`, refusing when `l^n` exceeds the budget.
pub fn block_embed(f: &GridFunction, emb: &BlockEmbedding, budget: &Budget) -> Result<GridFunction> {
    let shape = f.shape();
    if shape.k != emb.k || shape.n != emb.n {
        return Err(Error::ShapeMismatch(format!(
            "embedding for [{}]^{} applied to [{}]^{}",
            emb.k, emb.n, shape.k, shape.n
        )));
    }
    let needed = emb.embedded_points();
    if needed > budget.max_points as u128 {
        return Err(Error::BudgetExceeded { what: "block embedding", needed, budget: budget.max_points as u128 });
    }
    let big = GridShape::new(emb.l, emb.n, shape.l)?;
    let cells: Vec<usize> = (0..emb.l).map(|y| emb.cell(y) as usize).collect();
    let mut y = vec![0u32; emb.n as usize];
    GridFunction::from_fn(big, |idx| {
        big.point_into(idx, &mut y);
        let x = y.iter().rev().fold(0usize, |acc, &c| acc * shape.k as usize + cells[c as usize]);
        f.get(x)
    })
}

/// Projects a junta on `[l]^n` back to `[k]^n`.
///
/// The junta is first made constant on blocks, taking on each block
/// rectangle of its coordinates the most frequent value (ties to the
/// smaller), and then read off block by block. The coordinate set is kept.
pub fn project_block_junta(g: &Junta, emb: &BlockEmbedding) -> Result<Junta> {
    let big = g.shape();
    if big.k != emb.l || big.n != emb.n {
        return Err(Error::ShapeMismatch(format!(
            "junta on [{}]^{} projected through an embedding of [{}]^{}",
            big.k, big.n, emb.l, emb.n
        )));
    }
    let small = GridShape::new(emb.k, emb.n, big.l)?;
    let m = g.size();
    let small_j = GridShape::new(emb.k, m.max(1) as u32, big.l)?;
    let big_j = GridShape::new(emb.l, m.max(1) as u32, big.l)?;
    let cells = if m == 0 { 1 } else { small_j.points() };
    let blocks: Vec<_> = (0..emb.k).map(|x| emb.block(x)).collect();
    let mut table = Vec::with_capacity(cells);
    let mut counts = vec![0u64; big.l as usize];
    let mut x = vec![0u32; m.max(1)];
    for cell in 0..cells {
        counts.iter_mut().for_each(|c| *c = 0);
        small_j.point_into(cell, &mut x);
        // Walk the rectangle Π_a block(x_a) in the big junta's cell space.
        let mut y: Vec<u32> = (0..m).map(|a| blocks[x[a] as usize].start).collect();
        loop {
            let big_cell = if m == 0 { 0 } else { big_j.index(&y) };
            counts[g.table()[big_cell] as usize] += 1;
            let mut a = 0;
            while a < m {
                y[a] += 1;
                if y[a] < blocks[x[a] as usize].end {
                    break;
                }
                y[a] = blocks[x[a] as usize].start;
                a += 1;
            }
            if a == m {
                break;
            }
        }
        let best = (0..counts.len()).fold(0, |b, v| if counts[v] > counts[b] { v } else { b });
        table.push(best as u16);
    }
    Junta::new(small, g.coords().to_vec(), table)
}

/// Block-constant extension of a `[k]^n` junta to `[l]^n`.
pub fn embed_junta(g: &Junta, emb: &BlockEmbedding) -> Result<Junta> {
    let small = g.shape();
    let big = GridShape::new(emb.l, emb.n, small.l)?;
    let m = g.size();
    if m == 0 {
        return Junta::new(big, Vec::new(), g.table().to_vec());
    }
    let big_j = GridShape::new(emb.l, m as u32, small.l)?;
    let small_j = GridShape::new(emb.k, m as u32, small.l)?;
    let mut y = vec![0u32; m];
    let table = (0..big_j.points())
        .map(|c| {
            big_j.point_into(c, &mut y);
            let x: Vec<u32> = y.iter().map(|&v| emb.cell(v)).collect();
            g.table()[small_j.index(&x)]
        })
        .collect();
    Junta::new(big, g.coords().to_vec(), table)
}

/// Expands every grid coordinate of a `[k]^n` junta into its cube bits
/// (`k = 2^s`), returning the cube junta over `{0,1}^(sn)`.
pub fn lift_junta(g: &Junta) -> Result<Junta> {
    let shape = g.shape();
    let s = bits_per_coordinate(shape.k)?;
    let cube = GridShape::new(2, s * shape.n, shape.l)?;
    let coords: Vec<usize> = g
        .coords()
        .iter()
        .flat_map(|&j| (j * s as usize)..((j + 1) * s as usize))
        .collect();
    // Bits of the J-blocks, little-endian, index the grid J-cells directly.
    Junta::new(cube, coords, g.table().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{l1_distance, Metric};

    #[test]
    fn phi_examples() {
        assert_eq!(phi_decode(&[0, 0]).unwrap(), 1);
        assert_eq!(phi_decode(&[1, 0]).unwrap(), 2);
        assert_eq!(phi_decode(&[0, 1]).unwrap(), 3);
        assert_eq!(phi_decode(&[1, 1]).unwrap(), 4);
        assert_eq!(phi_decode(&[1, 1, 1]).unwrap(), 8);
        for z in 1..=16 {
            assert_eq!(phi_decode(&phi_encode(z, 16).unwrap()).unwrap(), z);
        }
        assert!(phi_encode(1, 6).is_err());
        assert!(phi_encode(0, 4).is_err());
    }

    #[test]
    fn lift_examples() {
        let f = GridFunction::indicator(4, 1, |x| x[0] < 2).unwrap();
        let c = lift_to_cube(&f).unwrap();
        assert_eq!(c.dim(), 2);
        // 1{x_2 = 0}: a dictator in the high bit.
        for y in 0..4 {
            assert_eq!(c.get(y), y & 2 == 0);
        }
        let f = GridFunction::indicator(4, 3, |x| x.iter().sum::<u32>() % 3 == 0).unwrap();
        let c = lift_to_cube(&f).unwrap();
        let shape = f.shape();
        for y in 0..64usize {
            let point: Vec<u32> = (0..3)
                .map(|j| phi_decode(&[(y >> (2 * j) & 1) as u8, (y >> (2 * j + 1) & 1) as u8]).unwrap() - 1)
                .collect();
            assert_eq!(c.get(y) as u16, f.get(shape.index(&point)));
        }
        assert!(lift_to_cube(&GridFunction::indicator(3, 2, |_| true).unwrap()).is_err());
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(tilde_fibre_boundary(&[1, 1, 0, 0]).unwrap(), 2);
        assert_eq!(tilde_fibre_boundary(&[1, 0, 1, 0]).unwrap(), 2);
        assert_eq!(tilde_fibre_boundary(&[0; 8]).unwrap(), 0);
        assert_eq!(tilde_fibre_boundary(&[1, 0, 0, 0, 0, 0, 0, 0]).unwrap(), 3);
        assert!(tilde_fibre_boundary(&[0, 1, 0]).is_err());
    }

    #[test]
    fn transfer_slab() {
        let f = GridFunction::indicator(4, 2, |x| x[0] < 2).unwrap();
        let t = influence_transfer_report(&f).unwrap();
        assert_eq!(t.total_influence, Q::from_integer(1));
        assert_eq!(t.bound, Q::from_integer(2));
        assert!(t.holds());
        let empty = GridFunction::indicator(4, 2, |_| false).unwrap();
        let t = influence_transfer_report(&empty).unwrap();
        assert_eq!(t.total_influence, Q::from_integer(0));
        assert!(t.holds());
    }

    #[test]
    fn embedding_sides() {
        assert_eq!(choose_embedding_side(3, 2).unwrap(), 16);
        assert_eq!(choose_embedding_side(3, 3).unwrap(), 16);
        assert_eq!(choose_embedding_side(5, 4).unwrap(), 32);
        assert!(BlockEmbedding::new(3, 2).unwrap().satisfies_size_condition());
        assert!(!BlockEmbedding::with_side(3, 2, 8).unwrap().satisfies_size_condition());
    }

    #[test]
    fn blocks_partition() {
        let e = BlockEmbedding::new(3, 2).unwrap();
        assert_eq!(e.block_widths(), vec![5, 5, 6]);
        assert_eq!(e.block(0), 0..5);
        assert_eq!(e.block(2), 10..16);
        for (x, w) in e.block_widths().into_iter().enumerate() {
            assert!(w >= e.l / e.k && w <= e.l.div_ceil(e.k), "block {x}");
        }
    }

    #[test]
    fn embed_column() {
        let f = GridFunction::indicator(3, 2, |x| x[0] == 0).unwrap();
        let e = BlockEmbedding::new(3, 2).unwrap();
        let big = block_embed(&f, &e, &Budget::default()).unwrap();
        assert_eq!(big.support_size(), 5 * 16);
        // Each of the 3 boundary edges of A becomes one edge per row of its
        // block: here the edges all sit between blocks 0 and 1 of width 16.
        assert_eq!(edge_boundary(&f, Mode::Grid, None).unwrap(), 3);
        assert_eq!(edge_boundary(&big, Mode::Grid, None).unwrap(), 16);
        let tight = Budget { max_points: 255, ..Budget::default() };
        assert!(matches!(block_embed(&f, &e, &tight), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn project_roundtrip() {
        let e = BlockEmbedding::new(3, 2).unwrap();
        let shape = GridShape::new(3, 2, 2).unwrap();
        let g = Junta::new(shape, vec![1], vec![1, 0, 1]).unwrap();
        let big = embed_junta(&g, &e).unwrap();
        assert_eq!(big.table().len(), 16);
        let back = project_block_junta(&big, &e).unwrap();
        assert_eq!(back, g);
        let c = Junta::constant(GridShape::new(16, 2, 2).unwrap(), 1).unwrap();
        let p = project_block_junta(&c, &e).unwrap();
        assert_eq!(p.size(), 0);
        assert_eq!(p.table(), &[1]);
    }

    #[test]
    fn lift_junta_preserves_values() {
        let shape = GridShape::new(4, 3, 2).unwrap();
        let g = Junta::new(shape, vec![0, 2], (0..16).map(|i| (i % 3 == 0) as u16).collect()).unwrap();
        let lifted = lift_junta(&g).unwrap();
        assert_eq!(lifted.coords(), &[0, 1, 4, 5]);
        let a = g.to_grid_function().unwrap();
        let b = lifted.to_grid_function().unwrap();
        let b = GridFunction::from_fn(shape, |i| b.get(i)).unwrap();
        assert_eq!(l1_distance(&a, &b, Metric::Absolute).unwrap().numerator, 0);
    }
}
