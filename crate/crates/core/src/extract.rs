// SPDX-License-Identifier: Apache-2.0

//! Grid and torus junta extraction, fibre-cost aggregates and the
//! diagnostics that accompany them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cube::cube_junta_extract;
use crate::encode::{block_embed, grid_coords_of_cube_junta, lift_to_cube, BlockEmbedding};
use crate::error::{Error, Result};
use crate::grid::{edge_boundary, l1_distance, GridFunction, L1Distance, Metric, Mode};
use crate::hfunc::{ell_and_boundary, h_from_counts, HVariant};
use crate::junta::{plurality_junta, Junta};
use crate::numeric::{log2_exact, safe_le, Q};
use crate::report::{c0, c1, c4, BoundReport, Budget};

/// Which theoretical bound an extraction is reported against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// `exp(C1 |∂A| / (k^(n-1) ε))`.
    Main,
    /// `exp(C4 Σ_j E_x h*(f_j^x) / ε)`.
    Refined,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Main => "main",
            Method::Refined => "refined",
        }
    }
}

/// `(ℓ, m) → number of fibres` for one direction.
pub fn fibre_histogram(f: &GridFunction, j: usize) -> Result<BTreeMap<(u32, u32), u64>> {
    f.require_boolean()?;
    let n = f.shape().n as usize;
    if j >= n {
        return Err(Error::OutOfRange(format!("direction {j} with n = {n}")));
    }
    let mut hist = BTreeMap::new();
    for base in 0..f.shape().fibres_per_direction() {
        *hist.entry(ell_and_boundary(&f.fibre_values(j, base))).or_insert(0) += 1;
    }
    Ok(hist)
}

/// `Σ_j E_x h(f_j^x)` over all `k^(n-1)` fibres in each direction.
pub fn refined_cost(f: &GridFunction, variant: HVariant) -> Result<f64> {
    let shape = f.shape();
    let mut total = 0.0;
    for j in 0..shape.n as usize {
        for ((ell, m), count) in fibre_histogram(f, j)? {
            total += count as f64 * h_from_counts(shape.k, ell, m, variant);
        }
    }
    Ok(total / shape.fibres_per_direction() as f64)
}

/// `|∂A| / k^(n-1)`, the main-boundary cost as an exact fraction.
pub fn boundary_cost(f: &GridFunction) -> Result<Q> {
    let b = edge_boundary(f, Mode::Grid, None)?;
    Ok(Q::new(b as i128, f.shape().fibres_per_direction() as i128))
}

/// Output of a grid or torus extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub junta: Junta,
    pub mode: Mode,
    pub method: Method,
    pub eps: f64,
    /// `|A| / k^n`.
    pub measure: f64,
    /// `|∂A|` (grid) or `|∂'A|` (torus).
    pub boundary: u64,
    /// `Σ_j E_x h*(f_j^x)`.
    pub refined_cost: f64,
    /// Independently recomputed `‖f - g‖₁`.
    pub distance: L1Distance,
    pub report: BoundReport,
    pub flags: Vec<String>,
}

/// Junta extraction on the grid with hard contract `‖f - g‖₁ <= eps`.
///
/// Sets within `eps` of a constant return that constant. Otherwise, for
/// `k = 2^s` the table is lifted to `{0,1}^(sn)` and extracted there; for
/// other `k` it is first block-embedded into `[l]^n` and extracted at
/// accuracy `eps / 2`. Either way the resulting coordinate set is mapped
/// back to the grid and fitted by plurality.
pub fn grid_junta_extract(f: &GridFunction, eps: f64, method: Method, budget: &Budget) -> Result<Extraction> {
    f.require_boolean()?;
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps = {eps}, need eps > 0")));
    }
    let shape = f.shape();
    let mut flags = Vec::new();
    let constant = plurality_junta(f, &[])?;
    let junta = if l1_distance(f, &constant.to_grid_function()?, Metric::Absolute)?.within(eps) {
        flags.push(format!("trivial: constant-{} junta", constant.table()[0]));
        constant
    } else {
        let coords = match log2_exact(shape.k) {
            Some(_) => power_of_two_coords(f, eps)?,
            None => {
                let emb = BlockEmbedding::new(shape.k, shape.n)?;
                flags.push(format!("embedded: l={}", emb.l));
                let big = block_embed(f, &emb, budget)?;
                // Grid coordinates of [l]^n and [k]^n coincide.
                power_of_two_coords(&big, eps / 2.0)?
            }
        };
        plurality_junta(f, &coords)?
    };
    let distance = l1_distance(f, &junta.to_grid_function()?, Metric::Absolute)?;
    if !distance.within(eps) {
        return Err(Error::ContractViolation(format!(
            "extracted junta on {:?} is at distance {}/{} > {eps}",
            junta.coords_one_based(),
            distance.numerator,
            distance.points
        )));
    }
    let boundary = edge_boundary(f, Mode::Grid, None)?;
    let refined = refined_cost(f, HVariant::HStar)?;
    let fibres = shape.fibres_per_direction() as f64;
    let pow2 = log2_exact(shape.k).is_some();
    let report = match method {
        Method::Main => BoundReport::new(
            "grid-junta",
            junta.size() as f64,
            (c1() * boundary as f64 / (fibres * eps)).exp(),
            "exp(C1*|dA|/(k^(n-1)*eps))",
            &[("C1", c1())],
        ),
        Method::Refined => {
            if !pow2 {
                flags.push("C4 reconstructed".into());
            }
            BoundReport::new(
                "grid-junta-refined",
                junta.size() as f64,
                (c4(pow2) * refined / eps).exp(),
                if pow2 {
                    "exp(C4*sum_j E h*(f_j^x)/eps), C4=24*C0"
                } else {
                    "exp(C4*sum_j E h*(f_j^x)/eps), C4=2*(9/2)*24*C0"
                },
                &[("C0", c0()), ("C4", c4(pow2))],
            )
        }
    };
    Ok(Extraction {
        junta,
        mode: Mode::Grid,
        method,
        eps,
        measure: f.support_size() as f64 / f.len() as f64,
        boundary,
        refined_cost: refined,
        distance,
        report,
        flags,
    })
}

fn power_of_two_coords(f: &GridFunction, eps: f64) -> Result<Vec<usize>> {
    let s = log2_exact(f.shape().k).ok_or(Error::NotPowerOfTwo(f.shape().k))?;
    let (cube_junta, _) = cube_junta_extract(&lift_to_cube(f)?, eps)?;
    Ok(grid_coords_of_cube_junta(&cube_junta, s))
}

/// Junta extraction for a subset of the torus, reported against
/// `exp(C1 |∂'A| / (k^(n-1) ε))`. Uses `|∂A| <= |∂'A|`.
pub fn torus_junta_extract(f: &GridFunction, eps: f64, budget: &Budget) -> Result<Extraction> {
    let mut e = grid_junta_extract(f, eps, Method::Main, budget)?;
    let boundary = edge_boundary(f, Mode::Torus, None)?;
    let fibres = f.shape().fibres_per_direction() as f64;
    e.mode = Mode::Torus;
    e.boundary = boundary;
    e.report = BoundReport::new(
        "torus-junta",
        e.junta.size() as f64,
        (c1() * boundary as f64 / (fibres * eps)).exp(),
        "exp(C1*|d'A|/(k^(n-1)*eps))",
        &[("C1", c1())],
    );
    Ok(e)
}

/// Measure, boundary and the lower bound `e (|A|/k) ln(k^n/|A|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoDiagnostic {
    pub measure: f64,
    pub boundary: u64,
    pub lower_bound: f64,
    /// `|A| / k^n <= eps`: the zero junta already works.
    pub trivial: bool,
    pub report: BoundReport,
}

impl IsoDiagnostic {
    /// `|∂A| >= e (|A|/k) ln(k^n/|A|)`.
    pub fn holds(&self) -> bool {
        safe_le(self.lower_bound, self.boundary as f64)
    }
}

pub fn iso_lower_diag(f: &GridFunction, eps: f64) -> Result<IsoDiagnostic> {
    f.require_boolean()?;
    let shape = f.shape();
    let size = f.support_size() as f64;
    let points = f.len() as f64;
    let boundary = edge_boundary(f, Mode::Grid, None)?;
    let lower_bound = if size == 0.0 {
        0.0
    } else {
        std::f64::consts::E * size / shape.k as f64 * (points / size).ln()
    };
    let measure = size / points;
    Ok(IsoDiagnostic {
        measure,
        boundary,
        lower_bound,
        trivial: measure <= eps,
        report: BoundReport::new("iso-lower", lower_bound, boundary as f64, "e*(|A|/k)*ln(k^n/|A|) <= |dA|", &[]),
    })
}

/// Averaged and pointwise comparison of `h*` before and after a block
/// embedding, in one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim45Direction {
    pub direction: usize,
    /// `E_y h*(f̆_j^y)` over `[l]^(n-1)`.
    pub embedded_avg: f64,
    /// `E_x h*(f_j^x)` over `[k]^(n-1)`.
    pub original_avg: f64,
    pub fibres_checked: u64,
    /// Fibres with `h*(f̆_j^y) > (9/4) h*(f_j^x)`.
    pub pointwise_violations: u64,
    /// Largest `h*(f̆_j^y) / h*(f_j^x)` over non-constant fibres.
    pub max_pointwise_ratio: f64,
}

impl Claim45Direction {
    pub fn holds(&self) -> bool {
        self.pointwise_violations == 0 && safe_le(self.embedded_avg, 4.5 * self.original_avg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim45Check {
    pub embedding: BlockEmbedding,
    pub directions: Vec<Claim45Direction>,
}

impl Claim45Check {
    pub fn holds(&self) -> bool {
        self.directions.iter().all(Claim45Direction::holds)
    }
}

/// Enumerates every fibre of `f` and of its block embedding.
pub fn claim45_check(f: &GridFunction, emb: &BlockEmbedding, budget: &Budget) -> Result<Claim45Check> {
    f.require_boolean()?;
    if !emb.satisfies_size_condition() {
        return Err(Error::Precondition(format!(
            "embedding side {} violates (1 + k/(l-k))^n <= 2 for k = {}, n = {}",
            emb.l, emb.k, emb.n
        )));
    }
    let big = block_embed(f, emb, budget)?;
    let (k, l) = (emb.k, emb.l);
    let bs = big.shape();
    let mut directions = Vec::new();
    for j in 0..emb.n as usize {
        let original: Vec<f64> = (0..f.shape().fibres_per_direction())
            .map(|b| {
                let (ell, m) = ell_and_boundary(&f.fibre_values(j, b));
                h_from_counts(k, ell, m, HVariant::HStar)
            })
            .collect();
        let mut embedded_sum = 0.0;
        let mut violations = 0;
        let mut max_ratio: f64 = 0.0;
        let mut y = vec![0u32; emb.n as usize];
        for base in 0..bs.fibres_per_direction() {
            let (ell, m) = ell_and_boundary(&big.fibre_values(j, base));
            let h = h_from_counts(l, ell, m, HVariant::HStar);
            embedded_sum += h;
            // Base point of the source fibre: map every other coordinate to its cell.
            bs.point_into(bs.fibre_start(j, base), &mut y);
            let x_base = y
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .rev()
                .fold(0usize, |acc, (_, &c)| acc * k as usize + emb.cell(c) as usize);
            let h0 = original[x_base];
            if !safe_le(h, 2.25 * h0) {
                violations += 1;
            }
            if h0 > 0.0 {
                max_ratio = max_ratio.max(h / h0);
            }
        }
        directions.push(Claim45Direction {
            direction: j,
            embedded_avg: embedded_sum / bs.fibres_per_direction() as f64,
            original_avg: original.iter().sum::<f64>() / original.len() as f64,
            fibres_checked: bs.fibres_per_direction() as u64,
            pointwise_violations: violations,
            max_pointwise_ratio: max_ratio,
        });
    }
    Ok(Claim45Check { embedding: *emb, directions })
}
