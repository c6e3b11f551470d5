// SPDX-License-Identifier: Apache-2.0

//! Structure of Lipschitz maps `Z_k^n → Z_l^m` (torus) and
//! `[k]^n → [l]^m` (grid).
//!
//! Each well-behaved output coordinate is split into Boolean level sets,
//! each level set is approximated by a junta with a share of the accuracy
//! budget proportional to its boundary, and the pieces are recombined.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{grid_junta_extract, torus_junta_extract, Method};
use crate::grid::{edge_boundary, l1_distance, point_distance, GridFunction, GridShape, L1Distance, Metric, Mode};
use crate::junta::Junta;
use crate::numeric::{q_to_f64, Q};
use crate::report::{c1, c2, c3, BoundReport, Budget};

/// `f = (f_1, …, f_m)` with every component on the same `[k]^n` and
/// values in `{0, …, l-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusMap {
    shape: GridShape,
    components: Vec<GridFunction>,
}

impl TorusMap {
    pub fn new(components: Vec<GridFunction>) -> Result<Self> {
        let shape = components
            .first()
            .ok_or_else(|| Error::InvalidShape("a map needs at least one component".into()))?
            .shape();
        if let Some(c) = components.iter().find(|c| c.shape() != shape) {
            return Err(Error::ShapeMismatch(format!("components {:?} and {:?}", shape, c.shape())));
        }
        Ok(Self { shape, components })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    /// Number of output coordinates.
    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[GridFunction] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &GridFunction {
        &self.components[i]
    }
}

fn metric(mode: Mode) -> Metric {
    match mode {
        Mode::Torus => Metric::Cyclic,
        Mode::Grid => Metric::Absolute,
    }
}

/// Calls `visit(x, y, j)` for every edge `{x, y}` of the grid or torus,
/// with `y = x + e_j` (cyclically in torus mode).
fn for_each_edge(shape: GridShape, mode: Mode, mut visit: impl FnMut(usize, usize, usize)) {
    let k = shape.k as usize;
    for j in 0..shape.n as usize {
        let stride = shape.stride(j);
        for base in 0..shape.fibres_per_direction() {
            let start = shape.fibre_start(j, base);
            for z in 0..k - 1 {
                visit(start + z * stride, start + (z + 1) * stride, j);
            }
            if mode == Mode::Torus && k >= 3 {
                visit(start + (k - 1) * stride, start, j);
            }
        }
    }
}

/// `α = max_{edges {x,y}} (n/m) Σ_i d(f_i(x), f_i(y))`, exact.
pub fn lipschitz_constant(f: &TorusMap, mode: Mode) -> Q {
    let shape = f.shape();
    let mut best = 0u64;
    for_each_edge(shape, mode, |x, y, _| {
        let s: u64 = f
            .components()
            .iter()
            .map(|c| point_distance(c.get(x), c.get(y), metric(mode), shape.l))
            .sum();
        best = best.max(s);
    });
    Q::new(shape.n as i128 * best as i128, f.m() as i128)
}

/// Per-coordinate displacement `D_i`.
///
/// Torus: `Σ_j E_x |f_i(x) - f_i(x + e_j)|'`. Grid: `Σ_j` of the average
/// of `|f_i(x) - f_i(y)|` over direction-`j` edges.
pub fn displacement_sum(f: &GridFunction, mode: Mode) -> Q {
    let shape = f.shape();
    let mut total = 0u64;
    match mode {
        Mode::Torus => {
            // Every x contributes its forward step, including k = 2.
            let k = shape.k as usize;
            for j in 0..shape.n as usize {
                let stride = shape.stride(j);
                for base in 0..shape.fibres_per_direction() {
                    let start = shape.fibre_start(j, base);
                    for z in 0..k {
                        let a = f.get(start + z * stride);
                        let b = f.get(start + ((z + 1) % k) * stride);
                        total += point_distance(a, b, Metric::Cyclic, shape.l);
                    }
                }
            }
            Q::new(total as i128, shape.points() as i128)
        }
        Mode::Grid => {
            for_each_edge(shape, Mode::Grid, |x, y, _| {
                total += point_distance(f.get(x), f.get(y), Metric::Absolute, shape.l);
            });
            let edges_per_direction = (shape.k as i128 - 1) * shape.fibres_per_direction() as i128;
            Q::new(total as i128, edges_per_direction)
        }
    }
}

/// Output coordinates whose displacement is at most `α/δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub alpha: Q,
    pub displacements: Vec<Q>,
    pub selected: Vec<usize>,
}

impl Selection {
    /// At least `⌈(1-δ) m⌉` coordinates were kept.
    pub fn meets_markov(&self, delta: f64) -> bool {
        let m = self.displacements.len() as f64;
        self.selected.len() as f64 >= ((1.0 - delta) * m).ceil() - 1e-9
    }
}

pub fn select_good_coordinates(f: &TorusMap, delta: f64, mode: Mode) -> Result<Selection> {
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!("delta = {delta}, need delta > 0")));
    }
    let alpha = lipschitz_constant(f, mode);
    let displacements: Vec<Q> = f.components().iter().map(|c| displacement_sum(c, mode)).collect();
    let a = q_to_f64(&alpha);
    let selected = (0..f.m())
        .filter(|&i| q_to_f64(&displacements[i]) * delta <= a * (1.0 + 1e-12))
        .collect();
    Ok(Selection { alpha, displacements, selected })
}

/// Boolean level sets of one component.
///
/// Torus: `f^(t) = 1{f - t mod l ∈ {0, …, ⌊l/2⌋ - 1}}` for `t ∈ Z_l`.
/// Grid: `f^(>t) = 1{f > t}` for `t = 1, …, l-1` in 1-based values,
/// stored at position `t - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSetFamily {
    pub mode: Mode,
    pub l: u32,
    pub sets: Vec<GridFunction>,
}

/// Membership of value `v` in torus window `t`.
#[inline]
pub fn in_window(v: u32, t: u32, l: u32) -> bool {
    (v + l - t) % l < l / 2
}

pub fn level_sets(f: &GridFunction, mode: Mode) -> Result<LevelSetFamily> {
    let shape = f.shape();
    let l = shape.l;
    let boolean = GridShape::boolean(shape.k, shape.n)?;
    let sets = match mode {
        Mode::Torus => (0..l)
            .map(|t| GridFunction::from_fn(boolean, |i| in_window(f.get(i) as u32, t, l) as u16))
            .collect::<Result<Vec<_>>>()?,
        Mode::Grid => (1..l)
            .map(|t| GridFunction::from_fn(boolean, |i| (f.get(i) as u32 >= t) as u16))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(LevelSetFamily { mode, l, sets })
}

impl LevelSetFamily {
    /// Grid mode: `Σ_t f^(>t)`, i.e. the 0-based values of `f`.
    pub fn reconstruct(&self) -> Result<GridFunction> {
        if self.mode != Mode::Grid {
            return Err(Error::Precondition("reconstruction is defined for grid level sets".into()));
        }
        let b = self.sets[0].shape();
        let shape = GridShape::new(b.k, b.n, self.l)?;
        GridFunction::from_fn(shape, |i| self.sets.iter().map(|s| s.get(i)).sum())
    }

    /// Boundary of every level set, torus edges in torus mode.
    pub fn boundaries(&self) -> Result<Vec<u64>> {
        self.sets.iter().map(|s| edge_boundary(s, self.mode, None)).collect()
    }
}

/// `2 |a - b|' = Σ_t |1{a ∈ W_t} - 1{b ∈ W_t}|` for all `a, b ∈ Z_l`.
pub fn halving_identity_holds(l: u32) -> bool {
    (0..l).all(|a| {
        (0..l).all(|b| {
            let windows = (0..l).filter(|&t| in_window(a, t, l) != in_window(b, t, l)).count() as u32;
            windows == 2 * crate::grid::cyclic_distance(a, b, l).unwrap()
        })
    })
}

/// Both sides of `‖h - h̃‖₁ = ½ Σ_t ‖h^(t) - h̃^(t)‖₁` as numerators over
/// `k^n`: `(2 Σ_x |h - h̃|', Σ_t Σ_x |h^(t) - h̃^(t)|)`.
pub fn norm_relation(h: &GridFunction, g: &GridFunction) -> Result<(u64, u64)> {
    let lhs = 2 * l1_distance(h, g, Metric::Cyclic)?.numerator;
    let (a, b) = (level_sets(h, Mode::Torus)?, level_sets(g, Mode::Torus)?);
    let mut rhs = 0;
    for (x, y) in a.sets.iter().zip(&b.sets) {
        rhs += l1_distance(x, y, Metric::Absolute)?.numerator;
    }
    Ok((lhs, rhs))
}

/// Share of `ε` per level set: `|∂_t| / (c · k^n · B)` with `c = 4`
/// (torus) or `c = 2` (grid), as exact weights summing to at most 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsAllocation {
    pub weights: Vec<Q>,
    pub eps: Vec<f64>,
}

impl EpsAllocation {
    pub fn total_weight(&self) -> Q {
        self.weights.iter().sum()
    }
}

/// The sum bound `B` must dominate: `¼ Σ_t |∂'A^(t)| / k^n` (torus) or
/// `½ Σ_t |∂A^(>t)| / k^n` (grid).
pub fn sum_bound(boundaries: &[u64], points: usize, mode: Mode) -> Q {
    let c = match mode {
        Mode::Torus => 4,
        Mode::Grid => 2,
    };
    Q::new(boundaries.iter().sum::<u64>() as i128, c * points as i128)
}

pub fn allocate_eps(eps: f64, boundaries: &[u64], b: Q, points: usize, mode: Mode) -> Result<EpsAllocation> {
    let floor = sum_bound(boundaries, points, mode);
    if b < floor {
        return Err(Error::Precondition(format!("B = {b} is below the sum bound {floor}")));
    }
    let c = match mode {
        Mode::Torus => 4,
        Mode::Grid => 2,
    };
    let weights: Vec<Q> = boundaries
        .iter()
        .map(|&d| if d == 0 { Q::from_integer(0) } else { Q::from_integer(d as i128) / (b * (c * points as i128)) })
        .collect();
    let eps = weights.iter().map(|w| eps * q_to_f64(w)).collect();
    Ok(EpsAllocation { weights, eps })
}

/// Result of merging level-set juntas into one junta-valued function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub junta: Junta,
    /// Chosen slice `y0`, as 0-based values of the coordinates outside `J`.
    pub y0: Vec<u32>,
    /// `Σ_t ‖f^(t) - g_t‖₁`.
    pub guarantee: L1Distance,
    /// The scan visited a seeded sample of slices instead of all of them.
    pub sampled: bool,
}

/// Builds the `J`-junta `h(y, z) = f(y0, z)` for the slice `y0` that
/// minimises `Σ_t Σ_z |f^(t)(y0, z) - g_t(z)|`, with `J` the union of the
/// level-set juntas' coordinates. Ties go to the lexicographically
/// smallest `y0`. Scans every slice unless there are more than
/// `budget.max_slices`, in which case a seeded sample is scanned and
/// `‖f - h‖₁ <= Σ_t ‖f^(t) - g_t‖₁` is re-verified.
pub fn merge_torus_juntas(f: &GridFunction, level: &[Junta], budget: &Budget, seed: u64) -> Result<Merge> {
    let shape = f.shape();
    let l = shape.l;
    if level.len() != l as usize {
        return Err(Error::ShapeMismatch(format!("{} level juntas for l = {l}", level.len())));
    }
    let n = shape.n as usize;
    let mut coords: Vec<usize> = level.iter().flat_map(|g| g.coords().iter().copied()).collect();
    coords.sort_unstable();
    coords.dedup();
    let rest: Vec<usize> = (0..n).filter(|j| !coords.contains(j)).collect();
    let offsets = |set: &[usize]| -> Vec<usize> {
        let sub = GridShape::new(shape.k, set.len().max(1) as u32, 2).unwrap();
        let count = if set.is_empty() { 1 } else { sub.points() };
        let mut p = vec![0u32; set.len().max(1)];
        (0..count)
            .map(|c| {
                sub.point_into(c, &mut p);
                set.iter().zip(&p).map(|(&j, &v)| v as usize * shape.stride(j)).sum()
            })
            .collect()
    };
    let z_off = offsets(&coords);
    let y_off = offsets(&rest);

    // cost[z][v] = Σ_t |W_t(v) - g_t(z)|.
    let cost: Vec<Vec<u64>> = z_off
        .iter()
        .map(|&oz| {
            (0..l)
                .map(|v| level.iter().enumerate().filter(|&(t, g)| in_window(v, t as u32, l) != (g.eval_index(oz) == 1)).count() as u64)
                .collect()
        })
        .collect();
    let slice_cost = |oy: usize| -> u64 { z_off.iter().zip(&cost).map(|(&oz, c)| c[f.get(oy + oz) as usize]).sum() };

    let total_slices = y_off.len() as u64;
    let sampled = total_slices > budget.max_slices;
    let candidates: Vec<usize> = if sampled {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = sample(&mut rng, y_off.len(), budget.max_slices as usize).into_vec();
        s.sort_unstable();
        s
    } else {
        (0..y_off.len()).collect()
    };
    let costs: Vec<u64> = candidates.par_iter().map(|&c| slice_cost(y_off[c])).collect();
    let y_point = |c: usize| -> Vec<u32> { rest.iter().map(|&j| shape.digit(y_off[c], j)).collect() };
    let best = (0..candidates.len())
        .min_by(|&a, &b| costs[a].cmp(&costs[b]).then_with(|| y_point(candidates[a]).cmp(&y_point(candidates[b]))))
        .unwrap();
    let chosen = candidates[best];
    let guarantee_num: u64 = if sampled {
        (0..y_off.len()).into_par_iter().map(|c| slice_cost(y_off[c])).sum()
    } else {
        costs.iter().sum()
    };
    let table: Vec<u16> = z_off.iter().map(|&oz| f.get(y_off[chosen] + oz)).collect();
    let junta = Junta::new(shape, coords, table)?;
    let guarantee = L1Distance { numerator: guarantee_num, points: shape.points() as u64 };
    let merge = Merge { junta, y0: y_point(chosen), guarantee, sampled };
    let d = l1_distance(f, &merge.junta.to_grid_function()?, Metric::Cyclic)?;
    if d.numerator > guarantee.numerator {
        return Err(Error::ContractViolation(format!(
            "merged junta at distance {}/{} exceeds the level-set total {}/{}",
            d.numerator, d.points, guarantee.numerator, guarantee.points
        )));
    }
    Ok(merge)
}

/// Sum of grid level-set juntas, `g = Σ_t g_t` (0-based values).
pub fn sum_level_juntas(shape: GridShape, level: &[Junta]) -> Result<Junta> {
    let mut coords: Vec<usize> = level.iter().flat_map(|g| g.coords().iter().copied()).collect();
    coords.sort_unstable();
    coords.dedup();
    let count = (shape.k as usize).pow(coords.len() as u32);
    let sub = GridShape::new(shape.k, coords.len().max(1) as u32, 2)?;
    let mut p = vec![0u32; coords.len().max(1)];
    let mut point = vec![0u32; shape.n as usize];
    let table = (0..count)
        .map(|c| {
            sub.point_into(c, &mut p);
            for (&j, &v) in coords.iter().zip(&p) {
                point[j] = v;
            }
            level.iter().map(|g| g.eval(&point)).sum()
        })
        .collect();
    Junta::new(shape, coords, table)
}

/// Analysis of one selected output coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateResult {
    pub index: usize,
    /// `B_i = D_i`.
    pub b: Q,
    /// The sum bound `B_i` must dominate.
    pub sum_bound: Q,
    pub boundaries: Vec<u64>,
    pub allocation: EpsAllocation,
    /// Coordinate sets of the level-set juntas (0-based).
    pub level_coords: Vec<Vec<usize>>,
    pub junta: Junta,
    /// `‖f_i - h_i‖₁`, cyclic (torus) or absolute (grid).
    pub distance: L1Distance,
    /// `Σ_t ‖f_i^(t) - g_t‖₁`.
    pub level_total: L1Distance,
    pub eps_spent: f64,
    pub y0: Option<Vec<u32>>,
    pub sampled: bool,
    /// `|J_i|` against the bound in terms of `B_i`.
    pub report: BoundReport,
    /// `|J_i|` against the bound in terms of `α/δ`.
    pub alpha_report: BoundReport,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapAnalysis {
    pub mode: Mode,
    pub delta: f64,
    pub eps: f64,
    pub selection: Selection,
    pub coordinates: Vec<CoordinateResult>,
}

pub fn analyze_torus_map(f: &TorusMap, delta: f64, eps: f64, budget: &Budget, seed: u64) -> Result<MapAnalysis> {
    analyze(f, delta, eps, budget, seed, Mode::Torus)
}

pub fn analyze_grid_map(f: &TorusMap, delta: f64, eps: f64, budget: &Budget) -> Result<MapAnalysis> {
    analyze(f, delta, eps, budget, 0, Mode::Grid)
}

fn analyze(f: &TorusMap, delta: f64, eps: f64, budget: &Budget, seed: u64, mode: Mode) -> Result<MapAnalysis> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps = {eps}, need eps > 0")));
    }
    let selection = select_good_coordinates(f, delta, mode)?;
    if !selection.meets_markov(delta) {
        return Err(Error::ContractViolation(format!(
            "only {} of {} coordinates have displacement <= alpha/delta",
            selection.selected.len(),
            f.m()
        )));
    }
    let alpha = q_to_f64(&selection.alpha);
    let coordinates = selection
        .selected
        .par_iter()
        .map(|&i| analyze_component(f.component(i), i, selection.displacements[i], alpha, delta, eps, budget, seed, mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(MapAnalysis { mode, delta, eps, selection, coordinates })
}

#[allow(clippy::too_many_arguments)]
fn analyze_component(
    f: &GridFunction,
    index: usize,
    b: Q,
    alpha: f64,
    delta: f64,
    eps: f64,
    budget: &Budget,
    seed: u64,
    mode: Mode,
) -> Result<CoordinateResult> {
    let shape = f.shape();
    let family = level_sets(f, mode)?;
    let boundaries = family.boundaries()?;
    let floor = sum_bound(&boundaries, shape.points(), mode);
    if b < floor {
        return Err(Error::ContractViolation(format!("coordinate {index}: B = {b} below the sum bound {floor}")));
    }
    let allocation = allocate_eps(eps, &boundaries, b, shape.points(), mode)?;
    let mut level = Vec::with_capacity(family.sets.len());
    for (set, (&d, &e)) in family.sets.iter().zip(boundaries.iter().zip(&allocation.eps)) {
        let g = if d == 0 {
            Junta::constant(set.shape(), set.get(0))?
        } else if mode == Mode::Torus {
            torus_junta_extract(set, e, budget)?.junta
        } else {
            grid_junta_extract(set, e, Method::Main, budget)?.junta
        };
        level.push(g);
    }
    let level_coords: Vec<Vec<usize>> = level.iter().map(|g| g.coords().to_vec()).collect();
    let level_total = {
        let mut num = 0;
        for (set, g) in family.sets.iter().zip(&level) {
            num += l1_distance(set, &g.to_grid_function()?, Metric::Absolute)?.numerator;
        }
        L1Distance { numerator: num, points: shape.points() as u64 }
    };
    let mut flags = Vec::new();
    let (junta, y0, sampled) = match mode {
        Mode::Torus => {
            let m = merge_torus_juntas(f, &level, budget, seed.wrapping_add(index as u64))?;
            (m.junta, Some(m.y0), m.sampled)
        }
        Mode::Grid => (sum_level_juntas(shape, &level)?, None, false),
    };
    let distance = l1_distance(f, &junta.to_grid_function()?, metric(mode))?;
    if distance.numerator > level_total.numerator || !distance.within(eps) {
        return Err(Error::ContractViolation(format!(
            "coordinate {index}: distance {}/{} (level total {}) exceeds eps = {eps}",
            distance.numerator, distance.points, level_total.numerator
        )));
    }
    if mode == Mode::Grid && distance.numerator < level_total.numerator {
        flags.push("norm relation strict".to_string());
    }
    if sampled {
        flags.push("sampled slice scan".to_string());
    }
    let (l, k, bf) = (shape.l as f64, shape.k as f64, q_to_f64(&b));
    let size = junta.size() as f64;
    let (report, alpha_report) = match mode {
        Mode::Torus => (
            BoundReport::new("torus-map", size, l * (4.0 * c1() * bf * k / eps).exp(), "l*exp(4*C1*B*k/eps)", &[("C1", c1())]),
            BoundReport::new(
                "torus-map-alpha",
                size,
                l * (c2() * alpha * k / (delta * eps)).exp(),
                "l*exp(C2*alpha*k/(delta*eps))",
                &[("C2", c2())],
            ),
        ),
        Mode::Grid => (
            BoundReport::new(
                "grid-map",
                size,
                (l - 1.0) * (2.0 * c1() * bf * k / eps).exp(),
                "(l-1)*exp(2*C1*B*k/eps)",
                &[("C1", c1())],
            ),
            BoundReport::new(
                "grid-map-alpha",
                size,
                (l - 1.0) * (c3() * alpha * k / (delta * eps)).exp(),
                "(l-1)*exp(C3*alpha*k/(delta*eps))",
                &[("C3", c3())],
            ),
        ),
    };
    Ok(CoordinateResult {
        index,
        b,
        sum_bound: floor,
        boundaries,
        eps_spent: allocation.eps.iter().sum(),
        allocation,
        level_coords,
        junta,
        distance,
        level_total,
        y0,
        sampled,
        report,
        alpha_report,
        flags,
    })
}
