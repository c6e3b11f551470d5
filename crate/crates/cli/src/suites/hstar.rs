// SPDX-License-Identifier: Apache-2.0

use anyhow::Result;
use gridjunta::constructions::{cuboid, random_set};
use gridjunta::encode::BlockEmbedding;
use gridjunta::extract::{boundary_cost, claim45_check, refined_cost};
use gridjunta::hfunc::{claim42_details, fibre_tilde_bound_check, interval_tilde_bound_check, Interval};
use gridjunta::numeric::{q_to_f64, safe_le};
use gridjunta::{GridFunction, GridShape, HVariant};

use super::{fixed, gjt, Ctx, Instance, Tally};

fn fibre(k: u32, mask: u32) -> Vec<u16> {
    (0..k).map(|z| ((mask >> z) & 1) as u16).collect()
}

fn fibre_table(values: &[u16]) -> Option<Vec<u8>> {
    GridShape::boolean(values.len() as u32, 1)
        .and_then(|s| GridFunction::from_values(s, values))
        .ok()
        .and_then(|f| gjt(&f))
}

pub fn interval_instances() -> Vec<Instance> {
    (1..=8)
        .map(|s| {
            let k = 1u32 << s;
            Instance::new("intervals", format!("all-intervals-k{k}"), move |_, t| intervals(k, t))
        })
        .collect()
}

/// `|∂̃(I)| <= 6 |I| log2(k/|I|)` for every interval with `|I| <= k/2`.
fn intervals(k: u32, t: &mut Tally) -> Result<()> {
    for start in 1..=k {
        for end in start..=k.min(start + k / 2 - 1) {
            let c = interval_tilde_bound_check(k, Interval::new(start, end))?;
            t.case("interval-tilde", c.holds(), || {
                (format!("I=[{start},{end}]"), format!("tilde {} > {}", c.tilde, c.bound), fibre_table(&Interval::new(start, end).indicator(k)))
            });
            if c.bound > 0.0 {
                t.ratio("interval-tilde", c.tilde as f64 / c.bound);
            }
        }
    }
    Ok(())
}

pub fn fibre_instances() -> Vec<Instance> {
    [2u32, 4, 8, 16]
        .into_iter()
        .map(|k| Instance::new("fibres", format!("all-fibres-k{k}"), move |_, t| fibres(k, t)))
        .collect()
}

/// `|∂̃F| <= 6 ℓ log2(mk/ℓ)` for every `F` with `0 < ℓ <= k/2`.
fn fibres(k: u32, t: &mut Tally) -> Result<()> {
    for mask in 1u32..1 << k {
        let ell = mask.count_ones();
        if 2 * ell > k {
            continue;
        }
        let values = fibre(k, mask);
        let c = fibre_tilde_bound_check(&values)?;
        t.case("fibre-tilde", c.holds(), || {
            (format!("F={mask:#x}"), format!("tilde {} vs bound {} (m = {})", c.tilde, c.bound, c.m), fibre_table(&values))
        });
        if c.bound > 0.0 {
            t.ratio("fibre-tilde", c.tilde as f64 / c.bound);
        }
    }
    Ok(())
}

pub fn hstar_instances() -> Vec<Instance> {
    let mut v: Vec<Instance> = [4u32, 8, 16]
        .into_iter()
        .map(|k| Instance::new("hstar", format!("claim42-k{k}"), move |_, t| claim42(k, t)))
        .collect();
    v.push(Instance::new("hstar", "claim45-random-3^2-l16", claim45_random));
    v.push(Instance::new("hstar", "claim45-slab-3^2-l16", |ctx, t| claim45_slab(ctx, t)));
    v.push(Instance::new("hstar", "refined-cost-3^2", |_, t| refined(3, 2, t)));
    v.push(Instance::new("hstar", "refined-cost-2^3", |_, t| refined(2, 3, t)));
    v
}

/// `h* <= 3 Var log2 k`, `h* <= |∂F|`, `h* <= k|∂F|`, and `h* <= Ent(p)`
/// when `|∂F| = 1`.
fn claim42(k: u32, t: &mut Tally) -> Result<()> {
    for mask in 0u32..1 << k {
        let values = fibre(k, mask);
        let c = claim42_details(&values)?;
        t.case("claim42", c.holds(), || (format!("F={mask:#x}"), format!("{c:?}"), fibre_table(&values)));
        if c.boundary > 0.0 {
            t.ratio("claim42", c.h_star / c.boundary);
        }
    }
    Ok(())
}

fn claim45_random(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let emb = BlockEmbedding::with_side(3, 2, 16)?;
    for (i, seed) in ctx.seeds(2, ctx.cfg.claim45_sets).into_iter().enumerate() {
        let p = (seed >> 11) as f64 / (1u64 << 53) as f64;
        let f = random_set(3, 2, p, seed)?;
        let c = claim45_check(&f, &emb, &ctx.budget)?;
        for d in &c.directions {
            let name = || format!("set{i}-seed{seed}-dir{}", d.direction + 1);
            t.case("claim45-pointwise", d.pointwise_violations == 0, || {
                (name(), format!("{} fibres above 9/4", d.pointwise_violations), gjt(&f))
            });
            t.ratio("claim45-pointwise", d.max_pointwise_ratio / 2.25);
            let ok = safe_le(d.embedded_avg, 4.5 * d.original_avg);
            t.case("claim45-average", ok, || {
                (name(), format!("{} > 9/2 * {}", d.embedded_avg, d.original_avg), gjt(&f))
            });
            if d.original_avg > 0.0 {
                t.ratio("claim45-average", d.embedded_avg / (4.5 * d.original_avg));
            }
        }
    }
    Ok(())
}

fn claim45_slab(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let emb = BlockEmbedding::with_side(3, 2, 16)?;
    let f = cuboid(1, 1, 3, 2)?;
    let c = claim45_check(&f, &emb, &ctx.budget)?;
    for d in &c.directions {
        t.row(
            "claim45-slab",
            d.holds(),
            fixed(d.embedded_avg),
            fixed(4.5 * d.original_avg),
            format!("direction {} max pointwise ratio {}", d.direction + 1, fixed(d.max_pointwise_ratio)),
            Some(&f),
        );
    }
    Ok(())
}

/// The main-boundary functional sums to `|∂A|/k^(n-1)`, and the `h*`
/// functional never exceeds it.
fn refined(k: u32, n: u32, t: &mut Tally) -> Result<()> {
    let shape = GridShape::boolean(k, n)?;
    for mask in 0u64..1 << shape.points() {
        let f = GridFunction::from_fn(shape, |i| ((mask >> i) & 1) as u16)?;
        let main = refined_cost(&f, HVariant::MainBoundary)?;
        let exact = boundary_cost(&f)?;
        t.case("main-boundary-identity", main == q_to_f64(&exact), || {
            (format!("mask={mask:#x}"), format!("{main} != {exact}"), gjt(&f))
        });
        let h = refined_cost(&f, HVariant::HStar)?;
        t.case("refined-monotone", safe_le(h, main), || (format!("mask={mask:#x}"), format!("{h} > {main}"), gjt(&f)));
    }
    Ok(())
}
