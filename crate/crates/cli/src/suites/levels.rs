// SPDX-License-Identifier: Apache-2.0

use anyhow::Result;
use gridjunta::lipschitz::{halving_identity_holds, level_sets, norm_relation};
use gridjunta::{cyclic_distance, GridFunction, GridShape, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{gjt, Ctx, Instance, Tally};

const SUITE: &str = "normrel";

pub fn instances() -> Vec<Instance> {
    vec![
        Instance::new(SUITE, "norm-relation-Z5^3-l6", norm_relation_pairs),
        Instance::new(SUITE, "halving-pointwise-Z5^3-l6", halving_pointwise),
        Instance::new(SUITE, "halving-table", |_, t| {
            for l in 2..=16 {
                t.case("halving-identity", halving_identity_holds(l), || (format!("l={l}"), String::new(), None));
            }
            Ok(())
        }),
        Instance::new(SUITE, "grid-reconstruct-5^2-l6", reconstruct),
    ]
}

fn random_table(shape: GridShape, seed: u64) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(GridFunction::from_fn(shape, |_| rng.gen_range(0..shape.l) as u16)?)
}

/// `2 Σ_x |h - g|' = Σ_t Σ_x |h^(t) - g^(t)|`.
fn norm_relation_pairs(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let shape = GridShape::new(5, 3, 6)?;
    for (i, pair) in ctx.seeds(3, 2 * ctx.cfg.identity_instances).chunks(2).enumerate() {
        let h = random_table(shape, pair[0])?;
        let g = random_table(shape, pair[1])?;
        let (lhs, rhs) = norm_relation(&h, &g)?;
        t.case("norm-relation", lhs == rhs, || (format!("pair{i}-seeds{}-{}", pair[0], pair[1]), format!("{lhs} != {rhs}"), gjt(&h)));
    }
    Ok(())
}

/// `2 |h(x) - h(y)|' = Σ_t |h^(t)(x) - h^(t)(y)|` on every torus edge.
fn halving_pointwise(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let shape = GridShape::new(5, 3, 6)?;
    for (i, seed) in ctx.seeds(4, ctx.cfg.identity_instances).into_iter().enumerate() {
        let h = random_table(shape, seed)?;
        let family = level_sets(&h, Mode::Torus)?;
        let mut bad = None;
        for x in 0..shape.points() {
            for j in 0..shape.n as usize {
                let step = shape.stride(j);
                let y = if shape.digit(x, j) == shape.k - 1 { x + step - shape.k as usize * step } else { x + step };
                let lhs = 2 * cyclic_distance(h.get(x) as u32, h.get(y) as u32, shape.l)?;
                let rhs: u32 = family.sets.iter().map(|s| s.get(x).abs_diff(s.get(y)) as u32).sum();
                if lhs != rhs && bad.is_none() {
                    bad = Some(format!("edge {x}-{y}: {lhs} != {rhs}"));
                }
            }
        }
        t.case("halving-pointwise", bad.is_none(), || (format!("table{i}-seed{seed}"), bad.clone().unwrap_or_default(), gjt(&h)));
    }
    Ok(())
}

/// `f = 1 + Σ_t f^(>t)` pointwise (0-based: `f = Σ_t f^(>t)`).
fn reconstruct(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let shape = GridShape::new(5, 2, 6)?;
    for (i, seed) in ctx.seeds(5, ctx.cfg.identity_instances).into_iter().enumerate() {
        let f = random_table(shape, seed)?;
        let family = level_sets(&f, Mode::Grid)?;
        let independent = (0..shape.points()).all(|x| family.sets.iter().map(|s| s.get(x)).sum::<u16>() == f.get(x));
        let ok = independent && family.reconstruct()? == f;
        t.case("grid-reconstruct", ok, || (format!("table{i}-seed{seed}"), "reconstruction differs".into(), gjt(&f)));
    }
    Ok(())
}
