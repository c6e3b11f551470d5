// SPDX-License-Identifier: Apache-2.0

use anyhow::Result;
use gridjunta::constructions::{cuboid, cuboid_boundary, cuboid_sharpness, random_set};
use gridjunta::grid::complement_boundary_check;
use gridjunta::{bollobas_leader_bound, edge_boundary, GridFunction, GridShape, Mode};

use super::{fixed, gjt, Ctx, Instance, Tally};

const SUITE: &str = "isoperimetry";
const RANDOM_CHUNKS: usize = 10;

pub fn instances() -> Vec<Instance> {
    let mut v = vec![
        Instance::new(SUITE, "exhaustive-3^2", |_, t| exhaustive(3, 2, t)),
        Instance::new(SUITE, "exhaustive-2^3", |_, t| exhaustive(2, 3, t)),
    ];
    for chunk in 0..RANDOM_CHUNKS {
        v.push(Instance::new(SUITE, format!("random-5^3-part{chunk}"), move |ctx, t| random(ctx, chunk, t)));
    }
    v.push(Instance::new(SUITE, "sharpness-cuboid-4^3", |_, t| cuboid_sharp(t)));
    v.push(Instance::new(SUITE, "sharpness-slab", |_, t| slabs(t)));
    v.push(Instance::new(SUITE, "cuboid-formula", |_, t| cuboid_formula(t)));
    v
}

/// Edge-isoperimetric bound, complement symmetry and `|∂A| <= |∂'A|`.
pub(super) fn check_set(f: &GridFunction, name: impl Fn() -> String, t: &mut Tally) -> Result<()> {
    let shape = f.shape();
    let b = edge_boundary(f, Mode::Grid, None)?;
    let iso = bollobas_leader_bound(f.support_size(), shape.k, shape.n)?;
    let ok = iso.admits(b);
    t.case("bl-bound", ok, || (name(), format!("|dA| = {b} < {}", iso.value), gjt(f)));
    if b > 0 {
        t.ratio("bl-bound", iso.value / b as f64);
    }
    let ok = complement_boundary_check(f)?;
    t.case("complement", ok, || (name(), "|dA| != |d(A^c)|".into(), gjt(f)));
    let torus = edge_boundary(f, Mode::Torus, None)?;
    t.case("torus-dominates", torus >= b, || (name(), format!("|d'A| = {torus} < |dA| = {b}"), gjt(f)));
    Ok(())
}

fn exhaustive(k: u32, n: u32, t: &mut Tally) -> Result<()> {
    let shape = GridShape::boolean(k, n)?;
    for mask in 0u64..1 << shape.points() {
        let f = GridFunction::from_fn(shape, |i| ((mask >> i) & 1) as u16)?;
        check_set(&f, || format!("mask={mask:#x}"), t)?;
    }
    Ok(())
}

fn random(ctx: &Ctx, chunk: usize, t: &mut Tally) -> Result<()> {
    let seeds = ctx.seeds(1, ctx.cfg.iso_random_sets);
    let per = seeds.len().div_ceil(RANDOM_CHUNKS);
    for (i, &seed) in seeds.iter().enumerate().skip(chunk * per).take(per) {
        // Density spread over (0, 1) so that small and large sets both occur.
        let p = (seed >> 11) as f64 / (1u64 << 53) as f64;
        let f = random_set(5, 3, p, seed)?;
        check_set(&f, || format!("set{i}-seed{seed}"), t)?;
    }
    Ok(())
}

fn cuboid_sharp(t: &mut Tally) -> Result<()> {
    let (k, n) = (4, 3);
    let mut below = Vec::new();
    for a in 1..k {
        for s in 1..=n {
            let c = cuboid_sharpness(a, s, k, n)?;
            let name = format!("a={a},s={s}");
            let f = cuboid(a, s, k, n).ok();
            t.case("cuboid-formula", c.boundary == c.formula, || {
                (name.clone(), format!("enumerated {} vs formula {}", c.boundary, c.formula), f.as_ref().and_then(gjt))
            });
            t.case("cuboid-sharp", c.attains_term, || {
                (name.clone(), format!("|dA| = {} is not the r = {s} term at |A| = {}", c.boundary, c.size), f.as_ref().and_then(gjt))
            });
            if !c.attains_min {
                below.push(format!("({a},{s}):min r={} {:.4}", c.iso.argmin_r, c.iso.value));
            }
            t.info(
                "cuboid-term",
                c.boundary,
                fixed(c.iso.value),
                format!("a={a} s={s} |A|={} literal_min_attained={}", c.size, c.attains_min),
            );
        }
    }
    t.info("cuboid-min-below-term", below.len(), "", below.join(" "));
    Ok(())
}

fn slabs(t: &mut Tally) -> Result<()> {
    for (k, n) in [(2, 1), (2, 2), (2, 3), (2, 4), (4, 1), (4, 2), (4, 3), (6, 2), (6, 3), (8, 2), (8, 3)] {
        let f = cuboid(k / 2, 1, k, n)?;
        let b = edge_boundary(&f, Mode::Grid, None)?;
        let want = (k as u64).pow(n - 1);
        let iso = bollobas_leader_bound(f.support_size(), k, n)?;
        let ok = b == want && iso.exact == Some(want);
        t.case("slab-half-sharp", ok, || {
            (format!("k={k},n={n}"), format!("|dA| = {b}, k^(n-1) = {want}, bound {:?}", iso.exact), gjt(&f))
        });
    }
    Ok(())
}

/// Enumerated boundary against the closed form for every cuboid with
/// `k <= 16` and `k^n <= 2^16`.
fn cuboid_formula(t: &mut Tally) -> Result<()> {
    for k in 2u32..=16 {
        let mut n = 1;
        while (k as u64).pow(n) <= 1 << 16 {
            for s in 1..=n {
                for a in 1..k {
                    let f = cuboid(a, s, k, n)?;
                    let b = edge_boundary(&f, Mode::Grid, None)?;
                    let want = cuboid_boundary(a, s, k, n);
                    t.case("cuboid-formula", b == want, || {
                        (format!("a={a},s={s},k={k},n={n}"), format!("enumerated {b}, formula {want}"), gjt(&f))
                    });
                }
            }
            n += 1;
        }
    }
    Ok(())
}
