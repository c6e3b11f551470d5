// SPDX-License-Identifier: Apache-2.0

use anyhow::Result;
use gridjunta::constructions::{cuboid, decision_tree_function, dictator_tuple_map, identity_map, tribes_grid, DecisionTreeSpec};
use gridjunta::extract::{boundary_cost, grid_junta_extract, iso_lower_diag, refined_cost, Method};
use gridjunta::lipschitz::{displacement_sum, lipschitz_constant, TorusMap};
use gridjunta::numeric::{q, q_to_f64, safe_le};
use gridjunta::report::{c1, c4};
use gridjunta::{best_junta_search, edge_boundary, GridFunction, GridShape, HVariant, Mode};
use num_bigint::BigInt;
use num_rational::BigRational;

use super::pipelines::{meets_eps, recount};
use super::{fixed, gjt, sci, Ctx, Instance, Tally};

const SUITE: &str = "examples";

pub fn instances() -> Vec<Instance> {
    vec![
        Instance::new(SUITE, "tree-junta-lower-bound", tree_lower_bound),
        Instance::new(SUITE, "tree-boundary-statistic", tree_statistic),
        Instance::new(SUITE, "tree-exponent-gap", tree_gap),
        Instance::new(SUITE, "tribes-4-1-1", tribes),
        Instance::new(SUITE, "worked-examples", worked),
    ]
}

/// Every leaf-parent fibre along a reachable path holds exactly `k/2` ones.
fn balanced(f: &GridFunction, spec: &DecisionTreeSpec) -> bool {
    let shape = f.shape();
    let mut x = vec![0u32; shape.n as usize];
    (0..shape.points()).all(|i| {
        shape.point_into(i, &mut x);
        let mut p = 0usize;
        for s in 0..spec.d - 1 {
            p = p * spec.k as usize + x[spec.label(s, p)] as usize;
        }
        let j = spec.label(spec.d - 1, p);
        if x[j] != 0 {
            return true;
        }
        let ones: u32 = (0..spec.k)
            .map(|v| {
                x[j] = v;
                f.at(&x) as u32
            })
            .sum();
        ones == spec.k / 2
    })
}

/// No junta on at most `k^(d-1)/2 = 2` coordinates is within `1/4`.
fn tree_lower_bound(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    for seed in ctx.seeds(11, ctx.cfg.tree_seeds.max(5)) {
        let (f, spec) = decision_tree_function(4, 2, seed, &ctx.budget)?;
        t.case("tree-balanced", balanced(&f, &spec), || (format!("seed{seed}"), "unbalanced leaf-parent".into(), gjt(&f)));
        let s = best_junta_search(&f, 2, 0.25, ctx.budget.max_subsets)?;
        t.case("no-small-junta", s.found.is_none(), || {
            (format!("seed{seed}"), format!("found {:?}", s.found.as_ref().map(|g| g.coords_one_based())), gjt(&f))
        });
        if let Some(p) = s.profile.last() {
            t.ratio("no-small-junta", 0.25 / p.distance.value());
        }
    }
    Ok(())
}

/// Mean of `Σ_j E_x |∂(f_j^x)|` over seeds against `½(d-1)(k-1) + ½k`,
/// and `Σ_j E_x h*(f_j^x) <= 3 d log2 k` for every seed.
fn tree_statistic(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let (k, d) = (4u32, 2u32);
    let expected = 0.5 * (d - 1) as f64 * (k - 1) as f64 + 0.5 * k as f64;
    let cap = 3.0 * d as f64 * (k as f64).log2();
    let mut stats = Vec::new();
    for seed in ctx.seeds(12, ctx.cfg.boundary_seeds) {
        let (f, _) = decision_tree_function(k, d, seed, &ctx.budget)?;
        stats.push(q_to_f64(&boundary_cost(&f)?));
        let r = refined_cost(&f, HVariant::HStar)?;
        t.case("refined-cost-cap", safe_le(r, cap), || (format!("seed{seed}"), format!("{r} > {cap}"), gjt(&f)));
        t.ratio("refined-cost-cap", r / cap);
    }
    let n = stats.len() as f64;
    let mean = stats.iter().sum::<f64>() / n;
    let var = stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    t.row(
        "expected-boundary",
        n >= 200.0 && (mean - expected).abs() <= 3.0 * se,
        fixed(mean),
        fixed(expected),
        format!("seeds={} se={} |diff|/se={}", stats.len(), fixed(se), fixed((mean - expected).abs() / se)),
        None,
    );
    Ok(())
}

/// Exponents of the two size bounds on one tree.
fn tree_gap(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let seed = ctx.seeds(13, 1)[0];
    let (f, _) = decision_tree_function(4, 2, seed, &ctx.budget)?;
    let eps = 0.25;
    let main = c1() * q_to_f64(&boundary_cost(&f)?) / eps;
    let refined = c4(true) * refined_cost(&f, HVariant::HStar)? / eps;
    t.info("exponent-main", fixed(main), "", format!("seed{seed} C1*|dA|/(k^(n-1)*eps)"));
    t.info("exponent-refined", fixed(refined), "", format!("seed{seed} C4*sum_j E h*/eps"));
    let h = refined_cost(&f, HVariant::HStar)?;
    let b = q_to_f64(&boundary_cost(&f)?);
    t.row("functional-gap", safe_le(h, b), fixed(h), fixed(b), "sum_j E h* below sum_j E |dF|", Some(&f));
    Ok(())
}

fn tribes(ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let (f, spec) = tribes_grid(4, 1, 1, &ctx.budget)?;
    let want = BigRational::new(BigInt::from(7), BigInt::from(16));
    let enumerated = BigRational::new(BigInt::from(f.support_size()), BigInt::from(f.len()));
    t.row("tribes-n", spec.n == 4, spec.n, 4, "1 + s + t 2^t", None);
    t.row("tribes-measure", spec.measure() == want && enumerated == want, &enumerated, &want, "closed form and enumeration", Some(&f));
    t.row("tribes-eps", spec.eps_exact() == BigRational::new(1.into(), 12.into()), spec.eps_exact(), "1/12", "2^-s/6", None);
    t.row("tribes-window", spec.window_holds(), &enumerated, "(1/4, 1/2)", "1/2 - 3 eps < measure < 1/2", Some(&f));
    let b = edge_boundary(&f, Mode::Grid, None)?;
    let ratio = b as f64 / f.shape().fibres_per_direction() as f64;
    t.info("tribes-boundary-ratio", fixed(ratio), fixed(spec.big_l), "|dA|/k^(n-1) against L");
    let eps = 1.0 / 12.0;
    let e = grid_junta_extract(&f, eps, Method::Main, &ctx.budget)?;
    let mismatches = recount(&f, &e.junta)?;
    t.row(
        "tribes-contract",
        meets_eps(mismatches, f.len(), eps),
        format!("{mismatches}/{}", f.len()),
        fixed(eps),
        format!("|J| = {}, bound {}", e.junta.size(), sci(e.report.bound)),
        Some(&f),
    );
    Ok(())
}

fn map(f: &TorusMap) -> String {
    let s = f.shape();
    format!("{}^{} -> {}^{}", s.k, s.n, s.l, f.m())
}

/// Small examples with known answers.
fn worked(_: &Ctx, t: &mut Tally) -> Result<()> {
    let a = cuboid(2, 1, 4, 2)?;
    let (g, tor) = (edge_boundary(&a, Mode::Grid, None)?, edge_boundary(&a, Mode::Torus, None)?);
    t.row("strip-boundaries", g == 4 && tor == 8, format!("{g},{tor}"), "4,8", "[2]x[4] in [4]^2", Some(&a));

    let d = iso_lower_diag(&cuboid(2, 1, 4, 3)?, 0.01)?;
    t.row("slab-lower-diagnostic", d.holds(), fixed(d.lower_bound), d.boundary, "e(|A|/k)ln(k^n/|A|) <= |dA|", None);

    let id = identity_map(6, 2)?;
    let alpha = lipschitz_constant(&id, Mode::Torus);
    t.row("identity-alpha", alpha == q(1, 1), &alpha, 1, map(&id), None);
    let proj = dictator_tuple_map(6, 2, 6, &[0])?;
    let alpha = lipschitz_constant(&proj, Mode::Torus);
    t.row("projection-alpha", alpha == q(2, 1), &alpha, 2, map(&proj), None);
    let dsum = displacement_sum(proj.component(0), Mode::Torus);
    t.row("projection-displacement", dsum == q(1, 1), &dsum, 1, "f = x_1 on Z_6^2", None);
    let constant = TorusMap::new(vec![GridFunction::constant(GridShape::new(3, 2, 4)?, 2)?])?;
    let alpha = lipschitz_constant(&constant, Mode::Grid);
    t.row("constant-alpha", alpha == q(0, 1), &alpha, 0, map(&constant), None);

    let e = grid_junta_extract(&cuboid(1, 1, 3, 3)?, 0.1, Method::Main, &Default::default())?;
    t.row("slab-extract", e.junta.coords_one_based() == [1] && e.distance.is_zero(), format!("{:?}", e.junta.coords_one_based()), "[1]", "", None);
    Ok(())
}
