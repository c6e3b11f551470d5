// SPDX-License-Identifier: Apache-2.0

use anyhow::Result;
use gridjunta::constructions::{cuboid, decision_tree_function, random_set, tribes_grid};
use gridjunta::extract::{boundary_cost, grid_junta_extract, iso_lower_diag, refined_cost, torus_junta_extract, Extraction, Method};
use gridjunta::io::{decode_junta, encode_junta};
use gridjunta::numeric::{q_to_f64, safe_le};
use gridjunta::{best_junta_search, Error, GridFunction, HVariant, Junta, Mode};
use serde::Serialize;

use super::{fixed, gjt, sci, Ctx, Instance, Tally};

const SUITE: &str = "pipelines";

/// One extraction, in the fixed report column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionRow {
    pub instance: String,
    pub method: String,
    pub k: u32,
    pub n: u32,
    pub eps: String,
    pub measure: String,
    pub boundary: u64,
    pub refined_cost: String,
    pub junta_size: usize,
    pub bound: String,
    pub ratio: String,
    pub flags: String,
}

pub fn method_name(e: &Extraction) -> &'static str {
    match (e.mode, e.method) {
        (Mode::Torus, _) => "torus",
        (Mode::Grid, Method::Main) => "main",
        (Mode::Grid, Method::Refined) => "refined",
    }
}

pub fn extraction_row(instance: &str, e: &Extraction) -> ExtractionRow {
    let shape = e.junta.shape();
    ExtractionRow {
        instance: instance.to_owned(),
        method: method_name(e).into(),
        k: shape.k,
        n: shape.n,
        eps: fixed(e.eps),
        measure: fixed(e.measure),
        boundary: e.boundary,
        refined_cost: fixed(e.refined_cost),
        junta_size: e.junta.size(),
        bound: sci(e.report.bound),
        ratio: e.report.ratio.map(sci).unwrap_or_default(),
        flags: e.flags.join(";"),
    }
}

/// Mismatches between `f` and `g` after a round trip through the junta
/// container, evaluated point by point.
pub fn recount(f: &GridFunction, g: &Junta) -> Result<u64> {
    let g = decode_junta(&encode_junta(g))?;
    let shape = f.shape();
    let mut x = vec![0u32; shape.n as usize];
    let mut mismatches = 0;
    for i in 0..shape.points() {
        shape.point_into(i, &mut x);
        mismatches += (g.eval(&x) != f.get(i)) as u64;
    }
    Ok(mismatches)
}

/// `mismatches / k^n <= eps`.
pub fn meets_eps(mismatches: u64, points: usize, eps: f64) -> bool {
    mismatches as f64 <= eps * points as f64
}

/// Runs all three extractions at every accuracy and checks them.
pub fn check_table(name: &str, f: &GridFunction, ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let refined = refined_cost(f, HVariant::HStar)?;
    let main = q_to_f64(&boundary_cost(f)?);
    t.row("refined-monotone", safe_le(refined, main), fixed(refined), fixed(main), "sum_j E h* vs |dA|/k^(n-1)", Some(f));
    for &eps in &ctx.cfg.eps {
        let runs = [
            grid_junta_extract(f, eps, Method::Main, &ctx.budget),
            grid_junta_extract(f, eps, Method::Refined, &ctx.budget),
            torus_junta_extract(f, eps, &ctx.budget),
        ];
        let mut bounds = Vec::new();
        for run in runs {
            let e = match run {
                Ok(e) => e,
                Err(err) => {
                    t.case("contract", false, || (format!("eps={eps}"), err.to_string(), gjt(f)));
                    continue;
                }
            };
            let method = method_name(&e);
            let case = || format!("eps={eps}-{method}");
            let mismatches = recount(f, &e.junta)?;
            t.case("contract", meets_eps(mismatches, f.len(), eps), || {
                (case(), format!("{mismatches} of {} points differ", f.len()), gjt(f))
            });
            t.case("size-bound", e.report.holds(), || {
                (case(), format!("|J| = {} above {}", e.junta.size(), e.report.bound), gjt(f))
            });
            let diag = iso_lower_diag(f, eps)?;
            t.case("trivial-regime", !diag.trivial || e.junta.size() == 0, || {
                (case(), format!("measure {} <= eps but |J| = {}", diag.measure, e.junta.size()), gjt(f))
            });
            oracle(f, &e, ctx, t, &case())?;
            bounds.push(e.report.bound);
            t.extraction(extraction_row(name, &e));
        }
        if let [main, _, torus] = bounds[..] {
            t.case("torus-bound-dominates", torus >= main, || (format!("eps={eps}"), format!("{torus} < {main}"), gjt(f)));
        }
    }
    Ok(())
}

/// The exhaustive search never needs more coordinates than a pipeline used.
fn oracle(f: &GridFunction, e: &Extraction, ctx: &Ctx, t: &mut Tally, case: &str) -> Result<()> {
    match best_junta_search(f, e.junta.size(), e.eps, ctx.budget.max_subsets) {
        Ok(s) => {
            let best = s.min_size();
            t.case("oracle-sanity", best.is_some_and(|b| b <= e.junta.size()), || {
                (case.to_owned(), format!("oracle {best:?} vs pipeline {}", e.junta.size()), gjt(f))
            });
        }
        Err(Error::BudgetExceeded { .. }) => t.info("oracle-skipped", e.junta.size(), "", case),
        Err(err) => return Err(err.into()),
    }
    Ok(())
}

pub fn instances() -> Vec<Instance> {
    let mut v = Vec::new();
    for (k, n) in [(3u32, 2u32), (4, 2), (5, 2), (3, 3), (4, 3)] {
        v.push(Instance::new(SUITE, format!("slab-{k}^{n}"), move |ctx, t| {
            let f = cuboid((k / 2).max(1), 1, k, n)?;
            check_table(&format!("slab-{k}^{n}"), &f, ctx, t)
        }));
    }
    v.push(Instance::new(SUITE, "tribes-4-1-1", |ctx, t| {
        let (f, _) = tribes_grid(4, 1, 1, &ctx.budget)?;
        check_table("tribes-4-1-1", &f, ctx, t)
    }));
    v.push(Instance::new(SUITE, "trees-4-2", |ctx, t| {
        for seed in ctx.seeds(6, ctx.cfg.tree_seeds) {
            let (f, _) = decision_tree_function(4, 2, seed, &ctx.budget)?;
            check_table(&format!("tree-4-2-seed{seed}"), &f, ctx, t)?;
        }
        Ok(())
    }));
    for (k, stream) in [(3u32, 7u64), (4, 8)] {
        v.push(Instance::new(SUITE, format!("random-{k}^2"), move |ctx, t| {
            for seed in ctx.seeds(stream, ctx.cfg.pipeline_random_sets) {
                let p = (seed >> 11) as f64 / (1u64 << 53) as f64;
                let f = random_set(k, 2, p, seed)?;
                check_table(&format!("random-{k}^2-seed{seed}"), &f, ctx, t)?;
            }
            Ok(())
        }));
    }
    v
}
