// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use anyhow::Result;
use gridjunta::constructions::{dictator_tuple_map, identity_map, random_map};
use gridjunta::io::{decode_junta, encode_junta};
use gridjunta::lipschitz::{
    analyze_grid_map, analyze_torus_map, displacement_sum, level_sets, sum_bound, MapAnalysis, TorusMap,
};
use gridjunta::numeric::{q_to_f64, Q};
use gridjunta::{cyclic_distance, Budget, Mode};
use serde::Serialize;
use serde_json::json;

use super::{fixed, sci, Ctx, Instance, Tally};

const SUITE: &str = "lipschitz";

/// One row per (output coordinate, stage).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzRow {
    pub map: String,
    pub mode: String,
    pub coordinate: usize,
    pub stage: String,
    pub level: String,
    pub boundary: String,
    pub b: String,
    pub eps: String,
    pub junta_size: String,
    pub distance: String,
    pub bound: String,
    pub ratio: String,
    pub flags: String,
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Grid => "grid",
        Mode::Torus => "torus",
    }
}

pub fn analyze(f: &TorusMap, mode: Mode, delta: f64, eps: f64, budget: &Budget, seed: u64) -> gridjunta::Result<MapAnalysis> {
    match mode {
        Mode::Torus => analyze_torus_map(f, delta, eps, budget, seed),
        Mode::Grid => analyze_grid_map(f, delta, eps, budget),
    }
}

pub fn rows(map: &str, a: &MapAnalysis) -> Vec<LipschitzRow> {
    let alpha = q_to_f64(&a.selection.alpha);
    let blank = |i: usize, stage: &str| LipschitzRow {
        map: map.to_owned(),
        mode: mode_name(a.mode).into(),
        coordinate: i + 1,
        stage: stage.into(),
        level: String::new(),
        boundary: String::new(),
        b: String::new(),
        eps: String::new(),
        junta_size: String::new(),
        distance: String::new(),
        bound: String::new(),
        ratio: String::new(),
        flags: String::new(),
    };
    let mut out = Vec::new();
    for (i, d) in a.selection.displacements.iter().enumerate() {
        let selected = a.selection.selected.contains(&i);
        out.push(LipschitzRow {
            b: d.to_string(),
            bound: fixed(alpha / a.delta),
            flags: if selected { "selected" } else { "excluded" }.into(),
            ..blank(i, "select")
        });
        let Some(c) = a.coordinates.iter().find(|c| c.index == i) else { continue };
        for (t, (&bd, &e)) in c.boundaries.iter().zip(&c.allocation.eps).enumerate() {
            out.push(LipschitzRow {
                // Torus levels are indexed by Z_l, grid thresholds by 1..l-1.
                level: match a.mode {
                    Mode::Torus => t.to_string(),
                    Mode::Grid => (t + 1).to_string(),
                },
                boundary: bd.to_string(),
                eps: fixed(e),
                junta_size: c.level_coords[t].len().to_string(),
                ..blank(i, "level")
            });
        }
        out.push(LipschitzRow {
            b: c.b.to_string(),
            eps: fixed(c.eps_spent),
            junta_size: c.junta.size().to_string(),
            distance: fixed(c.distance.value()),
            bound: fixed(c.level_total.value()),
            flags: c.flags.join(";"),
            ..blank(i, "merge")
        });
        for (stage, r) in [("report", &c.report), ("alpha-report", &c.alpha_report)] {
            out.push(LipschitzRow {
                junta_size: c.junta.size().to_string(),
                bound: sci(r.bound),
                ratio: r.ratio.map(sci).unwrap_or_default(),
                flags: r.formula.clone(),
                ..blank(i, stage)
            });
        }
    }
    out
}

/// `{alpha, selected, per_i: {B_i, J_i, eps_spent, distance}}` with
/// 1-based coordinates, plus the run parameters.
pub fn summary(map: &str, a: &MapAnalysis) -> serde_json::Value {
    let per_i: BTreeMap<String, serde_json::Value> = a
        .coordinates
        .iter()
        .map(|c| {
            (
                (c.index + 1).to_string(),
                json!({
                    "B_i": c.b.to_string(),
                    "J_i": c.junta.coords_one_based(),
                    "eps_spent": c.eps_spent,
                    "distance": format!("{}/{}", c.distance.numerator, c.distance.points),
                    "distance_value": c.distance.value(),
                    "flags": c.flags,
                }),
            )
        })
        .collect();
    json!({
        "map": map,
        "mode": mode_name(a.mode),
        "delta": a.delta,
        "eps": a.eps,
        "alpha": a.selection.alpha.to_string(),
        "selected": a.selection.selected.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "per_i": per_i,
    })
}

/// Point-by-point distance of each emitted junta after a container round
/// trip, in the metric of the mode.
pub fn recount_distances(f: &TorusMap, a: &MapAnalysis) -> Result<Vec<(usize, u64)>> {
    let shape = f.shape();
    let mut x = vec![0u32; shape.n as usize];
    a.coordinates
        .iter()
        .map(|c| {
            let g = decode_junta(&encode_junta(&c.junta))?;
            let fi = f.component(c.index);
            let mut total = 0u64;
            for p in 0..shape.points() {
                shape.point_into(p, &mut x);
                let (u, v) = (fi.get(p) as u32, g.eval(&x) as u32);
                total += match a.mode {
                    Mode::Torus => cyclic_distance(u, v, shape.l)?,
                    Mode::Grid => u.abs_diff(v),
                } as u64;
            }
            Ok((c.index, total))
        })
        .collect()
}

pub(super) fn check_map(name: &str, f: &TorusMap, mode: Mode, ctx: &Ctx, seed: u64, t: &mut Tally) -> Result<Option<MapAnalysis>> {
    let (delta, eps) = (ctx.cfg.lipschitz_delta, ctx.cfg.lipschitz_eps);
    let shape = f.shape();
    for (i, c) in f.components().iter().enumerate() {
        let b = displacement_sum(c, mode);
        let floor = sum_bound(&level_sets(c, mode)?.boundaries()?, shape.points(), mode);
        t.case("sum-bound", b >= floor, || (format!("{name}-coord{}", i + 1), format!("B = {b} < {floor}"), None));
    }
    let a = match analyze(f, mode, delta, eps, &ctx.budget, seed) {
        Ok(a) => a,
        Err(e) => {
            t.case("contract", false, || (name.to_owned(), e.to_string(), None));
            return Ok(None);
        }
    };
    let m = f.m();
    let need = ((1.0 - delta) * m as f64).ceil() as usize;
    t.case("markov", a.selection.selected.len() >= need, || {
        (name.to_owned(), format!("{} selected, need {need}", a.selection.selected.len()), None)
    });
    let mean: Q = a.selection.displacements.iter().sum::<Q>() / Q::from_integer(m as i128);
    t.case("mean-displacement", mean <= a.selection.alpha, || {
        (name.to_owned(), format!("mean D = {mean} > alpha = {}", a.selection.alpha), None)
    });
    for (index, total) in recount_distances(f, &a)? {
        t.case("contract", total as f64 <= eps * shape.points() as f64, || {
            (format!("{name}-coord{}", index + 1), format!("distance {total}/{} > {eps}", shape.points()), None)
        });
    }
    for c in &a.coordinates {
        t.case("eps-allocation", c.allocation.total_weight() <= Q::from_integer(1), || {
            (format!("{name}-coord{}", c.index + 1), format!("weights sum to {}", c.allocation.total_weight()), None)
        });
        t.case("size-bound", c.report.holds() && c.alpha_report.holds(), || {
            (format!("{name}-coord{}", c.index + 1), format!("|J| = {} above a bound", c.junta.size()), None)
        });
    }
    for r in rows(name, &a) {
        t.lipschitz(r);
    }
    Ok(Some(a))
}

pub fn instances() -> Vec<Instance> {
    let mut v = Vec::new();
    for (mode, stream) in [(Mode::Torus, 9u64), (Mode::Grid, 10)] {
        let tag = mode_name(mode);
        v.push(Instance::new(SUITE, format!("random-4^2-to-3^2-{tag}"), move |ctx, t| {
            let mut good = 0;
            for seed in ctx.seeds(stream, ctx.cfg.lipschitz_maps) {
                let f = random_map(4, 2, 3, 2, seed)?;
                if let Some(a) = check_map(&format!("random-{tag}-seed{seed}"), &f, mode, ctx, seed, t)? {
                    good += a.coordinates.iter().filter(|c| c.distance.within(ctx.cfg.lipschitz_eps)).count().min(1);
                }
            }
            t.row("selected-within-eps", good == ctx.cfg.lipschitz_maps, good, ctx.cfg.lipschitz_maps, "maps with a selected coordinate within eps", None);
            Ok(())
        }));
        v.push(Instance::new(SUITE, format!("identity-6^2-{tag}"), move |ctx, t| {
            let f = identity_map(6, 2)?;
            if let Some(a) = check_map("identity", &f, mode, ctx, ctx.cfg.seed, t)? {
                let ok = a.selection.selected.len() == 2 && a.coordinates.iter().all(|c| c.distance.is_zero());
                t.row("identity-exact", ok, a.selection.selected.len(), 2, "all selected at distance 0", None);
            }
            Ok(())
        }));
        v.push(Instance::new(SUITE, format!("dictator-4^2-to-3^2-{tag}"), move |ctx, t| {
            let f = dictator_tuple_map(4, 2, 3, &[1, 0])?;
            if let Some(a) = check_map("dictator", &f, mode, ctx, ctx.cfg.seed, t)? {
                let sizes: Vec<usize> = a.coordinates.iter().map(|c| c.junta.size()).collect();
                t.row("dictator-size-one", sizes.iter().all(|&s| s == 1) && sizes.len() == 2, format!("{sizes:?}"), "[1, 1]", "", None);
            }
            Ok(())
        }));
    }
    v
}
