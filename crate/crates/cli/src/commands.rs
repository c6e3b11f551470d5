// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations. Each returns the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gridjunta::cube::CubeFunction;
use gridjunta::encode::{influence_transfer_report, lift_to_cube};
use gridjunta::extract::{grid_junta_extract, torus_junta_extract, Method};
use gridjunta::grid::boundary_by_direction;
use gridjunta::io::{read_junta, read_map, read_table, write_junta, write_sidecar, Sidecar};
use gridjunta::numeric::{log2_exact, q_to_f64, Q};
use gridjunta::{bollobas_leader_bound, edge_boundary, Mode};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::generate::generate;
use crate::suites::{self, fixed, pipelines, Ctx};

pub const EXIT_FAILURES: i32 = 1;
pub const EXIT_CONTRACT: i32 = 2;

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into())
}

fn stdout_csv<T: Serialize>(rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Builds the container described by `sidecar`, writes it and its sidecar.
pub fn gen(sidecar: Sidecar, output: Option<PathBuf>, cfg: &ExperimentConfig) -> Result<i32> {
    let artifact = generate(&sidecar, &cfg.budget())?;
    let path = match output {
        Some(p) => p,
        None => {
            let mut name = sidecar.generator.clone();
            for (k, v) in &sidecar.params {
                name.push_str(&format!("-{k}{}", v.to_string().replace(['[', ']', '"'], "").replace(',', "_")));
            }
            if let Some(s) = sidecar.seed {
                name.push_str(&format!("-seed{s}"));
            }
            cfg.out.join(format!("{name}.{}", artifact.extension()))
        }
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&path, artifact.encode()).with_context(|| format!("writing {}", path.display()))?;
    write_sidecar(&path, &sidecar)?;
    println!("{}", path.display());
    Ok(0)
}

#[derive(Serialize)]
struct BoundaryRow {
    instance: String,
    k: u32,
    n: u32,
    mode: &'static str,
    direction: String,
    size: u64,
    measure: String,
    boundary: u64,
    iso_bound: String,
    argmin_r: u32,
    ratio: String,
}

pub fn boundary(input: &Path, mode: Mode, direction: Option<usize>) -> Result<i32> {
    let f = read_table(input)?;
    let shape = f.shape();
    if let Some(j) = direction {
        if j == 0 || j > shape.n as usize {
            bail!("direction {j} outside 1..={}", shape.n);
        }
    }
    let b = edge_boundary(&f, mode, direction.map(|j| j - 1))?;
    let iso = bollobas_leader_bound(f.support_size(), shape.k, shape.n)?;
    stdout_csv(&[BoundaryRow {
        instance: stem(input),
        k: shape.k,
        n: shape.n,
        mode: match mode {
            Mode::Grid => "grid",
            Mode::Torus => "torus",
        },
        direction: direction.map(|j| j.to_string()).unwrap_or_else(|| "all".into()),
        size: f.support_size(),
        measure: fixed(f.support_size() as f64 / f.len() as f64),
        boundary: b,
        iso_bound: fixed(iso.value),
        argmin_r: iso.argmin_r,
        ratio: if b > 0 { fixed(iso.value / b as f64) } else { String::new() },
    }])?;
    Ok(0)
}

#[derive(Serialize)]
struct InfluenceRow {
    instance: String,
    coordinate: String,
    grid_coordinate: usize,
    influence: String,
    value: String,
}

/// Bit influences of the binary lift when `k = 2^s`, otherwise the
/// per-direction boundary `|∂_j A| / k^(n-1)`. The last row is the total,
/// with the transfer bound `2|∂A|/k^(n-1)` when it applies.
pub fn influence(input: &Path) -> Result<i32> {
    let f = read_table(input)?;
    f.require_boolean()?;
    let shape = f.shape();
    let name = stem(input);
    let mut rows = Vec::new();
    let row = |c: String, g: usize, q: Q| InfluenceRow {
        instance: name.clone(),
        coordinate: c,
        grid_coordinate: g,
        influence: q.to_string(),
        value: fixed(q_to_f64(&q)),
    };
    let ok = match log2_exact(shape.k) {
        Some(s) => {
            let cube: CubeFunction = lift_to_cube(&f)?;
            for b in 0..cube.dim() as usize {
                rows.push(row(format!("bit{}", b + 1), b / s.max(1) as usize + 1, cube.influence(b)?));
            }
            let r = influence_transfer_report(&f)?;
            rows.push(row("total".into(), 0, r.total_influence));
            rows.push(row("transfer-bound".into(), 0, r.bound));
            r.holds()
        }
        None => {
            let fibres = shape.fibres_per_direction() as i128;
            let per = boundary_by_direction(&f, Mode::Grid)?;
            for (j, &b) in per.iter().enumerate() {
                rows.push(row(format!("dir{}", j + 1), j + 1, Q::new(b as i128, fibres)));
            }
            rows.push(row("total".into(), 0, Q::new(per.iter().sum::<u64>() as i128, fibres)));
            true
        }
    };
    stdout_csv(&rows)?;
    if !ok {
        eprintln!("influence transfer bound violated");
        return Ok(EXIT_CONTRACT);
    }
    Ok(0)
}

pub fn extract(input: &Path, eps: f64, method: Method, mode: Mode, cfg: &ExperimentConfig) -> Result<i32> {
    let f = read_table(input)?;
    f.require_boolean()?;
    let budget = cfg.budget();
    let e = match mode {
        Mode::Grid => grid_junta_extract(&f, eps, method, &budget),
        Mode::Torus => torus_junta_extract(&f, eps, &budget),
    };
    let e = match e {
        Ok(e) => e,
        Err(gridjunta::Error::ContractViolation(msg)) => {
            eprintln!("contract violated: {msg}");
            return Ok(EXIT_CONTRACT);
        }
        Err(err) => return Err(err.into()),
    };
    let name = stem(input);
    let method_name = pipelines::method_name(&e);
    std::fs::create_dir_all(&cfg.out)?;
    let junta_path = cfg.out.join(format!("{name}-{method_name}.gjj"));
    write_junta(&junta_path, &e.junta)?;
    write_sidecar(
        &junta_path,
        &Sidecar::new("extract", None)
            .param("input", input.display().to_string())
            .param("eps", eps)
            .param("method", method_name),
    )?;
    let row = pipelines::extraction_row(&name, &e);
    suites::write_csv(&cfg.out.join(format!("{name}-{method_name}.csv")), std::slice::from_ref(&row))?;
    stdout_csv(&[row])?;
    // Re-check from the file on disk, independently of the pipeline.
    let mismatches = pipelines::recount(&f, &read_junta(&junta_path)?)?;
    if !pipelines::meets_eps(mismatches, f.len(), eps) {
        eprintln!("contract violated: {mismatches} of {} points differ", f.len());
        return Ok(EXIT_CONTRACT);
    }
    Ok(0)
}

pub fn lipschitz(input: &Path, delta: f64, eps: f64, mode: Mode, cfg: &ExperimentConfig) -> Result<i32> {
    let f = read_map(input)?;
    let a = match suites::lipschitz::analyze(&f, mode, delta, eps, &cfg.budget(), cfg.seed) {
        Ok(a) => a,
        Err(gridjunta::Error::ContractViolation(msg)) => {
            eprintln!("contract violated: {msg}");
            return Ok(EXIT_CONTRACT);
        }
        Err(err) => return Err(err.into()),
    };
    let name = stem(input);
    let tag = match mode {
        Mode::Grid => "grid",
        Mode::Torus => "torus",
    };
    std::fs::create_dir_all(&cfg.out)?;
    for c in &a.coordinates {
        write_junta(&cfg.out.join(format!("{name}-{tag}-coord{}.gjj", c.index + 1)), &c.junta)?;
    }
    let rows = suites::lipschitz::rows(&name, &a);
    suites::write_csv(&cfg.out.join(format!("{name}-{tag}-lipschitz.csv")), &rows)?;
    let mut summary = suites::lipschitz::summary(&name, &a);
    summary["config"] = serde_json::to_value(cfg)?;
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    std::fs::write(cfg.out.join(format!("{name}-{tag}-lipschitz.json")), &text)?;
    std::io::stdout().lock().write_all(text.as_bytes())?;
    for (index, total) in suites::lipschitz::recount_distances(&f, &a)? {
        if total as f64 > eps * f.shape().points() as f64 {
            eprintln!("contract violated on coordinate {}: {total}/{}", index + 1, f.shape().points());
            return Ok(EXIT_CONTRACT);
        }
    }
    Ok(0)
}

pub fn verify(suite: &str, inputs: &[PathBuf], cfg: &ExperimentConfig) -> Result<i32> {
    let ctx = Ctx::new(cfg.clone());
    let started = std::time::Instant::now();
    let report = suites::run(suite, inputs, &ctx, Some(&cfg.out.join("instances")))?;
    suites::write_artifacts(&report, suite, cfg, &cfg.out)?;
    let mut per_suite: Vec<(&str, u64, u64)> = Vec::new();
    for r in &report.rows {
        match per_suite.iter_mut().find(|(s, _, _)| *s == r.suite) {
            Some(e) => {
                e.1 += r.cases;
                e.2 += r.failures;
            }
            None => per_suite.push((&r.suite, r.cases, r.failures)),
        }
    }
    for (s, cases, failures) in &per_suite {
        println!("{} {s}: {cases} cases, {failures} failures", if *failures == 0 { "PASS" } else { "FAIL" });
    }
    for f in report.failures.iter().take(20) {
        println!("failure: {} {} {}", f.instance, f.check, f.detail);
    }
    eprintln!("verify {suite}: {:.1}s, artifacts in {}", started.elapsed().as_secs_f64(), cfg.out.display());
    Ok(if report.failure_count() == 0 { 0 } else { EXIT_FAILURES })
}

/// Generators whose output depends on the seed.
pub fn needs_seed(generator: &str) -> bool {
    matches!(generator, "tree" | "random" | "map-random")
}
