// SPDX-License-Identifier: Apache-2.0

//! Verification suites.
//!
//! A suite is a list of instances. Instances run concurrently on a pool of
//! `workers` threads, each writes its own CSV under `instances/`, and a
//! single aggregator writes the combined files once every instance is
//! done. The exit status depends only on the failure count.

mod encoding;
mod examples;
mod hstar;
mod inputs;
mod isoperimetry;
mod levels;
pub mod lipschitz;
pub mod pipelines;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gridjunta::io::encode_table;
use gridjunta::{Budget, GridFunction};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;

pub use lipschitz::LipschitzRow;
pub use pipelines::ExtractionRow;

pub const SUITES: [&str; 10] = [
    "isoperimetry",
    "claim21",
    "transfer",
    "intervals",
    "fibres",
    "hstar",
    "normrel",
    "pipelines",
    "lipschitz",
    "examples",
];

pub struct Ctx {
    pub cfg: ExperimentConfig,
    pub budget: Budget,
}

impl Ctx {
    pub fn new(cfg: ExperimentConfig) -> Self {
        let budget = cfg.budget();
        Self { cfg, budget }
    }

    /// `count` seeds from an independent ChaCha8 stream of the base seed.
    pub fn seeds(&self, stream: u64, count: usize) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(stream);
        (0..count).map(|_| rng.next_u64()).collect()
    }
}

type RunFn = Box<dyn Fn(&Ctx, &mut Tally) -> Result<()> + Send + Sync>;

pub struct Instance {
    pub suite: &'static str,
    pub name: String,
    run: RunFn,
}

impl Instance {
    pub fn new(suite: &'static str, name: impl Into<String>, run: impl Fn(&Ctx, &mut Tally) -> Result<()> + Send + Sync + 'static) -> Self {
        Self { suite, name: name.into(), run: Box::new(run) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: String,
    pub instance: String,
    pub check: String,
    pub cases: u64,
    pub failures: u64,
    pub status: String,
    pub measured: String,
    pub bound: String,
    pub detail: String,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// One failed case, with the offending table when there is one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub suite: String,
    pub instance: String,
    pub check: String,
    pub detail: String,
    #[serde(skip)]
    pub table: Option<Vec<u8>>,
}

/// Stored failure records per check; the count is always exact.
const KEEP_FAILURES: u64 = 20;

struct Agg {
    check: String,
    cases: u64,
    failures: u64,
    worst: Option<f64>,
}

/// Collects the results of one instance.
pub struct Tally {
    suite: &'static str,
    instance: String,
    aggs: Vec<Agg>,
    rows: Vec<CheckRow>,
    failures: Vec<Failure>,
    extractions: Vec<ExtractionRow>,
    lipschitz: Vec<LipschitzRow>,
}

impl Tally {
    fn new(suite: &'static str, instance: &str) -> Self {
        Self {
            suite,
            instance: instance.to_owned(),
            aggs: Vec::new(),
            rows: Vec::new(),
            failures: Vec::new(),
            extractions: Vec::new(),
            lipschitz: Vec::new(),
        }
    }

    fn agg(&mut self, check: &str) -> &mut Agg {
        let i = match self.aggs.iter().position(|a| a.check == check) {
            Some(i) => i,
            None => {
                self.aggs.push(Agg { check: check.to_owned(), cases: 0, failures: 0, worst: None });
                self.aggs.len() - 1
            }
        };
        &mut self.aggs[i]
    }

    fn record(&mut self, check: &str, subject: String, detail: String, table: Option<Vec<u8>>, kept: u64) {
        if kept < KEEP_FAILURES {
            self.failures.push(Failure {
                suite: self.suite.to_owned(),
                instance: subject,
                check: check.to_owned(),
                detail,
                table,
            });
        }
    }

    /// Counts one case of an aggregated check. `why` is only evaluated on
    /// failure and names the case, explains it and may attach a table.
    pub fn case(&mut self, check: &str, ok: bool, why: impl FnOnce() -> (String, String, Option<Vec<u8>>)) {
        let agg = self.agg(check);
        agg.cases += 1;
        if !ok {
            agg.failures += 1;
            let kept = agg.failures - 1;
            let (subject, detail, table) = why();
            let subject = if subject.is_empty() { self.instance.clone() } else { format!("{}/{}", self.instance, subject) };
            self.record(check, subject, detail, table, kept);
        }
    }

    /// Tracks the largest `measured / bound` seen for a check.
    pub fn ratio(&mut self, check: &str, ratio: f64) {
        let agg = self.agg(check);
        if ratio.is_finite() {
            agg.worst = Some(agg.worst.map_or(ratio, |w: f64| w.max(ratio)));
        }
    }

    /// A standalone row for a single quantity.
    pub fn row(&mut self, check: &str, ok: bool, measured: impl ToString, bound: impl ToString, detail: impl ToString, table: Option<&GridFunction>) {
        let detail = detail.to_string();
        if !ok {
            let subject = self.instance.clone();
            self.record(check, subject, detail.clone(), table.map(encode_table), 0);
        }
        self.rows.push(CheckRow {
            suite: self.suite.to_owned(),
            instance: self.instance.clone(),
            check: check.to_owned(),
            cases: 1,
            failures: (!ok) as u64,
            status: if ok { "PASS" } else { "FAIL" }.into(),
            measured: measured.to_string(),
            bound: bound.to_string(),
            detail,
        });
    }

    /// A reported quantity with no pass/fail meaning.
    pub fn info(&mut self, check: &str, measured: impl ToString, bound: impl ToString, detail: impl ToString) {
        self.rows.push(CheckRow {
            suite: self.suite.to_owned(),
            instance: self.instance.clone(),
            check: check.to_owned(),
            cases: 0,
            failures: 0,
            status: "INFO".into(),
            measured: measured.to_string(),
            bound: bound.to_string(),
            detail: detail.to_string(),
        });
    }

    pub fn extraction(&mut self, row: ExtractionRow) {
        self.extractions.push(row);
    }

    pub fn lipschitz(&mut self, row: LipschitzRow) {
        self.lipschitz.push(row);
    }

    fn finish(mut self) -> Outcome {
        let mut rows: Vec<CheckRow> = self
            .aggs
            .iter()
            .map(|a| CheckRow {
                suite: self.suite.to_owned(),
                instance: self.instance.clone(),
                check: a.check.clone(),
                cases: a.cases,
                failures: a.failures,
                status: if a.failures == 0 { "PASS" } else { "FAIL" }.into(),
                measured: a.worst.map(|w| format!("max_ratio={w:.9}")).unwrap_or_default(),
                bound: String::new(),
                detail: String::new(),
            })
            .collect();
        rows.append(&mut self.rows);
        Outcome { rows, failures: self.failures, extractions: self.extractions, lipschitz: self.lipschitz }
    }
}

struct Outcome {
    rows: Vec<CheckRow>,
    failures: Vec<Failure>,
    extractions: Vec<ExtractionRow>,
    lipschitz: Vec<LipschitzRow>,
}

/// Everything a verification run produced, in instance order.
#[derive(Debug, Default)]
pub struct Report {
    pub rows: Vec<CheckRow>,
    pub failures: Vec<Failure>,
    pub extractions: Vec<ExtractionRow>,
    pub lipschitz: Vec<LipschitzRow>,
}

impl Report {
    pub fn failure_count(&self) -> u64 {
        self.rows.iter().map(|r| r.failures).sum()
    }

    pub fn cases(&self) -> u64 {
        self.rows.iter().map(|r| r.cases).sum()
    }

    pub fn rows_for<'a>(&'a self, suite: &'a str) -> impl Iterator<Item = &'a CheckRow> + 'a {
        self.rows.iter().filter(move |r| r.suite == suite)
    }
}

pub fn instances(suite: &str) -> Result<Vec<Instance>> {
    Ok(match suite {
        "isoperimetry" => isoperimetry::instances(),
        "claim21" => encoding::claim21_instances(),
        "transfer" => encoding::transfer_instances(),
        "intervals" => hstar::interval_instances(),
        "fibres" => hstar::fibre_instances(),
        "hstar" => hstar::hstar_instances(),
        "normrel" => levels::instances(),
        "pipelines" => pipelines::instances(),
        "lipschitz" => lipschitz::instances(),
        "examples" => examples::instances(),
        "all" => SUITES.iter().map(|s| instances(s)).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect(),
        other => bail!("unknown suite {other:?}; expected one of {} or all", SUITES.join(", ")),
    })
}

/// Runs the named suite plus one instance per input file. When
/// `instance_dir` is set, each instance writes its rows there.
pub fn run(suite: &str, inputs: &[PathBuf], ctx: &Ctx, instance_dir: Option<&Path>) -> Result<Report> {
    let mut list = instances(suite)?;
    list.extend(inputs.iter().map(|p| inputs::instance(p.clone())));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(ctx.cfg.workers).build()?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        list.par_iter()
            .map(|inst| {
                let mut tally = Tally::new(inst.suite, &inst.name);
                if let Err(e) = (inst.run)(ctx, &mut tally) {
                    tally.row("error", false, "", "", format!("{e:#}"), None);
                }
                let outcome = tally.finish();
                if let Some(dir) = instance_dir {
                    write_csv(&dir.join(inst.suite).join(format!("{}.csv", file_safe(&inst.name))), &outcome.rows)?;
                }
                Ok(outcome)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut report = Report::default();
    for mut o in outcomes {
        report.rows.append(&mut o.rows);
        report.failures.append(&mut o.failures);
        report.extractions.append(&mut o.extractions);
        report.lipschitz.append(&mut o.lipschitz);
    }
    Ok(report)
}

pub fn file_safe(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' }).collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct FailureRecord<'a> {
    suite: &'a str,
    instance: &'a str,
    check: &'a str,
    detail: &'a str,
    artifact: String,
    gjt_hex: String,
}

#[derive(Serialize)]
struct Summary<'a> {
    suite: &'a str,
    config: &'a ExperimentConfig,
    instances: usize,
    cases: u64,
    failures: u64,
    passed: bool,
    checks: Vec<(&'a str, &'a str, u64, u64)>,
}

/// Writes `verify.csv`, `failures.csv`, `failures.json`, one `.gjt` per
/// recorded failure with a table, the extraction and Lipschitz CSVs when
/// non-empty, and `summary.json` with the resolved configuration.
pub fn write_artifacts(report: &Report, suite: &str, cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    write_csv(&out.join("verify.csv"), &report.rows)?;
    let records: Vec<FailureRecord> = report
        .failures
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let artifact = match &f.table {
                Some(bytes) => {
                    let name = format!("failures/{i:04}-{}.gjt", file_safe(f.instance.trim_end_matches(".gjt")));
                    fs::create_dir_all(out.join("failures"))?;
                    fs::write(out.join(&name), bytes)?;
                    name
                }
                None => String::new(),
            };
            Ok(FailureRecord {
                suite: &f.suite,
                instance: &f.instance,
                check: &f.check,
                detail: &f.detail,
                artifact,
                gjt_hex: f.table.as_deref().map(hex::encode).unwrap_or_default(),
            })
        })
        .collect::<Result<_>>()?;
    write_csv(&out.join("failures.csv"), &records)?;
    fs::write(out.join("failures.json"), serde_json::to_string_pretty(&records)? + "\n")?;
    if !report.extractions.is_empty() {
        write_csv(&out.join("extractions.csv"), &report.extractions)?;
    }
    if !report.lipschitz.is_empty() {
        write_csv(&out.join("lipschitz.csv"), &report.lipschitz)?;
    }
    let instances = {
        let mut names: Vec<&str> = report.rows.iter().map(|r| r.instance.as_str()).collect();
        names.dedup();
        names.len()
    };
    let summary = Summary {
        suite,
        config: cfg,
        instances,
        cases: report.cases(),
        failures: report.failure_count(),
        passed: report.failure_count() == 0,
        checks: report.rows.iter().map(|r| (r.instance.as_str(), r.check.as_str(), r.cases, r.failures)).collect(),
    };
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(())
}

/// Encoded `.gjt` bytes for a failure record.
pub fn gjt(f: &GridFunction) -> Option<Vec<u8>> {
    Some(encode_table(f))
}

/// `{x:.9}` with negative zero printed as zero.
pub fn fixed(x: f64) -> String {
    format!("{:.9}", if x == 0.0 { 0.0 } else { x })
}

/// Scientific notation for quantities that can be astronomically large.
pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6e}")
    } else {
        "inf".into()
    }
}
