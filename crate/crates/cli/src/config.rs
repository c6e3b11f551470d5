// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration.
//!
//! Values are resolved in order: built-in defaults, then a flat
//! `key = value` file, then `GRIDJUNTA_BUDGET` (point budget only), then
//! command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gridjunta::Budget;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Worker threads; 0 means one per core.
    pub workers: usize,
    pub out: PathBuf,
    pub max_points: usize,
    pub max_subsets: u64,
    pub max_slices: u64,
    /// Accuracies for the extraction corpus.
    pub eps: Vec<f64>,
    pub lipschitz_delta: f64,
    pub lipschitz_eps: f64,
    /// Seeded random subsets of `[5]^3` in the isoperimetry suite.
    pub iso_random_sets: usize,
    /// Random sets per side length in the extraction corpus.
    pub pipeline_random_sets: usize,
    /// Tree seeds for the extraction corpus and the junta lower bound.
    pub tree_seeds: usize,
    /// Tree seeds for the expected boundary statistic.
    pub boundary_seeds: usize,
    /// Random sets for the embedding comparison of `h*`.
    pub claim45_sets: usize,
    /// Random instances per exact identity.
    pub identity_instances: usize,
    /// Random maps per mode in the Lipschitz corpus.
    pub lipschitz_maps: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let b = Budget::default();
        Self {
            seed: 1,
            workers: 0,
            out: PathBuf::from("gridjunta-out"),
            max_points: b.max_points,
            max_subsets: b.max_subsets,
            max_slices: b.max_slices,
            eps: vec![0.05, 0.1, 0.25],
            lipschitz_delta: 0.3,
            lipschitz_eps: 0.3,
            iso_random_sets: 10_000,
            pipeline_random_sets: 20,
            tree_seeds: 5,
            boundary_seeds: 200,
            claim45_sets: 100,
            identity_instances: 100,
            lipschitz_maps: 10,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub budget: Option<usize>,
    /// Raw `key=value` pairs.
    pub set: Vec<String>,
}

impl ExperimentConfig {
    pub fn load(file: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut table = toml::Table::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            table = text.parse().with_context(|| format!("parsing {}", path.display()))?;
            if let Some((k, _)) = table.iter().find(|(_, v)| v.is_table()) {
                bail!("{}: key `{k}` is a section; the config file is flat", path.display());
            }
        }
        if let Ok(v) = std::env::var("GRIDJUNTA_BUDGET") {
            let points: i64 = v.trim().parse().with_context(|| format!("GRIDJUNTA_BUDGET = {v:?}"))?;
            table.insert("max_points".into(), points.into());
        }
        for pair in &overrides.set {
            let (k, v) = pair.split_once('=').with_context(|| format!("--set {pair:?}: expected key=value"))?;
            let parsed: toml::Table = format!("{} = {}", k.trim(), v.trim())
                .parse()
                .or_else(|_| format!("{} = {:?}", k.trim(), v.trim()).parse())
                .with_context(|| format!("--set {pair:?}"))?;
            table.extend(parsed);
        }
        let mut cfg: Self = table.try_into().context("invalid configuration")?;
        if let Some(out) = &overrides.out {
            cfg.out = out.clone();
        }
        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        if let Some(w) = overrides.workers {
            cfg.workers = w;
        }
        if let Some(p) = overrides.budget {
            cfg.max_points = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_points == 0 || self.max_subsets == 0 || self.max_slices == 0 {
            bail!("budgets must be positive");
        }
        if self.eps.iter().any(|&e| !(e > 0.0)) || !(self.lipschitz_eps > 0.0) || !(self.lipschitz_delta > 0.0) {
            bail!("eps and delta values must be positive");
        }
        Ok(())
    }

    pub fn budget(&self) -> Budget {
        Budget { max_points: self.max_points, max_subsets: self.max_subsets, max_slices: self.max_slices }
    }
}
