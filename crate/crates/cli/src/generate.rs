// SPDX-License-Identifier: Apache-2.0

//! Generator registry. A sidecar alone is enough to rebuild its container,
//! which is how `verify` replays inputs.

use anyhow::{anyhow, bail, Context, Result};
use gridjunta::constructions::{
    cuboid, decision_tree_function, dictator_tuple_map, identity_map, parity_set, random_map, random_set,
    tribes_grid,
};
use gridjunta::io::{encode_map, encode_table, Sidecar};
use gridjunta::lipschitz::TorusMap;
use gridjunta::{Budget, GridFunction};

pub enum Artifact {
    Table(GridFunction),
    Map(TorusMap),
}

impl Artifact {
    pub fn encode(&self) -> Vec<u8> {
        match self {
            Artifact::Table(f) => encode_table(f),
            Artifact::Map(m) => encode_map(m),
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            Artifact::Table(_) => "gjt",
            Artifact::Map(_) => "gjm",
        }
    }
}

fn param<T: serde::de::DeserializeOwned>(s: &Sidecar, key: &str) -> Result<T> {
    let v = s.params.get(key).ok_or_else(|| anyhow!("generator {} needs parameter {key}", s.generator))?;
    serde_json::from_value(v.clone()).with_context(|| format!("parameter {key}"))
}

fn seed(s: &Sidecar) -> Result<u64> {
    s.seed.ok_or_else(|| anyhow!("generator {} needs a seed", s.generator))
}

pub fn generate(s: &Sidecar, budget: &Budget) -> Result<Artifact> {
    let table = |f: GridFunction| -> Result<Artifact> {
        if f.len() > budget.max_points {
            bail!("table of {} points exceeds the budget of {}", f.len(), budget.max_points);
        }
        Ok(Artifact::Table(f))
    };
    Ok(match s.generator.as_str() {
        "tribes" => Artifact::Table(tribes_grid(param(s, "k")?, param(s, "s")?, param(s, "t")?, budget)?.0),
        "tree" => Artifact::Table(decision_tree_function(param(s, "k")?, param(s, "d")?, seed(s)?, budget)?.0),
        "cuboid" => table(cuboid(param(s, "a")?, param(s, "s")?, param(s, "k")?, param(s, "n")?)?)?,
        "random" => table(random_set(param(s, "k")?, param(s, "n")?, param(s, "p")?, seed(s)?)?)?,
        "parity" => table(parity_set(param(s, "k")?, param(s, "n")?)?)?,
        "map-identity" => Artifact::Map(identity_map(param(s, "k")?, param(s, "n")?)?),
        "map-dictator" => {
            let picks: Vec<usize> = param(s, "picks")?;
            let zero_based = picks
                .iter()
                .map(|&p| p.checked_sub(1).ok_or_else(|| anyhow!("picks are 1-based")))
                .collect::<Result<Vec<_>>>()?;
            Artifact::Map(dictator_tuple_map(param(s, "k")?, param(s, "n")?, param(s, "l")?, &zero_based)?)
        }
        "map-random" => {
            Artifact::Map(random_map(param(s, "k")?, param(s, "n")?, param(s, "l")?, param(s, "m")?, seed(s)?)?)
        }
        other => bail!("unknown generator {other:?}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_matches() {
        let s = Sidecar::new("tree", Some(7)).param("k", 4).param("d", 2);
        let a = generate(&s, &Budget::default()).unwrap().encode();
        let b = generate(&s, &Budget::default()).unwrap().encode();
        assert_eq!(a, b);
        assert_eq!(a.len(), 16 + 2 * 1024);
        let s = Sidecar::new("map-dictator", None).param("k", 4).param("n", 2).param("l", 3).param("picks", [2, 1]);
        assert!(matches!(generate(&s, &Budget::default()).unwrap(), Artifact::Map(_)));
        assert!(generate(&Sidecar::new("nope", None), &Budget::default()).is_err());
        assert!(generate(&Sidecar::new("random", None).param("k", 3).param("n", 2).param("p", 0.5), &Budget::default())
            .is_err());
    }
}
