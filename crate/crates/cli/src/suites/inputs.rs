// SPDX-License-Identifier: Apache-2.0

//! User-supplied containers, checked as extra instances.
//!
//! A container with a sidecar is first rebuilt from the sidecar and
//! compared byte for byte, so a damaged table fails even when it still
//! decodes.

use std::path::PathBuf;

use anyhow::Result;
use gridjunta::io::{decode_junta, decode_map, decode_table, read_sidecar, sidecar_path};
use gridjunta::lipschitz::level_sets;
use gridjunta::Mode;

use super::{gjt, isoperimetry, lipschitz, pipelines, Ctx, Instance, Tally};
use crate::generate::generate;

pub fn instance(path: PathBuf) -> Instance {
    let name = format!("input:{}", path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let label = name.clone();
    Instance::new("inputs", name, move |ctx, t| check(&path, &label, ctx, t))
}

fn check(path: &std::path::Path, name: &str, ctx: &Ctx, t: &mut Tally) -> Result<()> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            t.case("read", false, || (String::new(), format!("{}: {e}", path.display()), None));
            return Ok(());
        }
    };
    if sidecar_path(path).exists() {
        match read_sidecar(path).map_err(anyhow::Error::from).and_then(|s| generate(&s, &ctx.budget)) {
            Ok(a) => {
                let replay = a.encode();
                let first = replay.iter().zip(&bytes).position(|(a, b)| a != b);
                t.case("sidecar-replay", replay == bytes, || {
                    let at = first.map_or_else(|| format!("length {} vs {}", bytes.len(), replay.len()), |i| format!("first difference at byte {i}"));
                    (String::new(), at, Some(bytes.clone()))
                });
            }
            Err(e) => t.case("sidecar-replay", false, || (String::new(), format!("{e:#}"), Some(bytes.clone()))),
        }
    }
    match bytes.get(..4) {
        Some(b"GJT1") => match decode_table(&bytes) {
            Ok(f) if f.is_boolean() => {
                isoperimetry::check_set(&f, || String::new(), t)?;
                pipelines::check_table(name, &f, ctx, t)?;
            }
            Ok(f) => {
                let ok = level_sets(&f, Mode::Grid)?.reconstruct()? == f;
                t.case("grid-reconstruct", ok, || (String::new(), "reconstruction differs".into(), gjt(&f)));
            }
            Err(e) => t.case("decode", false, || (String::new(), e.to_string(), Some(bytes.clone()))),
        },
        Some(b"GJM1") => match decode_map(&bytes) {
            Ok(f) => {
                for mode in [Mode::Torus, Mode::Grid] {
                    lipschitz::check_map(name, &f, mode, ctx, ctx.cfg.seed, t)?;
                }
            }
            Err(e) => t.case("decode", false, || (String::new(), e.to_string(), Some(bytes.clone()))),
        },
        Some(b"GJJ1") => {
            let r = decode_junta(&bytes);
            t.case("decode", r.is_ok(), || (String::new(), r.as_ref().err().map(|e| e.to_string()).unwrap_or_default(), Some(bytes.clone())));
        }
        _ => t.case("decode", false, || (String::new(), "unknown container magic".into(), Some(bytes.clone()))),
    }
    Ok(())
}
