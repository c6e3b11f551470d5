// SPDX-License-Identifier: Apache-2.0

use anyhow::Result;
use gridjunta::encode::{influence_transfer_report, tilde_fibre_boundary};
use gridjunta::hfunc::ell_and_boundary;
use gridjunta::{GridFunction, GridShape};

use super::{gjt, Instance, Tally};

pub fn claim21_instances() -> Vec<Instance> {
    [2u32, 4, 8, 16]
        .into_iter()
        .map(|k| Instance::new("claim21", format!("all-fibres-k{k}"), move |_, t| claim21(k, t)))
        .collect()
}

/// `|∂̃F| <= (k-1) |∂F|` for every `F: [k] → {0,1}`.
fn claim21(k: u32, t: &mut Tally) -> Result<()> {
    let shape = GridShape::boolean(k, 1)?;
    let mut values = vec![0u16; k as usize];
    for mask in 0u32..1 << k {
        for (z, v) in values.iter_mut().enumerate() {
            *v = ((mask >> z) & 1) as u16;
        }
        let tilde = tilde_fibre_boundary(&values)?;
        let (_, m) = ell_and_boundary(&values);
        let bound = (k as u64 - 1) * m as u64;
        t.case("tilde-count", tilde <= bound, || {
            let f = GridFunction::from_values(shape, &values).ok();
            (format!("F={mask:#x}"), format!("tilde {tilde} > (k-1)m = {bound}"), f.as_ref().and_then(gjt))
        });
        if bound > 0 {
            t.ratio("tilde-count", tilde as f64 / bound as f64);
        }
    }
    Ok(())
}

pub fn transfer_instances() -> Vec<Instance> {
    [(4u32, 2u32), (2, 3), (2, 4), (8, 1), (16, 1)]
        .into_iter()
        .map(|(k, n)| Instance::new("transfer", format!("all-sets-{k}^{n}"), move |_, t| transfer(k, n, t)))
        .collect()
}

/// `Σ_i Inf_i(f̃) <= 2 |∂A| / k^(n-1)` exactly, for every `A ⊆ [k]^n`.
fn transfer(k: u32, n: u32, t: &mut Tally) -> Result<()> {
    let shape = GridShape::boolean(k, n)?;
    for mask in 0u64..1 << shape.points() {
        let f = GridFunction::from_fn(shape, |i| ((mask >> i) & 1) as u16)?;
        let r = influence_transfer_report(&f)?;
        let ok = r.holds();
        t.case("influence-transfer", ok, || {
            (format!("mask={mask:#x}"), format!("Inf = {} > {}", r.total_influence, r.bound), gjt(&f))
        });
        if r.bound > 0.into() {
            t.ratio("influence-transfer", r.report.ratio.unwrap_or(0.0));
        }
    }
    Ok(())
}
