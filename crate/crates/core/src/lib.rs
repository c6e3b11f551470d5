// SPDX-License-Identifier: Apache-2.0

//! Junta approximation for subsets of the grid `[k]^n` and the torus
//! `Z_k^n`, structure of Lipschitz maps between discrete tori, and exact
//! checkers for the inequalities behind them.

pub mod constructions;
pub mod cube;
pub mod encode;
pub mod extract;
pub mod error;
pub mod grid;
pub mod hfunc;
pub mod io;
pub mod junta;
pub mod lipschitz;
pub mod numeric;
pub mod report;

pub use cube::{cube_junta_extract, CubeFunction};
pub use error::{Error, Result};
pub use grid::{
    bollobas_leader_bound, cyclic_distance, edge_boundary, fibre, fibre_stats, l1_distance, FibreStats,
    FibreView, GridFunction, GridShape, L1Distance, Metric, Mode,
};
pub use hfunc::HVariant;
pub use junta::{best_junta_search, plurality_junta, Junta};
pub use report::{BoundReport, Budget};

// The README and the chapters of the guide in book/, compiled as doc-tests
// so their examples stay in sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/cube.md")]
    mod cube {}
    #[doc = include_str!("../../../book/src/encoding.md")]
    mod encoding {}
    #[doc = include_str!("../../../book/src/extraction.md")]
    mod extraction {}
    #[doc = include_str!("../../../book/src/functionals.md")]
    mod functionals {}
    #[doc = include_str!("../../../book/src/lipschitz.md")]
    mod lipschitz {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
