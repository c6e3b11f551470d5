// SPDX-License-Identifier: Apache-2.0

//! Harness behind the `gridjunta` binary: configuration, generators,
//! verification suites and subcommands.

pub mod commands;
pub mod config;
pub mod generate;
pub mod suites;
