// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Scenario layer of the hybridsim CLI: configuration schema, sweep
//! execution, and table emission. The binary in `main.rs` is a thin
//! argument-parsing shell over [`scenarios::run`].

// `!(x > 0.0)` is the NaN-rejecting guard used on every validation path;
// the `x <= 0.0` form clippy suggests would accept NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod scenarios;
pub mod table;
