// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error taxonomy for the engine.
//!
//! Every public operation that can fail returns [`Result`]; no NaN/Inf escapes
//! a public operation without being converted into one of these variants.

use thiserror::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, CoreError>;

/// All failure modes of the numerical core.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Operands have incompatible shapes (e.g. observable vs. state dimension).
    #[error("dimension mismatch: {context} (got {got}, expected {expected})")]
    DimensionMismatch {
        context: &'static str,
        got: usize,
        expected: usize,
    },

    /// An operation requiring a square matrix received a rectangular one.
    #[error("non-square matrix: {rows}x{cols} in {context}")]
    NonSquare {
        context: &'static str,
        rows: usize,
        cols: usize,
    },

    /// A matrix asserted Hermitian violates max|M − M†| ≤ tolerance.
    #[error("matrix not Hermitian: max|M - M^dagger| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// A density matrix failed validation (trace, Hermiticity or positivity).
    #[error("invalid density matrix: {reason}")]
    InvalidDensityMatrix { reason: String },

    /// An eigen-decomposition did not meet its residual/biorthogonality contract.
    #[error("eigensolver diagnostic: {reason}")]
    EigenFailure { reason: String },

    /// Closed-form coefficient denominator below the blow-up threshold.
    #[error(
        "closed-form division blow-up at root index {j}: |denominator| = {magnitude:.3e} < {threshold:.1e}"
    )]
    DivisionBlowUp {
        j: usize,
        magnitude: f64,
        threshold: f64,
    },

    /// Implicit-differentiation branch is degenerate (∂F/∂λ ≈ 0 at the root).
    #[error("degenerate eigenvalue branch at root index {j}: |dF/dlambda| = {magnitude:.3e}")]
    DegenerateBranch { j: usize, magnitude: f64 },

    /// The classical oscillator is at or beyond critical damping.
    #[error("overdamped regime: (Gamma/m) = {damping_rate:.6} >= Omega = {omega:.6}")]
    Overdamped { damping_rate: f64, omega: f64 },

    /// Field/geometry evaluation at a singular point (origin or below a_min).
    #[error("singular geometry: {context} at radius {radius:.3e} (limit {limit:.3e})")]
    SingularGeometry {
        context: &'static str,
        radius: f64,
        limit: f64,
    },

    /// State norm (or trace) drifted beyond tolerance during integration.
    #[error("norm drift {drift:.3e} exceeds tolerance {tolerance:.1e} at t = {time:.6}")]
    NormDrift {
        drift: f64,
        tolerance: f64,
        time: f64,
    },

    /// Non-finite value produced or supplied where a finite one is required.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// Invalid argument value (out-of-range index, non-positive step, ...).
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },
}
