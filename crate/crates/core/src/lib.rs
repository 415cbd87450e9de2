// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulation engine for dissipative quantum–classical hybrid systems.
//!
//! A classical magnetic particle orbits in the dipole field of a fixed magnetic
//! moment while exchanging influence with a dissipative spin-1/2:
//!
//! * **Quantum side.** The spin obeys a Lindblad master equation. Ancilla
//!   vectorization turns the generator into a non-Hermitian "total" Hamiltonian
//!   ℋ_T acting on a 4-dimensional doubled space, whose biorthogonal
//!   eigenstructure yields a Berry-like vector potential and a magnetic-like
//!   field b_z felt by the classical particle.
//! * **Classical side.** The particle follows damped harmonic motion with an
//!   optional Lorentz-like force from b_z; conversely, its damped trajectory
//!   drives the spin Hamiltonian, producing adiabaticity diagnostics and
//!   excited-state population maps.
//!
//! # Unit conventions
//!
//! ħ = 1 throughout. Spin energies are measured in units of μ|B| at the
//! scenario's reference point, so the normalized spin Hamiltonian has
//! eigenvalues ±1 and decay rates γ are dimensionless. Classical quantities
//! (m, Ω, Γ, lengths) use one consistent arbitrary unit system documented per
//! scenario.
//!
//! # Basis conventions
//!
//! The spin basis is ordered (|e⟩, |g⟩); the ancilla copy likewise. The
//! 4-dimensional composite ordering is (ee, eg, ge, gg), i.e. the system factor
//! varies slowest — fixed globally to prevent silent transposition bugs.

// `!(x > 0.0)` is the NaN-rejecting guard used on every validation path;
// the `x <= 0.0` form clippy suggests would accept NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adiabatic;
pub mod classical;
pub mod dipole;
pub mod eig;
pub mod error;
pub mod geometry;
pub mod lindblad;
pub mod quantum;
pub mod tolerances;

pub use error::{CoreError, Result};
