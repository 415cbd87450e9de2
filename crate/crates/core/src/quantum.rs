// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Complex dense linear algebra and Pauli operators.
//!
//! The numeric substrate for every other module: fixed spin-basis
//! conventions, Kronecker products with the documented factor ordering, and
//! small utilities (adjoint, expectation values).
//!
//! Basis convention (global): the spin basis is ordered (|e⟩, |g⟩), so
//! σ_z = |e⟩⟨e| − |g⟩⟨g| = diag(1, −1) and σ_− = |g⟩⟨e| has its single 1 in
//! the lower-left entry.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::tolerances;

/// Dense complex matrix (row-major), the workhorse for Hamiltonians, density
/// matrices and doubled-space generators.
pub type ComplexMatrix = Array2<Complex64>;

/// Complex column vector.
pub type Ket = Array1<Complex64>;

/// Shorthand constructor used throughout the crate.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli-operator selector, including the ladder operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
    /// σ_+ = |e⟩⟨g|
    Plus,
    /// σ_− = |g⟩⟨e|
    Minus,
}

/// The 2×2 Pauli (or ladder) matrix in the ordered basis (|e⟩, |g⟩).
///
/// σ_− = |g⟩⟨e| and σ_+ = |e⟩⟨g|; σ_z = diag(1, −1).
pub fn pauli(axis: PauliAxis) -> ComplexMatrix {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match axis {
        PauliAxis::X => ndarray::array![[z, o], [o, z]],
        PauliAxis::Y => ndarray::array![[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        PauliAxis::Z => ndarray::array![[o, z], [z, c(-1.0, 0.0)]],
        PauliAxis::Plus => ndarray::array![[z, o], [z, z]],
        PauliAxis::Minus => ndarray::array![[z, z], [o, z]],
    }
}

/// 2×2 identity matrix.
pub fn identity(dim: usize) -> ComplexMatrix {
    Array2::eye(dim)
}

/// Kronecker product with the SYSTEM factor first, ANCILLA second.
///
/// The composite index ordering for 2×2 factors is (ee, eg, ge, gg): the
/// system index varies slowest, matching the global |m⟩|n⟩^A convention.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ndarray::linalg::kron(a, b)
}

/// Conjugate transpose M†.
pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.t().mapv(|z| z.conj())
}

/// Frobenius norm ‖M‖_F.
pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest elementwise modulus max|M_ij|.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Deviation from Hermiticity, max|M − M†|.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - &dagger(m)))
}

/// Assert a matrix is Hermitian within the global tolerance.
pub fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let deviation = hermiticity_deviation(m);
    if deviation > tolerances::HERMITIAN_ASSERT {
        return Err(CoreError::NotHermitian {
            deviation,
            tolerance: tolerances::HERMITIAN_ASSERT,
        });
    }
    Ok(())
}

/// Ensure every entry of a matrix is finite.
pub fn check_finite(m: &ComplexMatrix, context: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(CoreError::NonFinite { context })
    }
}

/// A quantum state for expectation values: pure ket or density matrix.
#[derive(Debug, Clone, Copy)]
pub enum QuantumState<'a> {
    /// Pure state |ψ⟩; expectation is ⟨ψ|O|ψ⟩.
    Pure(&'a Ket),
    /// Density matrix ρ; expectation is Tr(ρO).
    Mixed(&'a ComplexMatrix),
}

/// Expectation value ⟨ψ|O|ψ⟩ or Tr(ρO).
pub fn expectation(state: QuantumState<'_>, obs: &ComplexMatrix) -> Result<Complex64> {
    match state {
        QuantumState::Pure(psi) => {
            if psi.len() != obs.nrows() || obs.nrows() != obs.ncols() {
                return Err(CoreError::DimensionMismatch {
                    context: "expectation(pure state, observable)",
                    got: obs.nrows(),
                    expected: psi.len(),
                });
            }
            let o_psi = obs.dot(psi);
            Ok(psi.iter().zip(o_psi.iter()).map(|(p, q)| p.conj() * q).sum())
        }
        QuantumState::Mixed(rho) => {
            if rho.nrows() != obs.nrows() || rho.ncols() != obs.ncols() {
                return Err(CoreError::DimensionMismatch {
                    context: "expectation(density matrix, observable)",
                    got: obs.nrows(),
                    expected: rho.nrows(),
                });
            }
            Ok(rho.dot(obs).diag().sum())
        }
    }
}

/// Trace of a square matrix.
pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diag().sum()
}
