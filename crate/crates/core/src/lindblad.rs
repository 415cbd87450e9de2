// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Open-system dynamics: master equation, ancilla vectorization, and the
//! non-Hermitian effective Hamiltonian of the doubled space.
//!
//! The master equation in Lindblad form,
//!
//! dρ/dt = −i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}),
//!
//! becomes a Schrödinger-like equation i ∂_t|Ψ⟩ = ℋ_T|Ψ⟩ after mapping ρ onto
//! the doubled-space ket |Ψ⟩ = Σ_{mn} ρ_{mn}|m⟩|n⟩^A (system factor first).
//! The generator is
//!
//! ℋ_T = ℋ ⊗ I − I ⊗ ℋ^A + i Σ_k (L_k ⊗ L_k^A),   ℋ = H − (i/2) Σ_k L_k†L_k,
//!
//! where Ô^A is the ancilla conjugate (elementwise complex conjugate in the
//! fixed basis). Trace preservation shows up as a guaranteed left zero
//! eigenvector Φ = Σ_m |m⟩|m⟩^A.
//!
//! Ref: Breuer & Petruccione, "The Theory of Open Quantum Systems" (2002), Ch. 3.

use ndarray::{Array1, Array2};
use ndarray_linalg::Eigh;

use crate::error::{CoreError, Result};
use crate::quantum::{
    c, check_finite, check_hermitian, dagger, frobenius_norm, identity, kron, trace,
    ComplexMatrix, Ket,
};
use crate::tolerances;

/// Hermitian Hamiltonian plus jump operators with rates absorbed
/// (L_k = √rate·operator), defining an open-system generator.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: ComplexMatrix,
    jumps: Vec<ComplexMatrix>,
}

impl LindbladModel {
    /// Validate and build a model: Hermitian Hamiltonian (to 1e-12), all
    /// matrices square with one common dimension.
    pub fn new(hamiltonian: ComplexMatrix, jumps: Vec<ComplexMatrix>) -> Result<Self> {
        let (rows, cols) = hamiltonian.dim();
        if rows != cols {
            return Err(CoreError::NonSquare {
                context: "LindbladModel Hamiltonian",
                rows,
                cols,
            });
        }
        check_finite(&hamiltonian, "LindbladModel Hamiltonian")?;
        check_hermitian(&hamiltonian)?;
        for jump in &jumps {
            let (jr, jc) = jump.dim();
            if jr != jc {
                return Err(CoreError::NonSquare {
                    context: "LindbladModel jump operator",
                    rows: jr,
                    cols: jc,
                });
            }
            if jr != rows {
                return Err(CoreError::DimensionMismatch {
                    context: "LindbladModel jump operator",
                    got: jr,
                    expected: rows,
                });
            }
            check_finite(jump, "LindbladModel jump operator")?;
        }
        Ok(Self { hamiltonian, jumps })
    }

    /// The Hermitian Hamiltonian H.
    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    /// Jump operators with rates absorbed.
    pub fn jumps(&self) -> &[ComplexMatrix] {
        &self.jumps
    }

    /// Hilbert-space dimension d.
    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite
/// within tolerance.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate Hermiticity (1e-10), unit trace (1e-10) and eigenvalue floor
    /// (≥ −1e-10).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let (rows, cols) = matrix.dim();
        if rows != cols {
            return Err(CoreError::NonSquare {
                context: "DensityMatrix",
                rows,
                cols,
            });
        }
        check_finite(&matrix, "DensityMatrix")?;
        let herm = crate::quantum::hermiticity_deviation(&matrix);
        if herm > tolerances::DENSITY_VALIDATION {
            return Err(CoreError::InvalidDensityMatrix {
                reason: format!("Hermiticity deviation {herm:.3e}"),
            });
        }
        let tr = trace(&matrix);
        if (tr - c(1.0, 0.0)).norm() > tolerances::DENSITY_VALIDATION {
            return Err(CoreError::InvalidDensityMatrix {
                reason: format!("trace = {tr} (must be 1)"),
            });
        }
        // Positivity via the Hermitian part's spectrum.
        let herm_part = (&matrix + &dagger(&matrix)).mapv(|z| z * c(0.5, 0.0));
        let (eigs, _) = herm_part
            .eigh(ndarray_linalg::UPLO::Lower)
            .map_err(|e| CoreError::InvalidDensityMatrix {
                reason: format!("positivity check failed to diagonalize: {e}"),
            })?;
        if let Some(min) = eigs.iter().cloned().reduce(f64::min) {
            if min < -tolerances::DENSITY_POSITIVITY {
                return Err(CoreError::InvalidDensityMatrix {
                    reason: format!("negative eigenvalue {min:.3e}"),
                });
            }
        }
        Ok(Self { matrix })
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Non-Hermitian doubled-space generator ℋ_T (dimension d²) with its source
/// Hilbert dimension d.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    matrix: ComplexMatrix,
    source_dim: usize,
}

impl EffectiveHamiltonian {
    /// The d²×d² generator matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Dimension d of the underlying Hilbert space.
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }
}

/// Right-hand side of the master equation:
/// dρ/dt = −i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}).
///
/// The output is Hermitian and traceless to 1e-12.
pub fn lindblad_rhs(model: &LindbladModel, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    if model.dim() != rho.dim() {
        return Err(CoreError::DimensionMismatch {
            context: "lindblad_rhs",
            got: rho.dim(),
            expected: model.dim(),
        });
    }
    Ok(rhs_unchecked(model, rho.matrix()))
}

/// RHS evaluation without density-matrix validation (integrator stages are
/// not density matrices themselves).
fn rhs_unchecked(model: &LindbladModel, rho: &ComplexMatrix) -> ComplexMatrix {
    let h = model.hamiltonian();
    let minus_i = c(0.0, -1.0);
    let mut out = (h.dot(rho) - rho.dot(h)).mapv(|z| z * minus_i);
    let half = c(0.5, 0.0);
    for l in model.jumps() {
        let l_dag = dagger(l);
        let ldl = l_dag.dot(l);
        out = out + l.dot(rho).dot(&l_dag) - (ldl.dot(rho) + rho.dot(&ldl)).mapv(|z| z * half);
    }
    out
}

/// Fixed-step RK4 integration of the master equation.
///
/// The returned state satisfies the density-matrix invariants; trace drift
/// beyond 1e-8 (too-large dt) is an error rather than a silent repair.
pub fn integrate_master(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if model.dim() != rho0.dim() {
        return Err(CoreError::DimensionMismatch {
            context: "integrate_master",
            got: rho0.dim(),
            expected: model.dim(),
        });
    }
    if !(dt > 0.0) || !(t_final >= 0.0) || !dt.is_finite() || !t_final.is_finite() {
        return Err(CoreError::InvalidArgument {
            reason: format!("integrate_master needs dt > 0 and t_final >= 0 (dt={dt}, t={t_final})"),
        });
    }
    let mut rho = rho0.matrix().clone();
    let stepper = |state: &ComplexMatrix, h: f64| -> ComplexMatrix {
        let k1 = rhs_unchecked(model, state);
        let k2 = rhs_unchecked(model, &(state + &k1.mapv(|z| z * c(0.5 * h, 0.0))));
        let k3 = rhs_unchecked(model, &(state + &k2.mapv(|z| z * c(0.5 * h, 0.0))));
        let k4 = rhs_unchecked(model, &(state + &k3.mapv(|z| z * c(h, 0.0))));
        state
            + &(k1 + k2.mapv(|z| z * c(2.0, 0.0)) + k3.mapv(|z| z * c(2.0, 0.0)) + k4)
                .mapv(|z| z * c(h / 6.0, 0.0))
    };
    let steps = (t_final / dt).round() as u64;
    let whole = steps as f64 * dt;
    for _ in 0..steps {
        rho = stepper(&rho, dt);
    }
    let remainder = t_final - whole;
    if remainder.abs() > 1e-12 {
        rho = stepper(&rho, remainder);
    }

    let drift = (trace(&rho) - c(1.0, 0.0)).norm();
    if drift > tolerances::TRACE_DRIFT {
        return Err(CoreError::NormDrift {
            drift,
            tolerance: tolerances::TRACE_DRIFT,
            time: t_final,
        });
    }
    DensityMatrix::new(rho)
}

/// Map ρ to the doubled-space ket |Ψ⟩ = Σ_{mn} ρ_{mn}|m⟩|n⟩^A
/// (system index major: row-major flattening).
pub fn vectorize(rho: &DensityMatrix) -> Ket {
    vectorize_matrix(rho.matrix())
}

/// Row-major flattening of an arbitrary (not necessarily valid) matrix.
pub fn vectorize_matrix(m: &ComplexMatrix) -> Ket {
    Array1::from_iter(m.iter().cloned())
}

/// Inverse of [`vectorize`]: reshape a d²-dimensional ket into a d×d matrix.
///
/// No Hermiticity is enforced — evolution output is checked by callers.
pub fn devectorize(psi: &Ket) -> Result<ComplexMatrix> {
    let len = psi.len();
    let d = (len as f64).sqrt().round() as usize;
    if d * d != len {
        return Err(CoreError::InvalidArgument {
            reason: format!("devectorize needs a perfect-square dimension, got {len}"),
        });
    }
    let mut out = Array2::zeros((d, d));
    for m in 0..d {
        for n in 0..d {
            out[[m, n]] = psi[m * d + n];
        }
    }
    Ok(out)
}

/// Ancilla conjugate Ô^A with ^A⟨m|Ô^A|n⟩ = ⟨n|Ô†|m⟩ — the elementwise
/// complex conjugate of Ô in the fixed basis.
pub fn ancilla_conjugate(op: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = op.dim();
    if rows != cols {
        return Err(CoreError::NonSquare {
            context: "ancilla_conjugate",
            rows,
            cols,
        });
    }
    Ok(op.mapv(|z| z.conj()))
}

/// Build the doubled-space generator
/// ℋ_T = ℋ ⊗ I − I ⊗ ℋ^A + i Σ_k (L_k ⊗ L_k^A) with ℋ = H − (i/2)Σ_k L_k†L_k.
///
/// The flattened identity Φ = Σ_m |m⟩|m⟩^A is a left eigenvector with
/// eigenvalue 0 (trace preservation), enforced at construction.
pub fn effective_hamiltonian(model: &LindbladModel) -> Result<EffectiveHamiltonian> {
    let d = model.dim();
    let mut h_eff = model.hamiltonian().clone();
    let minus_half_i = c(0.0, -0.5);
    for l in model.jumps() {
        h_eff = h_eff + dagger(l).dot(l).mapv(|z| z * minus_half_i);
    }
    let id = identity(d);
    let mut total = kron(&h_eff, &id) - kron(&id, &ancilla_conjugate(&h_eff)?);
    let i_unit = c(0.0, 1.0);
    for l in model.jumps() {
        total = total + kron(l, &ancilla_conjugate(l)?).mapv(|z| z * i_unit);
    }

    // Trace-preservation invariant: Φ†·ℋ_T = 0 with Φ the flattened identity.
    let phi = vectorize_matrix(&id);
    let phi_conj = phi.mapv(|z| z.conj());
    let residual_vec = total.t().dot(&phi_conj);
    let residual = residual_vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = frobenius_norm(&total).max(1.0);
    if residual > tolerances::TRACE_ZERO_MODE_REL * scale {
        return Err(CoreError::EigenFailure {
            reason: format!(
                "trace-preservation zero mode violated: |Phi^dagger H_T| = {residual:.3e}"
            ),
        });
    }
    Ok(EffectiveHamiltonian {
        matrix: total,
        source_dim: d,
    })
}

/// RK4 integration of i ∂_t|Ψ⟩ = ℋ_T|Ψ⟩ for the (non-Hermitian,
/// time-independent) generator. The norm is NOT conserved in general and is
/// never renormalized — it carries purity-type information.
pub fn evolve_vectorized(
    heff: &EffectiveHamiltonian,
    psi0: &Ket,
    t_final: f64,
    dt: f64,
) -> Result<Ket> {
    let dim = heff.matrix().nrows();
    if psi0.len() != dim {
        return Err(CoreError::DimensionMismatch {
            context: "evolve_vectorized",
            got: psi0.len(),
            expected: dim,
        });
    }
    if !(dt > 0.0) || !(t_final >= 0.0) || !dt.is_finite() || !t_final.is_finite() {
        return Err(CoreError::InvalidArgument {
            reason: format!(
                "evolve_vectorized needs dt > 0 and t_final >= 0 (dt={dt}, t={t_final})"
            ),
        });
    }
    // i ψ' = ℋ_T ψ  ⇔  ψ' = −i ℋ_T ψ
    let generator = heff.matrix().mapv(|z| z * c(0.0, -1.0));
    let mut psi = psi0.clone();
    let stepper = |state: &Ket, h: f64| -> Ket {
        let k1 = generator.dot(state);
        let k2 = generator.dot(&(state + &k1.mapv(|z| z * c(0.5 * h, 0.0))));
        let k3 = generator.dot(&(state + &k2.mapv(|z| z * c(0.5 * h, 0.0))));
        let k4 = generator.dot(&(state + &k3.mapv(|z| z * c(h, 0.0))));
        state
            + &(k1 + k2.mapv(|z| z * c(2.0, 0.0)) + k3.mapv(|z| z * c(2.0, 0.0)) + k4)
                .mapv(|z| z * c(h / 6.0, 0.0))
    };
    let steps = (t_final / dt).round() as u64;
    let whole = steps as f64 * dt;
    for _ in 0..steps {
        psi = stepper(&psi, dt);
    }
    let remainder = t_final - whole;
    if remainder.abs() > 1e-12 {
        psi = stepper(&psi, remainder);
    }
    Ok(psi)
}

/// Convenience: the spin model H = (normalized Hamiltonian), single jump
/// L = √γ·σ_−. Callers supply the 2×2 Hermitian H.
pub fn spin_model(hamiltonian: ComplexMatrix, gamma: f64) -> Result<LindbladModel> {
    if gamma < 0.0 {
        return Err(CoreError::InvalidArgument {
            reason: format!("decay rate must be nonnegative, got {gamma}"),
        });
    }
    let jump = crate::quantum::pauli(crate::quantum::PauliAxis::Minus)
        .mapv(|z| z * c(gamma.sqrt(), 0.0));
    LindbladModel::new(hamiltonian, vec![jump])
}
