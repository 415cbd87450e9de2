// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! General small-matrix eigen-decomposition with paired left/right vectors.
//!
//! Non-Hermitian matrices need biorthogonal spectral data: right vectors
//! M·r_j = λ_j·r_j together with left vectors l_j†·M = λ_j·l_j†, paired so
//! that l_i†·r_j ≈ 0 for i ≠ j. Left vectors are obtained as eigenvectors of
//! the plain transpose Mᵀ (u_jᵀ·M = λ_j·u_jᵀ ⇒ l_j = conj(u_j)), then matched
//! to the right spectrum by a minimal-total-distance assignment and
//! re-biorthogonalized inside degenerate groups.
//!
//! Ref: Brody, "Biorthogonal quantum mechanics", J. Phys. A 47, 035305 (2014).

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::quantum::{frobenius_norm, ComplexMatrix, Ket};
use crate::tolerances;

/// Largest matrix dimension accepted by [`eig_full`].
pub const MAX_DIM: usize = 16;

/// Exhaustive assignment is used up to this dimension (n! search).
const EXHAUSTIVE_ASSIGNMENT_MAX: usize = 8;

/// Eigenvalues with paired right and left eigenvectors.
///
/// Invariants (enforced at construction):
/// * ‖M·r_j − λ_j·r_j‖ ≤ 1e-9·‖M‖_F and ‖l_j†·M − λ_j·l_j†‖ ≤ 1e-9·‖M‖_F,
/// * |l_i†·r_j| ≤ 1e-8 for i ≠ j after pairing,
/// * degenerate eigenvalues (|λ_i − λ_j| < 1e-10) are grouped and
///   re-biorthogonalized within the group.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenvalues λ_j in the (deterministic) order returned by the backend.
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm right eigenvectors, M·r_j = λ_j·r_j.
    pub right_vectors: Vec<Ket>,
    /// Left eigenvectors as kets: l_j†·M = λ_j·l_j†.
    pub left_vectors: Vec<Ket>,
}

/// Full eigen-decomposition with paired left/right eigenvectors.
///
/// Supports square matrices up to dimension [`MAX_DIM`]. Degenerate
/// eigenvalue groups (absolute gap below the grouping threshold) keep valid
/// biorthogonality through a within-group pairing-matrix inversion; a
/// defective (non-diagonalizable) group surfaces as an [`CoreError::EigenFailure`].
pub fn eig_full(m: &ComplexMatrix) -> Result<EigenSystem> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(CoreError::NonSquare {
            context: "eig_full",
            rows,
            cols,
        });
    }
    if rows == 0 || rows > MAX_DIM {
        return Err(CoreError::InvalidArgument {
            reason: format!("eig_full supports dimensions 1..={MAX_DIM}, got {rows}"),
        });
    }
    crate::quantum::check_finite(m, "eig_full input")?;

    let (right_vals, right_cols) = m.eig().map_err(|e| CoreError::EigenFailure {
        reason: format!("right eigendecomposition failed: {e}"),
    })?;
    let transposed = m.t().to_owned();
    let (left_vals, left_cols) = transposed.eig().map_err(|e| CoreError::EigenFailure {
        reason: format!("transpose eigendecomposition failed: {e}"),
    })?;

    let n = rows;
    let assignment = pair_spectra(&right_vals, &left_vals, n)?;

    let mut eigenvalues = Vec::with_capacity(n);
    let mut right_vectors: Vec<Ket> = Vec::with_capacity(n);
    let mut left_vectors: Vec<Ket> = Vec::with_capacity(n);
    for j in 0..n {
        eigenvalues.push(right_vals[j]);
        right_vectors.push(normalized(right_cols.column(j).to_owned()));
        // u_jᵀ·M = λ_j·u_jᵀ  ⇒  l_j = conj(u_j) satisfies l_j†·M = λ_j·l_j†.
        let u = left_cols.column(assignment[j]).to_owned();
        left_vectors.push(normalized(u.mapv(|z| z.conj())));
    }

    rebiorthogonalize_degenerate_groups(&eigenvalues, &right_vectors, &mut left_vectors)?;

    let system = EigenSystem {
        eigenvalues,
        right_vectors,
        left_vectors,
    };
    system.verify(m)?;
    Ok(system)
}

impl EigenSystem {
    /// Number of eigenpairs.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    /// True when the decomposition is empty (never for a successful solve).
    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Residual, biorthogonality and finiteness checks from the type contract.
    fn verify(&self, m: &ComplexMatrix) -> Result<()> {
        let scale = frobenius_norm(m);
        let bound = tolerances::EIG_RESIDUAL_REL * scale;
        for j in 0..self.len() {
            let lambda = self.eigenvalues[j];
            let r = &self.right_vectors[j];
            let right_residual = vector_norm(&(m.dot(r) - r.mapv(|z| z * lambda)));
            if right_residual > bound {
                return Err(CoreError::EigenFailure {
                    reason: format!(
                        "right residual {right_residual:.3e} exceeds {bound:.3e} at index {j}"
                    ),
                });
            }
            let l = &self.left_vectors[j];
            // ‖l†·M − λ·l†‖ computed on the conjugated column: Mᵀ·conj(l) − λ·conj(l).
            let lc = l.mapv(|z| z.conj());
            let left_residual = vector_norm(&(m.t().dot(&lc) - lc.mapv(|z| z * lambda)));
            if left_residual > bound {
                return Err(CoreError::EigenFailure {
                    reason: format!(
                        "left residual {left_residual:.3e} exceeds {bound:.3e} at index {j}"
                    ),
                });
            }
        }
        for i in 0..self.len() {
            for j in 0..self.len() {
                if i == j {
                    continue;
                }
                let overlap = sesquilinear(&self.left_vectors[i], &self.right_vectors[j]).norm();
                if overlap > tolerances::BIORTHOGONALITY {
                    return Err(CoreError::EigenFailure {
                        reason: format!(
                            "biorthogonality violation |l_{i}^dagger r_{j}| = {overlap:.3e}"
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// l†·r = Σ_k conj(l_k)·r_k.
pub fn sesquilinear(l: &Ket, r: &Ket) -> Complex64 {
    l.iter().zip(r.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Plain bilinear pairing Σ_k u_k·v_k (no conjugation).
pub fn bilinear(u: &Ket, v: &Ket) -> Complex64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
}

/// Euclidean norm of a complex vector.
pub fn vector_norm(v: &Ket) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalized(v: Ket) -> Ket {
    let n = vector_norm(&v);
    if n == 0.0 {
        v
    } else {
        v.mapv(|z| z / n)
    }
}

/// Match the transpose spectrum onto the right spectrum by minimizing the
/// total eigenvalue distance: exhaustive permutation search for small n,
/// globally-greedy edge matching (verified downstream) otherwise.
fn pair_spectra(
    right_vals: &Array1<Complex64>,
    left_vals: &Array1<Complex64>,
    n: usize,
) -> Result<Vec<usize>> {
    let cost = |i: usize, j: usize| (right_vals[i] - left_vals[j]).norm();
    if n <= EXHAUSTIVE_ASSIGNMENT_MAX {
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut perm: Vec<usize> = (0..n).collect();
        permute(&mut perm, 0, &mut |p| {
            let total: f64 = (0..n).map(|i| cost(i, p[i])).sum();
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, p.to_vec()));
            }
        });
        Ok(best.expect("non-empty permutation set").1)
    } else {
        let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                edges.push((cost(i, j), i, j));
            }
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut assignment = vec![usize::MAX; n];
        let mut used = vec![false; n];
        let mut placed = 0;
        for (_, i, j) in edges {
            if assignment[i] == usize::MAX && !used[j] {
                assignment[i] = j;
                used[j] = true;
                placed += 1;
                if placed == n {
                    break;
                }
            }
        }
        Ok(assignment)
    }
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// Group eigenvalues closer than the degeneracy threshold and replace the
/// group's left vectors by combinations satisfying l'_a†·r_b = δ_ab exactly.
fn rebiorthogonalize_degenerate_groups(
    eigenvalues: &[Complex64],
    right_vectors: &[Ket],
    left_vectors: &mut [Ket],
) -> Result<()> {
    let n = eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (eigenvalues[a].re, eigenvalues[a].im).partial_cmp(&(eigenvalues[b].re, eigenvalues[b].im))
            .expect("finite eigenvalues")
    });

    let mut group: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match group.last() {
            Some(&prev) if (eigenvalues[idx] - eigenvalues[prev]).norm()
                < tolerances::DEGENERACY_GROUPING =>
            {
                group.push(idx);
            }
            _ => {
                if group.len() > 1 {
                    groups.push(group.clone());
                }
                group.clear();
                group.push(idx);
            }
        }
    }
    if group.len() > 1 {
        groups.push(group);
    }

    for members in groups {
        let g = members.len();
        // Pairing matrix P_ab = l_a† · r_b restricted to the group.
        let mut p = Array2::<Complex64>::zeros((g, g));
        for (a, &ia) in members.iter().enumerate() {
            for (b, &ib) in members.iter().enumerate() {
                p[[a, b]] = sesquilinear(&left_vectors[ia], &right_vectors[ib]);
            }
        }
        let x = p.inv().map_err(|_| CoreError::EigenFailure {
            reason: format!(
                "defective degenerate group of size {g} (singular within-group pairing)"
            ),
        })?;
        // l'_a = Σ_c conj(X_ac) l_c  ⇒  l'_a† r_b = Σ_c X_ac P_cb = δ_ab.
        let originals: Vec<Ket> = members.iter().map(|&i| left_vectors[i].clone()).collect();
        for (a, &ia) in members.iter().enumerate() {
            let mut combo: Ket = Array1::zeros(originals[0].len());
            for (cc, original) in originals.iter().enumerate() {
                let w = x[[a, cc]].conj();
                combo = combo + original.mapv(|z| z * w);
            }
            left_vectors[ia] = normalized(combo);
        }
    }
    Ok(())
}
