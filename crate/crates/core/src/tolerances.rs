// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Centralized numerical tolerances with documented rationale.
//!
//! Every threshold used by the engine and its validation suites lives here —
//! no ad-hoc magic numbers at call sites. Tolerances fall into three
//! categories:
//!
//! | Category | Basis | Typical value |
//! |----------|-------|---------------|
//! | Machine precision | IEEE 754 f64 + small accumulation | 1e-12 … 1e-10 |
//! | Backend quality | LAPACK / polished root-finder residuals | 1e-10 … 1e-8 |
//! | Method error | RK4 step error, finite differences | 1e-8 … 1e-5 |

// ─────────────────────────────────────────────────────────────────────
// Structural / machine-precision checks
// ─────────────────────────────────────────────────────────────────────

/// Hermiticity assertion for matrices declared Hermitian (max|M − M†|).
///
/// Construction from real parameters is exact; 1e-12 allows a few ulps of
/// rounding in sums of products.
pub const HERMITIAN_ASSERT: f64 = 1e-12;

/// Density-matrix validation: Hermiticity and unit trace (absolute).
///
/// Looser than [`HERMITIAN_ASSERT`] because density matrices arrive from
/// integrators with O(dt⁴) accumulated drift.
pub const DENSITY_VALIDATION: f64 = 1e-10;

/// Density-matrix eigenvalue floor: eigenvalues ≥ −this are accepted.
pub const DENSITY_POSITIVITY: f64 = 1e-10;

/// Master-equation right-hand side must be Hermitian and traceless to this
/// bound (exact algebra up to rounding in matrix products).
pub const RHS_STRUCTURE: f64 = 1e-12;

// ─────────────────────────────────────────────────────────────────────
// Eigen-decomposition contracts
// ─────────────────────────────────────────────────────────────────────

/// Relative eigenpair residual: ‖M·r − λr‖ ≤ this × ‖M‖_F (and the left
/// analogue). LAPACK zgeev achieves ~1e-14 for well-conditioned dim ≤ 16;
/// 1e-9 leaves headroom for mildly ill-conditioned inputs.
pub const EIG_RESIDUAL_REL: f64 = 1e-9;

/// Biorthogonality after left/right pairing: |l_i†·r_j| ≤ this for i ≠ j.
pub const BIORTHOGONALITY: f64 = 1e-8;

/// Absolute eigenvalue-distance threshold for grouping degenerate branches.
///
/// The closed-system limit (γ = 0) produces an exactly doubly-degenerate zero
/// eigenvalue of the doubled-space generator; 1e-10 in the dimensionless
/// energy unit separates that from avoided crossings at finite γ.
pub const DEGENERACY_GROUPING: f64 = 1e-10;

/// Left zero-vector invariant of the effective Hamiltonian (trace
/// preservation): ‖Φ†·ℋ_T‖ ≤ this × ‖ℋ_T‖_F with Φ the flattened identity.
pub const TRACE_ZERO_MODE_REL: f64 = 1e-10;

/// Eigen-triple residual for the 4×4 doubled-space generator (absolute):
/// ‖ℋ_T·right − λ·right‖ ≤ this for unit-norm right.
pub const TRIPLE_RESIDUAL: f64 = 1e-9;

/// Non-defectiveness floor: |M_j| of a biorthogonal pairing must exceed this.
pub const M_NORM_FLOOR: f64 = 1e-12;

// ─────────────────────────────────────────────────────────────────────
// Characteristic cubic and closed-form coefficients
// ─────────────────────────────────────────────────────────────────────

/// Polynomial residual for characteristic roots after Newton polish.
pub const ROOT_RESIDUAL: f64 = 1e-10;

/// Agreement between cubic roots ∪ {0} and the numerical spectrum of ℋ_T.
pub const ROOT_SPECTRUM_MATCH: f64 = 1e-8;

/// Zero-mode detection: one eigenvalue of ℋ_T within this of 0 for all (γ,θ).
pub const ZERO_MODE_ABS: f64 = 1e-10;

/// Closed-form coefficient denominators below this magnitude are a division
/// blow-up (near-defective direction); the caller falls back to the numerical
/// eigenstructure.
pub const DIVISION_BLOWUP: f64 = 1e-12;

/// Residual bound for validated closed-form eigenvectors against ℋ_T.
pub const CLOSED_FORM_RESIDUAL: f64 = 1e-8;

/// Collinearity score |⟨u,v⟩|/(‖u‖‖v‖) counted as "same direction".
pub const COLLINEARITY: f64 = 1.0 - 1e-8;

// ─────────────────────────────────────────────────────────────────────
// Geometric field (vector potential / b_z)
// ─────────────────────────────────────────────────────────────────────

/// Default singular-zone radius: the azimuthal factors x/a², y/a² of the
/// vector potential blow up at the coordinate origin.
pub const A_MIN_DEFAULT: f64 = 1e-6;

/// Relative agreement between b_z and the finite-difference curl of A.
pub const CURL_RELATIVE: f64 = 1e-5;

/// Absolute floor added to the curl comparison denominator so the relative
/// test remains well-defined where the field surface is identically zero.
pub const CURL_ABS_FLOOR: f64 = 1e-10;

/// Branch-continuity check near γ = 0: |b_z(1e-4) − b_z(1e-6)| must not
/// exceed 1e-3 × max(|b_z(1e-6)|, floor). The floor keeps the relative
/// comparison meaningful on a zero surface.
pub const GAMMA_CONTINUITY_REL: f64 = 1e-3;
/// Absolute floor for [`GAMMA_CONTINUITY_REL`].
pub const GAMMA_CONTINUITY_FLOOR: f64 = 1e-12;

/// Gradient of an eigenvalue branch vs. central finite differences
/// (relative, step 1e-5): implicit differentiation is analytic, FD carries
/// O(h²) truncation ≈ 1e-10 plus cancellation ≈ 1e-11/h ≈ 1e-6.
pub const GRADIENT_FD_REL: f64 = 1e-6;

/// |∂F/∂λ| below this at a root marks a branch collision (exceptional
/// point); implicit differentiation is refused rather than amplified.
pub const BRANCH_DERIVATIVE_FLOOR: f64 = 1e-8;

// ─────────────────────────────────────────────────────────────────────
// Integration quality
// ─────────────────────────────────────────────────────────────────────

/// Trace drift allowed across a master-equation integration at default dt.
pub const TRACE_DRIFT: f64 = 1e-8;

/// Elementwise agreement between the master-equation path and the
/// vectorized-evolution path (RK4, dt = 1e-3, t ≤ 8).
pub const EQUIVALENCE: f64 = 1e-7;

/// Hermiticity / positivity slack for devectorized evolved states.
pub const EVOLVED_STATE_STRUCTURE: f64 = 1e-8;

/// Unit-norm precondition on states handed to the propagator.
pub const STATE_NORM: f64 = 1e-10;

/// Norm drift allowed in unitary Schrödinger propagation (checked, never
/// renormalized).
pub const NORM_DRIFT: f64 = 1e-8;

/// Norm drift that aborts a propagation (step too large for the drive).
pub const NORM_DRIFT_ABORT: f64 = 1e-6;

/// Classical trajectory error against the analytic damped solution over
/// t ∈ [0, 20] at dt = 1e-3 (RK4 global error ≈ 20·dt⁴ ≪ this).
pub const TRAJECTORY_VS_ANALYTIC: f64 = 1e-6;

/// Kinetic-energy drift for a purely magnetic (work-free) force.
pub const MAGNETIC_WORK_DRIFT: f64 = 1e-8;

/// Relative energy conservation for the undamped, unforced oscillator.
pub const OSCILLATOR_ENERGY_DRIFT: f64 = 1e-7;

// ─────────────────────────────────────────────────────────────────────
// Adiabaticity diagnostics
// ─────────────────────────────────────────────────────────────────────

/// κ(Γ=0) must equal the constant-orbit closed form ¼Ω|sinθ| to this bound
/// (θ is bit-constant on a circle; finite differences cancel exactly).
pub const KAPPA_CLOSED_FORM: f64 = 1e-12;

/// Additive slack for κ monotonicity in Γ on a common time grid.
///
/// θ(t) is recovered through arccos of a radius ratio; near the orbit's
/// closest approach the conditioning of arccos amplifies f64 rounding into
/// the finite-difference θ̇ at the ~1e-8 level (measured worst violation
/// 9.5e-9 on the default sweep). 1e-6 keeps the check meaningful — genuine
/// monotonicity violations in the swept range are ≥ 1e-4.
pub const KAPPA_MONOTONE_SLACK: f64 = 1e-6;

/// Additive slack for "κ eventually decreasing" along damped trajectories.
///
/// Once the orbit has collapsed (a ~ 1e-4), θ sits near π where acos has
/// √ε ≈ 1.5e-8 absolute conditioning noise; the finite-difference θ̇
/// amplifies it by 1/dt (dt = 0.1 default), giving observed spurious
/// upticks up to ~1.4e-8 on an otherwise decaying tail. 5e-8 clears that
/// floor; the genuine-decay companion check (end value below half the
/// peak) carries the physics content.
pub const KAPPA_DECREASING_SLACK: f64 = 5e-8;

/// Instantaneous-basis orthonormality (exact trigonometric construction).
pub const BASIS_ORTHONORMAL: f64 = 1e-12;

/// Instantaneous-basis eigenrelation residual ‖H|±⟩ − E_±|±⟩‖.
pub const BASIS_EIGEN_RESIDUAL: f64 = 1e-10;

/// Population bound slack: 0 ≤ p_e ≤ 1 + this.
pub const POPULATION_BOUND_SLACK: f64 = 1e-9;

// ─────────────────────────────────────────────────────────────────────
// Misc structural
// ─────────────────────────────────────────────────────────────────────

/// Uniform-step check for trajectories (absolute spread between steps).
pub const UNIFORM_STEP: f64 = 1e-12;

/// Weight normalization: Σ p_j = 1 within this.
pub const WEIGHT_SUM: f64 = 1e-12;

/// Spherical-angle consistency: cos θ must reproduce B_z/|B| within this.
pub const ANGLE_CONSISTENCY: f64 = 1e-12;
