// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Geometry of the classical magnetic dipole: field at the spin location,
//! spin Hamiltonian, and spherical field angles.
//!
//! The dipole sits at the in-plane position (x, y) a fixed height d above the
//! spin, with in-plane radius a = √(x² + y²). Its moment is normal to the
//! plane of motion, giving the field
//!
//! B = −field_scale · {3dx, 3dy, 2d² − a²} / (d² + a²)^{5/2}.
//!
//! The spin couples through H = μ B·σ; the field direction defines spherical
//! angles via cos θ = B_z/|B| and tan φ = B_y/B_x.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::quantum::{c, ComplexMatrix};
use crate::tolerances;

/// All physical constants of the hybrid system in the documented unit
/// system: ħ = 1, lengths in units of a reference radius, energies in units
/// of μ|B| at the scenario's reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridParams {
    /// Field prefactor μ₀m_F/4π (field · length³ units). Must be positive.
    pub field_scale: f64,
    /// Spin magnetic moment μ (sets the energy scale). Must be positive.
    pub mu: f64,
    /// Height d of the particle plane above the spin. Must be positive.
    pub d: f64,
    /// Reference in-plane radius a (initial orbit radius). Nonnegative.
    pub a: f64,
    /// Spin decay rate γ (dimensionless, in units of the reference energy).
    pub gamma: f64,
    /// Classical drag coefficient Γ.
    pub big_gamma: f64,
    /// Particle mass m.
    pub mass: f64,
    /// Harmonic trap angular frequency Ω.
    pub omega: f64,
}

impl HybridParams {
    /// Engine defaults: unit scales, reference orbit a = d = 1, slow trap
    /// Ω = 0.1, no drag, unit decay rate.
    pub fn default_reference() -> Self {
        Self {
            field_scale: 1.0,
            mu: 1.0,
            d: 1.0,
            a: 1.0,
            gamma: 1.0,
            big_gamma: 0.0,
            mass: 1.0,
            omega: 0.1,
        }
    }

    /// Enforce the type invariants.
    pub fn validate(&self) -> Result<()> {
        let all_finite = [
            self.field_scale,
            self.mu,
            self.d,
            self.a,
            self.gamma,
            self.big_gamma,
            self.mass,
            self.omega,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err(CoreError::NonFinite {
                context: "HybridParams",
            });
        }
        if self.d <= 0.0 {
            return Err(CoreError::InvalidArgument {
                reason: format!("d must be positive, got {}", self.d),
            });
        }
        if self.field_scale <= 0.0 || self.mu <= 0.0 {
            return Err(CoreError::InvalidArgument {
                reason: "field_scale and mu must be positive (they set the energy scale)".into(),
            });
        }
        if self.a < 0.0 || self.gamma < 0.0 || self.big_gamma < 0.0 {
            return Err(CoreError::InvalidArgument {
                reason: "a, gamma and Gamma must be nonnegative".into(),
            });
        }
        if self.mass <= 0.0 || self.omega <= 0.0 {
            return Err(CoreError::InvalidArgument {
                reason: "mass and Omega must be positive".into(),
            });
        }
        Ok(())
    }
}

/// In-plane particle position (x, y); the height d is fixed in
/// [`HybridParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// In-plane radius a = √(x² + y²).
    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Magnetic field components at the spin location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVector {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl FieldVector {
    /// Euclidean magnitude |B|.
    pub fn magnitude(&self) -> f64 {
        (self.bx * self.bx + self.by * self.by + self.bz * self.bz).sqrt()
    }
}

/// Spherical angles of a field direction: θ ∈ [0, π], φ ∈ (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalAngles {
    pub theta: f64,
    pub phi: f64,
}

/// Dipole field at the particle position:
/// B = −field_scale·{3dx, 3dy, 2d² − a²}/(d² + a²)^{5/2}.
pub fn dipole_field(params: &HybridParams, pos: &Position) -> FieldVector {
    let d = params.d;
    let a_sq = pos.x * pos.x + pos.y * pos.y;
    let denom = (d * d + a_sq).powf(2.5);
    let pref = -params.field_scale / denom;
    FieldVector {
        bx: pref * 3.0 * d * pos.x,
        by: pref * 3.0 * d * pos.y,
        bz: pref * (2.0 * d * d - a_sq),
    }
}

/// Spin Hamiltonian H = μ B·σ = μ(B_x σ_x + B_y σ_y + B_z σ_z), a 2×2
/// Hermitian traceless matrix with eigenvalues ±μ|B|.
pub fn spin_hamiltonian(params: &HybridParams, field: &FieldVector) -> ComplexMatrix {
    let mu = params.mu;
    ndarray::array![
        [
            c(mu * field.bz, 0.0),
            Complex64::new(mu * field.bx, -mu * field.by)
        ],
        [
            Complex64::new(mu * field.bx, mu * field.by),
            c(-mu * field.bz, 0.0)
        ]
    ]
}

/// Spherical angles of the field: θ = arccos(B_z/|B|), φ = atan2(B_y, B_x);
/// on the field axis (B_x = B_y = 0) the azimuth is fixed to φ = 0.
pub fn field_angles(field: &FieldVector) -> Result<SphericalAngles> {
    let norm = field.magnitude();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(CoreError::InvalidArgument {
            reason: "field_angles requires a nonzero finite field".into(),
        });
    }
    let theta = (field.bz / norm).clamp(-1.0, 1.0).acos();
    let phi = if field.bx == 0.0 && field.by == 0.0 {
        0.0
    } else {
        field.by.atan2(field.bx)
    };
    Ok(SphericalAngles { theta, phi })
}

/// |B| as a function of the in-plane radius only:
/// |B|(a) = field_scale·√(9d²a² + (2d² − a²)²)/(d² + a²)^{5/2}.
pub fn field_magnitude_at_radius(params: &HybridParams, a: f64) -> f64 {
    let d = params.d;
    let w = 2.0 * d * d - a * a;
    params.field_scale * (9.0 * d * d * a * a + w * w).sqrt() / (d * d + a * a).powf(2.5)
}

/// Polar field angle as a function of the in-plane radius:
/// cos θ(a) = −(2d² − a²)/√(9d²a² + (2d² − a²)²) (for positive field_scale).
pub fn theta_of_radius(a: f64, d: f64) -> f64 {
    let w = 2.0 * d * d - a * a;
    let r = (9.0 * d * d * a * a + w * w).sqrt();
    (-w / r).clamp(-1.0, 1.0).acos()
}

/// Analytic derivative dθ/da = −3d(a² + 2d²)/(9d²a² + (2d² − a²)²).
pub fn dtheta_da(a: f64, d: f64) -> f64 {
    let w = 2.0 * d * d - a * a;
    -3.0 * d * (a * a + 2.0 * d * d) / (9.0 * d * d * a * a + w * w)
}

/// Field direction at a position together with the local energy scale μ|B|:
/// the bridge from physical parameters to the dimensionless (γ, θ, φ) inputs
/// of the spectral layer.
pub fn local_frame(params: &HybridParams, pos: &Position) -> Result<(SphericalAngles, f64)> {
    let field = dipole_field(params, pos);
    let angles = field_angles(&field)?;
    debug_assert!(
        (angles.theta.cos() - field.bz / field.magnitude()).abs() <= tolerances::ANGLE_CONSISTENCY
    );
    Ok((angles, params.mu * field.magnitude()))
}
