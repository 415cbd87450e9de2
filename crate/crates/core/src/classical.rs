// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Classical dynamics of the magnetic particle: damped planar harmonic
//! motion in closed form, plus a fixed-step RK4 integrator for the full
//! hybrid equation of motion with spectral back-action forces.
//!
//! The free motion is an underdamped oscillator per Cartesian component,
//!
//! q(t) = e^{−(Γ/m)t} (A cos Ω₀t + B sin Ω₀t),  Ω₀ = √(Ω² − (Γ/m)²),
//!
//! with A = q(0) and B = (v(0) + (Γ/m)q(0))/Ω₀. The reference orbit used by
//! the sweep scenarios takes A = (a₀, 0) and B = (0, a₀): an inward spiral
//! of constant angular rate Ω₀.
//!
//! The full equation of motion adds the forces mediated by the dissipative
//! spin to the oscillator and drag terms:
//!
//! m q̈ = −mΩ²q − 2Γq̇ − Σ_j p_j Re ∇λ_j + q̇ × (0, 0, Re b_z),
//!
//! evaluated quasi-statically at the instantaneous position. Each force can
//! be toggled independently so integrator accuracy and work-balance checks
//! can isolate one term at a time.

use crate::dipole::{HybridParams, Position};
use crate::error::{CoreError, Result};
use crate::geometry::{geometric_field_at, lambda_gradient, Weights};
use crate::tolerances;

/// Phase-space point of the classical particle: in-plane position and
/// velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    /// Position (x, y) in the particle plane.
    pub q: [f64; 2],
    /// Velocity (vx, vy).
    pub v: [f64; 2],
}

impl ClassicalState {
    pub fn new(q: [f64; 2], v: [f64; 2]) -> Self {
        Self { q, v }
    }

    /// Position as the dipole-geometry type.
    pub fn position(&self) -> Position {
        Position::new(self.q[0], self.q[1])
    }

    /// In-plane distance from the symmetry axis.
    pub fn radius(&self) -> f64 {
        self.q[0].hypot(self.q[1])
    }

    pub fn speed(&self) -> f64 {
        self.v[0].hypot(self.v[1])
    }

    /// Oscillator energy ½m|v|² + ½mΩ²|q|² (kinetic plus trap potential;
    /// excludes the spin-mediated terms).
    pub fn oscillator_energy(&self, mass: f64, omega: f64) -> f64 {
        let kinetic = 0.5 * mass * (self.v[0] * self.v[0] + self.v[1] * self.v[1]);
        let potential =
            0.5 * mass * omega * omega * (self.q[0] * self.q[0] + self.q[1] * self.q[1]);
        kinetic + potential
    }
}

/// Reduced frequency Ω₀ = √(Ω² − (Γ/m)²) of the underdamped oscillator.
///
/// The closed-form branch implemented here requires Γ/m < Ω strictly; at or
/// beyond critical damping the trigonometric solution no longer applies and
/// the call fails with [`CoreError::Overdamped`].
pub fn effective_frequency(omega: f64, big_gamma: f64, mass: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(CoreError::InvalidArgument {
            reason: format!("trap frequency must be positive and finite, got {omega}"),
        });
    }
    if !(big_gamma >= 0.0) || !big_gamma.is_finite() {
        return Err(CoreError::InvalidArgument {
            reason: format!("drag coefficient must be nonnegative and finite, got {big_gamma}"),
        });
    }
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(CoreError::InvalidArgument {
            reason: format!("mass must be positive and finite, got {mass}"),
        });
    }
    let beta = big_gamma / mass;
    if beta >= omega {
        return Err(CoreError::Overdamped {
            damping_rate: beta,
            omega,
        });
    }
    Ok((omega * omega - beta * beta).sqrt())
}

/// Cartesian coefficient vectors of the closed-form damped solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCoefficients {
    /// Cosine amplitudes (equal to the initial position).
    pub a_vec: [f64; 2],
    /// Sine amplitudes (v₀ + (Γ/m)q₀)/Ω₀ per component.
    pub b_vec: [f64; 2],
}

/// Coefficients reproducing the given initial phase-space point.
pub fn coefficients_from_initial(
    initial: &ClassicalState,
    omega: f64,
    big_gamma: f64,
    mass: f64,
) -> Result<InitialCoefficients> {
    let omega0 = effective_frequency(omega, big_gamma, mass)?;
    let beta = big_gamma / mass;
    let a_vec = initial.q;
    let b_vec = [
        (initial.v[0] + beta * initial.q[0]) / omega0,
        (initial.v[1] + beta * initial.q[1]) / omega0,
    ];
    Ok(InitialCoefficients { a_vec, b_vec })
}

/// Closed-form damped state at time t:
///
/// q(t) = e^{−βt}(A cos Ω₀t + B sin Ω₀t),
/// v(t) = e^{−βt}[(Ω₀B − βA) cos Ω₀t − (Ω₀A + βB) sin Ω₀t],  β = Γ/m.
pub fn damped_solution(
    t: f64,
    coeffs: &InitialCoefficients,
    omega: f64,
    big_gamma: f64,
    mass: f64,
) -> Result<ClassicalState> {
    let omega0 = effective_frequency(omega, big_gamma, mass)?;
    let beta = big_gamma / mass;
    Ok(evaluate_damped(t, coeffs, omega0, beta))
}

/// Damped solution with Ω₀ and β already reduced (hot path of analytic
/// trajectory evaluation; no revalidation).
fn evaluate_damped(
    t: f64,
    coeffs: &InitialCoefficients,
    omega0: f64,
    beta: f64,
) -> ClassicalState {
    let envelope = (-beta * t).exp();
    let (sin_t, cos_t) = (omega0 * t).sin_cos();
    let mut q = [0.0; 2];
    let mut v = [0.0; 2];
    for k in 0..2 {
        let a = coeffs.a_vec[k];
        let b = coeffs.b_vec[k];
        q[k] = envelope * (a * cos_t + b * sin_t);
        v[k] = envelope * ((omega0 * b - beta * a) * cos_t - (omega0 * a + beta * b) * sin_t);
    }
    ClassicalState { q, v }
}

/// How a stored trajectory is evaluated between (or at) its grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveModel {
    /// Closed-form damped solution; exact at any time in range.
    Analytic {
        coeffs: InitialCoefficients,
        /// Reduced frequency Ω₀.
        omega0: f64,
        /// Damping rate β = Γ/m.
        beta: f64,
    },
    /// Numerically integrated samples; cubic-Hermite interpolated between
    /// grid points using the stored velocities as slopes.
    Sampled,
}

/// Time-ordered classical trajectory on a uniform grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Sample times, strictly increasing, uniformly spaced.
    pub times: Vec<f64>,
    /// Phase-space samples, one per time.
    pub states: Vec<ClassicalState>,
    /// Evaluation rule between grid points.
    pub drive: DriveModel,
}

impl Trajectory {
    /// Construct after validating matching lengths, ≥ 2 samples, and a
    /// uniform strictly positive step.
    pub fn new(times: Vec<f64>, states: Vec<ClassicalState>, drive: DriveModel) -> Result<Self> {
        if times.len() != states.len() {
            return Err(CoreError::DimensionMismatch {
                context: "trajectory times vs states",
                got: states.len(),
                expected: times.len(),
            });
        }
        if times.len() < 2 {
            return Err(CoreError::InvalidArgument {
                reason: format!("trajectory needs at least 2 samples, got {}", times.len()),
            });
        }
        let traj = Self {
            times,
            states,
            drive,
        };
        traj.step()?;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            if !t.is_finite()
                || !s.q.iter().chain(&s.v).all(|x| x.is_finite())
            {
                return Err(CoreError::NonFinite {
                    context: "trajectory sample",
                });
            }
        }
        Ok(traj)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The uniform grid step, verified against every interval.
    pub fn step(&self) -> Result<f64> {
        let dt = self.times[1] - self.times[0];
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(CoreError::InvalidArgument {
                reason: format!("trajectory step must be positive, got {dt}"),
            });
        }
        let scale = dt.abs().max(1.0);
        for w in self.times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > tolerances::UNIFORM_STEP * scale {
                return Err(CoreError::InvalidArgument {
                    reason: format!(
                        "trajectory grid is not uniform: step {} vs {}",
                        w[1] - w[0],
                        dt
                    ),
                });
            }
        }
        Ok(dt)
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("validated non-empty")
    }

    /// Phase-space point at an arbitrary time within the stored range.
    ///
    /// Analytic drives evaluate the closed form exactly; sampled drives use
    /// cubic Hermite interpolation on each component of q (velocities act as
    /// the nodal slopes) and the polynomial's derivative for v.
    pub fn state_at(&self, t: f64) -> Result<ClassicalState> {
        let (t0, t1) = (self.start_time(), self.end_time());
        // Tolerate end-point rounding from repeated step summation.
        let slack = 1e-9 * (t1 - t0).max(1.0);
        if !(t >= t0 - slack && t <= t1 + slack) {
            return Err(CoreError::InvalidArgument {
                reason: format!("time {t} outside trajectory range [{t0}, {t1}]"),
            });
        }
        Ok(self.sampler()?.at(t))
    }

    /// Pre-validated O(1) evaluator for repeated lookups (integrator hot
    /// path): the range and uniformity checks of [`Trajectory::state_at`]
    /// run once at construction instead of per call.
    pub fn sampler(&self) -> Result<TrajectorySampler<'_>> {
        let dt = self.step()?;
        Ok(TrajectorySampler { traj: self, dt })
    }

    /// Analytic free-oscillator trajectory from the initial state, sampled
    /// on a uniform grid of `n_steps` intervals covering [0, t_final].
    pub fn analytic_free(
        params: &HybridParams,
        initial: &ClassicalState,
        t_final: f64,
        n_steps: usize,
    ) -> Result<Self> {
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(CoreError::InvalidArgument {
                reason: format!("final time must be positive and finite, got {t_final}"),
            });
        }
        if n_steps == 0 {
            return Err(CoreError::InvalidArgument {
                reason: "trajectory needs at least one step".into(),
            });
        }
        let coeffs =
            coefficients_from_initial(initial, params.omega, params.big_gamma, params.mass)?;
        let omega0 = effective_frequency(params.omega, params.big_gamma, params.mass)?;
        let beta = params.big_gamma / params.mass;
        let dt = t_final / n_steps as f64;
        let times: Vec<f64> = (0..=n_steps).map(|k| k as f64 * dt).collect();
        let states: Vec<ClassicalState> = times
            .iter()
            .map(|&t| evaluate_damped(t, &coeffs, omega0, beta))
            .collect();
        Trajectory::new(
            times,
            states,
            DriveModel::Analytic {
                coeffs,
                omega0,
                beta,
            },
        )
    }

    /// The reference inward spiral q(t) = a₀e^{−βt}(cos Ω₀t, sin Ω₀t): the
    /// closed-form orbit with A = (a₀, 0), B = (0, a₀).
    pub fn reference_spiral(params: &HybridParams, t_final: f64, n_steps: usize) -> Result<Self> {
        let omega0 = effective_frequency(params.omega, params.big_gamma, params.mass)?;
        let beta = params.big_gamma / params.mass;
        let initial = ClassicalState::new(
            [params.a, 0.0],
            [-beta * params.a, omega0 * params.a],
        );
        Self::analytic_free(params, &initial, t_final, n_steps)
    }
}

/// Borrowing evaluator produced by [`Trajectory::sampler`].
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySampler<'a> {
    traj: &'a Trajectory,
    dt: f64,
}

impl TrajectorySampler<'_> {
    /// Evaluate at time t, clamped to the stored range (callers guarantee t
    /// lies inside it up to step-summation rounding).
    pub fn at(&self, t: f64) -> ClassicalState {
        let t = t.clamp(self.traj.start_time(), self.traj.end_time());
        match self.traj.drive {
            DriveModel::Analytic {
                coeffs,
                omega0,
                beta,
            } => evaluate_damped(t, &coeffs, omega0, beta),
            DriveModel::Sampled => {
                let raw = ((t - self.traj.start_time()) / self.dt).floor();
                let idx = (raw.max(0.0) as usize).min(self.traj.len() - 2);
                let s = ((t - self.traj.times[idx]) / self.dt).clamp(0.0, 1.0);
                hermite_segment(&self.traj.states[idx], &self.traj.states[idx + 1], self.dt, s)
            }
        }
    }
}

/// Cubic Hermite step between two phase-space samples a grid interval apart;
/// `s` ∈ [0, 1] is the fractional offset into the interval.
fn hermite_segment(left: &ClassicalState, right: &ClassicalState, dt: f64, s: f64) -> ClassicalState {
    // Standard Hermite basis on [0, 1] with slopes scaled by dt.
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    // Derivatives with respect to s (divide by dt for time derivatives).
    let d00 = 6.0 * s * (s - 1.0);
    let d10 = (1.0 - s) * (1.0 - 3.0 * s);
    let d01 = 6.0 * s * (1.0 - s);
    let d11 = s * (3.0 * s - 2.0);
    let mut q = [0.0; 2];
    let mut v = [0.0; 2];
    for k in 0..2 {
        q[k] = h00 * left.q[k] + h10 * dt * left.v[k] + h01 * right.q[k] + h11 * dt * right.v[k];
        v[k] = (d00 * left.q[k] + d10 * dt * left.v[k] + d01 * right.q[k] + d11 * dt * right.v[k])
            / dt;
    }
    ClassicalState { q, v }
}

/// Which forces enter the hybrid equation of motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForceOptions {
    /// Spectral gradient force −Σ_j p_j Re ∇λ_j.
    pub gradient: bool,
    /// Trap restoring force −mΩ²q.
    pub harmonic: bool,
    /// Lorentz-like force q̇ × (0, 0, Re b_z) from the geometric field.
    pub lorentz: bool,
    /// Linear drag −2Γq̇.
    pub drag: bool,
}

impl ForceOptions {
    /// Everything on: the full hybrid equation of motion.
    pub fn full() -> Self {
        Self {
            gradient: true,
            harmonic: true,
            lorentz: true,
            drag: true,
        }
    }

    /// Trap and drag only (no spin back-action); matches the closed form.
    pub fn free_oscillator() -> Self {
        Self {
            gradient: false,
            harmonic: true,
            lorentz: false,
            drag: true,
        }
    }
}

/// Why and where an integration stopped before reaching its final time.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    /// Last time retained in the trajectory.
    pub time: f64,
    /// In-plane radius that triggered the stop.
    pub radius: f64,
    /// The singular-geometry limit in force at the time of the stop.
    pub a_min: f64,
}

/// Result of a hybrid integration: the trajectory actually produced, plus a
/// truncation report when the particle entered the singular disc and the run
/// stopped early.
#[derive(Debug, Clone)]
pub struct HybridIntegration {
    pub trajectory: Trajectory,
    pub truncation: Option<TruncationReport>,
}

/// Total force on the particle at one phase-space point.
///
/// The position-dependent terms (gradient, Lorentz) fail with
/// [`CoreError::SingularGeometry`] when the radius drops below `a_min`; the
/// integrator converts that into a truncation.
pub fn hybrid_force(
    params: &HybridParams,
    weights: &Weights,
    state: &ClassicalState,
    options: &ForceOptions,
    a_min: f64,
) -> Result<[f64; 2]> {
    let mut f = [0.0, 0.0];
    if options.harmonic {
        let k = params.mass * params.omega * params.omega;
        f[0] -= k * state.q[0];
        f[1] -= k * state.q[1];
    }
    if options.drag {
        f[0] -= 2.0 * params.big_gamma * state.v[0];
        f[1] -= 2.0 * params.big_gamma * state.v[1];
    }
    if options.gradient || options.lorentz {
        let pos = state.position();
        let radius = pos.radius();
        if !(radius > a_min) {
            return Err(CoreError::SingularGeometry {
                context: "hybrid_force",
                radius,
                limit: a_min,
            });
        }
        if options.gradient {
            let p = weights.p();
            // Branch 4 is the stationary mode with identically zero
            // gradient; only the decaying branches contribute.
            for (j, &weight) in p.iter().enumerate().take(3) {
                if weight == 0.0 {
                    continue;
                }
                let (gx, gy) = lambda_gradient(params, &pos, j + 1)?;
                f[0] -= weight * gx.re;
                f[1] -= weight * gy.re;
            }
        }
        if options.lorentz {
            let (field, _) = geometric_field_at(params, weights, &pos, a_min)?;
            let b = field.b_z.re;
            // q̇ × (0, 0, b) restricted to the plane.
            f[0] += state.v[1] * b;
            f[1] -= state.v[0] * b;
        }
    }
    if !f[0].is_finite() || !f[1].is_finite() {
        return Err(CoreError::NonFinite {
            context: "hybrid_force",
        });
    }
    Ok(f)
}

/// Integrate m q̈ = F(q, q̇) with classical RK4 on a uniform grid.
///
/// The step count is chosen so the grid covers [0, t_final] exactly: the
/// requested `dt` is kept when it divides t_final (to within rounding) and
/// shrunk to the nearest exact divisor otherwise. If a Runge–Kutta stage
/// lands inside the singular disc while a position-dependent force is
/// active, the step is rejected and the run returns the trajectory up to the
/// last accepted state together with a [`TruncationReport`].
pub fn integrate_hybrid_eom(
    params: &HybridParams,
    weights: &Weights,
    initial: &ClassicalState,
    t_final: f64,
    dt: f64,
    options: &ForceOptions,
    a_min: f64,
) -> Result<HybridIntegration> {
    params.validate()?;
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(CoreError::InvalidArgument {
            reason: format!("final time must be positive and finite, got {t_final}"),
        });
    }
    if !(dt > 0.0) || !dt.is_finite() || dt > t_final {
        return Err(CoreError::InvalidArgument {
            reason: format!("step must satisfy 0 < dt ≤ t_final, got dt = {dt}"),
        });
    }
    let ratio = t_final / dt;
    let n_steps = if (ratio - ratio.round()).abs() < 1e-9 && ratio.round() >= 1.0 {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let h = t_final / n_steps as f64;

    // Fail fast if the starting point is already singular for the requested
    // force set (a truncation report at t = 0 would carry no trajectory).
    hybrid_force(params, weights, initial, options, a_min)?;

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(*initial);
    let mut truncation = None;

    let mut current = *initial;
    for k in 0..n_steps {
        match rk4_step(params, weights, &current, h, options, a_min) {
            Ok(next) => {
                current = next;
                times.push((k + 1) as f64 * h);
                states.push(current);
            }
            Err(CoreError::SingularGeometry { radius, .. }) => {
                truncation = Some(TruncationReport {
                    time: k as f64 * h,
                    radius,
                    a_min,
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }

    if states.len() < 2 {
        // The very first step was rejected: nothing integrable here.
        return Err(CoreError::SingularGeometry {
            context: "integrate_hybrid_eom",
            radius: truncation.map_or(initial.radius(), |t| t.radius),
            limit: a_min,
        });
    }
    let trajectory = Trajectory::new(times, states, DriveModel::Sampled)?;
    Ok(HybridIntegration {
        trajectory,
        truncation,
    })
}

/// One classical RK4 step of the second-order system as a first-order system
/// in (q, v).
fn rk4_step(
    params: &HybridParams,
    weights: &Weights,
    state: &ClassicalState,
    h: f64,
    options: &ForceOptions,
    a_min: f64,
) -> Result<ClassicalState> {
    let inv_m = 1.0 / params.mass;
    let deriv = |s: &ClassicalState| -> Result<([f64; 2], [f64; 2])> {
        let f = hybrid_force(params, weights, s, options, a_min)?;
        Ok((s.v, [f[0] * inv_m, f[1] * inv_m]))
    };
    let advance = |s: &ClassicalState, dq: &[f64; 2], dv: &[f64; 2], scale: f64| ClassicalState {
        q: [s.q[0] + scale * dq[0], s.q[1] + scale * dq[1]],
        v: [s.v[0] + scale * dv[0], s.v[1] + scale * dv[1]],
    };

    let (kq1, kv1) = deriv(state)?;
    let (kq2, kv2) = deriv(&advance(state, &kq1, &kv1, h / 2.0))?;
    let (kq3, kv3) = deriv(&advance(state, &kq2, &kv2, h / 2.0))?;
    let (kq4, kv4) = deriv(&advance(state, &kq3, &kv3, h))?;

    let mut q = state.q;
    let mut v = state.v;
    for k in 0..2 {
        q[k] += h / 6.0 * (kq1[k] + 2.0 * kq2[k] + 2.0 * kq3[k] + kq4[k]);
        v[k] += h / 6.0 * (kv1[k] + 2.0 * kv2[k] + 2.0 * kv3[k] + kv4[k]);
    }
    let next = ClassicalState { q, v };
    if !next.q.iter().chain(&next.v).all(|x| x.is_finite()) {
        return Err(CoreError::NonFinite {
            context: "rk4_step",
        });
    }
    Ok(next)
}
