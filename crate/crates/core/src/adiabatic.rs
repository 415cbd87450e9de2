// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Spin driven by a prescribed classical trajectory: instantaneous
//! eigenstates of the local Zeeman Hamiltonian, the adiabaticity parameter
//! κ(Γ, t), and direct Schrödinger propagation of the spin state.
//!
//! In the driven configuration the spin is decoherence free and evolves
//! under the time-dependent Hamiltonian of the moving particle's field,
//!
//! i ψ̇ = H(q(t)) ψ,   H(q) = (μ|B(q)|/ε₀) n̂(q)·σ,
//!
//! with energies measured in units of ε₀ = μ|B| at the reference radius.
//! Adiabatic following of the instantaneous eigenstates
//!
//! |+⟩ = cos(θ/2)|e⟩ + sin(θ/2)e^{iφ}|g⟩,
//! |−⟩ = −sin(θ/2)|e⟩ + cos(θ/2)e^{iφ}|g⟩,
//!
//! is governed by κ(Γ, t) = ¼|θ̇ + iΩ₀ sinθ|: damping shrinks the orbit,
//! tilts the field toward the axis, and so relaxes the adiabaticity
//! requirement as time evolves.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::classical::{effective_frequency, Trajectory};
use crate::dipole::{dipole_field, local_frame, HybridParams, Position, SphericalAngles};
use crate::error::{CoreError, Result};
use crate::quantum::{c, Ket};
use crate::tolerances;

/// Instantaneous eigenpair of a 2×2 Zeeman Hamiltonian H = field_norm·n̂·σ.
#[derive(Debug, Clone)]
pub struct InstantaneousBasis {
    /// Upper state |+⟩ in the (|e⟩, |g⟩) basis.
    pub plus: Ket,
    /// Lower state |−⟩ in the (|e⟩, |g⟩) basis.
    pub minus: Ket,
    /// E₊ = +field_norm.
    pub e_plus: f64,
    /// E₋ = −field_norm.
    pub e_minus: f64,
}

/// Instantaneous eigenstates at the given field direction and magnitude:
///
/// |+⟩ = (cos θ/2, sin θ/2 e^{iφ}),  |−⟩ = (−sin θ/2, cos θ/2 e^{iφ}),
///
/// with E_± = ±field_norm. The relative phase sits entirely on the |g⟩
/// component in both states.
pub fn instantaneous_eigenstates(
    angles: &SphericalAngles,
    field_norm: f64,
) -> Result<InstantaneousBasis> {
    if !(field_norm > 0.0) || !field_norm.is_finite() {
        return Err(CoreError::InvalidArgument {
            reason: format!("field norm must be positive and finite, got {field_norm}"),
        });
    }
    let half = angles.theta / 2.0;
    let (sin_h, cos_h) = half.sin_cos();
    let phase = Complex64::from_polar(1.0, angles.phi);
    let plus = ndarray::array![c(cos_h, 0.0), phase * sin_h];
    let minus = ndarray::array![c(-sin_h, 0.0), phase * cos_h];
    Ok(InstantaneousBasis {
        plus,
        minus,
        e_plus: field_norm,
        e_minus: -field_norm,
    })
}

/// Which azimuthal rate multiplies sinθ in the adiabaticity parameter.
///
/// The printed criterion uses the constant reduced frequency Ω₀ even though
/// a damped orbit's instantaneous azimuthal rate is not constant a priori.
/// Both readings are computed; the constant-Ω₀ form is the default, and for
/// the closed-form damped orbit the two coincide exactly (the azimuth
/// advances at Ω₀ uniformly while only the radius decays).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseRateModel {
    /// ¼|θ̇ + iΩ₀ sinθ| with Ω₀ from [`effective_frequency`] (as printed).
    #[default]
    ConstantOmega0,
    /// ¼|θ̇ + iφ̇ sinθ| with φ̇ from finite differences of the unwrapped
    /// field azimuth along the trajectory.
    InstantaneousAzimuthalRate,
}

/// Adiabaticity parameter sampled on a trajectory's time grid.
#[derive(Debug, Clone)]
pub struct AdiabaticitySeries {
    pub times: Vec<f64>,
    /// κ(t) ≥ 0 per sample.
    pub kappa: Vec<f64>,
}

/// Both κ readings on a common grid (the Open-Question diagnostic pair).
#[derive(Debug, Clone)]
pub struct AdiabaticityDiagnostics {
    pub times: Vec<f64>,
    /// Printed reading: rate = Ω₀ (constant).
    pub kappa_constant_rate: Vec<f64>,
    /// Alternative reading: rate = φ̇(t) from finite differences.
    pub kappa_instantaneous_rate: Vec<f64>,
}

/// The κ kernel: ¼|θ̇ + i·rate·sinθ| = ¼√(θ̇² + rate²sin²θ).
pub fn kappa_value(theta_dot: f64, theta: f64, rate: f64) -> f64 {
    0.25 * theta_dot.hypot(rate * theta.sin())
}

/// Central finite differences on a uniform grid, one-sided at the endpoints.
fn finite_difference(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    out[0] = (values[1] - values[0]) / dt;
    out[n - 1] = (values[n - 1] - values[n - 2]) / dt;
    for k in 1..n - 1 {
        out[k] = (values[k + 1] - values[k - 1]) / (2.0 * dt);
    }
    out
}

/// Remove 2π jumps so finite differences see a continuous azimuth.
fn unwrap_angles(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    out.push(raw[0]);
    for k in 1..raw.len() {
        let mut delta = raw[k] - raw[k - 1];
        delta -= 2.0 * PI * (delta / (2.0 * PI)).round();
        out.push(out[k - 1] + delta);
    }
    out
}

/// Both adiabaticity readings along a trajectory.
///
/// θ(t) and φ(t) come from the dipole field at each stored sample; θ̇ and φ̇
/// are central finite differences on the uniform grid (one-sided at the
/// endpoints), uniform across analytic and integrated trajectories.
pub fn adiabaticity_diagnostics(
    params: &HybridParams,
    traj: &Trajectory,
) -> Result<AdiabaticityDiagnostics> {
    params.validate()?;
    let omega0 = effective_frequency(params.omega, params.big_gamma, params.mass)?;
    let dt = traj.step()?;
    let n = traj.len();
    let mut theta = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for state in &traj.states {
        let (angles, _) = local_frame(params, &Position::new(state.q[0], state.q[1]))?;
        theta.push(angles.theta);
        phi.push(angles.phi);
    }
    let theta_dot = finite_difference(&theta, dt);
    let phi_unwrapped = unwrap_angles(&phi);
    let phi_dot = finite_difference(&phi_unwrapped, dt);
    let kappa_constant_rate = theta
        .iter()
        .zip(&theta_dot)
        .map(|(&th, &thd)| kappa_value(thd, th, omega0))
        .collect();
    let kappa_instantaneous_rate = theta
        .iter()
        .zip(&theta_dot)
        .zip(&phi_dot)
        .map(|((&th, &thd), &phd)| kappa_value(thd, th, phd))
        .collect();
    Ok(AdiabaticityDiagnostics {
        times: traj.times.clone(),
        kappa_constant_rate,
        kappa_instantaneous_rate,
    })
}

/// κ(Γ, t) along a trajectory under the chosen azimuthal-rate reading.
pub fn adiabaticity_series_with(
    params: &HybridParams,
    traj: &Trajectory,
    model: PhaseRateModel,
) -> Result<AdiabaticitySeries> {
    let diag = adiabaticity_diagnostics(params, traj)?;
    let kappa = match model {
        PhaseRateModel::ConstantOmega0 => diag.kappa_constant_rate,
        PhaseRateModel::InstantaneousAzimuthalRate => diag.kappa_instantaneous_rate,
    };
    Ok(AdiabaticitySeries {
        times: diag.times,
        kappa,
    })
}

/// κ(Γ, t) in the printed constant-Ω₀ reading (the default).
pub fn adiabaticity_series(
    params: &HybridParams,
    traj: &Trajectory,
) -> Result<AdiabaticitySeries> {
    adiabaticity_series_with(params, traj, PhaseRateModel::ConstantOmega0)
}

/// Excited-state population sampled on the trajectory grid.
#[derive(Debug, Clone)]
pub struct PopulationSeries {
    pub times: Vec<f64>,
    /// P_e(t) = |⟨e|ψ(t)⟩|², within [0, 1] up to numerical slack.
    pub p_e: Vec<f64>,
    /// |‖ψ(t)‖ − 1| per sample (diagnostic; never corrected).
    pub norm_drift: Vec<f64>,
}

impl PopulationSeries {
    fn new(times: Vec<f64>, p_e: Vec<f64>, norm_drift: Vec<f64>) -> Result<Self> {
        if times.len() != p_e.len() || times.len() != norm_drift.len() {
            return Err(CoreError::DimensionMismatch {
                context: "population series columns",
                got: p_e.len(),
                expected: times.len(),
            });
        }
        for &p in &p_e {
            if !(-tolerances::POPULATION_BOUND_SLACK..=1.0 + tolerances::POPULATION_BOUND_SLACK)
                .contains(&p)
            {
                return Err(CoreError::InvalidArgument {
                    reason: format!("population {p} outside [0, 1] beyond slack"),
                });
            }
        }
        Ok(Self {
            times,
            p_e,
            norm_drift,
        })
    }
}

/// Full record of a propagation: the state at every trajectory node along
/// with the derived population and norm-drift series.
#[derive(Debug, Clone)]
pub struct PropagationRecord {
    pub times: Vec<f64>,
    /// ψ(t) at each node (dimension-2 kets, basis (|e⟩, |g⟩)).
    pub states: Vec<Ket>,
    pub p_e: Vec<f64>,
    pub norm_drift: Vec<f64>,
}

impl PropagationRecord {
    /// Collapse to the population series (validates the population bounds).
    pub fn population_series(&self) -> Result<PopulationSeries> {
        PopulationSeries::new(
            self.times.clone(),
            self.p_e.clone(),
            self.norm_drift.clone(),
        )
    }
}

/// Reduced Pauli components (h_x, h_y, h_z) of H(q)/ε₀ at a position: the
/// same Hamiltonian as `spin_hamiltonian` divided by the reference energy,
/// unpacked for the scalar propagation kernel.
fn reduced_components(params: &HybridParams, inv_eps0: f64, x: f64, y: f64) -> (f64, f64, f64) {
    let field = dipole_field(params, &Position::new(x, y));
    let s = params.mu * inv_eps0;
    (s * field.bx, s * field.by, s * field.bz)
}

/// dψ/dt = −i(h·σ)ψ expanded in components (the Hamiltonian is traceless):
///
/// ψ̇_e = −i(h_z ψ_e + (h_x − ih_y)ψ_g),
/// ψ̇_g = −i((h_x + ih_y)ψ_e − h_z ψ_g).
#[inline]
fn schrodinger_rhs(
    (hx, hy, hz): (f64, f64, f64),
    psi: (Complex64, Complex64),
) -> (Complex64, Complex64) {
    let off = Complex64::new(hx, -hy);
    let de = c(hz, 0.0) * psi.0 + off * psi.1;
    let dg = off.conj() * psi.0 - c(hz, 0.0) * psi.1;
    (c(0.0, -1.0) * de, c(0.0, -1.0) * dg)
}

/// Propagate i ψ̇ = H(q(t))ψ along the trajectory with fixed-step RK4,
/// keeping the full state record at every trajectory node.
///
/// `dt` must divide the trajectory step (each node interval is integrated
/// in an integer number of sub-steps); positions between nodes come from
/// the trajectory's evaluation rule (exact for analytic drives, cubic
/// Hermite otherwise). The norm is monitored — never corrected — and the
/// run aborts if the drift exceeds the hard bound.
pub fn schrodinger_propagate_record(
    params: &HybridParams,
    traj: &Trajectory,
    psi0: &Ket,
    dt: f64,
) -> Result<PropagationRecord> {
    params.validate()?;
    if psi0.len() != 2 {
        return Err(CoreError::DimensionMismatch {
            context: "spin state dimension",
            got: psi0.len(),
            expected: 2,
        });
    }
    let norm0 = (psi0[0].norm_sqr() + psi0[1].norm_sqr()).sqrt();
    if (norm0 - 1.0).abs() > tolerances::STATE_NORM {
        return Err(CoreError::InvalidArgument {
            reason: format!("initial state norm {norm0} differs from 1 beyond tolerance"),
        });
    }
    let h = traj.step()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(CoreError::InvalidArgument {
            reason: format!("propagation step must be positive, got {dt}"),
        });
    }
    let ratio = h / dt;
    let substeps = ratio.round();
    if substeps < 1.0 || (ratio - substeps).abs() > 1e-9 * substeps {
        return Err(CoreError::InvalidArgument {
            reason: format!(
                "dt = {dt} must divide the trajectory step {h} (ratio {ratio})"
            ),
        });
    }
    let substeps = substeps as usize;
    let step = h / substeps as f64;

    let eps0 = params.mu * crate::dipole::field_magnitude_at_radius(params, params.a);
    if !(eps0 > 0.0) {
        return Err(CoreError::InvalidArgument {
            reason: "reference energy scale μ|B(a₀)| must be positive".into(),
        });
    }
    let inv_eps0 = 1.0 / eps0;
    let sampler = traj.sampler()?;
    let field_at = |t: f64| -> (f64, f64, f64) {
        let s = sampler.at(t);
        reduced_components(params, inv_eps0, s.q[0], s.q[1])
    };

    let n = traj.len();
    let mut times = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    let mut p_e = Vec::with_capacity(n);
    let mut norm_drift = Vec::with_capacity(n);
    let mut psi = (psi0[0], psi0[1]);

    let mut record = |psi: (Complex64, Complex64), t: f64| -> Result<()> {
        let norm = (psi.0.norm_sqr() + psi.1.norm_sqr()).sqrt();
        let drift = (norm - 1.0).abs();
        if drift > tolerances::NORM_DRIFT_ABORT {
            return Err(CoreError::NormDrift {
                drift,
                tolerance: tolerances::NORM_DRIFT_ABORT,
                time: t,
            });
        }
        if !psi.0.is_finite() || !psi.1.is_finite() {
            return Err(CoreError::NonFinite {
                context: "schrodinger_propagate",
            });
        }
        times.push(t);
        states.push(ndarray::array![psi.0, psi.1]);
        p_e.push(psi.0.norm_sqr());
        norm_drift.push(drift);
        Ok(())
    };

    record(psi, traj.start_time())?;
    for node in 0..n - 1 {
        let t_node = traj.times[node];
        for j in 0..substeps {
            let t = t_node + j as f64 * step;
            // The two half-step stages share one field evaluation: k2 and
            // k3 sample the drive at the same time.
            let h1 = field_at(t);
            let h2 = field_at(t + step / 2.0);
            let h3 = field_at(t + step);
            let k1 = schrodinger_rhs(h1, psi);
            let k2 = schrodinger_rhs(
                h2,
                (psi.0 + step / 2.0 * k1.0, psi.1 + step / 2.0 * k1.1),
            );
            let k3 = schrodinger_rhs(
                h2,
                (psi.0 + step / 2.0 * k2.0, psi.1 + step / 2.0 * k2.1),
            );
            let k4 = schrodinger_rhs(h3, (psi.0 + step * k3.0, psi.1 + step * k3.1));
            psi = (
                psi.0 + step / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                psi.1 + step / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            );
        }
        record(psi, traj.times[node + 1])?;
    }

    Ok(PropagationRecord {
        times,
        states,
        p_e,
        norm_drift,
    })
}

/// Propagate and keep only the population series (the Fig.-style
/// observable): P_e(t) = |⟨e|ψ(t)⟩|² on the trajectory grid.
pub fn schrodinger_propagate(
    params: &HybridParams,
    traj: &Trajectory,
    psi0: &Ket,
    dt: f64,
) -> Result<PopulationSeries> {
    schrodinger_propagate_record(params, traj, psi0, dt)?.population_series()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ClassicalState;
    use crate::dipole::spin_hamiltonian;
    use crate::eig::vector_norm;
    use approx::assert_abs_diff_eq;

    fn figure_params(big_gamma: f64) -> HybridParams {
        let mut p = HybridParams::default_reference();
        p.big_gamma = big_gamma;
        p
    }

    fn ground_state() -> Ket {
        ndarray::array![c(0.0, 0.0), c(1.0, 0.0)]
    }

    #[test]
    fn polar_eigenstates_reduce_to_bare_basis() {
        // θ = 0: |+⟩ = |e⟩ and |−⟩ = e^{iφ}|g⟩.
        let basis = instantaneous_eigenstates(
            &SphericalAngles {
                theta: 0.0,
                phi: 0.7,
            },
            1.0,
        )
        .unwrap();
        assert_abs_diff_eq!((basis.plus[0] - c(1.0, 0.0)).norm(), 0.0);
        assert_abs_diff_eq!(basis.plus[1].norm(), 0.0);
        assert_abs_diff_eq!(basis.minus[0].norm(), 0.0);
        assert_abs_diff_eq!(
            (basis.minus[1] - Complex64::from_polar(1.0, 0.7)).norm(),
            0.0,
            epsilon = 1e-15
        );
        // θ = π, φ = 0: |+⟩ = |g⟩.
        let basis = instantaneous_eigenstates(
            &SphericalAngles {
                theta: std::f64::consts::PI,
                phi: 0.0,
            },
            2.5,
        )
        .unwrap();
        assert_abs_diff_eq!(basis.plus[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((basis.plus[1] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(basis.e_plus, 2.5);
        assert_abs_diff_eq!(basis.e_minus, -2.5);
    }

    #[test]
    fn eigenstates_are_orthonormal() {
        for &theta in &[0.3, 1.1, 1.892546881191539, 2.9] {
            for &phi in &[0.0, -1.2, 2.8] {
                let basis =
                    instantaneous_eigenstates(&SphericalAngles { theta, phi }, 1.0).unwrap();
                let overlap: Complex64 = basis
                    .plus
                    .iter()
                    .zip(basis.minus.iter())
                    .map(|(p, m)| p.conj() * m)
                    .sum();
                assert!(overlap.norm() <= tolerances::BASIS_ORTHONORMAL);
                assert_abs_diff_eq!(
                    vector_norm(&basis.plus),
                    1.0,
                    epsilon = tolerances::BASIS_ORTHONORMAL
                );
                assert_abs_diff_eq!(
                    vector_norm(&basis.minus),
                    1.0,
                    epsilon = tolerances::BASIS_ORTHONORMAL
                );
            }
        }
    }

    #[test]
    fn eigenstates_diagonalize_the_zeeman_hamiltonian() {
        // H|±⟩ = ±field_norm|±⟩ for the field reconstructed from the angles.
        let params = HybridParams::default_reference();
        let pos = Position::new(0.9, -0.4);
        let (angles, field_norm) = local_frame(&params, &pos).unwrap();
        let h = spin_hamiltonian(&params, &dipole_field(&params, &pos));
        let basis = instantaneous_eigenstates(&angles, field_norm).unwrap();
        for (ket, energy) in [(&basis.plus, basis.e_plus), (&basis.minus, basis.e_minus)] {
            let residual: f64 = (0..2)
                .map(|r| {
                    let hk: Complex64 = (0..2).map(|s| h[[r, s]] * ket[s]).sum();
                    (hk - c(energy, 0.0) * ket[r]).norm()
                })
                .fold(0.0, f64::max);
            assert!(
                residual <= tolerances::BASIS_EIGEN_RESIDUAL,
                "eigen-residual {residual}"
            );
        }
    }

    #[test]
    fn kappa_kernel_vanishes_on_axis() {
        // Hypothetical on-axis path: θ ≡ 0 and θ̇ = 0 give κ = 0.
        assert_abs_diff_eq!(kappa_value(0.0, 0.0, 0.5), 0.0);
        // Pure precession: κ = ¼·rate·sinθ.
        assert_abs_diff_eq!(
            kappa_value(0.0, std::f64::consts::FRAC_PI_2, 0.1),
            0.025,
            epsilon = 1e-15
        );
    }

    #[test]
    fn undamped_circular_orbit_has_constant_printed_kappa() {
        // Γ = 0: θ constant along the orbit, so κ = ¼Ω|sinθ(a₀)| exactly.
        let params = figure_params(0.0);
        let traj = Trajectory::reference_spiral(&params, 200.0, 2000).unwrap();
        let series = adiabaticity_series(&params, &traj).unwrap();
        let theta = crate::dipole::theta_of_radius(params.a, params.d);
        let expected = 0.25 * params.omega * theta.sin().abs();
        for &k in &series.kappa {
            assert_abs_diff_eq!(k, expected, epsilon = tolerances::KAPPA_CLOSED_FORM);
        }
    }

    #[test]
    fn finite_difference_matches_analytic_rate_on_damped_orbit() {
        // Dual route for θ̇ on the closed-form spiral: central differences
        // against the chain rule θ̇ = (dθ/da)·ȧ with ȧ = −βa.
        let params = figure_params(0.05);
        let traj = Trajectory::reference_spiral(&params, 100.0, 1000).unwrap();
        let series = adiabaticity_series(&params, &traj).unwrap();
        let omega0 = effective_frequency(params.omega, params.big_gamma, params.mass).unwrap();
        let beta = params.big_gamma / params.mass;
        for k in 1..series.times.len() - 1 {
            let t = series.times[k];
            let a = params.a * (-beta * t).exp();
            let theta = crate::dipole::theta_of_radius(a, params.d);
            let theta_dot = crate::dipole::dtheta_da(a, params.d) * (-beta * a);
            let exact = kappa_value(theta_dot, theta, omega0);
            assert_abs_diff_eq!(series.kappa[k], exact, epsilon = 1e-6);
        }
        // One-sided endpoints carry O(dt) error instead of O(dt²).
        let a_end = params.a * (-beta * 100.0).exp();
        let exact_end = kappa_value(
            crate::dipole::dtheta_da(a_end, params.d) * (-beta * a_end),
            crate::dipole::theta_of_radius(a_end, params.d),
            omega0,
        );
        assert_abs_diff_eq!(*series.kappa.last().unwrap(), exact_end, epsilon = 1e-3);
    }

    #[test]
    fn kappa_is_pointwise_nonincreasing_in_damping() {
        // The Fig.-3 monotonicity claim, asserted after one trap period.
        let gammas = [0.0, 0.03, 0.06, 0.09];
        let mut series = Vec::new();
        for &g in &gammas {
            let params = figure_params(g);
            let traj = Trajectory::reference_spiral(&params, 200.0, 2000).unwrap();
            series.push(adiabaticity_series(&params, &traj).unwrap());
        }
        let period = 2.0 * PI / 0.1;
        for pair in series.windows(2) {
            for k in 0..pair[0].times.len() {
                if pair[0].times[k] <= period {
                    continue;
                }
                assert!(
                    pair[1].kappa[k] <= pair[0].kappa[k] + tolerances::KAPPA_MONOTONE_SLACK,
                    "κ increased with Γ at t = {}: {} -> {}",
                    pair[0].times[k],
                    pair[0].kappa[k],
                    pair[1].kappa[k]
                );
            }
        }
    }

    #[test]
    fn kappa_eventually_decreases_on_damped_orbit() {
        let params = figure_params(0.09);
        let traj = Trajectory::reference_spiral(&params, 200.0, 2000).unwrap();
        let series = adiabaticity_series(&params, &traj).unwrap();
        let peak = series.kappa.iter().cloned().fold(0.0, f64::max);
        let tail_start = series
            .times
            .iter()
            .position(|&t| t >= 100.0)
            .expect("grid covers t = 100");
        for k in tail_start..series.kappa.len() - 1 {
            assert!(
                series.kappa[k + 1] <= series.kappa[k] + tolerances::KAPPA_DECREASING_SLACK,
                "tail uptick at t = {}",
                series.times[k]
            );
        }
        // Genuine decay, not a flat tail within slack.
        assert!(*series.kappa.last().unwrap() < 0.5 * peak);
    }

    #[test]
    fn phase_rate_readings_coincide_on_spiral() {
        // On the closed-form orbit the azimuth advances at exactly Ω₀, so
        // the printed and instantaneous-rate readings agree.
        let params = figure_params(0.05);
        let traj = Trajectory::reference_spiral(&params, 50.0, 500).unwrap();
        let diag = adiabaticity_diagnostics(&params, &traj).unwrap();
        for k in 0..diag.times.len() {
            assert_abs_diff_eq!(
                diag.kappa_constant_rate[k],
                diag.kappa_instantaneous_rate[k],
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn population_starts_at_zero_from_ground_state() {
        let params = figure_params(0.05);
        let traj = Trajectory::reference_spiral(&params, 5.0, 50).unwrap();
        let series = schrodinger_propagate(&params, &traj, &ground_state(), 1e-2).unwrap();
        assert_abs_diff_eq!(series.p_e[0], 0.0);
        assert_abs_diff_eq!(series.times[0], 0.0);
        for &p in &series.p_e {
            assert!((-tolerances::POPULATION_BOUND_SLACK
                ..=1.0 + tolerances::POPULATION_BOUND_SLACK)
                .contains(&p));
        }
    }

    #[test]
    fn axial_static_field_freezes_the_ground_state() {
        // A particle resting on the symmetry axis sees a purely axial
        // field; |g⟩ is then an exact eigenstate and P_e stays zero.
        let params = figure_params(0.0);
        let initial = ClassicalState::new([0.0, 0.0], [0.0, 0.0]);
        let traj = Trajectory::analytic_free(&params, &initial, 10.0, 100).unwrap();
        let series = schrodinger_propagate(&params, &traj, &ground_state(), 1e-2).unwrap();
        for &p in &series.p_e {
            assert_abs_diff_eq!(p, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn population_matches_frozen_damped_and_undamped_values() {
        // Independently derived end-point populations for the default
        // figure parameters (Ω = 0.1, a₀ = d = 1, ε₀ = μ|B(a₀)|, ψ₀ = |g⟩,
        // t = 200, dt = 1e-3). The undamped value is additionally fixed by
        // the exact rotating-frame solution sin²(Et)·h_x²/E².
        for (big_gamma, expected) in [(0.0, 0.465126538341909), (0.09, 0.330796838972180)] {
            let params = figure_params(big_gamma);
            let traj = Trajectory::reference_spiral(&params, 200.0, 200).unwrap();
            let series = schrodinger_propagate(&params, &traj, &ground_state(), 1e-3).unwrap();
            let p_end = *series.p_e.last().unwrap();
            assert_abs_diff_eq!(p_end, expected, epsilon = 1e-6);
            for &drift in &series.norm_drift {
                assert!(drift < tolerances::NORM_DRIFT);
            }
        }
    }

    #[test]
    fn population_is_invariant_under_global_phase() {
        let params = figure_params(0.05);
        let traj = Trajectory::reference_spiral(&params, 20.0, 200).unwrap();
        let psi_a = ground_state();
        let phase = Complex64::from_polar(1.0, 1.234);
        let psi_b: Ket = psi_a.mapv(|x| x * phase);
        let series_a = schrodinger_propagate(&params, &traj, &psi_a, 1e-2).unwrap();
        let series_b = schrodinger_propagate(&params, &traj, &psi_b, 1e-2).unwrap();
        for (pa, pb) in series_a.p_e.iter().zip(&series_b.p_e) {
            assert_abs_diff_eq!(pa, pb, epsilon = 1e-12);
        }
    }

    #[test]
    fn slow_drive_follows_the_instantaneous_ground_state() {
        // κ_max ≈ 0.0047 at Ω = 0.02: adiabatic following to ≥ 0.99 — the
        // frozen minimum fidelity is 0.99991057452 over a full revolution.
        let mut params = figure_params(0.0);
        params.omega = 0.02;
        let traj = Trajectory::reference_spiral(&params, 320.0, 3200).unwrap();
        let (angles0, _) = local_frame(&params, &Position::new(params.a, 0.0)).unwrap();
        let basis0 = instantaneous_eigenstates(&angles0, 1.0).unwrap();
        let record =
            schrodinger_propagate_record(&params, &traj, &basis0.minus, 1e-3).unwrap();
        let mut min_fidelity: f64 = 1.0;
        let sampler = traj.sampler().unwrap();
        for (t, psi) in record.times.iter().zip(&record.states) {
            let s = sampler.at(*t);
            let (angles, _) =
                local_frame(&params, &Position::new(s.q[0], s.q[1])).unwrap();
            let basis = instantaneous_eigenstates(&angles, 1.0).unwrap();
            let overlap: Complex64 = basis
                .minus
                .iter()
                .zip(psi.iter())
                .map(|(m, p)| m.conj() * p)
                .sum();
            min_fidelity = min_fidelity.min(overlap.norm_sqr());
        }
        assert!(min_fidelity >= 0.99, "min fidelity {min_fidelity}");
        assert_abs_diff_eq!(min_fidelity, 0.99991057452, epsilon = 1e-6);
    }

    #[test]
    fn oversized_step_aborts_on_norm_drift() {
        let params = figure_params(0.0);
        let traj = Trajectory::reference_spiral(&params, 50.0, 50).unwrap();
        let err = schrodinger_propagate(&params, &traj, &ground_state(), 1.0);
        assert!(matches!(err, Err(CoreError::NormDrift { .. })));
    }

    #[test]
    fn propagation_validates_inputs() {
        let params = figure_params(0.0);
        let traj = Trajectory::reference_spiral(&params, 1.0, 10).unwrap();
        // Non-normalized state.
        let bad: Ket = ndarray::array![c(0.5, 0.0), c(0.5, 0.0)];
        assert!(schrodinger_propagate(&params, &traj, &bad, 1e-2).is_err());
        // dt not dividing the trajectory step (0.1 / 0.03 is not integral).
        assert!(schrodinger_propagate(&params, &traj, &ground_state(), 0.03).is_err());
        // Wrong dimension.
        let three: Ket = ndarray::array![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(schrodinger_propagate(&params, &traj, &three, 1e-2).is_err());
    }
}
