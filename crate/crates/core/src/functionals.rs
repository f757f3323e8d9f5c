//! Variational layer: norm, Rayleigh quotient, its discrete gradient, the
//! normalization constraint and the classical action of a trajectory.

use thiserror::Error;

use crate::model::{sample_potential, FrequencyProfile, ModelError, PhysicalConstants, PotentialSpec};
use crate::oscillator::{second_derivative_5pt, Trajectory};

/// Norms at or below this are treated as zero.
pub const NORM_GUARD: f64 = 1e-300;
/// Endpoint magnitude (relative to the maximum) below which the boundary
/// term of the kinetic integration by parts is neglected.
pub const DECAY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum FunctionalError {
    #[error("trajectory has zero norm")]
    ZeroNorm,
    #[error("grid mismatch between trajectory and profile")]
    GridMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Trapezoid,
    Simpson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue {
    pub value: f64,
    pub quadrature: Quadrature,
    pub grid_points: usize,
    /// Set when the trajectory does not decay at the grid ends, so the
    /// integrated-by-parts kinetic term misses a boundary contribution.
    pub boundary_warning: bool,
}

/// `Φ = 1 − ∫Ψ²`, the normalization multiplier and the eigen-equation defect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintReport {
    pub phi: f64,
    pub multiplier: f64,
    pub stationarity_residual: f64,
}

/// Composite Simpson on an odd number of samples, trapezoid otherwise.
pub fn integrate_samples(values: &[f64], h: f64) -> (f64, Quadrature) {
    let n = values.len();
    if n < 2 {
        return (0.0, Quadrature::Trapezoid);
    }
    if n % 2 == 1 && n >= 3 {
        let mut odd = 0.0;
        let mut even = 0.0;
        for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
            if i % 2 == 1 {
                odd += v;
            } else {
                even += v;
            }
        }
        (h / 3.0 * (values[0] + values[n - 1] + 4.0 * odd + 2.0 * even), Quadrature::Simpson)
    } else {
        let inner: f64 = values[1..n - 1].iter().sum();
        (h * (0.5 * (values[0] + values[n - 1]) + inner), Quadrature::Trapezoid)
    }
}

fn quadrature_of(traj: &Trajectory, density: impl Fn(usize) -> f64) -> FunctionalValue {
    let values: Vec<f64> = (0..traj.grid().len()).map(density).collect();
    let (value, quadrature) = integrate_samples(&values, traj.grid().step());
    FunctionalValue { value, quadrature, grid_points: traj.grid().len(), boundary_warning: false }
}

fn decays_at_ends(traj: &Trajectory) -> bool {
    let psi = traj.psi();
    let limit = DECAY_THRESHOLD * traj.max_abs();
    psi[0].abs() <= limit && psi[psi.len() - 1].abs() <= limit
}

/// `N[ψ] = (∫ψ² dx)^½`.
pub fn norm(traj: &Trajectory) -> FunctionalValue {
    let psi = traj.psi();
    let mut v = quadrature_of(traj, |i| psi[i] * psi[i]);
    v.value = v.value.max(0.0).sqrt();
    v
}

/// `Ψ = ψ / N[ψ]`, derivative samples scaled alike.
pub fn normalize(traj: &Trajectory) -> Result<Trajectory, FunctionalError> {
    let n = norm(traj).value;
    if !(n > NORM_GUARD) {
        return Err(FunctionalError::ZeroNorm);
    }
    Ok(traj.scaled(1.0 / n))
}

/// `E[ψ] = ∫[(ħ²/2m)ψ'² + Vψ²] / ∫ψ²`, kinetic term in first-derivative form.
pub fn rayleigh_quotient(
    traj: &Trajectory,
    spec: &PotentialSpec,
    constants: &PhysicalConstants,
) -> Result<FunctionalValue, FunctionalError> {
    let v = sample_potential(spec, constants, traj.grid())?;
    rayleigh_with_samples(traj, &v, constants)
}

pub(crate) fn rayleigh_with_samples(
    traj: &Trajectory,
    potential: &[f64],
    constants: &PhysicalConstants,
) -> Result<FunctionalValue, FunctionalError> {
    let (psi, dpsi) = (traj.psi(), traj.dpsi());
    let denom = quadrature_of(traj, |i| psi[i] * psi[i]);
    if !(denom.value > NORM_GUARD * NORM_GUARD) {
        return Err(FunctionalError::ZeroNorm);
    }
    let k = constants.kinetic_factor();
    let mut num = quadrature_of(traj, |i| k * dpsi[i] * dpsi[i] + potential[i] * psi[i] * psi[i]);
    num.value /= denom.value;
    num.boundary_warning = !decays_at_ends(traj);
    Ok(num)
}

/// Discrete energy functional whose exact gradient is
/// [`functional_gradient`]: forward-difference kinetic term and trapezoid
/// weights, built from `ψ` samples only.
pub fn discrete_energy(
    traj: &Trajectory,
    spec: &PotentialSpec,
    constants: &PhysicalConstants,
) -> Result<f64, FunctionalError> {
    let v = sample_potential(spec, constants, traj.grid())?;
    Ok(DiscreteForms::new(traj, &v, constants)?.energy())
}

struct DiscreteForms<'a> {
    psi: &'a [f64],
    potential: &'a [f64],
    h: f64,
    kinetic_factor: f64,
    kinetic: f64,
    potential_energy: f64,
    mass: f64,
}

impl<'a> DiscreteForms<'a> {
    fn new(traj: &'a Trajectory, potential: &'a [f64], constants: &PhysicalConstants) -> Result<Self, FunctionalError> {
        let psi = traj.psi();
        let h = traj.grid().step();
        let n = psi.len();
        let w = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { h };
        let kinetic_factor = constants.kinetic_factor();
        let kinetic = kinetic_factor * psi.windows(2).map(|p| (p[1] - p[0]) * (p[1] - p[0])).sum::<f64>() / h;
        let potential_energy = (0..n).map(|i| w(i) * potential[i] * psi[i] * psi[i]).sum();
        let mass: f64 = (0..n).map(|i| w(i) * psi[i] * psi[i]).sum();
        if !(mass > NORM_GUARD * NORM_GUARD) {
            return Err(FunctionalError::ZeroNorm);
        }
        Ok(Self { psi, potential, h, kinetic_factor, kinetic, potential_energy, mass })
    }

    fn energy(&self) -> f64 {
        (self.kinetic + self.potential_energy) / self.mass
    }

    fn gradient(&self) -> Vec<f64> {
        let n = self.psi.len();
        let e = self.energy();
        let mut g = vec![0.0; n];
        for i in 1..n - 1 {
            let p = self.psi;
            let dk = 2.0 * self.kinetic_factor * (2.0 * p[i] - p[i - 1] - p[i + 1]) / self.h;
            let dv = 2.0 * self.h * self.potential[i] * p[i];
            let dm = 2.0 * self.h * p[i];
            g[i] = (dk + dv - e * dm) / self.mass;
        }
        g
    }
}

/// Gradient of [`discrete_energy`] with respect to each interior sample
/// `ψ_i`; endpoint entries are zero (endpoints held fixed).
pub fn functional_gradient(
    traj: &Trajectory,
    spec: &PotentialSpec,
    constants: &PhysicalConstants,
) -> Result<Vec<f64>, FunctionalError> {
    let v = sample_potential(spec, constants, traj.grid())?;
    Ok(DiscreteForms::new(traj, &v, constants)?.gradient())
}

/// Normalization defect, multiplier `λ = (m/ħ²)·E[ψ]` and the normalized
/// sup-norm of `Hψ − E[ψ]ψ` (five-point stencil).
pub fn constraint_report(
    traj: &Trajectory,
    spec: &PotentialSpec,
    constants: &PhysicalConstants,
) -> Result<ConstraintReport, FunctionalError> {
    let v = sample_potential(spec, constants, traj.grid())?;
    let energy = rayleigh_with_samples(traj, &v, constants)?.value;
    let n_val = norm(traj).value;
    let scale = traj.max_abs();
    let psi = traj.psi();
    let h = traj.grid().step();
    let k = constants.kinetic_factor();
    let n = psi.len();
    let stationarity_residual = if n >= 5 {
        (2..n - 2)
            .map(|i| (-k * second_derivative_5pt(psi, i, h) + (v[i] - energy) * psi[i]).abs())
            .fold(0.0f64, f64::max)
            / scale
    } else {
        0.0
    };
    Ok(ConstraintReport {
        phi: 1.0 - n_val * n_val,
        multiplier: constants.mass() / (constants.hbar() * constants.hbar()) * energy,
        stationarity_residual,
    })
}

/// `S = ∫ ½[ψ'² − Ω²ψ²] dx`.
pub fn action_value(traj: &Trajectory, profile: &FrequencyProfile) -> Result<FunctionalValue, FunctionalError> {
    if traj.grid() != profile.grid() {
        return Err(FunctionalError::GridMismatch);
    }
    let (psi, dpsi, w) = (traj.psi(), traj.dpsi(), profile.omega_sq());
    Ok(quadrature_of(traj, |i| 0.5 * (dpsi[i] * dpsi[i] - w[i] * psi[i] * psi[i])))
}

/// `⟨a, b⟩ = ∫ a b dx` on the shared grid.
pub fn overlap(a: &Trajectory, b: &Trajectory) -> Result<f64, FunctionalError> {
    if a.grid() != b.grid() {
        return Err(FunctionalError::GridMismatch);
    }
    let values: Vec<f64> = a.psi().iter().zip(b.psi()).map(|(x, y)| x * y).collect();
    Ok(integrate_samples(&values, a.grid().step()).0)
}
