//! Closed-form eigenpairs and the reverse direction of the correspondence:
//! known eigenfunctions are exact trajectories of oscillators whose squared
//! frequency is `Ω_n²(x) ∝ E_n − V(x)`.

use std::f64::consts::PI;

use log::warn;
use thiserror::Error;

use crate::model::{Convention, FrequencyProfile, Grid, PhysicalConstants};
use crate::oscillator::{residual, IntegrationError, Trajectory};

/// Largest Hermite index evaluated by the normalized recurrence.
pub const MAX_HERMITE_LEVEL: usize = 200;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("level {n} outside supported range 0..={max}")]
    LevelOutOfRange { n: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid [{x_min}, {x_max}] is not contained in [0, {width}]")]
    GridOutsideWell { x_min: f64, x_max: f64, width: f64 },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    HarmonicHermite,
    InfiniteWellSine,
}

/// A textbook eigenpair with a closed-form evaluator for `(ψ, ψ')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormLevel {
    pub family: Family,
    pub n: usize,
    /// `ω₀` for the oscillator, `L` for the well.
    pub parameter: f64,
    pub energy: f64,
    constants: PhysicalConstants,
}

impl ClosedFormLevel {
    pub fn harmonic(n: usize, constants: PhysicalConstants, omega0: f64) -> Result<Self, OracleError> {
        if n > MAX_HERMITE_LEVEL {
            return Err(OracleError::LevelOutOfRange { n, max: MAX_HERMITE_LEVEL });
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(OracleError::InvalidParameter(format!("omega0 = {omega0}")));
        }
        Ok(Self {
            family: Family::HarmonicHermite,
            n,
            parameter: omega0,
            energy: harmonic_energy(n, &constants, omega0),
            constants,
        })
    }

    pub fn well(n: usize, constants: PhysicalConstants, width: f64) -> Result<Self, OracleError> {
        if !(width.is_finite() && width > 0.0) {
            return Err(OracleError::InvalidParameter(format!("well width = {width}")));
        }
        let k = (n + 1) as f64 * PI / width;
        Ok(Self {
            family: Family::InfiniteWellSine,
            n,
            parameter: width,
            energy: constants.kinetic_factor() * k * k,
            constants,
        })
    }

    /// `(ψ_n(x), ψ_n'(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match self.family {
            Family::HarmonicHermite => hermite_pair(self.n, &self.constants, self.parameter, x),
            Family::InfiniteWellSine => {
                let l = self.parameter;
                let k = (self.n + 1) as f64 * PI / l;
                let a = (2.0 / l).sqrt();
                if x <= 0.5 * l {
                    (a * (k * x).sin(), a * k * (k * x).cos())
                } else {
                    // Reflected about the right wall so that ψ(L) = 0 exactly.
                    let s = if self.n % 2 == 0 { 1.0 } else { -1.0 };
                    let theta = k * (l - x);
                    (s * a * theta.sin(), -s * a * k * theta.cos())
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self.family {
            Family::HarmonicHermite => format!("hermite_{}", self.n),
            Family::InfiniteWellSine => format!("well_sine_{}", self.n),
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<Trajectory, OracleError> {
        Ok(Trajectory::from_fn(*grid, &self.label(), |x| self.eval(x))?)
    }
}

/// Normalized Hermite function and its derivative at `x`.
///
/// Runs the recurrence `ψ_{k+1} = √(2/(k+1)) ξ ψ_k − √(k/(k+1)) ψ_{k−1}`
/// on the polynomial part with a running scale factor so that the
/// Gaussian factor is applied once, in log space.
fn hermite_pair(n: usize, constants: &PhysicalConstants, omega0: f64, x: f64) -> (f64, f64) {
    let alpha = (constants.mass() * omega0 / constants.hbar()).sqrt();
    let xi = alpha * x;
    // Normalized polynomial parts p_k with ψ_k = p_k · (α²/π)^¼ e^{−ξ²/2}.
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    let mut log_scale = 0.0f64;
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > 1e100 {
            prev /= mag;
            cur /= mag;
            log_scale += mag.ln();
        }
    }
    let log_env = 0.25 * (alpha * alpha / PI).ln() - 0.5 * xi * xi + log_scale;
    let env = log_env.exp();
    let psi_n = cur * env;
    let psi_prev = prev * env;
    // dψ_n/dξ = √(2n) ψ_{n−1} − ξ ψ_n.
    let dpsi = alpha * ((2.0 * n as f64).sqrt() * psi_prev - xi * psi_n);
    (psi_n, dpsi)
}

/// Normalized harmonic-oscillator eigenfunction of level `n` on `grid`.
pub fn hermite_eigenfunction(
    n: usize,
    constants: &PhysicalConstants,
    omega0: f64,
    grid: &Grid,
) -> Result<Trajectory, OracleError> {
    ClosedFormLevel::harmonic(n, *constants, omega0)?.sample(grid)
}

/// `(n + ½) ħ ω₀`. A vanishing `ω₀` (free-particle limit) gives 0 and logs a
/// warning.
pub fn harmonic_energy(n: usize, constants: &PhysicalConstants, omega0: f64) -> f64 {
    if omega0 == 0.0 {
        warn!("omega0 = 0: harmonic spectrum degenerates to the free particle");
        return 0.0;
    }
    (n as f64 + 0.5) * constants.hbar() * omega0
}

/// Squared frequency of the oscillator solved exactly by Hermite level `n`.
///
/// `PaperEq11` evaluates `(mω₀/ħ)(n + ½ − ω₀x²/(2ħ))` verbatim; `Faithful`
/// gives `(2m/ħ²)(E_n − ½mω₀²x²)`.
pub fn oscillator_frequency_for_level(
    n: usize,
    constants: &PhysicalConstants,
    omega0: f64,
    grid: &Grid,
    convention: Convention,
) -> FrequencyProfile {
    let (m, hbar) = (constants.mass(), constants.hbar());
    let energy = harmonic_energy(n, constants, omega0);
    let nh = n as f64 + 0.5;
    let omega_sq = grid
        .points()
        .map(|x| match convention {
            Convention::PaperEq11 => m * omega0 / hbar * (nh - omega0 * x * x / (2.0 * hbar)),
            Convention::Faithful => constants.kappa() * (energy - 0.5 * m * omega0 * omega0 * x * x),
        })
        .collect();
    FrequencyProfile::from_samples(*grid, omega_sq, convention).expect("profile length matches grid")
}

/// Residuals of the Hermite eigenfunction against the oscillator equation in
/// both conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReverseReport {
    pub n: usize,
    pub energy: f64,
    pub residual_faithful: f64,
    pub residual_paper: f64,
    /// Classical turning points `±√(2E/(mω₀²))`.
    pub turning_points: (f64, f64),
}

impl ReverseReport {
    pub fn residual(&self, convention: Convention) -> f64 {
        match convention {
            Convention::Faithful => self.residual_faithful,
            Convention::PaperEq11 => self.residual_paper,
        }
    }
}

pub fn verify_reverse_direction(
    n: usize,
    constants: &PhysicalConstants,
    omega0: f64,
    grid: &Grid,
) -> Result<ReverseReport, OracleError> {
    let traj = hermite_eigenfunction(n, constants, omega0, grid)?;
    let faithful = oscillator_frequency_for_level(n, constants, omega0, grid, Convention::Faithful);
    let paper = oscillator_frequency_for_level(n, constants, omega0, grid, Convention::PaperEq11);
    let energy = harmonic_energy(n, constants, omega0);
    let xt = (2.0 * energy / (constants.mass() * omega0 * omega0)).sqrt();
    Ok(ReverseReport {
        n,
        energy,
        residual_faithful: residual(&traj, &faithful)?,
        residual_paper: residual(&traj, &paper)?,
        turning_points: (-xt, xt),
    })
}

/// Energy and eigenfunction of well level `n` (ground state `n = 0`).
pub fn infinite_well_level(
    n: usize,
    constants: &PhysicalConstants,
    width: f64,
    grid: &Grid,
) -> Result<(f64, Trajectory), OracleError> {
    let level = ClosedFormLevel::well(n, *constants, width)?;
    let slack = 1e-12 * width;
    if grid.x_min() < -slack || grid.x_max() > width + slack {
        return Err(OracleError::GridOutsideWell { x_min: grid.x_min(), x_max: grid.x_max(), width });
    }
    Ok((level.energy, level.sample(grid)?))
}
