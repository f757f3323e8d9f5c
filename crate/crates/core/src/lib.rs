//! Spectra of one-dimensional Schrödinger operators through their classical
//! counterpart.
//!
//! An eigenfunction of `−(ħ²/2m)ψ'' + V(x)ψ = Eψ` is a trajectory of a unit
//! mass oscillator whose squared frequency `Ω²(x) = (2m/ħ²)(E − V(x))` depends
//! on the "time" `x`. Eigenvalues are the energies for which that trajectory
//! is square integrable and can therefore be normalized. The crate finds them
//! by shooting ([`spectral`]), exposes the underlying variational functionals
//! ([`functionals`]), and runs the correspondence backwards by checking
//! closed-form eigenfunctions against their oscillators ([`exact`]).
//!
//! ```
//! use oscillator_spectra::prelude::*;
//!
//! let problem = Problem::new(
//!     PhysicalConstants::default(),
//!     PotentialSpec::harmonic(1.0).unwrap(),
//!     Grid::new(-10.0, 10.0, 10001).unwrap(),
//!     Convention::Faithful,
//! )
//! .unwrap();
//! let ground = find_eigenvalue(0, &problem).unwrap();
//! assert!((ground.energy - 0.5).abs() < 1e-8);
//! ```

pub mod cli;
pub mod exact;
pub mod functionals;
pub mod model;
pub mod oscillator;
pub mod spectral;

pub mod prelude {
    pub use crate::exact::{
        harmonic_energy, hermite_eigenfunction, infinite_well_level, oscillator_frequency_for_level,
        verify_reverse_direction, ClosedFormLevel, ReverseReport,
    };
    pub use crate::functionals::{
        action_value, constraint_report, discrete_energy, functional_gradient, norm, normalize, overlap,
        rayleigh_quotient, ConstraintReport, FunctionalValue,
    };
    pub use crate::model::{
        classify_region, evaluate_potential, frequency_profile, Convention, FrequencyProfile, Grid, Interpolation,
        PhysicalConstants, PotentialSpec, Region, TabulatedPotential,
    };
    pub use crate::oscillator::{
        boundary_growth, integrate, integrate_rk4, residual, wronskian, Direction, InitialConditions, Trajectory,
    };
    pub use crate::spectral::{
        bracket_level, count_nodes, find_eigenvalue, shoot, single_direction_trajectory, solve_spectrum,
        sweep_mismatch, Eigenpair, Problem, ShootingReport, SolverOptions, SpectrumDocument,
    };
}
