//! Physical constants, the spatial grid, potentials and the map from a trial
//! energy to the squared frequency of the equivalent classical oscillator.
//!
//! The independent variable `x` plays the role of time for the oscillator.
//! For an energy `E` the oscillator has squared frequency
//! `Ω²(x) = c · (E − V(x))`, which is negative wherever the region is
//! classically forbidden.

use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance (squared-frequency units) below which `|Ω²|` counts as a
/// turning point.
pub const DEFAULT_TURN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid physical constants: hbar={hbar}, mass={mass} (both must be positive and finite)")]
    InvalidConstants { hbar: f64, mass: f64 },
    #[error("invalid grid: [{x_min}, {x_max}] with {n_points} points")]
    InvalidGrid { x_min: f64, x_max: f64, n_points: usize },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("x = {x} lies outside the potential domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("potential is not finite at x = {x}")]
    NonFinitePotential { x: f64 },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Reduced Planck constant and particle mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self, ModelError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(hbar) || !ok(mass) {
            return Err(ModelError::InvalidConstants { hbar, mass });
        }
        let c = Self { hbar, mass };
        if !ok(c.kappa()) {
            return Err(ModelError::InvalidConstants { hbar, mass });
        }
        Ok(c)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Coupling `2m/ħ²` between `E − V` and `−ψ''/ψ` in the Schrödinger equation.
    pub fn kappa(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }

    /// Kinetic prefactor `ħ²/2m`.
    pub fn kinetic_factor(&self) -> f64 {
        1.0 / self.kappa()
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

/// Uniform grid `x_i = x_min + i·h`, `h = (x_max − x_min)/(n_points − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self, ModelError> {
        let bad = || ModelError::InvalidGrid { x_min, x_max, n_points };
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max || n_points < 3 {
            return Err(bad());
        }
        let g = Self { x_min, x_max, n_points };
        // Spacing can underflow relative to |x| for absurd point counts.
        if !(g.step() > 0.0) || x_min + g.step() <= x_min {
            return Err(bad());
        }
        Ok(g)
    }

    /// Grid over `[x_min, x_max]` with spacing as close as possible to `step`.
    pub fn with_step(x_min: f64, x_max: f64, step: f64) -> Result<Self, ModelError> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(ModelError::InvalidGrid { x_min, x_max, n_points: 0 });
        }
        let intervals = ((x_max - x_min) / step).round().max(2.0) as usize;
        Self::new(x_min, x_max, intervals + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Grid with the same spacing, widened symmetrically about its centre by
    /// `factor` of the current width.
    pub fn widened(&self, factor: f64) -> Result<Self, ModelError> {
        let width = self.x_max - self.x_min;
        let pad = 0.5 * factor * width;
        Self::with_step(self.x_min - pad, self.x_max + pad, self.step())
    }

    /// Same interval, spacing halved.
    pub fn refined(&self) -> Self {
        Self { n_points: 2 * self.n_points - 1, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    Linear,
    Cubic,
}

impl Interpolation {
    pub fn from_order(order: u8) -> Result<Self, ModelError> {
        match order {
            1 => Ok(Self::Linear),
            3 => Ok(Self::Cubic),
            o => Err(ModelError::InvalidPotential(format!("interpolation order {o} (expected 1 or 3)"))),
        }
    }
}

/// Potential sampled at strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential {
    xs: Vec<f64>,
    vs: Vec<f64>,
    interpolation: Interpolation,
    // Second derivatives of the natural cubic spline; empty for linear.
    curvature: Vec<f64>,
}

impl TabulatedPotential {
    pub fn new(xs: Vec<f64>, vs: Vec<f64>, interpolation: Interpolation) -> Result<Self, ModelError> {
        if xs.len() != vs.len() {
            return Err(ModelError::InvalidPotential(format!(
                "{} abscissae but {} values",
                xs.len(),
                vs.len()
            )));
        }
        if xs.len() < 2 {
            return Err(ModelError::InvalidPotential("need at least two samples".into()));
        }
        if let Some(bad) = xs.iter().chain(&vs).find(|v| !v.is_finite()) {
            return Err(ModelError::InvalidPotential(format!("non-finite sample {bad}")));
        }
        if let Some(w) = xs.windows(2).find(|w| w[1] <= w[0]) {
            return Err(ModelError::InvalidPotential(format!(
                "abscissae not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        let curvature = match interpolation {
            Interpolation::Linear => Vec::new(),
            Interpolation::Cubic => natural_spline_curvature(&xs, &vs),
        };
        Ok(Self { xs, vs, interpolation, curvature })
    }

    /// Reads a two-column `x,V` CSV. A non-numeric first row is taken as a header.
    pub fn from_csv_reader<R: Read>(reader: R, interpolation: Interpolation) -> Result<Self, ModelError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .flexible(true)
            .from_reader(reader);
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (k, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| ModelError::Parse {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(k as u64 + 1);
            if record.len() != 2 {
                return Err(ModelError::Parse {
                    line,
                    message: format!("expected 2 columns, found {}", record.len()),
                });
            }
            let parsed: Vec<Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
            match (&parsed[0], &parsed[1]) {
                (Ok(x), Ok(v)) => {
                    if let Some(&prev) = xs.last() {
                        if *x <= prev {
                            return Err(ModelError::Parse {
                                line,
                                message: format!("x = {x} does not exceed previous x = {prev}"),
                            });
                        }
                    }
                    xs.push(*x);
                    vs.push(*v);
                }
                (Err(_), Err(_)) if k == 0 => continue,
                _ => {
                    let field = if parsed[0].is_err() { &record[0] } else { &record[1] };
                    return Err(ModelError::Parse {
                        line,
                        message: format!("cannot parse '{field}' as a number"),
                    });
                }
            }
        }
        if xs.len() < 2 {
            return Err(ModelError::Parse { line: 0, message: "fewer than two data rows".into() });
        }
        Self::new(xs, vs, interpolation)
    }

    pub fn from_csv_path(path: &Path, interpolation: Interpolation) -> Result<Self, ModelError> {
        Self::from_csv_reader(std::fs::File::open(path)?, interpolation)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn eval(&self, x: f64) -> Result<f64, ModelError> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(ModelError::OutOfDomain { x, lo, hi });
        }
        // Index of the interval [xs[j], xs[j+1]] containing x.
        let j = self.xs.partition_point(|&xi| xi <= x).clamp(1, self.xs.len() - 1) - 1;
        let (x0, x1) = (self.xs[j], self.xs[j + 1]);
        let (v0, v1) = (self.vs[j], self.vs[j + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        Ok(match self.interpolation {
            Interpolation::Linear => v0 + t * (v1 - v0),
            Interpolation::Cubic => {
                let (m0, m1) = (self.curvature[j], self.curvature[j + 1]);
                let a = 1.0 - t;
                a * v0 + t * v1 + ((a * a * a - a) * m0 + (t * t * t - t) * m1) * h * h / 6.0
            }
        })
    }
}

/// Second derivatives of the natural cubic spline through `(xs, ys)`.
fn natural_spline_curvature(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior equations.
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        let a = h0;
        let b = 2.0 * (h0 + h1);
        let c = h1;
        let d = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        let denom = b - a * c_prime[i - 1];
        c_prime[i] = c / denom;
        d_prime[i] = (d - a * d_prime[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
    }
    m
}

/// The potential `V(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// `½ m ω₀² x²`.
    Harmonic { omega0: f64 },
    /// Zero on `[0, width]`, infinite outside (Dirichlet walls).
    InfiniteWell { width: f64 },
    /// `−(ħ²/2m) λ(λ+1) sech²(x)` with `λ = depth`.
    PoschlTeller { depth: f64 },
    Tabulated(TabulatedPotential),
}

impl PotentialSpec {
    pub fn harmonic(omega0: f64) -> Result<Self, ModelError> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(ModelError::InvalidPotential(format!("omega0 = {omega0} must be positive")));
        }
        Ok(Self::Harmonic { omega0 })
    }

    pub fn infinite_well(width: f64) -> Result<Self, ModelError> {
        if !(width.is_finite() && width > 0.0) {
            return Err(ModelError::InvalidPotential(format!("well width = {width} must be positive")));
        }
        Ok(Self::InfiniteWell { width })
    }

    pub fn poschl_teller(depth: f64) -> Result<Self, ModelError> {
        if !(depth.is_finite() && depth > 0.0) {
            return Err(ModelError::InvalidPotential(format!("depth = {depth} must be positive")));
        }
        Ok(Self::PoschlTeller { depth })
    }

    /// Closed interval on which `V` is defined, if bounded.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            Self::InfiniteWell { width } => Some((0.0, *width)),
            Self::Tabulated(t) => Some(t.domain()),
            _ => None,
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, Self::InfiniteWell { .. })
    }

    pub fn descriptor(&self) -> PotentialDescriptor {
        match self {
            Self::Harmonic { omega0 } => PotentialDescriptor::Harmonic { omega0: *omega0 },
            Self::InfiniteWell { width } => PotentialDescriptor::Well { width: *width },
            Self::PoschlTeller { depth } => PotentialDescriptor::PoschlTeller { depth: *depth },
            Self::Tabulated(t) => PotentialDescriptor::Tabulated {
                samples: t.len(),
                x_min: t.domain().0,
                x_max: t.domain().1,
                order: match t.interpolation() {
                    Interpolation::Linear => 1,
                    Interpolation::Cubic => 3,
                },
                source: None,
            },
        }
    }
}

/// Serializable summary of a [`PotentialSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialDescriptor {
    Harmonic { omega0: f64 },
    Well { width: f64 },
    PoschlTeller { depth: f64 },
    Tabulated {
        samples: usize,
        x_min: f64,
        x_max: f64,
        order: u8,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source: Option<String>,
    },
}

/// `V(x)` for the given potential.
pub fn evaluate_potential(spec: &PotentialSpec, constants: &PhysicalConstants, x: f64) -> Result<f64, ModelError> {
    let v = match spec {
        PotentialSpec::Harmonic { omega0 } => 0.5 * constants.mass() * omega0 * omega0 * x * x,
        PotentialSpec::InfiniteWell { width } => {
            let slack = 1e-12 * width;
            if x < -slack || x > width + slack {
                return Err(ModelError::OutOfDomain { x, lo: 0.0, hi: *width });
            }
            0.0
        }
        PotentialSpec::PoschlTeller { depth } => {
            let sech = 1.0 / x.cosh();
            -constants.kinetic_factor() * depth * (depth + 1.0) * sech * sech
        }
        PotentialSpec::Tabulated(t) => t.eval(x)?,
    };
    if !v.is_finite() {
        return Err(ModelError::NonFinitePotential { x });
    }
    Ok(v)
}

/// `V` at every grid point.
pub fn sample_potential(spec: &PotentialSpec, constants: &PhysicalConstants, grid: &Grid) -> Result<Vec<f64>, ModelError> {
    grid.points().map(|x| evaluate_potential(spec, constants, x)).collect()
}

/// Coupling between `E − V` and `Ω²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `2m/ħ²`: the oscillator equation is exactly the Schrödinger equation.
    #[default]
    Faithful,
    /// `m/ħ²`, the coefficient as printed in the source formula.
    #[serde(rename = "paper")]
    PaperEq11,
}

impl Convention {
    pub fn coupling(&self, constants: &PhysicalConstants) -> f64 {
        match self {
            Self::Faithful => constants.kappa(),
            Self::PaperEq11 => constants.mass() / (constants.hbar() * constants.hbar()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Faithful => "faithful",
            Self::PaperEq11 => "paper",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Allowed,
    Forbidden,
    Turning,
}

/// Squared frequency `Ω²(x_i)` of the classical oscillator at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyProfile {
    grid: Grid,
    omega_sq: Vec<f64>,
    convention: Convention,
}

impl FrequencyProfile {
    pub fn from_samples(grid: Grid, omega_sq: Vec<f64>, convention: Convention) -> Result<Self, ModelError> {
        if omega_sq.len() != grid.len() {
            return Err(ModelError::InvalidGrid {
                x_min: grid.x_min(),
                x_max: grid.x_max(),
                n_points: omega_sq.len(),
            });
        }
        Ok(Self { grid, omega_sq, convention })
    }

    /// Profile from potential samples already evaluated on `grid`.
    pub fn from_potential_samples(
        grid: Grid,
        potential: &[f64],
        energy: f64,
        constants: &PhysicalConstants,
        convention: Convention,
    ) -> Self {
        debug_assert_eq!(potential.len(), grid.len());
        let c = convention.coupling(constants);
        let omega_sq = potential.iter().map(|v| c * (energy - v)).collect();
        Self { grid, omega_sq, convention }
    }

    /// Constant `Ω²` everywhere.
    pub fn constant(grid: Grid, omega_sq: f64) -> Self {
        Self { grid, omega_sq: vec![omega_sq; grid.len()], convention: Convention::Faithful }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn omega_sq(&self) -> &[f64] {
        &self.omega_sq
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn classify(&self, index: usize, turn_tolerance: f64) -> Region {
        let w = self.omega_sq[index];
        if w > turn_tolerance {
            Region::Allowed
        } else if w < -turn_tolerance {
            Region::Forbidden
        } else {
            Region::Turning
        }
    }
}

/// `Ω²(x_i) = c·(E − V(x_i))` on `grid`; negative values are kept.
pub fn frequency_profile(
    constants: &PhysicalConstants,
    spec: &PotentialSpec,
    energy: f64,
    grid: &Grid,
    convention: Convention,
) -> Result<FrequencyProfile, ModelError> {
    let v = sample_potential(spec, constants, grid)?;
    Ok(FrequencyProfile::from_potential_samples(*grid, &v, energy, constants, convention))
}

/// Region at grid index `index` using the default turning tolerance.
pub fn classify_region(profile: &FrequencyProfile, index: usize) -> Region {
    profile.classify(index, DEFAULT_TURN_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn harmonic_values() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        assert_eq!(evaluate_potential(&h, &unit(), 0.0).unwrap(), 0.0);
        assert_eq!(evaluate_potential(&h, &unit(), 2.0).unwrap(), 2.0);
        let heavy = PhysicalConstants::new(1.0, 3.0).unwrap();
        assert_eq!(evaluate_potential(&h, &heavy, 2.0).unwrap(), 6.0);
    }

    #[test]
    fn tabulated_linear_midpoint() {
        let t = TabulatedPotential::new(vec![0.0, 1.0], vec![0.0, 1.0], Interpolation::Linear).unwrap();
        let spec = PotentialSpec::Tabulated(t);
        assert_eq!(evaluate_potential(&spec, &unit(), 0.5).unwrap(), 0.5);
        assert!(matches!(
            evaluate_potential(&spec, &unit(), 1.5),
            Err(ModelError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn cubic_spline_reproduces_smooth_data() {
        let xs: Vec<f64> = (0..=200).map(|i| -4.0 + 0.04 * i as f64).collect();
        let vs: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let t = TabulatedPotential::new(xs, vs, Interpolation::Cubic).unwrap();
        for k in 0..97 {
            let x = -3.5 + 0.0731 * k as f64;
            assert!((t.eval(x).unwrap() - x.sin()).abs() < 1e-6, "x={x}");
        }
        // Nodes are interpolated exactly.
        assert!((t.eval(0.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn tabulated_rejects_non_increasing() {
        let err = TabulatedPotential::new(vec![0.0, 0.0], vec![1.0, 2.0], Interpolation::Linear);
        assert!(err.is_err());
    }

    #[test]
    fn csv_with_header_and_line_numbers() {
        let text = "x,V\n0,0\n1,1\n2,4\n";
        let t = TabulatedPotential::from_csv_reader(text.as_bytes(), Interpolation::Linear).unwrap();
        assert_eq!(t.len(), 3);

        let text = "0,0\n1,1\n2,abc\n";
        match TabulatedPotential::from_csv_reader(text.as_bytes(), Interpolation::Linear) {
            Err(ModelError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }

        let text = "x,V\n0,0\n1,1\n0.5,2\n";
        match TabulatedPotential::from_csv_reader(text.as_bytes(), Interpolation::Cubic) {
            Err(ModelError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }

        let text = "0,0\n1,1,7\n";
        match TabulatedPotential::from_csv_reader(text.as_bytes(), Interpolation::Cubic) {
            Err(ModelError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn profile_conventions() {
        let grid = Grid::new(-1.0, 1.0, 3).unwrap();
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let f = frequency_profile(&unit(), &h, 0.5, &grid, Convention::Faithful).unwrap();
        let p = frequency_profile(&unit(), &h, 0.5, &grid, Convention::PaperEq11).unwrap();
        assert_eq!(f.omega_sq()[1], 1.0);
        assert_eq!(p.omega_sq()[1], 0.5);
        // E = V at x = ±1.
        assert_eq!(f.omega_sq()[0], 0.0);
        assert_eq!(f.omega_sq()[2], 0.0);
    }

    #[test]
    fn region_classification() {
        let grid = Grid::new(-12.0, 12.0, 24001).unwrap();
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let f = frequency_profile(&unit(), &h, 0.5, &grid, Convention::Faithful).unwrap();
        let at = |x: f64| ((x - grid.x_min()) / grid.step()).round() as usize;
        assert_eq!(classify_region(&f, at(0.0)), Region::Allowed);
        assert_eq!(classify_region(&f, at(5.0)), Region::Forbidden);
        assert_eq!(classify_region(&f, at(1.0)), Region::Turning);
        assert_eq!(classify_region(&f, at(-1.0)), Region::Turning);
    }

    #[test]
    fn constants_and_grid_validation() {
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
        assert!(PhysicalConstants::new(f64::NAN, 1.0).is_err());
        assert_eq!(PhysicalConstants::new(2.0, 4.0).unwrap().kappa(), 2.0);
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 2).is_err());
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        assert!((g.step() - 0.1).abs() < 1e-15);
        assert_eq!(g.x(10), 1.0);
        assert_eq!(g.refined().len(), 21);
        let w = g.widened(0.2).unwrap();
        assert!((w.x_min() + 0.1).abs() < 1e-12 && (w.step() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn well_domain() {
        let w = PotentialSpec::infinite_well(2.0).unwrap();
        assert_eq!(evaluate_potential(&w, &unit(), 1.0).unwrap(), 0.0);
        assert!(evaluate_potential(&w, &unit(), 2.5).is_err());
        assert!(PotentialSpec::harmonic(0.0).is_err());
    }

    fn monotone_table() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        prop::collection::vec((0.01f64..1.0, 0.0f64..2.0), 3..30).prop_map(|steps| {
            let mut xs = vec![-1.0];
            let mut vs = vec![0.0];
            for (dx, dv) in steps {
                xs.push(xs.last().unwrap() + dx);
                vs.push(vs.last().unwrap() + dv);
            }
            (xs, vs)
        })
    }

    proptest! {
        #[test]
        fn omega_sq_reverses_monotone_potential((xs, vs) in monotone_table(), energy in -3.0f64..3.0) {
            let t = TabulatedPotential::new(xs.clone(), vs, Interpolation::Linear).unwrap();
            let (lo, hi) = t.domain();
            let grid = Grid::new(lo, hi, 257).unwrap();
            let prof = frequency_profile(&unit(), &PotentialSpec::Tabulated(t), energy, &grid, Convention::Faithful).unwrap();
            for w in prof.omega_sq().windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
        }

        #[test]
        fn faithful_is_twice_paper(hbar in 0.1f64..3.0, mass in 0.1f64..3.0, omega0 in 0.1f64..3.0, energy in -5.0f64..5.0) {
            let c = PhysicalConstants::new(hbar, mass).unwrap();
            let grid = Grid::new(-3.0, 3.0, 61).unwrap();
            let spec = PotentialSpec::harmonic(omega0).unwrap();
            let f = frequency_profile(&c, &spec, energy, &grid, Convention::Faithful).unwrap();
            let p = frequency_profile(&c, &spec, energy, &grid, Convention::PaperEq11).unwrap();
            for (a, b) in f.omega_sq().iter().zip(p.omega_sq()) {
                prop_assert!((a - 2.0 * b).abs() <= 4.0 * f64::EPSILON * a.abs().max(1e-300));
            }
        }

        #[test]
        fn classification_symmetric_for_even_potential(energy in 0.0f64..20.0, omega0 in 0.2f64..2.0) {
            let grid = Grid::new(-6.0, 6.0, 241).unwrap();
            let spec = PotentialSpec::harmonic(omega0).unwrap();
            let f = frequency_profile(&unit(), &spec, energy, &grid, Convention::Faithful).unwrap();
            let n = grid.len();
            for i in 0..n {
                prop_assert_eq!(f.classify(i, 1e-9), f.classify(n - 1 - i, 1e-9));
            }
        }
    }
}
