//! Bound states by shooting.
//!
//! For a trial energy the oscillator is integrated inward from both ends with
//! decaying seeds and the two halves are compared at the rightmost turning
//! point. Energies at which the log-derivatives agree are exactly those whose
//! classical trajectory is square integrable; the normalization condition is
//! then met by scaling.
//!
//! Bracketing uses the count of eigenvalues below `E`,
//! `nodes_left + nodes_right + [D(E) < 0]` with `D = ψ'_L/ψ_L − ψ'_R/ψ_R` at
//! the matching point. `D` decreases in `E` between its poles, and each pole
//! coincides with a node crossing the matching point, so this count is a
//! non-decreasing step function that jumps by one at every eigenvalue.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functionals::{self, FunctionalError};
use crate::model::{
    sample_potential, Convention, FrequencyProfile, Grid, ModelError, PhysicalConstants, PotentialDescriptor,
    PotentialSpec,
};
use crate::oscillator::{
    self, numerov_run, reconstruct_derivative, Direction, InitialConditions, IntegrationError, Provenance, Run,
    Trajectory,
};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("energy {energy} is not below the potential at both grid ends ({left}, {right})")]
    EndsNotForbidden { energy: f64, left: f64, right: f64 },
    #[error("no bracket found for level {n} within {expansions} expansions")]
    NoBracket { n: usize, expansions: usize },
    #[error("level {n} did not converge within {iterations} iterations")]
    MaxIterations { n: usize, iterations: usize },
    #[error("level {n}: converged trajectory has {found} nodes")]
    NodeMismatch { n: usize, found: usize },
    #[error("level {n}: trajectory does not decay at the grid ends after {extensions} extensions")]
    NotDecayed { n: usize, extensions: usize },
    #[error("level {n} failed: {source}")]
    LevelFailed {
        n: usize,
        #[source]
        source: Box<SpectralError>,
    },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Final bracket width in energy.
    pub tol_energy: f64,
    /// Limit on shooting evaluations while refining one level.
    pub max_iterations: usize,
    pub max_expansions: usize,
    /// Maximum number of 25% grid widenings when a level fails to decay.
    pub max_extensions: usize,
    /// Endpoint magnitude, relative to the maximum, accepted as decayed.
    pub decay_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol_energy: 1e-10, max_iterations: 200, max_expansions: 60, max_extensions: 5, decay_threshold: 1e-6 }
    }
}

/// A fully specified eigenproblem: potential sampled on a grid.
#[derive(Debug, Clone)]
pub struct Problem {
    constants: PhysicalConstants,
    potential: PotentialSpec,
    grid: Grid,
    convention: Convention,
    options: SolverOptions,
    samples: Vec<f64>,
}

impl Problem {
    pub fn new(
        constants: PhysicalConstants,
        potential: PotentialSpec,
        grid: Grid,
        convention: Convention,
    ) -> Result<Self, SpectralError> {
        if let PotentialSpec::InfiniteWell { width } = potential {
            let slack = 1e-9 * width;
            if grid.x_min().abs() > slack || (grid.x_max() - width).abs() > slack {
                return Err(SpectralError::InvalidRequest(format!(
                    "infinite well of width {width} needs a grid spanning exactly [0, {width}]"
                )));
            }
        }
        let samples = sample_potential(&potential, &constants, &grid)?;
        Ok(Self { constants, potential, grid, convention, options: SolverOptions::default(), samples })
    }

    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn potential_samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn profile(&self, energy: f64) -> FrequencyProfile {
        FrequencyProfile::from_potential_samples(self.grid, &self.samples, energy, &self.constants, self.convention)
    }

    fn with_grid(&self, grid: Grid) -> Result<Self, SpectralError> {
        Ok(Self::new(self.constants, self.potential.clone(), grid, self.convention)?.with_options(self.options))
    }

    fn min_potential(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Energies must stay below this for both ends to be forbidden.
    fn energy_cap(&self) -> f64 {
        if self.potential.is_dirichlet() {
            f64::INFINITY
        } else {
            self.samples[0].min(self.samples[self.samples.len() - 1])
        }
    }
}

/// Outcome of one shooting evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingReport {
    pub energy: f64,
    /// Scaled log-derivative defect at the matching point; for Dirichlet
    /// problems, `ψ(x_max)/max|ψ|`.
    pub mismatch: f64,
    /// Interior sign changes of the assembled trajectory.
    pub node_count: usize,
    /// Number of eigenvalues strictly below `energy`.
    pub level_count: usize,
    pub match_index: usize,
}

struct Shot {
    report: ShootingReport,
    profile: FrequencyProfile,
    left: Run,
    right: Option<Run>,
}

/// Strict sign changes, ignoring samples with `|v| ≤ 1e−14·max|v|`.
fn sign_changes<'a>(values: impl Iterator<Item = &'a f64> + Clone) -> usize {
    let scale = values.clone().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-14 * scale;
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Number of interior strict sign changes of `ψ`.
pub fn count_nodes(traj: &Trajectory) -> usize {
    sign_changes(traj.psi().iter())
}

/// Default matching index: last classically allowed point, or the midpoint.
fn default_match_index(profile: &FrequencyProfile) -> usize {
    let n = profile.grid().len();
    let m = profile.omega_sq().iter().rposition(|w| *w > 0.0).unwrap_or(n / 2);
    m.clamp(2, n - 3)
}

/// `ψ'/ψ` at a point from its neighbours, with the Numerov-consistent
/// derivative.
fn log_derivative(prev: f64, here: f64, next: f64, w: (f64, f64), h: f64) -> f64 {
    let c = h * h / 6.0;
    let d = ((1.0 + c * w.1) * next - (1.0 + c * w.0) * prev) / (2.0 * h);
    d / here
}

fn shoot_inner(energy: f64, problem: &Problem, fixed_match: Option<usize>) -> Result<Shot, SpectralError> {
    let profile = problem.profile(energy);
    let n = problem.grid.len();
    let h = problem.grid.step();
    let w = profile.omega_sq();

    if problem.potential.is_dirichlet() {
        let left = numerov_run(w, h, 0, n - 1, 0.0, 1.0)?;
        let psi = &left.psi;
        let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let end = psi[n - 1];
        let node_count = sign_changes(psi[..n - 1].iter());
        let last_interior = psi[..n - 1].iter().rev().find(|v| v.abs() > 1e-14 * scale).copied().unwrap_or(1.0);
        let crossed = end != 0.0 && (end > 0.0) != (last_interior > 0.0);
        let report = ShootingReport {
            energy,
            mismatch: end / scale,
            node_count,
            level_count: node_count + usize::from(crossed),
            match_index: n - 1,
        };
        return Ok(Shot { report, profile, left, right: None });
    }

    let (v_left, v_right) = (problem.samples[0], problem.samples[n - 1]);
    if !(energy < v_left && energy < v_right) {
        return Err(SpectralError::EndsNotForbidden { energy, left: v_left, right: v_right });
    }
    let m = fixed_match.unwrap_or_else(|| default_match_index(&profile)).clamp(2, n - 3);
    let seed_l = InitialConditions::decaying_from_left(&profile);
    let seed_r = InitialConditions::decaying_from_right(&profile);
    let left = numerov_run(w, h, 0, m + 1, seed_l.psi0, seed_l.dpsi0)?;
    let right = numerov_run(w, h, n - 1, m - 1, seed_r.psi0, seed_r.dpsi0)?;

    // Left run index k is grid index k; right run index k is grid index n−1−k.
    let l = log_derivative(left.psi[m - 1], left.psi[m], left.psi[m + 1], (w[m - 1], w[m + 1]), h);
    let r_at = |i: usize| right.psi[n - 1 - i];
    let r = log_derivative(r_at(m - 1), r_at(m), r_at(m + 1), (w[m - 1], w[m + 1]), h);
    let defect = l - r;
    let mismatch = defect / (l.abs() + r.abs() + 1.0);

    let nodes_left = sign_changes(left.psi[..=m].iter());
    let nodes_right = sign_changes(right.psi[..n - m].iter());
    let node_count = nodes_left + nodes_right;
    let level_count = node_count + usize::from(defect < 0.0);
    let report = ShootingReport { energy, mismatch, node_count, level_count, match_index: m };
    Ok(Shot { report, profile, left, right: Some(right) })
}

/// Shoots from both ends at `energy` and reports the matching defect.
pub fn shoot(energy: f64, problem: &Problem) -> Result<ShootingReport, SpectralError> {
    Ok(shoot_inner(energy, problem, None)?.report)
}

/// As [`shoot`], with the matching point pinned to `match_index`.
pub fn shoot_with_match(energy: f64, problem: &Problem, match_index: usize) -> Result<ShootingReport, SpectralError> {
    Ok(shoot_inner(energy, problem, Some(match_index))?.report)
}

fn level_count(energy: f64, problem: &Problem) -> Result<usize, SpectralError> {
    Ok(shoot(energy, problem)?.level_count)
}

/// Narrows or widens `[e_lo, e_hi]` until exactly one eigenvalue, the one of
/// index `n`, lies inside: `n` levels below `e_lo`, `n + 1` below `e_hi`.
pub fn bracket_level(n: usize, e_lo: f64, e_hi: f64, problem: &Problem) -> Result<(f64, f64), SpectralError> {
    if !(e_lo < e_hi) {
        return Err(SpectralError::InvalidRequest(format!("empty energy range [{e_lo}, {e_hi}]")));
    }
    let cap = problem.energy_cap();
    let floor = problem.min_potential();
    let below_cap = |e: f64| if cap.is_finite() { e.min(cap - 1e-12 * cap.abs().max(1.0)) } else { e };
    let mut lo = e_lo.max(floor);
    let mut hi = below_cap(e_hi);
    if !(lo < hi) {
        return Err(SpectralError::NoBracket { n, expansions: 0 });
    }
    let max_exp = problem.options.max_expansions;

    let mut expansions = 0;
    let mut count_lo = level_count(lo, problem)?;
    while count_lo > n {
        if lo <= floor || expansions >= max_exp {
            return Err(SpectralError::NoBracket { n, expansions });
        }
        let width = hi - lo;
        hi = lo;
        lo = (lo - width).max(floor);
        count_lo = level_count(lo, problem)?;
        expansions += 1;
    }
    let mut count_hi = level_count(hi, problem)?;
    while count_hi <= n {
        let grown = below_cap(lo + 2.0 * (hi - lo));
        if grown <= hi || expansions >= max_exp {
            return Err(SpectralError::NoBracket { n, expansions });
        }
        lo = hi;
        count_lo = count_hi;
        hi = grown;
        count_hi = level_count(hi, problem)?;
        expansions += 1;
    }

    let mut guard = 0;
    while count_lo != n || count_hi != n + 1 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) || guard > 2000 {
            return Err(SpectralError::NoBracket { n, expansions });
        }
        let c = level_count(mid, problem)?;
        if c <= n {
            lo = mid;
            count_lo = c;
        } else {
            hi = mid;
            count_hi = c;
        }
        guard += 1;
    }
    Ok((lo, hi))
}

/// A converged bound state.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub n: usize,
    pub energy: f64,
    /// Normalized trajectory.
    pub trajectory: Trajectory,
    /// Frequency profile at `energy` on the trajectory's grid.
    pub profile: FrequencyProfile,
    pub norm_residual: f64,
    pub node_count: usize,
    pub mismatch_residual: f64,
}

impl Eigenpair {
    pub fn grid(&self) -> &Grid {
        self.trajectory.grid()
    }
}

fn initial_window(problem: &Problem) -> (f64, f64) {
    let lo = problem.min_potential();
    let width = if problem.potential.is_dirichlet() {
        let span = problem.grid.x_max() - problem.grid.x_min();
        problem.constants.kinetic_factor() * (std::f64::consts::PI / span).powi(2)
    } else {
        ((problem.energy_cap() - lo) / 64.0).max(1e-12)
    };
    (lo, lo + width)
}

/// Refines level `n` inside a bracket from [`bracket_level`].
fn refine(n: usize, mut lo: f64, mut hi: f64, problem: &Problem) -> Result<(f64, Option<usize>), SpectralError> {
    let opts = problem.options;
    let mut iterations = 0;
    let tick = |iterations: &mut usize| -> Result<(), SpectralError> {
        *iterations += 1;
        if *iterations > opts.max_iterations {
            Err(SpectralError::MaxIterations { n, iterations: opts.max_iterations })
        } else {
            Ok(())
        }
    };

    while hi - lo > opts.tol_energy {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let secant_width = 1e-4 * mid.abs() + 1e-12;
        if hi - lo > secant_width {
            tick(&mut iterations)?;
            if level_count(mid, problem)? <= n {
                lo = mid;
            } else {
                hi = mid;
            }
            continue;
        }

        // Secant phase with a pinned matching point; requires no pole inside.
        let m = shoot(mid, problem)?.match_index;
        tick(&mut iterations)?;
        let a = shoot_with_match(lo, problem, m)?;
        tick(&mut iterations)?;
        let b = shoot_with_match(hi, problem, m)?;
        let clean = a.level_count == n
            && b.level_count == n + 1
            && a.node_count == b.node_count
            && a.mismatch >= 0.0
            && b.mismatch < 0.0;
        if !clean {
            tick(&mut iterations)?;
            if level_count(mid, problem)? <= n {
                lo = mid;
            } else {
                hi = mid;
            }
            continue;
        }
        let (mut fa, mut fb) = (a.mismatch, b.mismatch);
        if fa == 0.0 {
            return Ok((lo, Some(m)));
        }
        // Illinois false position.
        let mut side = 0i8;
        let mut estimate = mid;
        loop {
            let c = (lo * fb - hi * fa) / (fb - fa);
            let c = if c > lo && c < hi { c } else { 0.5 * (lo + hi) };
            tick(&mut iterations)?;
            let fc = shoot_with_match(c, problem, m)?.mismatch;
            let moved = (c - estimate).abs();
            estimate = c;
            if fc == 0.0 {
                return Ok((c, Some(m)));
            }
            if fc > 0.0 {
                lo = c;
                fa = fc;
                if side == 1 {
                    fb *= 0.5;
                }
                side = 1;
            } else {
                hi = c;
                fb = fc;
                if side == -1 {
                    fa *= 0.5;
                }
                side = -1;
            }
            if hi - lo <= opts.tol_energy || moved <= 0.25 * opts.tol_energy {
                return Ok((estimate, Some(m)));
            }
        }
    }
    Ok((0.5 * (lo + hi), None))
}

fn assemble(n: usize, energy: f64, problem: &Problem, match_index: Option<usize>) -> Result<Eigenpair, SpectralError> {
    let shot = shoot_inner(energy, problem, match_index)?;
    let grid = problem.grid;
    let len = grid.len();
    let h = grid.step();
    let w = shot.profile.omega_sq();
    let (psi, provenance, known) = match &shot.right {
        None => {
            // Wall condition holds exactly at an eigenvalue; drop the residual.
            let mut psi = shot.left.psi.clone();
            psi[len - 1] = 0.0;
            let d0 = 2f64.powi(-shot.left.exponent);
            (psi, Provenance::Integrated { direction: Direction::LeftToRight }, Some((0, d0)))
        }
        Some(right) => {
            let m = shot.report.match_index;
            let sl = 1.0 / shot.left.psi[m];
            let sr = 1.0 / right.psi[len - 1 - m];
            let mut psi = vec![0.0; len];
            for (i, p) in psi.iter_mut().enumerate() {
                *p = if i <= m { shot.left.psi[i] * sl } else { right.psi[len - 1 - i] * sr };
            }
            (psi, Provenance::Matched { match_index: m }, None)
        }
    };
    let dpsi = reconstruct_derivative(&psi, w, h, known);
    let raw = Trajectory::new(grid, psi, dpsi, provenance)?;
    let trajectory = functionals::normalize(&raw)?;
    let norm_residual = (functionals::norm(&trajectory).value - 1.0).abs();
    let node_count = count_nodes(&trajectory);
    if node_count != n {
        return Err(SpectralError::NodeMismatch { n, found: node_count });
    }
    Ok(Eigenpair {
        n,
        energy,
        trajectory,
        profile: shot.profile,
        norm_residual,
        node_count,
        mismatch_residual: shot.report.mismatch.abs(),
    })
}

fn decays(pair: &Eigenpair, threshold: f64) -> bool {
    let psi = pair.trajectory.psi();
    let limit = threshold * pair.trajectory.max_abs();
    psi[0].abs() <= limit && psi[psi.len() - 1].abs() <= limit
}

fn find_on_grid(n: usize, problem: &Problem) -> Result<Eigenpair, SpectralError> {
    let (lo, hi) = initial_window(problem);
    let (lo, hi) = bracket_level(n, lo, hi, problem)?;
    let (energy, m) = refine(n, lo, hi, problem)?;
    assemble(n, energy, problem, m)
}

/// Converges level `n`, widening the grid by 25% (same spacing) whenever the
/// eigenfunction has not decayed at the grid ends.
pub fn find_eigenvalue(n: usize, problem: &Problem) -> Result<Eigenpair, SpectralError> {
    let mut current = problem.clone();
    let max = problem.options.max_extensions;
    for extension in 0..=max {
        let pair = find_on_grid(n, &current)?;
        if current.potential.is_dirichlet() || decays(&pair, current.options.decay_threshold) {
            return Ok(pair);
        }
        if extension == max {
            break;
        }
        let wider = current.grid.widened(0.25)?;
        current = current
            .with_grid(wider)
            .map_err(|_| SpectralError::NotDecayed { n, extensions: extension })?;
    }
    Err(SpectralError::NotDecayed { n, extensions: max })
}

/// Levels `0..k`, each solved independently (in parallel) and returned in
/// level order. If any level needed a wider grid, all levels are re-solved on
/// the widest one so that the trajectories share a grid.
pub fn solve_levels(k: usize, problem: &Problem) -> Vec<Result<Eigenpair, SpectralError>> {
    let first: Vec<_> = (0..k).into_par_iter().map(|n| find_eigenvalue(n, problem)).collect();
    let widest = first
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .map(|p| *p.grid())
        .max_by(|a, b| (a.x_max() - a.x_min()).total_cmp(&(b.x_max() - b.x_min())));
    match widest {
        Some(g) if g != problem.grid => match problem.with_grid(g) {
            Ok(wide) => (0..k).into_par_iter().map(|n| find_eigenvalue(n, &wide)).collect(),
            Err(_) => first,
        },
        _ => first,
    }
}

/// The lowest `k` eigenpairs in increasing energy order.
pub fn solve_spectrum(k: usize, problem: &Problem) -> Result<Vec<Eigenpair>, SpectralError> {
    if k == 0 {
        return Err(SpectralError::InvalidRequest("at least one level must be requested".into()));
    }
    solve_levels(k, problem)
        .into_iter()
        .enumerate()
        .map(|(n, r)| r.map_err(|e| SpectralError::LevelFailed { n, source: Box::new(e) }))
        .collect()
}

#[derive(Debug)]
pub struct SweepSample {
    pub energy: f64,
    pub outcome: Result<ShootingReport, SpectralError>,
}

/// Shoots at `samples` uniformly spaced energies in `[e_min, e_max]`.
/// Individual failures are kept in place.
pub fn sweep_mismatch(e_min: f64, e_max: f64, samples: usize, problem: &Problem) -> Result<Vec<SweepSample>, SpectralError> {
    if !(e_min < e_max) {
        return Err(SpectralError::InvalidRequest(format!("empty energy range [{e_min}, {e_max}]")));
    }
    if samples < 2 {
        return Err(SpectralError::InvalidRequest("a sweep needs at least two samples".into()));
    }
    let step = (e_max - e_min) / (samples - 1) as f64;
    Ok((0..samples)
        .into_par_iter()
        .map(|i| {
            let energy = if i + 1 == samples { e_max } else { e_min + i as f64 * step };
            SweepSample { energy, outcome: shoot(energy, problem) }
        })
        .collect())
}

/// Single-direction trajectory at `energy` from the left end (decaying seed,
/// or `ψ = 0, ψ' = 1` for Dirichlet problems), with no eigenvalue search.
pub fn single_direction_trajectory(energy: f64, problem: &Problem) -> Result<(Trajectory, FrequencyProfile), SpectralError> {
    let profile = problem.profile(energy);
    let ic = if problem.potential.is_dirichlet() {
        InitialConditions::new(0, 0.0, 1.0, Direction::LeftToRight)?
    } else {
        let n = problem.grid.len();
        let (v_left, v_right) = (problem.samples[0], problem.samples[n - 1]);
        if !(energy < v_left && energy < v_right) {
            return Err(SpectralError::EndsNotForbidden { energy, left: v_left, right: v_right });
        }
        InitialConditions::decaying_from_left(&profile)
    };
    let traj = oscillator::integrate(&profile, &ic)?;
    Ok((traj, profile))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRecord {
    pub hbar: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: usize,
    pub energy: f64,
    pub nodes: usize,
    pub norm_residual: f64,
    pub mismatch_residual: f64,
}

/// Serialized spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumDocument {
    pub potential: PotentialDescriptor,
    pub constants: ConstantsRecord,
    pub convention: Convention,
    pub grid: GridRecord,
    pub levels: Vec<LevelRecord>,
}

impl SpectrumDocument {
    pub fn new(problem: &Problem, levels: &[Eigenpair]) -> Self {
        let grid = levels.first().map(|p| *p.grid()).unwrap_or(problem.grid);
        Self {
            potential: problem.potential.descriptor(),
            constants: ConstantsRecord { hbar: problem.constants.hbar(), mass: problem.constants.mass() },
            convention: problem.convention,
            grid: GridRecord { x_min: grid.x_min(), x_max: grid.x_max(), n_points: grid.len() },
            levels: levels
                .iter()
                .map(|p| LevelRecord {
                    n: p.n,
                    energy: p.energy,
                    nodes: p.node_count,
                    norm_residual: p.norm_residual,
                    mismatch_residual: p.mismatch_residual,
                })
                .collect(),
        }
    }

    /// Structural checks beyond what deserialization enforces.
    pub fn validate(&self) -> Result<(), String> {
        PhysicalConstants::new(self.constants.hbar, self.constants.mass).map_err(|e| e.to_string())?;
        Grid::new(self.grid.x_min, self.grid.x_max, self.grid.n_points).map_err(|e| e.to_string())?;
        for w in self.levels.windows(2) {
            if w[1].n <= w[0].n {
                return Err(format!("levels out of order: {} then {}", w[0].n, w[1].n));
            }
            if w[1].energy < w[0].energy {
                return Err(format!("energies not increasing at level {}", w[1].n));
            }
        }
        for l in &self.levels {
            if !l.energy.is_finite() || !(l.norm_residual >= 0.0) || !(l.mismatch_residual >= 0.0) {
                return Err(format!("level {} has invalid values", l.n));
            }
            if l.nodes != l.n {
                return Err(format!("level {} reports {} nodes", l.n, l.nodes));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let doc: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        doc.validate()?;
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn harmonic(x: f64, points: usize) -> Problem {
        Problem::new(
            PhysicalConstants::default(),
            PotentialSpec::harmonic(1.0).unwrap(),
            Grid::new(-x, x, points).unwrap(),
            Convention::Faithful,
        )
        .unwrap()
    }

    fn default_harmonic() -> Problem {
        harmonic(12.0, 24001)
    }

    fn well() -> Problem {
        Problem::new(
            PhysicalConstants::default(),
            PotentialSpec::infinite_well(PI).unwrap(),
            Grid::new(0.0, PI, 20001).unwrap(),
            Convention::Faithful,
        )
        .unwrap()
    }

    #[test]
    fn node_counting() {
        let g = Grid::new(-10.0, 10.0, 2001).unwrap();
        let gauss = Trajectory::from_fn(g, "g", |x| ((-x * x / 2.0).exp(), 0.0)).unwrap();
        assert_eq!(count_nodes(&gauss), 0);
        let s = Trajectory::from_fn(Grid::new(0.0, 3.5 * PI, 3501).unwrap(), "sin", |x| (x.sin(), 0.0)).unwrap();
        assert_eq!(count_nodes(&s), 3);
        // A sample sitting exactly on zero is not double counted.
        let t = Trajectory::from_fn(Grid::new(-1.0, 1.0, 3).unwrap(), "x", |x| (x, 1.0)).unwrap();
        assert_eq!(count_nodes(&t), 1);
    }

    #[test]
    fn shoot_examples() {
        let p = default_harmonic();
        let r = shoot(0.5, &p).unwrap();
        assert!(r.mismatch.abs() <= 1e-8, "{}", r.mismatch);
        assert_eq!(r.node_count, 0);
        let r = shoot(1.0, &p).unwrap();
        assert!(r.mismatch.abs() >= 1e-2);
        assert!(r.node_count <= 1);
        assert_eq!(r.level_count, 1);
        let r = shoot(2.5 + 1e-9, &p).unwrap();
        assert_eq!(r.node_count, 2);
        assert!(matches!(shoot(80.0, &p), Err(SpectralError::EndsNotForbidden { .. })));
    }

    #[test]
    fn bracket_examples() {
        let p = default_harmonic();
        let (lo, hi) = bracket_level(0, 0.0, 10.0, &p).unwrap();
        assert!(lo < 0.5 + 1e-6 && 0.5 - 1e-6 < hi && lo < hi);
        let (lo, hi) = bracket_level(7, 0.0, 20.0, &p).unwrap();
        assert!(lo < 7.5 + 1e-6 && 7.5 - 1e-6 < hi && lo < hi);
        // Expansion from a window below the level.
        let (lo, hi) = bracket_level(3, 0.0, 0.1, &p).unwrap();
        assert!(lo < 3.5 + 1e-6 && 3.5 - 1e-6 < hi && lo < hi);
        // Window above the level is lowered.
        let (lo, hi) = bracket_level(0, 5.0, 6.0, &p).unwrap();
        assert!(lo < 0.5 + 1e-6 && 0.5 - 1e-6 < hi && lo < hi);
        let (lo, hi) = bracket_level(1, 0.0, 10.0, &well()).unwrap();
        assert!(lo < 2.0 + 1e-6 && 2.0 - 1e-6 < hi && lo < hi);
        assert!(bracket_level(0, 1.0, 1.0, &p).is_err());
        // Level far above the end potential cannot be bracketed.
        assert!(matches!(bracket_level(200, 0.0, 1.0, &p), Err(SpectralError::NoBracket { .. })));
    }

    #[test]
    fn eigenvalue_examples() {
        let p = default_harmonic();
        for n in [0usize, 9] {
            let e = find_eigenvalue(n, &p).unwrap();
            assert!((e.energy - (n as f64 + 0.5)).abs() <= 1e-8, "n={n}: {}", e.energy);
            assert_eq!(e.node_count, n);
            assert!(e.norm_residual <= 1e-8);
        }
        let e = find_eigenvalue(0, &well()).unwrap();
        assert!((e.energy - 0.5).abs() <= 1e-8, "{}", e.energy);
    }

    #[test]
    fn spectrum_parity_and_nodes() {
        let p = default_harmonic();
        let levels = solve_spectrum(5, &p).unwrap();
        for (n, lvl) in levels.iter().enumerate() {
            assert!((lvl.energy - (n as f64 + 0.5)).abs() <= 1e-8);
            assert_eq!(lvl.node_count, n);
            let psi = lvl.trajectory.psi();
            let len = psi.len();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let worst = (0..len).map(|i| (psi[i] - sign * psi[len - 1 - i]).abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-6, "n={n}: parity defect {worst}");
        }
        assert!(solve_spectrum(0, &p).is_err());
    }

    #[test]
    fn sweep_examples() {
        let p = harmonic(10.0, 10001);
        let s = sweep_mismatch(0.0, 5.0, 501, &p).unwrap();
        assert_eq!(s.len(), 501);
        assert_eq!(s[0].energy, 0.0);
        assert_eq!(s[500].energy, 5.0);
        let reports: Vec<_> = s.iter().map(|x| *x.outcome.as_ref().unwrap()).collect();
        for w in reports.windows(2) {
            assert!(w[1].node_count >= w[0].node_count);
            assert!(w[1].level_count >= w[0].level_count);
            assert!(w[1].level_count - w[0].level_count <= 1);
        }
        assert!(sweep_mismatch(1.0, 1.0, 10, &p).is_err());
        assert!(sweep_mismatch(0.0, 1.0, 1, &p).is_err());
    }

    #[test]
    fn sweep_keeps_failures_in_place() {
        let p = harmonic(4.0, 801);
        // V(±4) = 8, so energies ≥ 8 fail without aborting the sweep.
        let s = sweep_mismatch(7.0, 9.0, 5, &p).unwrap();
        assert!(s[0].outcome.is_ok());
        assert!(s[4].outcome.is_err());
    }

    #[test]
    fn auto_extension_widens_narrow_grid() {
        let p = harmonic(4.0, 4001);
        let e = find_eigenvalue(6, &p).unwrap();
        assert!(e.grid().x_max() > 4.0);
        assert!((e.energy - 6.5).abs() < 1e-6);
    }

    #[test]
    fn document_round_trip() {
        let p = harmonic(8.0, 8001);
        let levels = solve_spectrum(3, &p).unwrap();
        let doc = SpectrumDocument::new(&p, &levels);
        let text = doc.to_json();
        let back = SpectrumDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        let mut bad = doc.clone();
        bad.levels[1].nodes = 4;
        assert!(SpectrumDocument::from_json(&bad.to_json()).is_err());
    }

    #[test]
    fn well_requires_matching_grid() {
        let r = Problem::new(
            PhysicalConstants::default(),
            PotentialSpec::infinite_well(PI).unwrap(),
            Grid::new(-1.0, PI, 101).unwrap(),
            Convention::Faithful,
        );
        assert!(r.is_err());
    }
}
