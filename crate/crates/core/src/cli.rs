//! Command-line front end: `solve`, `sweep`, `verify` and `trajectory`.
//!
//! Every flag may also be given in a flat `key = value` config file (keys are
//! the flag names without the leading dashes); flags win on conflict.
//! Exit codes: 0 success, 1 usage or configuration error, 2 partial
//! computational failure.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::exact::verify_reverse_direction;
use crate::model::{Convention, Grid, Interpolation, PhysicalConstants, PotentialDescriptor, PotentialSpec, TabulatedPotential};
use crate::oscillator::boundary_growth;
use crate::spectral::{self, Problem, SolverOptions, SpectrumDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

const DEFAULT_X_MIN: f64 = -12.0;
const DEFAULT_X_MAX: f64 = 12.0;
const DEFAULT_POINTS: usize = 24001;
const DEFAULT_TOL_E: f64 = 1e-10;
const DEFAULT_TOL_RESIDUAL: f64 = 1e-5;
const DEFAULT_VERIFY_LEVELS: usize = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Compute(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Compute(_) | CliError::Io(_) => EXIT_PARTIAL,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "oscspec", version, about = "Bound-state spectra as classical oscillator trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the lowest levels and write the spectrum document.
    Solve(Flags),
    /// Tabulate the shooting mismatch over an energy range.
    Sweep(Flags),
    /// Check that closed-form harmonic eigenfunctions solve their oscillators.
    Verify(Flags),
    /// Integrate one trajectory at a fixed energy.
    Trajectory(Flags),
}

#[derive(Debug, Args, Default, Clone)]
struct Flags {
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long = "well-width")]
    well_width: Option<f64>,
    #[arg(long)]
    file: Option<PathBuf>,
    /// Interpolation order for tabulated potentials (1 or 3).
    #[arg(long)]
    order: Option<u8>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    energy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    emin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    emax: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    convention: Option<String>,
    #[arg(long = "tol-e")]
    tol_e: Option<f64>,
    #[arg(long = "tol-residual")]
    tol_residual: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write one trajectory CSV per solved level.
    #[arg(long)]
    trajectories: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Parses the flat `key = value` config format.
pub fn parse_config(text: &str) -> Result<HashMap<String, String>, String> {
    let mut map = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected 'key = value'", k + 1))?;
        let key = key.trim().trim_start_matches("--").to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("config line {}: unknown key '{key}'", k + 1));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

const KNOWN_KEYS: &[&str] = &[
    "potential",
    "omega0",
    "well-width",
    "file",
    "order",
    "levels",
    "energy",
    "emin",
    "emax",
    "samples",
    "hbar",
    "mass",
    "xmin",
    "xmax",
    "points",
    "convention",
    "tol-e",
    "tol-residual",
    "out",
    "trajectories",
];

struct Layered<'a> {
    file: &'a HashMap<String, String>,
}

impl Layered<'_> {
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| config_err(format!("config key '{key}': cannot parse '{v}'"))),
        }
    }
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub constants: PhysicalConstants,
    pub potential: Option<PotentialSpec>,
    pub potential_source: Option<PathBuf>,
    pub omega0: Option<f64>,
    pub grid: Grid,
    pub convention: Convention,
    pub tol_e: f64,
    pub tol_residual: f64,
    pub out: Option<PathBuf>,
    pub levels: Option<usize>,
    pub energy: Option<f64>,
    pub emin: Option<f64>,
    pub emax: Option<f64>,
    pub samples: Option<usize>,
    pub write_trajectories: bool,
}

impl RunConfig {
    fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
                parse_config(&text).map_err(config_err)?
            }
            None => HashMap::new(),
        };
        let l = Layered { file: &file };

        let hbar = l.pick(flags.hbar, "hbar")?.unwrap_or(1.0);
        let mass = l.pick(flags.mass, "mass")?.unwrap_or(1.0);
        let constants = PhysicalConstants::new(hbar, mass).map_err(|e| config_err(e.to_string()))?;

        let convention = match l.pick(flags.convention.clone(), "convention")?.as_deref() {
            None | Some("faithful") => Convention::Faithful,
            Some("paper") => Convention::PaperEq11,
            Some(other) => return Err(config_err(format!("unknown convention '{other}' (faithful|paper)"))),
        };
        let tol_e = l.pick(flags.tol_e, "tol-e")?.unwrap_or(DEFAULT_TOL_E);
        let tol_residual = l.pick(flags.tol_residual, "tol-residual")?.unwrap_or(DEFAULT_TOL_RESIDUAL);
        if !(tol_e > 0.0) || !(tol_residual > 0.0) {
            return Err(config_err("tolerances must be positive"));
        }

        let omega0 = l.pick(flags.omega0, "omega0")?;
        let well_width = l.pick(flags.well_width, "well-width")?;
        let file_path: Option<PathBuf> = l.pick(flags.file.clone(), "file")?;
        let order = l.pick(flags.order, "order")?.unwrap_or(3);
        let points = l.pick(flags.points, "points")?.unwrap_or(DEFAULT_POINTS);
        let xmin = l.pick(flags.xmin, "xmin")?;
        let xmax = l.pick(flags.xmax, "xmax")?;

        let kind = l.pick(flags.potential.clone(), "potential")?;
        let mut potential_source = None;
        let potential = match kind.as_deref() {
            None => None,
            Some("harmonic") => {
                let w = omega0.ok_or_else(|| config_err("harmonic potential requires --omega0"))?;
                Some(PotentialSpec::harmonic(w).map_err(|e| config_err(e.to_string()))?)
            }
            Some("well") => {
                let w = well_width.ok_or_else(|| config_err("well potential requires --well-width"))?;
                Some(PotentialSpec::infinite_well(w).map_err(|e| config_err(e.to_string()))?)
            }
            Some("tabulated") => {
                let path = file_path.ok_or_else(|| config_err("tabulated potential requires --file"))?;
                let interp = Interpolation::from_order(order).map_err(|e| config_err(e.to_string()))?;
                let table = TabulatedPotential::from_csv_path(&path, interp)
                    .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
                potential_source = Some(path);
                Some(PotentialSpec::Tabulated(table))
            }
            Some(other) => return Err(config_err(format!("unknown potential '{other}' (harmonic|well|tabulated)"))),
        };

        let (gx_min, gx_max) = match &potential {
            Some(PotentialSpec::InfiniteWell { width }) => (0.0, *width),
            Some(PotentialSpec::Tabulated(t)) => {
                let (lo, hi) = t.domain();
                (xmin.unwrap_or(lo), xmax.unwrap_or(hi))
            }
            _ => (xmin.unwrap_or(DEFAULT_X_MIN), xmax.unwrap_or(DEFAULT_X_MAX)),
        };
        let grid = Grid::new(gx_min, gx_max, points).map_err(|e| config_err(e.to_string()))?;

        let trajectories_from_file = l.pick(None::<bool>, "trajectories")?.unwrap_or(false);
        Ok(Self {
            constants,
            potential,
            potential_source,
            omega0,
            grid,
            convention,
            tol_e,
            tol_residual,
            out: l.pick(flags.out.clone(), "out")?,
            levels: l.pick(flags.levels, "levels")?,
            energy: l.pick(flags.energy, "energy")?,
            emin: l.pick(flags.emin, "emin")?,
            emax: l.pick(flags.emax, "emax")?,
            samples: l.pick(flags.samples, "samples")?,
            write_trajectories: flags.trajectories || trajectories_from_file,
        })
    }

    fn problem(&self) -> Result<Problem, CliError> {
        let potential = self.potential.clone().ok_or_else(|| config_err("--potential is required"))?;
        let options = SolverOptions { tol_energy: self.tol_e, ..SolverOptions::default() };
        Ok(Problem::new(self.constants, potential, self.grid, self.convention)
            .map_err(|e| config_err(e.to_string()))?
            .with_options(options))
    }

    fn descriptor(&self, problem: &Problem) -> PotentialDescriptor {
        match problem.potential().descriptor() {
            PotentialDescriptor::Tabulated { samples, x_min, x_max, order, .. } => PotentialDescriptor::Tabulated {
                samples,
                x_min,
                x_max,
                order,
                source: self.potential_source.as_ref().map(|p| p.display().to_string()),
            },
            d => d,
        }
    }

    fn output(&self, name: &str) -> Result<Option<PathBuf>, CliError> {
        match &self.out {
            None => Ok(None),
            Some(dir) => {
                fs::create_dir_all(dir)?;
                Ok(Some(dir.join(name)))
            }
        }
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(io::Error::other(e))
}

fn cmd_solve(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let levels = cfg.levels.unwrap_or(1);
    if levels == 0 {
        return Err(config_err("--levels must be at least 1"));
    }
    let problem = cfg.problem()?;
    let results = spectral::solve_levels(levels, &problem);

    writeln!(stdout, "{:>4} {:>22} {:>6} {:>12} {:>12}", "n", "energy", "nodes", "norm_res", "mismatch")?;
    let mut solved = Vec::new();
    let mut failures = 0;
    for (n, r) in results.into_iter().enumerate() {
        match r {
            Ok(p) => {
                writeln!(
                    stdout,
                    "{:>4} {:>22.15} {:>6} {:>12.3e} {:>12.3e}",
                    p.n, p.energy, p.node_count, p.norm_residual, p.mismatch_residual
                )?;
                solved.push(p);
            }
            Err(e) => {
                failures += 1;
                writeln!(stdout, "{n:>4} failed: {e}")?;
            }
        }
    }

    let mut doc = SpectrumDocument::new(&problem, &solved);
    doc.potential = cfg.descriptor(&problem);
    if let Some(path) = cfg.output("spectrum.json")? {
        fs::write(&path, doc.to_json() + "\n")?;
    }
    if cfg.write_trajectories {
        for p in &solved {
            if let Some(path) = cfg.output(&format!("level_{:03}.csv", p.n))? {
                let file = io::BufWriter::new(fs::File::create(path)?);
                p.trajectory.write_csv(&p.profile, file).map_err(|e| CliError::Compute(e.to_string()))?;
            }
        }
    }
    Ok(if failures == 0 { EXIT_OK } else { EXIT_PARTIAL })
}

fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (emin, emax) = match (cfg.emin, cfg.emax) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(config_err("sweep requires --emin and --emax")),
    };
    if !(emin < emax) {
        return Err(config_err(format!("--emin {emin} must be below --emax {emax}")));
    }
    let samples = cfg.samples.unwrap_or(101);
    if samples < 2 {
        return Err(config_err("--samples must be at least 2"));
    }
    let problem = cfg.problem()?;
    let sweep = spectral::sweep_mismatch(emin, emax, samples, &problem).map_err(|e| config_err(e.to_string()))?;

    let mut buf = Vec::new();
    let mut failed = 0;
    {
        let mut w = csv_writer(&mut buf);
        w.write_record(["E", "mismatch", "node_count", "level_count", "error"]).map_err(csv_err)?;
        for s in &sweep {
            match &s.outcome {
                Ok(r) => w
                    .write_record([
                        s.energy.to_string(),
                        r.mismatch.to_string(),
                        r.node_count.to_string(),
                        r.level_count.to_string(),
                        String::new(),
                    ])
                    .map_err(csv_err)?,
                Err(e) => {
                    failed += 1;
                    w.write_record([s.energy.to_string(), String::new(), String::new(), String::new(), e.to_string()])
                        .map_err(csv_err)?
                }
            }
        }
        w.flush()?;
    }
    emit(cfg, "sweep.csv", &buf, stdout)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_PARTIAL })
}

fn cmd_verify(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match &cfg.potential {
        None | Some(PotentialSpec::Harmonic { .. }) => {}
        Some(_) => return Err(config_err("verify supports the harmonic potential only")),
    }
    let omega0 = cfg.omega0.ok_or_else(|| config_err("verify requires --omega0"))?;
    if !(omega0 > 0.0) {
        return Err(config_err("--omega0 must be positive"));
    }
    let levels = cfg.levels.unwrap_or(DEFAULT_VERIFY_LEVELS);
    if levels == 0 {
        return Err(config_err("--levels must be at least 1"));
    }
    let mut buf = Vec::new();
    let mut all_pass = true;
    {
        let mut w = csv_writer(&mut buf);
        w.write_record(["n", "E", "residual_faithful", "residual_paper", "turning_left", "turning_right"])
            .map_err(csv_err)?;
        for n in 0..levels {
            let r = verify_reverse_direction(n, &cfg.constants, omega0, &cfg.grid)
                .map_err(|e| CliError::Compute(e.to_string()))?;
            all_pass &= r.residual(cfg.convention) <= cfg.tol_residual;
            w.serialize((r.n, r.energy, r.residual_faithful, r.residual_paper, r.turning_points.0, r.turning_points.1))
                .map_err(csv_err)?;
        }
        w.flush()?;
    }
    emit(cfg, "verify.csv", &buf, stdout)?;
    Ok(if all_pass { EXIT_OK } else { EXIT_PARTIAL })
}

fn cmd_trajectory(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let energy = cfg.energy.ok_or_else(|| config_err("trajectory requires --energy"))?;
    let problem = cfg.problem()?;
    let (traj, profile) = match spectral::single_direction_trajectory(energy, &problem) {
        Ok(t) => t,
        Err(e @ spectral::SpectralError::EndsNotForbidden { .. }) => return Err(config_err(e.to_string())),
        Err(e) => return Err(CliError::Compute(e.to_string())),
    };
    let growth = boundary_growth(&traj, &profile);
    let mut buf = Vec::new();
    writeln!(buf, "# energy={energy}")?;
    writeln!(buf, "# boundary_growth={growth:e}")?;
    traj.write_csv(&profile, &mut buf).map_err(|e| CliError::Compute(e.to_string()))?;
    emit(cfg, "trajectory.csv", &buf, stdout)?;
    Ok(EXIT_OK)
}

fn emit(cfg: &RunConfig, name: &str, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match cfg.output(name)? {
        Some(path) => {
            fs::write(&path, bytes)?;
            writeln!(stdout, "wrote {}", path.display())?;
        }
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

type Handler = fn(&RunConfig, &mut dyn Write) -> Result<i32, CliError>;

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };
    let (flags, handler): (&Flags, Handler) = match &cli.command {
        Command::Solve(f) => (f, cmd_solve),
        Command::Sweep(f) => (f, cmd_sweep),
        Command::Verify(f) => (f, cmd_verify),
        Command::Trajectory(f) => (f, cmd_trajectory),
    };
    let outcome = RunConfig::resolve(flags).and_then(|cfg| handler(&cfg, stdout));
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Reads a spectrum document from disk and validates it.
pub fn load_spectrum(path: &Path) -> Result<SpectrumDocument, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    SpectrumDocument::from_json(&text)
}
