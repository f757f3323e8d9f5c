//! Integration of the classical oscillator `Ψ'' + Ω²(x) Ψ = 0` and
//! trajectory-level diagnostics.

use std::io::Write;

use thiserror::Error;

use crate::model::{FrequencyProfile, Grid};

/// Magnitude above which a running integration is rescaled.
const OVERFLOW_GUARD: f64 = 1e150;
/// Power-of-two exponent removed at each rescale.
const RESCALE_BITS: i32 = 500;

#[derive(Debug, Error)]
pub enum IntegrationError {
    #[error("non-finite value at grid index {index}")]
    NonFinite { index: usize },
    #[error("initial conditions must not both vanish")]
    TrivialInitialConditions,
    #[error("start index {index} outside grid of {len} points")]
    StartOutOfRange { index: usize, len: usize },
    #[error("grid mismatch between inputs")]
    GridMismatch,
    #[error("need at least {need} grid points, found {found}")]
    TooFewPoints { need: usize, found: usize },
    #[error("trajectory is identically zero")]
    ZeroTrajectory,
    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Integrated { direction: Direction },
    /// Two decaying halves joined at a matching index.
    Matched { match_index: usize },
    ClosedForm { label: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    pub start: usize,
    pub psi0: f64,
    pub dpsi0: f64,
    pub direction: Direction,
}

impl InitialConditions {
    pub fn new(start: usize, psi0: f64, dpsi0: f64, direction: Direction) -> Result<Self, IntegrationError> {
        if psi0 == 0.0 && dpsi0 == 0.0 {
            return Err(IntegrationError::TrivialInitialConditions);
        }
        Ok(Self { start, psi0, dpsi0, direction })
    }

    /// Left-end seed decaying into a forbidden boundary region: `ψ = 1`,
    /// `ψ' = √(−Ω²(x_min))`.
    pub fn decaying_from_left(profile: &FrequencyProfile) -> Self {
        let rate = (-profile.omega_sq()[0]).max(0.0).sqrt();
        Self { start: 0, psi0: 1.0, dpsi0: rate, direction: Direction::LeftToRight }
    }

    /// Right-end counterpart of [`InitialConditions::decaying_from_left`].
    pub fn decaying_from_right(profile: &FrequencyProfile) -> Self {
        let n = profile.grid().len();
        let rate = (-profile.omega_sq()[n - 1]).max(0.0).sqrt();
        Self { start: n - 1, psi0: 1.0, dpsi0: -rate, direction: Direction::RightToLeft }
    }
}

/// Sampled path `Ψ(x)` with derivative samples.
///
/// Stored values equal the true solution times `2^(−rescale_exponent)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    psi: Vec<f64>,
    dpsi: Vec<f64>,
    rescale_exponent: i32,
    provenance: Provenance,
}

impl Trajectory {
    pub fn new(grid: Grid, psi: Vec<f64>, dpsi: Vec<f64>, provenance: Provenance) -> Result<Self, IntegrationError> {
        if psi.len() != grid.len() || dpsi.len() != grid.len() {
            return Err(IntegrationError::GridMismatch);
        }
        if let Some(index) = psi.iter().chain(&dpsi).position(|v| !v.is_finite()) {
            return Err(IntegrationError::NonFinite { index: index % grid.len() });
        }
        Ok(Self { grid, psi, dpsi, rescale_exponent: 0, provenance })
    }

    /// Samples a closed-form `x ↦ (ψ, ψ')`.
    pub fn from_fn(grid: Grid, label: &str, f: impl Fn(f64) -> (f64, f64)) -> Result<Self, IntegrationError> {
        let (psi, dpsi) = grid.points().map(f).unzip();
        Self::new(grid, psi, dpsi, Provenance::ClosedForm { label: label.to_string() })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn dpsi(&self) -> &[f64] {
        &self.dpsi
    }

    pub fn rescale_exponent(&self) -> i32 {
        self.rescale_exponent
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn max_abs(&self) -> f64 {
        self.psi.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Both `ψ` and `ψ'` multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            psi: self.psi.iter().map(|v| v * c).collect(),
            dpsi: self.dpsi.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// Writes `x,psi,dpsi,omega_sq` rows preceded by a comment line holding
    /// the rescale exponent.
    pub fn write_csv<W: Write>(&self, profile: &FrequencyProfile, mut out: W) -> Result<(), IntegrationError> {
        if profile.grid() != &self.grid {
            return Err(IntegrationError::GridMismatch);
        }
        writeln!(out, "# rescale_exponent={}", self.rescale_exponent)?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["x", "psi", "dpsi", "omega_sq"])?;
        for i in 0..self.grid.len() {
            w.serialize((self.grid.x(i), self.psi[i], self.dpsi[i], profile.omega_sq()[i]))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Raw Numerov run over a contiguous index span.
pub(crate) struct Run {
    /// Samples in the order they were produced (from `start` outward).
    pub psi: Vec<f64>,
    pub exponent: i32,
}

/// Numerov propagation of `y'' = f y` with `f = −Ω²` from index `start`
/// towards `stop` (inclusive), in either direction.
///
/// The first step uses a Taylor expansion through `h⁵`, with derivatives of
/// `f` from one-sided differences, so the start-up error matches the scheme.
pub(crate) fn numerov_run(
    omega_sq: &[f64],
    h: f64,
    start: usize,
    stop: usize,
    psi0: f64,
    dpsi0: f64,
) -> Result<Run, IntegrationError> {
    let forward = stop >= start;
    let len = if forward { stop - start } else { start - stop } + 1;
    let idx = |k: usize| if forward { start + k } else { start - k };
    // In the propagation variable s, ds = ±dx, so dψ/ds = ±ψ'.
    let dpsi_s = if forward { dpsi0 } else { -dpsi0 };
    let f = |k: usize| -omega_sq[idx(k)];

    let mut psi = Vec::with_capacity(len);
    psi.push(psi0);
    if len == 1 {
        return Ok(Run { psi, exponent: 0 });
    }
    psi.push(taylor_start(&f, len, h, psi0, dpsi_s));
    if !psi[1].is_finite() {
        return Err(IntegrationError::NonFinite { index: idx(1) });
    }

    let h2 = h * h / 12.0;
    let mut exponent = 0;
    let mut w_prev = (1.0 - h2 * f(0)) * psi[0];
    let mut w_cur = (1.0 - h2 * f(1)) * psi[1];
    for k in 1..len - 1 {
        let fk = f(k);
        let fnext = f(k + 1);
        let w_next = 2.0 * w_cur - w_prev + h * h * fk * psi[k];
        let y = w_next / (1.0 - h2 * fnext);
        if !y.is_finite() {
            return Err(IntegrationError::NonFinite { index: idx(k + 1) });
        }
        psi.push(y);
        w_prev = w_cur;
        w_cur = w_next;
        if y.abs() > OVERFLOW_GUARD {
            let s = 2f64.powi(-RESCALE_BITS);
            psi.iter_mut().for_each(|v| *v *= s);
            w_prev *= s;
            w_cur *= s;
            exponent += RESCALE_BITS;
        }
    }
    Ok(Run { psi, exponent })
}

/// `ψ(h)` from `ψ(0)`, `ψ'(0)` for `ψ'' = f ψ` through fifth order in `h`.
fn taylor_start(f: &impl Fn(usize) -> f64, len: usize, h: f64, y: f64, dy: f64) -> f64 {
    let f0 = f(0);
    // One-sided derivatives of f at the start from up to five samples.
    let (f1, f2, f3) = if len >= 5 {
        let s: [f64; 5] = [f(0), f(1), f(2), f(3), f(4)];
        let d1 = (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / (12.0 * h);
        let d2 = (35.0 * s[0] - 104.0 * s[1] + 114.0 * s[2] - 56.0 * s[3] + 11.0 * s[4]) / (12.0 * h * h);
        let d3 = (-5.0 * s[0] + 18.0 * s[1] - 24.0 * s[2] + 14.0 * s[3] - 3.0 * s[4]) / (2.0 * h * h * h);
        (d1, d2, d3)
    } else if len >= 3 {
        let s = [f(0), f(1), f(2)];
        ((-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h), (s[0] - 2.0 * s[1] + s[2]) / (h * h), 0.0)
    } else {
        ((f(1) - f0) / h, 0.0, 0.0)
    };
    let d2y = f0 * y;
    let d3y = f1 * y + f0 * dy;
    let d4y = f2 * y + 2.0 * f1 * dy + f0 * d2y;
    let d5y = f3 * y + 3.0 * f2 * dy + 3.0 * f1 * d2y + f0 * d3y;
    y + h * dy + h * h / 2.0 * d2y + h.powi(3) / 6.0 * d3y + h.powi(4) / 24.0 * d4y + h.powi(5) / 120.0 * d5y
}

/// Fourth-order derivative reconstruction consistent with Numerov:
/// `ψ'_i = [(1 + h²Ω²_{i+1}/6)ψ_{i+1} − (1 + h²Ω²_{i−1}/6)ψ_{i−1}] / 2h`,
/// with a three-point integral of `ψ''` at the ends. `known` fixes one end.
pub(crate) fn reconstruct_derivative(
    psi: &[f64],
    omega_sq: &[f64],
    h: f64,
    known: Option<(usize, f64)>,
) -> Vec<f64> {
    let n = psi.len();
    let mut d = vec![0.0; n];
    let c = h * h / 6.0;
    for i in 1..n - 1 {
        d[i] = ((1.0 + c * omega_sq[i + 1]) * psi[i + 1] - (1.0 + c * omega_sq[i - 1]) * psi[i - 1]) / (2.0 * h);
    }
    let g = |i: usize| -omega_sq[i] * psi[i];
    if n >= 3 {
        d[0] = d[1] - h / 12.0 * (5.0 * g(0) + 8.0 * g(1) - g(2));
        d[n - 1] = d[n - 2] + h / 12.0 * (5.0 * g(n - 1) + 8.0 * g(n - 2) - g(n - 3));
    }
    if let Some((i, v)) = known {
        d[i] = v;
    }
    d
}

/// Numerov integration of `Ψ'' = −Ω²(x) Ψ` across the whole grid from the
/// initial state at `ic.start`.
///
/// Propagation runs in `ic.direction` to the far end; when the start is
/// interior, the remaining part is filled by propagating the other way.
pub fn integrate(profile: &FrequencyProfile, ic: &InitialConditions) -> Result<Trajectory, IntegrationError> {
    let grid = *profile.grid();
    let n = grid.len();
    if ic.start >= n {
        return Err(IntegrationError::StartOutOfRange { index: ic.start, len: n });
    }
    if ic.psi0 == 0.0 && ic.dpsi0 == 0.0 {
        return Err(IntegrationError::TrivialInitialConditions);
    }
    let h = grid.step();
    let w = profile.omega_sq();
    let mut psi = vec![0.0; n];
    let (far, near) = match ic.direction {
        Direction::LeftToRight => (n - 1, 0),
        Direction::RightToLeft => (0, n - 1),
    };
    let main = numerov_run(w, h, ic.start, far, ic.psi0, ic.dpsi0)?;
    let mut exponent = main.exponent;
    let place = |psi: &mut Vec<f64>, run: &Run, forward: bool| {
        for (k, v) in run.psi.iter().enumerate() {
            let i = if forward { ic.start + k } else { ic.start - k };
            psi[i] = *v;
        }
    };
    place(&mut psi, &main, far >= ic.start);
    if ic.start != near {
        let back = numerov_run(w, h, ic.start, near, ic.psi0, ic.dpsi0)?;
        // Bring both halves to a common scale.
        let (ea, eb) = (main.exponent, back.exponent);
        let e = ea.max(eb);
        let fa = 2f64.powi(ea - e);
        let fb = 2f64.powi(eb - e);
        let mut back_scaled = back;
        back_scaled.psi.iter_mut().for_each(|v| *v *= fb);
        place(&mut psi, &back_scaled, near >= ic.start);
        if fa != 1.0 {
            let far_range: Box<dyn Iterator<Item = usize>> = if far >= ic.start {
                Box::new(ic.start + 1..=far)
            } else {
                Box::new(far..ic.start)
            };
            for i in far_range {
                psi[i] *= fa;
            }
        }
        exponent = e;
    }
    let dpsi0_scaled = ic.dpsi0 * 2f64.powi(-exponent);
    let dpsi = reconstruct_derivative(&psi, w, h, Some((ic.start, dpsi0_scaled)));
    let mut t = Trajectory::new(grid, psi, dpsi, Provenance::Integrated { direction: ic.direction })?;
    t.rescale_exponent = exponent;
    Ok(t)
}

/// Classical fourth-order Runge–Kutta for `Ψ'' = −Ω²(x) Ψ` with `Ω²` given
/// as a function, for profiles that are not tabulated on the grid.
pub fn integrate_rk4(
    omega_sq: impl Fn(f64) -> f64,
    grid: &Grid,
    ic: &InitialConditions,
) -> Result<Trajectory, IntegrationError> {
    let n = grid.len();
    if ic.start >= n {
        return Err(IntegrationError::StartOutOfRange { index: ic.start, len: n });
    }
    if ic.psi0 == 0.0 && ic.dpsi0 == 0.0 {
        return Err(IntegrationError::TrivialInitialConditions);
    }
    let mut psi = vec![0.0; n];
    let mut dpsi = vec![0.0; n];
    psi[ic.start] = ic.psi0;
    dpsi[ic.start] = ic.dpsi0;
    let rh = |x: f64, y: f64, v: f64| (v, -omega_sq(x) * y);
    let mut sweep = |forward: bool| -> Result<(), IntegrationError> {
        let h = if forward { grid.step() } else { -grid.step() };
        let mut i = ic.start;
        loop {
            let next = if forward {
                if i + 1 >= n {
                    break;
                }
                i + 1
            } else {
                if i == 0 {
                    break;
                }
                i - 1
            };
            let (x, y, v) = (grid.x(i), psi[i], dpsi[i]);
            let k1 = rh(x, y, v);
            let k2 = rh(x + h / 2.0, y + h / 2.0 * k1.0, v + h / 2.0 * k1.1);
            let k3 = rh(x + h / 2.0, y + h / 2.0 * k2.0, v + h / 2.0 * k2.1);
            let k4 = rh(x + h, y + h * k3.0, v + h * k3.1);
            psi[next] = y + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            dpsi[next] = v + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            if !psi[next].is_finite() || !dpsi[next].is_finite() {
                return Err(IntegrationError::NonFinite { index: next });
            }
            i = next;
        }
        Ok(())
    };
    sweep(true)?;
    sweep(false)?;
    Trajectory::new(*grid, psi, dpsi, Provenance::Integrated { direction: ic.direction })
}

/// Five-point centred second derivative at interior index `i` (2 ≤ i ≤ n−3).
pub(crate) fn second_derivative_5pt(psi: &[f64], i: usize, h: f64) -> f64 {
    (-psi[i - 2] + 16.0 * psi[i - 1] - 30.0 * psi[i] + 16.0 * psi[i + 1] - psi[i + 2]) / (12.0 * h * h)
}

/// `max_i |Ψ''_fd + Ω²Ψ| / max|Ψ|` over points where the 5-point stencil fits.
pub fn residual(traj: &Trajectory, profile: &FrequencyProfile) -> Result<f64, IntegrationError> {
    if traj.grid() != profile.grid() {
        return Err(IntegrationError::GridMismatch);
    }
    let n = traj.grid().len();
    if n < 5 {
        return Err(IntegrationError::TooFewPoints { need: 5, found: n });
    }
    let scale = traj.max_abs();
    if scale == 0.0 {
        return Err(IntegrationError::ZeroTrajectory);
    }
    let h = traj.grid().step();
    let psi = traj.psi();
    let w = profile.omega_sq();
    let worst = (2..n - 2)
        .map(|i| (second_derivative_5pt(psi, i, h) + w[i] * psi[i]).abs())
        .fold(0.0f64, f64::max);
    Ok(worst / scale)
}

/// `W_i = ψ₁ψ₂' − ψ₂ψ₁'` at every grid point, in the stored scale of each
/// trajectory.
pub fn wronskian(t1: &Trajectory, t2: &Trajectory) -> Result<Vec<f64>, IntegrationError> {
    if t1.grid() != t2.grid() {
        return Err(IntegrationError::GridMismatch);
    }
    Ok(t1
        .psi()
        .iter()
        .zip(t1.dpsi())
        .zip(t2.psi().iter().zip(t2.dpsi()))
        .map(|((p1, d1), (p2, d2))| p1 * d2 - p2 * d1)
        .collect())
}

/// `|ψ(end)| / max|ψ|` over the classically allowed region, measuring how far
/// a single-direction trajectory has run away at its terminal end.
pub fn boundary_growth(traj: &Trajectory, profile: &FrequencyProfile) -> f64 {
    let n = traj.grid().len();
    let end = match traj.provenance() {
        Provenance::Integrated { direction: Direction::RightToLeft } => 0,
        _ => n - 1,
    };
    let allowed = profile.omega_sq().iter().zip(traj.psi()).filter(|(w, _)| **w > 0.0);
    let mut interior = allowed.fold(0.0f64, |m, (_, p)| m.max(p.abs()));
    if interior == 0.0 {
        interior = traj
            .psi()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != end)
            .fold(0.0f64, |m, (_, p)| m.max(p.abs()));
    }
    traj.psi()[end].abs() / interior
}
