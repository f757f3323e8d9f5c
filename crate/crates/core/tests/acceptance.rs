//! Acceptance criteria 1-7. Prints one PASS/FAIL line per criterion.

use std::time::Instant;

use oscillator_spectra::cli;
use oscillator_spectra::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn unit() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn harmonic_problem(x: f64, points: usize) -> Problem {
    Problem::new(unit(), PotentialSpec::harmonic(1.0).unwrap(), Grid::new(-x, x, points).unwrap(), Convention::Faithful)
        .unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn harmonic_spectrum() -> Outcome {
    let problem = harmonic_problem(12.0, 24001);
    let start = Instant::now();
    let levels = solve_spectrum(10, &problem).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let worst = levels.iter().map(|p| (p.energy - (p.n as f64 + 0.5)).abs()).fold(0.0f64, f64::max);
    check(worst <= 1e-8 && elapsed < 10.0, format!("max |E_n - (n+1/2)| = {worst:.2e}, {elapsed:.2} s"))
}

fn reverse_direction() -> Outcome {
    let grid = Grid::new(-12.0, 12.0, 24001).unwrap();
    let mut worst = 0.0f64;
    for n in 0..=5 {
        let r = verify_reverse_direction(n, &unit(), 1.0, &grid).map_err(|e| e.to_string())?;
        worst = worst.max(r.residual_faithful);
    }
    let paper = verify_reverse_direction(0, &unit(), 1.0, &grid).map_err(|e| e.to_string())?.residual_paper;

    // The verify report carries both columns.
    let mut out = Vec::new();
    let code = cli::run(["oscspec", "verify", "--omega0", "1"], &mut out, &mut Vec::new());
    let report = String::from_utf8_lossy(&out);
    let header_ok = report.lines().next().is_some_and(|h| h.contains("residual_faithful") && h.contains("residual_paper"));
    check(
        worst <= 1e-5 && paper >= 0.1 && code == 0 && header_ok,
        format!("faithful max residual {worst:.2e}, paper residual at n=0 {paper:.3}, verify exit {code}"),
    )
}

fn normalization() -> Outcome {
    let levels = solve_spectrum(10, &harmonic_problem(12.0, 24001)).map_err(|e| e.to_string())?;
    let norm_dev = levels.iter().map(|p| (norm(&p.trajectory).value - 1.0).abs()).fold(0.0f64, f64::max);
    let mut cross = 0.0f64;
    for (i, a) in levels.iter().enumerate() {
        for b in &levels[i + 1..] {
            cross = cross.max(overlap(&a.trajectory, &b.trajectory).map_err(|e| e.to_string())?.abs());
        }
    }
    check(norm_dev <= 1e-8 && cross <= 1e-6, format!("max |N-1| = {norm_dev:.2e}, max overlap = {cross:.2e}"))
}

fn square_integrability() -> Outcome {
    let problem = harmonic_problem(12.0, 24001);
    let mut weakest = f64::INFINITY;
    for n in 0..9 {
        let e = n as f64 + 1.0;
        let (traj, profile) = single_direction_trajectory(e, &problem).map_err(|e| e.to_string())?;
        weakest = weakest.min(boundary_growth(&traj, &profile));
    }
    check(weakest >= 1e3, format!("smallest boundary growth between levels {weakest:.2e}"))
}

fn variational() -> Outcome {
    let spec = PotentialSpec::harmonic(1.0).unwrap();
    let c = unit();
    let grid = Grid::new(-12.0, 12.0, 24001).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(20261015);
    let mut lowest = f64::INFINITY;
    for _ in 0..100 {
        let a: f64 = rng.gen_range(0.2..4.0);
        let x0: f64 = rng.gen_range(-1.5..1.5);
        let coeffs: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = Trajectory::from_fn(grid, "trial", |x| {
            let u = x - x0;
            let g = (-0.5 * a * u * u).exp();
            let (mut p, mut dp, mut pow, mut dpow) = (0.0, 0.0, 1.0, 0.0);
            for (k, ck) in coeffs.iter().enumerate() {
                p += ck * pow;
                dp += ck * dpow;
                dpow = (k + 1) as f64 * pow;
                pow *= u;
            }
            let p = p + 1.5;
            (g * p, g * (dp - a * u * p))
        })
        .map_err(|e| e.to_string())?;
        lowest = lowest.min(rayleigh_quotient(&t, &spec, &c).map_err(|e| e.to_string())?.value);
    }

    let mut gauss = 0.0f64;
    for a in [0.5, 1.0, 4.0] {
        let t = Trajectory::from_fn(grid, "gaussian", |x| {
            let g = (-0.5 * a * x * x).exp();
            (g, -a * x * g)
        })
        .map_err(|e| e.to_string())?;
        let e = rayleigh_quotient(&t, &spec, &c).map_err(|e| e.to_string())?.value;
        gauss = gauss.max((e - (a / 4.0 + 1.0 / (4.0 * a))).abs());
    }

    // Gradient of the discrete functional against central differences.
    let small = Grid::new(-6.0, 6.0, 241).unwrap();
    let trial = Trajectory::from_fn(small, "trial", |x| ((-0.6 * x * x).exp() * (1.0 + 0.4 * x), 0.0))
        .map_err(|e| e.to_string())?;
    let g = functional_gradient(&trial, &spec, &c).map_err(|e| e.to_string())?;
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut fd_dev = 0.0f64;
    for i in 1..small.len() - 1 {
        let step = 1e-5;
        let bump = |d: f64| {
            let mut p = trial.psi().to_vec();
            p[i] += d;
            let t = Trajectory::new(small, p, trial.dpsi().to_vec(), trial.provenance().clone()).unwrap();
            discrete_energy(&t, &spec, &c).unwrap()
        };
        let fd = (bump(step) - bump(-step)) / (2.0 * step);
        fd_dev = fd_dev.max((fd - g[i]).abs() / (g[i].abs() + 1e-3 * scale));
    }

    let levels = solve_spectrum(4, &harmonic_problem(12.0, 24001)).map_err(|e| e.to_string())?;
    let mut stationary = 0.0f64;
    for p in &levels {
        let g = functional_gradient(&p.trajectory, &spec, &c).map_err(|e| e.to_string())?;
        stationary = stationary.max(g.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }

    check(
        lowest >= 0.5 - 1e-9 && gauss <= 1e-6 && fd_dev <= 1e-5 && stationary <= 1e-6,
        format!(
            "min Rayleigh {lowest:.10}, Gaussian dev {gauss:.1e}, gradient vs FD {fd_dev:.1e}, gradient at eigenpairs {stationary:.1e}"
        ),
    )
}

fn infinite_well() -> Outcome {
    let width = std::f64::consts::PI;
    let problem = Problem::new(
        unit(),
        PotentialSpec::infinite_well(width).unwrap(),
        Grid::new(0.0, width, 24001).unwrap(),
        Convention::Faithful,
    )
    .map_err(|e| e.to_string())?;
    let levels = solve_spectrum(4, &problem).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (p, expected) in levels.iter().zip([0.5, 2.0, 4.5, 8.0]) {
        let (oracle, _) = infinite_well_level(p.n, &unit(), width, problem.grid()).map_err(|e| e.to_string())?;
        worst = worst.max((p.energy - oracle).abs()).max((oracle - expected).abs());
    }
    check(worst <= 1e-8, format!("max deviation from oracle {worst:.2e}"))
}

fn numerical_integrity() -> Outcome {
    // Two independent solutions at a non-eigen energy.
    let grid = Grid::new(-4.0, 4.0, 8001).unwrap();
    let profile = frequency_profile(&unit(), &PotentialSpec::harmonic(1.0).unwrap(), 3.3, &grid, Convention::Faithful)
        .map_err(|e| e.to_string())?;
    let mid = grid.len() / 2;
    let a = integrate(&profile, &InitialConditions::new(mid, 1.0, 0.0, Direction::LeftToRight).unwrap())
        .map_err(|e| e.to_string())?;
    let b = integrate(&profile, &InitialConditions::new(mid, 0.0, 1.0, Direction::LeftToRight).unwrap())
        .map_err(|e| e.to_string())?;
    let w = wronskian(&a, &b).map_err(|e| e.to_string())?;
    let drift = w.iter().map(|v| (v - w[mid]).abs()).fold(0.0f64, f64::max) / w[mid].abs();

    // Eigenvalue error under grid halving.
    let errors: Vec<f64> = [81, 161, 321]
        .iter()
        .map(|&points| {
            let p = harmonic_problem(8.0, points);
            find_eigenvalue(3, &p).map(|e| (e.energy - 3.5).abs()).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let ok = drift <= 1e-7 && orders.iter().all(|p| (3.5..=4.5).contains(p));
    check(ok, format!("Wronskian drift {drift:.1e}, errors {errors:?}, orders {orders:.2?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 harmonic spectrum", harmonic_spectrum),
        ("2 reverse direction", reverse_direction),
        ("3 normalization", normalization),
        ("4 square integrability", square_integrability),
        ("5 variational layer", variational),
        ("6 infinite well oracle", infinite_well),
        ("7 numerical integrity", numerical_integrity),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                println!("criterion {name}: FAIL ({detail})");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
