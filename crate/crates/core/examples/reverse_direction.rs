//! Run the correspondence backwards: each Hermite eigenfunction is an exact
//! trajectory of the oscillator with Ω²(x) = (2m/ħ²)(E_n − ½mω₀²x²).
//! The alternative m/ħ² coupling misses by a finite residual.

use oscillator_spectra::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let constants = PhysicalConstants::default();
    let grid = Grid::new(-12.0, 12.0, 24001)?;

    println!("{:>3} {:>6} {:>14} {:>14} {:>10}", "n", "E", "faithful", "paper", "turning");
    for n in 0..=5 {
        let r = verify_reverse_direction(n, &constants, 1.0, &grid)?;
        println!(
            "{:>3} {:>6.2} {:>14.3e} {:>14.3e} {:>10.4}",
            n, r.energy, r.residual_faithful, r.residual_paper, r.turning_points.1
        );
    }

    // The same check by hand for n = 2: integrate the oscillator from the
    // closed-form values at the left edge and compare.
    let exact = hermite_eigenfunction(2, &constants, 1.0, &grid)?;
    let profile = oscillator_frequency_for_level(2, &constants, 1.0, &grid, Convention::Faithful);
    let start = grid.len() / 2;
    let ic = InitialConditions::new(start, exact.psi()[start], exact.dpsi()[start], Direction::LeftToRight)?;
    let traj = integrate(&profile, &ic)?;
    let near = |x: f64| ((x - grid.x_min()) / grid.step()).round() as usize;
    let dev = (near(-4.0)..=near(4.0))
        .map(|i| (traj.psi()[i] - exact.psi()[i]).abs())
        .fold(0.0f64, f64::max);
    println!("\nn=2 trajectory from x=0, max deviation on [-4, 4]: {dev:.2e}");
    Ok(())
}
