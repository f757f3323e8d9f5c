//! Infinite square well of width π against its sine oracle.

use std::f64::consts::PI;

use oscillator_spectra::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let constants = PhysicalConstants::default();
    let grid = Grid::new(0.0, PI, 24001)?;
    let problem = Problem::new(constants, PotentialSpec::infinite_well(PI)?, grid, Convention::Faithful)?;

    for pair in solve_spectrum(4, &problem)? {
        let (exact, shape) = infinite_well_level(pair.n, &constants, PI, &grid)?;
        let overlap = overlap(&pair.trajectory, &shape)?.abs();
        println!("n={} E={:.12} oracle={:.12} |<num|exact>|={:.12}", pair.n, pair.energy, exact, overlap);
    }
    Ok(())
}
