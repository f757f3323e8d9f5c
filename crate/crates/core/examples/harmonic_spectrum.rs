//! Lowest ten harmonic levels by shooting, compared with (n + 1/2)ħω₀.

use oscillator_spectra::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let constants = PhysicalConstants::default();
    let problem = Problem::new(
        constants,
        PotentialSpec::harmonic(1.0)?,
        Grid::new(-12.0, 12.0, 24001)?,
        Convention::Faithful,
    )?;

    println!("{:>3} {:>20} {:>10} {:>6}", "n", "E", "error", "nodes");
    for pair in solve_spectrum(10, &problem)? {
        let exact = harmonic_energy(pair.n, &constants, 1.0);
        println!("{:>3} {:>20.14} {:>10.2e} {:>6}", pair.n, pair.energy, pair.energy - exact, pair.node_count);
    }

    let doc = SpectrumDocument::new(&problem, &solve_spectrum(3, &problem)?);
    println!("\n{}", doc.to_json());
    Ok(())
}
