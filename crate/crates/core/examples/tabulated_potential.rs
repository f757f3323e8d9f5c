//! Potential read from a CSV table (here a sampled Pöschl–Teller well) and
//! compared with the analytic form. With λ = 3 the bound levels are
//! −(3−n)²/2 for n = 0, 1, 2.

use oscillator_spectra::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let constants = PhysicalConstants::default();
    let exact = PotentialSpec::poschl_teller(3.0)?;

    let mut table = String::from("x,V\n");
    for k in 0..=800 {
        let x = -20.0 + 0.05 * k as f64;
        table += &format!("{x},{}\n", evaluate_potential(&exact, &constants, x)?);
    }
    let tabulated = TabulatedPotential::from_csv_reader(table.as_bytes(), Interpolation::Cubic)?;

    let grid = Grid::new(-20.0, 20.0, 40001)?;
    for (name, spec) in [("analytic", exact), ("tabulated", PotentialSpec::Tabulated(tabulated))] {
        let problem = Problem::new(constants, spec, grid, Convention::Faithful)?;
        let levels: Vec<String> = solve_spectrum(3, &problem)?.iter().map(|p| format!("{:+.8}", p.energy)).collect();
        println!("{name:>10}: {}", levels.join("  "));
    }
    Ok(())
}
