//! Matching defect across an energy range. Eigenvalues sit where the
//! mismatch crosses from + to −; the + jumps are poles where ψ_L vanishes at
//! the matching point.

use oscillator_spectra::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = Problem::new(
        PhysicalConstants::default(),
        PotentialSpec::harmonic(1.0)?,
        Grid::new(-10.0, 10.0, 10001)?,
        Convention::Faithful,
    )?;

    let sweep = sweep_mismatch(0.1, 5.0, 50, &problem)?;
    let mut prev: Option<ShootingReport> = None;
    for s in &sweep {
        let r = s.outcome.as_ref().map_err(|e| e.to_string())?;
        println!("{:>8.4} {:>+10.5} {:>3}", r.energy, r.mismatch, r.level_count);
        if let Some(p) = &prev {
            if p.mismatch > 0.0 && r.mismatch < 0.0 {
                let (lo, hi) = bracket_level(p.level_count, p.energy, r.energy, &problem)?;
                println!("         level {} in [{lo:.4}, {hi:.4}]", p.level_count);
            }
        }
        prev = Some(r.clone());
    }
    Ok(())
}
