//! Away from an eigenvalue the decaying seed picks up the growing solution and
//! the trajectory blows up at the far end.

use oscillator_spectra::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = Problem::new(
        PhysicalConstants::default(),
        PotentialSpec::harmonic(1.0)?,
        Grid::new(-8.0, 8.0, 8001)?,
        Convention::Faithful,
    )?;

    for energy in [0.5, 0.75, 1.0, 1.5, 2.0, 2.5] {
        let (traj, profile) = single_direction_trajectory(energy, &problem)?;
        let growth = boundary_growth(&traj, &profile);
        let action = action_value(&traj.scaled(1.0 / traj.max_abs()), &profile)?;
        println!(
            "E={energy:<5} growth={growth:>10.3e} rescale=2^{:<5} S={:+.3e}",
            traj.rescale_exponent(),
            action.value
        );
    }
    Ok(())
}
