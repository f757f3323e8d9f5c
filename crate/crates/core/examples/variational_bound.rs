//! Rayleigh quotient of the Gaussian family e^{−ax²/2}: E(a) = a/4 + 1/(4a),
//! minimized at a = 1 where the gradient of the discrete functional vanishes.

use oscillator_spectra::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let constants = PhysicalConstants::default();
    let spec = PotentialSpec::harmonic(1.0)?;
    let grid = Grid::new(-12.0, 12.0, 4801)?;

    println!("{:>6} {:>14} {:>14} {:>12}", "a", "E[psi]", "a/4+1/4a", "|grad|");
    for a in [0.25, 0.5, 0.8, 1.0, 1.25, 2.0, 4.0] {
        let t = Trajectory::from_fn(grid, "gaussian", |x| {
            let g = (-0.5 * a * x * x).exp();
            (g, -a * x * g)
        })?;
        let t = normalize(&t)?;
        let e = rayleigh_quotient(&t, &spec, &constants)?;
        let grad = functional_gradient(&t, &spec, &constants)?;
        let sup = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        println!("{a:>6.2} {:>14.10} {:>14.10} {sup:>12.3e}", e.value, a / 4.0 + 1.0 / (4.0 * a));
    }

    let t = Trajectory::from_fn(grid, "ground", |x| ((-0.5 * x * x).exp(), -x * (-0.5 * x * x).exp()))?;
    let report = constraint_report(&normalize(&t)?, &spec, &constants)?;
    println!("\nground state: phi={:.2e} lambda={:.6} stationarity={:.2e}", report.phi, report.multiplier, report.stationarity_residual);
    Ok(())
}
