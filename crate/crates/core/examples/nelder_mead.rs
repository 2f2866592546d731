//! Maximizing a noisy periodic objective with restarted Nelder-Mead.

use std::f64::consts::PI;

use floquet_discovery::optimizer::{maximize, NmConfig};
use floquet_discovery::seeding::stream;
use rand::{Rng, RngCore};

fn main() -> floquet_discovery::Result<()> {
    // Peak at (1.0, 2.5) on a torus of period 2π, plus evaluation noise.
    let objective = |x: &[f64], rng: &mut dyn RngCore| {
        let noise: f64 = rng.random_range(-0.02..0.02);
        (x[0] - 1.0).cos() + (x[1] - 2.5).cos() + noise
    };
    let cfg = NmConfig {
        initial_step: 0.8,
        max_iters: 200,
        periods: vec![Some(2.0 * PI); 2],
        ..NmConfig::default()
    };
    let traj = maximize(objective, &[5.0, 5.0], &cfg, &mut stream(3, &[]))?;
    println!("start value   {:.4}", traj.initial_value());
    println!("best value    {:.4} at {:.3?}", traj.best.value, traj.best.params);
    println!("evaluations   {}", traj.evaluations.len());
    println!("restarts      {}", traj.restarts);
    for (i, f) in traj.best_per_iteration.iter().enumerate().step_by(25) {
        println!("iteration {i:3}: best {f:.4}");
    }
    Ok(())
}
