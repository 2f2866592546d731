//! A Mexican-hat potential on |z_t|, its target radii, and the eigenphase
//! harmonics of a circuit compared against those targets.

use std::f64::consts::PI;

use floquet_discovery::circuits::brickwork_unitary;
use floquet_discovery::interest::{mexican_hat_target, modulated_density, phase_harmonics, spectral_interest_single, PotentialSpec};
use floquet_discovery::spectral::{eigenphases, trace_series, BrickworkTemplate};

fn main() -> floquet_discovery::Result<()> {
    let pot = PotentialSpec::mexican_hat(&[0.3, 0.1], 1.0)?;
    let targets = mexican_hat_target(&pot)?;
    println!("target radii c_l: {targets:?}");

    let c = brickwork_unitary(&BrickworkTemplate { n: 6, j_xyz: [0.8 * PI, 0.5 * PI, 0.1 * PI] }.realization(1, 0))?;
    let f = spectral_interest_single(&trace_series(&c, 2)?, &pot)?;
    println!("interest of one circuit: {:.5}", f.value);

    let phases = eigenphases(&c)?;
    let h = phase_harmonics(&phases, 2);
    println!("eigenphase harmonics: {h:.4?}");
    for k in 0..8 {
        let theta = -PI + k as f64 * PI / 4.0;
        println!("rho({theta:+.2}) target {:.2}", modulated_density(theta, phases.len(), &targets));
    }
    Ok(())
}
