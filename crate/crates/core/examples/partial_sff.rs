//! Partial spectral form factor of a subsystem: exact partial traces and the
//! randomized-measurement estimator on the same circuit.

use std::f64::consts::PI;

use floquet_discovery::seeding::stream;
use floquet_discovery::spectral::{psff_exact, psff_sampled, BrickworkTemplate, Subsystem};
use floquet_discovery::circuits::brickwork_unitary;

fn main() -> floquet_discovery::Result<()> {
    let n = 8;
    let a = Subsystem::contiguous(n, 3)?;
    let plateau = 1.0 / (a.dim_a() * a.dim_a()) as f64;
    for (label, j) in [("dual-unitary", [PI, PI, PI / 10.0]), ("generic", [0.6 * PI, 0.8 * PI, PI / 10.0])] {
        let c = brickwork_unitary(&BrickworkTemplate { n, j_xyz: j }.realization(5, 0))?;
        let exact = psff_exact(&c, 4, &a)?;
        println!("{label} (1/D_A² = {plateau:.5})");
        for (t, v) in exact.iter().enumerate() {
            let est = psff_sampled(&c, t + 1, &a, 4000, &mut stream(9, &[t as u64]))?;
            println!("  t={}  exact {v:.5}  sampled {est:.5}", t + 1);
        }
    }
    Ok(())
}
