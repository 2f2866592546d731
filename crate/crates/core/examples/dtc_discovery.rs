//! A small optimization campaign: starting from random kicked-Ising
//! parameters, Nelder-Mead climbs the classifiability interest. The printed
//! offsets measure distance from the time-crystal point (fields at π/2,
//! Ising axis orthogonal to the field axis, J at π/4).

use std::f64::consts::FRAC_PI_2;

use floquet_discovery::campaign::{run_dtc_optimize, DtcOptimizeSpec};
use floquet_discovery::interest::DtcInterestConfig;
use floquet_discovery::optimizer::NmConfig;

fn main() -> floquet_discovery::Result<()> {
    let spec = DtcOptimizeSpec {
        n: 4,
        runs: 2,
        shared_j: true,
        interest: DtcInterestConfig {
            n_init: 6,
            t1: 4,
            window: 12,
            n_shadows: 80,
            ..DtcInterestConfig::default()
        },
        optimizer: NmConfig {
            initial_step: FRAC_PI_2,
            max_iters: 120,
            ..NmConfig::default()
        },
    };
    let out = run_dtc_optimize(&spec, 17)?;
    for r in &out.records {
        println!(
            "run {}: f {:.2} -> {:.2}  |s.m| {:.2}  J offset {:.2}  median h offset {:.2}",
            r.run, r.initial_f, r.final_f, r.s_dot_m, r.j_offset, r.h_median_offset
        );
    }
    Ok(())
}
