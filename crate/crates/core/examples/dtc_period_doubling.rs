//! Period doubling of the kicked Ising chain: in the time-crystal regime the
//! staggered magnetization flips every period, in the trivial regime it
//! decays.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use floquet_discovery::circuits::{dtc_unitary, DtcParams};
use floquet_discovery::interest::disorder_realization;
use floquet_discovery::seeding::stream;
use floquet_discovery::statevector::State;

fn z_profile(s: &State) -> Vec<f64> {
    (0..s.n())
        .map(|site| {
            s.amps()
                .iter()
                .enumerate()
                .map(|(i, a)| if (i >> site) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
                .sum()
        })
        .collect()
}

fn main() -> floquet_discovery::Result<()> {
    let n = 6;
    let z = [0.0, 0.0, 1.0];
    let x = [1.0, 0.0, 0.0];
    let mut rng = stream(2024, &[]);
    for (label, h) in [("time crystal", FRAC_PI_2 - 0.1), ("trivial", 0.2)] {
        let p = disorder_realization(&DtcParams::uniform(n, FRAC_PI_4, h, z, x), 0.3, &mut rng);
        let u = dtc_unitary(&p)?;
        let mut s = State::basis_state(n, 0b010110)?;
        let start = z_profile(&s);
        println!("{label}: <h> = {h:.3}");
        println!("  t  autocorrelation");
        for t in 1..=12 {
            u.apply_mut(&mut s)?;
            let c: f64 = z_profile(&s).iter().zip(&start).map(|(a, b)| a * b).sum::<f64>() / n as f64;
            println!("{t:3}  {c:+.3}");
        }
    }
    Ok(())
}
