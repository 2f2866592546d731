//! Classical shadows of a time-crystal trajectory, the shadow-kernel Gram
//! matrix and its leading principal component. Even and odd steps fall into
//! two well separated groups along PC1.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use floquet_discovery::circuits::{dtc_unitary, DtcParams};
use floquet_discovery::kernel::{center_gram, gram_matrix, leading_components, KernelHyper};
use floquet_discovery::seeding::stream;
use floquet_discovery::shadows::{shadow_set, MeasurementFrame};
use floquet_discovery::statevector::State;

fn main() -> floquet_discovery::Result<()> {
    let n = 5;
    let p = DtcParams::uniform(n, FRAC_PI_4, FRAC_PI_2 - 0.05, [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]);
    let u = dtc_unitary(&p)?;
    let frame = MeasurementFrame::default();
    let mut rng = stream(7, &[]);

    let mut s = State::basis_state(n, 0b01101)?;
    let mut sets = Vec::new();
    for _ in 0..16 {
        u.apply_mut(&mut s)?;
        sets.push(shadow_set(&s, 300, &frame, &mut rng)?);
    }

    let k = gram_matrix(&sets, &KernelHyper::default())?;
    let kc = center_gram(&k);
    let pcs = leading_components(&kc, 2)?;
    println!("leading eigenvalues: {:.3?}", pcs.eigenvalues);
    println!(" t     PC1      PC2");
    for (t, c) in pcs.coords.iter().enumerate() {
        println!("{:2} {:8.3} {:8.3}", t + 1, c[0], c[1]);
    }
    Ok(())
}
