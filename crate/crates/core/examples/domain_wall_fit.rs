//! Diagonal cut Jx = Jy towards the dual-unitary point with a domain-wall
//! tension fit at each point; the tension shrinks to zero at Jx = π.

use std::f64::consts::PI;

use floquet_discovery::campaign::{run_sff_cut, SffCutSpec};

fn main() -> floquet_discovery::Result<()> {
    let spec = SffCutSpec {
        ns: vec![6],
        j_values: vec![0.6 * PI, 0.75 * PI, 0.9 * PI, PI],
        n_real: 200,
        t_max: 12,
        ..SffCutSpec::default()
    };
    for p in run_sff_cut(&spec, 3)? {
        let fit = p.fit.expect("fit requested");
        println!(
            "J = {:.2}π  f = {:+.5} ± {:.5}  tension {:.3}{}",
            p.j / PI,
            p.f,
            p.stderr,
            fit.tension,
            if fit.at_zero { " (boundary)" } else { "" }
        );
    }
    Ok(())
}
