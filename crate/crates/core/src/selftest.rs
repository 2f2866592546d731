//! Fast oracle-equivalence checks at `n ≤ 6`, run by the `selftest`
//! subcommand. Each check compares an optimized routine against a naive
//! reference computed from scratch.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circuits::{brickwork_unitary, dtc_unitary, unit_vector, BrickworkParams, Circuit, DtcParams, Gate};
use crate::error::Result;
use crate::hac::hac_ward;
use crate::kernel::{gram_matrix, site_kernel, KernelHyper};
use crate::optimizer::{maximize, NmConfig};
use crate::seeding::stream;
use crate::shadows::{shadow_set, MeasurementFrame};
use crate::spectral::{eigenphases, psff_exact, trace_series, z_from_phases, Subsystem};
use crate::statevector::{State, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation and its tolerance.
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        passed: worst <= tol,
        detail: format!("max deviation {worst:.3e} (tolerance {tol:.0e})"),
    }
}

/// Full matrix of a gate list from per-gate embeddings.
fn naive_matrix(c: &Circuit) -> DMatrix<C64> {
    let dim = c.dim();
    let mut u = DMatrix::<C64>::identity(dim, dim);
    for g in c.gates() {
        let e = DMatrix::from_fn(dim, dim, |i, j| match g {
            Gate::One(g) => {
                let m = 1 << g.site;
                if i & !m != j & !m {
                    ZERO
                } else {
                    g.matrix[(i >> g.site) & 1][(j >> g.site) & 1]
                }
            }
            Gate::Two(g) => {
                let (a, b) = g.sites;
                let m = (1 << a) | (1 << b);
                if i & !m != j & !m {
                    ZERO
                } else {
                    let li = 2 * ((i >> a) & 1) + ((i >> b) & 1);
                    let lj = 2 * ((j >> a) & 1) + ((j >> b) & 1);
                    g.matrix[li][lj]
                }
            }
        });
        u = e * u;
    }
    u
}

fn random_circuit<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<Circuit> {
    if k % 2 == 0 {
        let j = [rng.random_range(0.0..6.0), rng.random_range(0.0..6.0), rng.random_range(0.0..6.0)];
        brickwork_unitary(&BrickworkParams::haar(n, j, rng))
    } else {
        let p = DtcParams {
            j: (0..n).map(|_| rng.random_range(0.0..3.0)).collect(),
            h: (0..n).map(|_| rng.random_range(0.0..3.0)).collect(),
            s_hat: unit_vector(rng.random_range(0.0..3.0), rng.random_range(0.0..6.0)),
            m_hat: unit_vector(rng.random_range(0.0..3.0), rng.random_range(0.0..6.0)),
            shared_j: false,
        };
        dtc_unitary(&p)
    }
}

fn random_state<R: Rng>(n: usize, rng: &mut R) -> Result<State> {
    let v: Vec<C64> = (0..1 << n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    State::from_amplitudes(v.into_iter().map(|z| z / norm).collect())
}

fn circuits_check() -> Result<Vec<Check>> {
    let mut rng = stream(0x5e1f, &[1]);
    let (mut apply_err, mut trace_err, mut psff_err) = (0.0f64, 0.0f64, 0.0f64);
    for (k, n) in [2usize, 4, 6, 4, 6, 2].into_iter().enumerate() {
        let c = random_circuit(n, k, &mut rng)?;
        let u = naive_matrix(&c);
        let psi = random_state(n, &mut rng)?;
        let out = c.apply(&psi)?;
        let want = &u * DVector::from_column_slice(psi.amps());
        apply_err = apply_err.max(out.amps().iter().zip(want.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        let phases = eigenphases(&c)?;
        let series = trace_series(&c, 6)?;
        let mut power = u.clone();
        for t in 1..=6 {
            let dense = power.trace() / c.dim() as f64;
            trace_err = trace_err.max((series.z[t - 1] - dense).norm());
            trace_err = trace_err.max((z_from_phases(&phases, t) - dense).norm());
            power = &u * &power;
        }
        let full = psff_exact(&c, 4, &Subsystem::contiguous(n, n)?)?;
        for (a, b) in full.iter().zip(series.sff()) {
            psff_err = psff_err.max((a - b).abs());
        }
    }
    Ok(vec![
        check("circuit application vs dense product", apply_err, 1e-10),
        check("trace series vs dense powers and eigenphases", trace_err, 1e-9),
        check("full-subsystem pSFF vs SFF", psff_err, 1e-10),
    ])
}

fn shadows_check() -> Result<Vec<Check>> {
    let mut rng = stream(0x5e1f, &[2]);
    let frame = MeasurementFrame::default();
    let mut worst = 0.0f64;
    let psi = random_state(2, &mut rng)?;
    let set = shadow_set(&psi, 40_000, &frame, &mut rng)?;
    let a = psi.amps();
    for site in 0..2 {
        // Exact Bloch vector from the reduced density matrix.
        let (mut r00, mut r11, mut r01) = (0.0, 0.0, ZERO);
        for (i, z) in a.iter().enumerate() {
            if (i >> site) & 1 == 0 {
                r00 += z.norm_sqr();
                r01 += z * a[i | (1 << site)].conj();
            } else {
                r11 += z.norm_sqr();
            }
        }
        let exact = [2.0 * r01.re, -2.0 * r01.im, r00 - r11];
        let est = set.bloch_estimate(site);
        for d in 0..3 {
            worst = worst.max((exact[d] - est[d]).abs());
        }
    }
    Ok(vec![check("shadow Bloch reconstruction", worst, 0.03)])
}

fn kernel_check() -> Result<Vec<Check>> {
    let mut rng = stream(0x5e1f, &[3]);
    let frame = MeasurementFrame::default();
    let hp = KernelHyper::default();
    let sets = (0..5)
        .map(|_| shadow_set(&random_state(3, &mut rng)?, 12, &frame, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let g = gram_matrix(&sets, &hp)?;
    let mut worst = 0.0f64;
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            let mut acc = 0.0;
            for ra in a.rows() {
                for rb in b.rows() {
                    let mut s = 0.0;
                    for (x, y) in ra.iter().zip(rb) {
                        s += site_kernel(*x, &frame, *y, &frame)?;
                    }
                    acc += (hp.gamma / 3.0 * s).exp();
                }
            }
            let naive = (hp.tau * acc / (a.len() * b.len()) as f64).exp();
            worst = worst.max(((g.values[(i, j)] - naive) / naive).abs());
        }
    }

    let points: Vec<Vec<f64>> = (0..12).map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).collect();
    let tree = hac_ward(&points)?;
    // Ward distance from centroids of the final two clusters.
    let (a, b) = tree.final_split();
    let centroid = |ids: &[usize]| -> Vec<f64> {
        (0..2).map(|d| ids.iter().map(|&i| points[i][d]).sum::<f64>() / ids.len() as f64).collect()
    };
    let (ca, cb) = (centroid(&a), centroid(&b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let gap = ca.iter().zip(&cb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let ward = (2.0 * na * nb / (na + nb)).sqrt() * gap;
    Ok(vec![
        check("Gram matrix vs pairwise sum", worst, 1e-12),
        check("final Ward distance vs centroid formula", (tree.last().distance - ward).abs(), 1e-9),
    ])
}

fn optimizer_check() -> Result<Vec<Check>> {
    let cfg = NmConfig {
        max_iters: 300,
        ..NmConfig::default()
    };
    let traj = maximize(
        |x: &[f64], _: &mut dyn rand::RngCore| -(x[0] - 1.0).powi(2) - (x[1] + 2.0).powi(2),
        &[4.0, 3.0],
        &cfg,
        &mut stream(0x5e1f, &[4]),
    )?;
    let p = &traj.best.params;
    let err = ((p[0] - 1.0).powi(2) + (p[1] + 2.0).powi(2)).sqrt();
    Ok(vec![check("Nelder-Mead on a quadratic", err, 1e-3)])
}

/// Runs every check; errors inside a check are reported as failures.
pub fn run_selftest() -> Vec<Check> {
    let groups: [(&'static str, fn() -> Result<Vec<Check>>); 4] = [
        ("circuits", circuits_check),
        ("shadows", shadows_check),
        ("kernel and clustering", kernel_check),
        ("optimizer", optimizer_check),
    ];
    groups
        .into_iter()
        .flat_map(|(name, f)| match f() {
            Ok(checks) => checks,
            Err(e) => vec![Check {
                name,
                passed: false,
                detail: e.to_string(),
            }],
        })
        .collect()
}
