mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;

use common::*;
use floquet_discovery::circuits::{dtc_unitary, haar_1q, xyz_gate, DtcParams};
use floquet_discovery::hac::{classifiability, hac_ward, ClassifiabilityMode};
use floquet_discovery::kernel::{center_gram, gram_matrix, KernelHyper};
use floquet_discovery::optimizer::{maximize, NmConfig};
use floquet_discovery::seeding::stream;
use floquet_discovery::shadows::{shadow_set, MeasurementFrame};
use floquet_discovery::spectral::{psff_exact, trace_series, Subsystem};
use floquet_discovery::statevector::{Gate1Q, Gate2Q, State};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 32,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn points(seed: u64, t: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = stream(seed, &[]);
    (0..t).map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn norm_is_preserved(seed in any::<u64>(), half in 1usize..4, periods in 1usize..6, brick in any::<bool>()) {
        let mut rng = stream(seed, &[]);
        let n = 2 * half + (!brick as usize);
        let c = if brick { random_brickwork(n, &mut rng) } else { random_dtc(n, &mut rng) };
        let mut s = random_state(n, &mut rng);
        for _ in 0..periods {
            s = c.apply(&s).unwrap();
        }
        prop_assert!((s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn application_is_linear(seed in any::<u64>(), n in 2usize..7, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut rng = stream(seed, &[]);
        let c = random_dtc(n, &mut rng);
        let (x, y) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let (a, b) = (C64::new(a, 0.5), C64::new(-0.3, b));
        let raw: Vec<C64> = x.amps().iter().zip(y.amps()).map(|(p, q)| a * p + b * q).collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        let mixed = State::from_amplitudes(raw.iter().map(|z| z / norm).collect()).unwrap();
        let (ux, uy, um) = (c.apply(&x).unwrap(), c.apply(&y).unwrap(), c.apply(&mixed).unwrap());
        let want: Vec<C64> = ux.amps().iter().zip(uy.amps()).map(|(p, q)| (a * p + b * q) / norm).collect();
        prop_assert!(max_abs_diff(um.amps(), &want) < 1e-10);
    }

    #[test]
    fn gates_on_disjoint_sites_commute(seed in any::<u64>(), n in 4usize..8, j in prop::array::uniform3(0.0f64..6.3)) {
        let mut rng = stream(seed, &[]);
        let s = random_state(n, &mut rng);
        let g1 = Gate1Q::new(haar_1q(&mut rng), 0);
        let g2 = Gate2Q::new(xyz_gate(j), 1, 2).unwrap();
        let g3 = Gate2Q::new(xyz_gate([j[1], j[2], j[0]]), 3, n - 1).unwrap_or_else(|_| Gate2Q::new(xyz_gate(j), 3, 0).unwrap());
        let g3_disjoint = n > 4;
        let ab = s.apply_1q(&g1).unwrap().apply_2q(&g2).unwrap();
        let ba = s.apply_2q(&g2).unwrap().apply_1q(&g1).unwrap();
        prop_assert!(max_abs_diff(ab.amps(), ba.amps()) < 1e-12);
        if g3_disjoint {
            let ac = ab.apply_2q(&g3).unwrap();
            let ca = s.apply_2q(&g3).unwrap().apply_1q(&g1).unwrap().apply_2q(&g2).unwrap();
            prop_assert!(max_abs_diff(ac.amps(), ca.amps()) < 1e-12);
        }
    }

    #[test]
    fn gram_is_symmetric_and_centering_zeroes_row_sums(seed in any::<u64>(), n in 1usize..5, t in 2usize..7) {
        let mut rng = stream(seed, &[]);
        let sets: Vec<_> = (0..t)
            .map(|_| shadow_set(&random_state(n, &mut rng), 6, &MeasurementFrame::default(), &mut rng).unwrap())
            .collect();
        let g = gram_matrix(&sets, &KernelHyper::default()).unwrap();
        prop_assert!((&g.values - g.values.transpose()).amax() == 0.0);
        let kc = center_gram(&g);
        let scale = g.values.amax();
        for i in 0..t {
            prop_assert!(kc.values.row(i).sum().abs() < 1e-12 * scale * t as f64);
            prop_assert!(kc.values.column(i).sum().abs() < 1e-12 * scale * t as f64);
        }
    }

    #[test]
    fn ward_scales_and_ignores_translation(seed in any::<u64>(), t in 2usize..15, c in 0.1f64..10.0, shift in -5.0f64..5.0) {
        let p = points(seed, t, 3);
        let base = hac_ward(&p).unwrap();
        let scaled = hac_ward(&p.iter().map(|x| x.iter().map(|v| v * c).collect()).collect::<Vec<_>>()).unwrap();
        let moved = hac_ward(&p.iter().map(|x| x.iter().map(|v| v + shift).collect()).collect::<Vec<_>>()).unwrap();
        for ((b, s), m) in base.merges.iter().zip(&scaled.merges).zip(&moved.merges) {
            prop_assert!((s.distance - c * b.distance).abs() < 1e-9 * (1.0 + c * b.distance));
            prop_assert!((m.distance - b.distance).abs() < 1e-9 * (1.0 + b.distance));
        }
    }

    #[test]
    fn ward_final_distance_ignores_order(seed in any::<u64>(), t in 2usize..15, rot in 0usize..14) {
        let p = points(seed, t, 2);
        let mut q = p.clone();
        q.rotate_left(rot % t);
        q.reverse();
        let (a, b) = (hac_ward(&p).unwrap(), hac_ward(&q).unwrap());
        let mut da: Vec<f64> = a.merges.iter().map(|m| m.distance).collect();
        let mut db: Vec<f64> = b.merges.iter().map(|m| m.distance).collect();
        da.sort_by(f64::total_cmp);
        db.sort_by(f64::total_cmp);
        for (x, y) in da.iter().zip(&db) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn balanced_never_exceeds_raw(seed in any::<u64>(), t in 2usize..20) {
        let tree = hac_ward(&points(seed, t, 2)).unwrap();
        prop_assert!(classifiability(&tree, ClassifiabilityMode::Balanced) <= classifiability(&tree, ClassifiabilityMode::Raw));
    }

    #[test]
    fn sff_has_period_pi_in_couplings_and_fields(seed in any::<u64>(), n in 2usize..6, site in 0usize..6, field in any::<bool>()) {
        let mut rng = stream(seed, &[]);
        let p = DtcParams {
            j: (0..n).map(|_| rng.random_range(0.0..3.2)).collect(),
            h: (0..n).map(|_| rng.random_range(0.0..3.2)).collect(),
            s_hat: [0.0, 0.6, 0.8],
            m_hat: [1.0, 0.0, 0.0],
            shared_j: false,
        };
        let mut q = p.clone();
        let k = site % n;
        if field { q.h[k] += std::f64::consts::PI } else { q.j[k] += std::f64::consts::PI }
        let (a, b) = (
            trace_series(&dtc_unitary(&p).unwrap(), 5).unwrap().sff(),
            trace_series(&dtc_unitary(&q).unwrap(), 5).unwrap().sff(),
        );
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn optimizer_evaluates_wrapped_points(seed in any::<u64>(), p0 in 0.5f64..4.0, p1 in 0.5f64..4.0) {
        let cfg = NmConfig {
            max_iters: 40,
            initial_step: 3.0,
            periods: vec![Some(p0), None, Some(p1)],
            ..NmConfig::default()
        };
        let traj = maximize(
            |x: &[f64], _: &mut dyn rand::RngCore| -(x[0] - 7.0).powi(2) - x[1].powi(2) - (x[2] + 3.0).powi(2),
            &[10.0, 1.0, -5.0],
            &cfg,
            &mut stream(seed, &[]),
        ).unwrap();
        for e in &traj.evaluations {
            prop_assert!(e.params[0] >= 0.0 && e.params[0] < p0);
            prop_assert!(e.params[2] >= 0.0 && e.params[2] < p1);
        }
    }

    #[test]
    fn psff_limits(seed in any::<u64>(), half in 1usize..4) {
        let n = 2 * half;
        let mut rng = stream(seed, &[]);
        let c = random_brickwork(n, &mut rng);
        let empty = psff_exact(&c, 3, &Subsystem::new(n, &[]).unwrap()).unwrap();
        let full = psff_exact(&c, 3, &Subsystem::contiguous(n, n).unwrap()).unwrap();
        let sff = trace_series(&c, 3).unwrap().sff();
        for t in 0..3 {
            prop_assert!((empty[t] - 1.0).abs() < 1e-10);
            prop_assert!((full[t] - sff[t]).abs() < 1e-10);
        }
    }
}
