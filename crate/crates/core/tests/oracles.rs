mod common;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use rand::Rng;

use common::*;
use floquet_discovery::circuits::{field_gate, haar_1q, ising_gate, unit_vector, xyz_gate};
use floquet_discovery::hac::hac_ward;
use floquet_discovery::kernel::{gram_matrix, kernel_entry, KernelHyper};
use floquet_discovery::seeding::stream;
use floquet_discovery::shadows::{frame_from_rotation, shadow_set, MeasurementFrame};
use floquet_discovery::spectral::{
    cue_reference, eigenphases, hadamard_test_sampled, psff_exact, trace_series, z_from_phases, Subsystem,
};
use floquet_discovery::statevector::{pauli_x, pauli_y, pauli_z, Gate1Q, Gate2Q, State};

const I: C64 = C64::new(0.0, 1.0);

fn m2(a: &[[C64; 2]; 2]) -> Matrix2<C64> {
    Matrix2::from_fn(|i, j| a[i][j])
}

fn m4(a: &[[C64; 4]; 4]) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| a[i][j])
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

fn pauli_dot(v: [f64; 3]) -> Matrix2<C64> {
    m2(&pauli_x()) * C64::from(v[0]) + m2(&pauli_y()) * C64::from(v[1]) + m2(&pauli_z()) * C64::from(v[2])
}

#[test]
fn gates_match_matrix_exponentials() {
    let mut rng = stream(11, &[]);
    for _ in 0..20 {
        let v = unit_vector(rng.random_range(0.0..3.2), rng.random_range(0.0..6.3));
        let h = rng.random_range(-4.0..4.0);
        let want = (pauli_dot(v) * (I * h)).exp();
        assert!(cmax((m2(&field_gate(h, v)) - want).iter()) < 1e-12);

        let p = pauli_dot(v);
        let want = (kron(&p, &p) * (I * h)).exp();
        assert!(cmax((m4(&ising_gate(h, v)) - want).iter()) < 1e-12);

        let j = [rng.random_range(0.0..6.3), rng.random_range(0.0..6.3), rng.random_range(0.0..6.3)];
        let (x, y, z) = (m2(&pauli_x()), m2(&pauli_y()), m2(&pauli_z()));
        let gen = (kron(&x, &x) * C64::from(j[0]) + kron(&y, &y) * C64::from(j[1]) + kron(&z, &z) * C64::from(j[2]))
            * (I / 4.0);
        assert!(cmax((m4(&xyz_gate(j)) - gen.exp()).iter()) < 1e-11);
    }
}

#[test]
fn dual_unitary_gate_is_swap_up_to_phase() {
    let g = m4(&xyz_gate([std::f64::consts::PI; 3]));
    let phase = g[(0, 0)];
    let swap = Matrix4::from_fn(|i, j| {
        let swapped = ((j & 1) << 1) | (j >> 1);
        if i == swapped { C64::new(1.0, 0.0) } else { ZERO }
    });
    assert!(cmax((g - swap * phase).iter()) < 1e-12);
}

#[test]
fn single_gate_examples() {
    let zero = State::basis_state(1, 0).unwrap();
    let g = Gate1Q::new(to_arr2(&(m2(&pauli_x()) * (I * std::f64::consts::FRAC_PI_2)).exp()), 0);
    let out = zero.apply_1q(&g).unwrap();
    assert!((out.amps()[1] - I).norm() < 1e-12 && out.amps()[0].norm() < 1e-12);

    let zz = kron(&m2(&pauli_z()), &m2(&pauli_z()));
    let g = Gate2Q::new(to_arr4(&(zz * (I * std::f64::consts::FRAC_PI_4)).exp()), 0, 1).unwrap();
    let out = State::basis_state(2, 0).unwrap().apply_2q(&g).unwrap();
    assert!((out.amps()[0] - C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-12);
}

fn to_arr2(m: &Matrix2<C64>) -> [[C64; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn to_arr4(m: &Matrix4<C64>) -> [[C64; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

#[test]
fn circuits_match_dense_oracle() {
    let mut rng = stream(12, &[]);
    for (k, n) in [4usize, 6, 8, 4, 6, 8].into_iter().enumerate() {
        let c = if k % 2 == 0 { random_dtc(n, &mut rng) } else { random_brickwork(n, &mut rng) };
        let u = dense_oracle(&c);
        assert!(cmax((c.dense_matrix() - &u).iter()) < 1e-11);
        let psi = random_state(n, &mut rng);
        let want = apply_dense(&u, &psi);
        assert!(max_abs_diff(c.apply(&psi).unwrap().amps(), want.as_slice()) < 1e-10);
        assert!(max_abs_diff(c.fused().apply(&psi).unwrap().amps(), want.as_slice()) < 1e-10);

        let series = trace_series(&c, 8).unwrap();
        let phases = eigenphases(&c).unwrap();
        let mut power = u.clone();
        for t in 1..=8 {
            let dense = power.trace() / u.nrows() as f64;
            assert!((series.z[t - 1] - dense).norm() < 1e-9);
            assert!((z_from_phases(&phases, t) - dense).norm() < 1e-9);
            power = &u * &power;
        }
    }
}

#[test]
fn psff_matches_partial_trace_oracle() {
    let mut rng = stream(13, &[]);
    for sites in [vec![0], vec![1, 3], vec![0, 1, 2], vec![2, 4, 5], vec![0, 1, 2, 3, 4, 5]] {
        let c = random_brickwork(6, &mut rng);
        let want = psff_oracle(&dense_oracle(&c), 6, &sites, 4);
        let got = psff_exact(&c, 4, &Subsystem::new(6, &sites).unwrap()).unwrap();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "{sites:?}: {a} vs {b}");
        }
    }
}

#[test]
fn frame_rotation_example() {
    let f = frame_from_rotation(0.7, [0.0, 1.0, 0.0]).unwrap();
    let z = f.axes[2];
    assert!((z[0] - 0.7f64.sin()).abs() < 1e-12 && z[1].abs() < 1e-12 && (z[2] - 0.7f64.cos()).abs() < 1e-12);
    assert_eq!(MeasurementFrame::default(), f);
    assert!(f.orthonormality_defect() < 1e-12);
}

#[test]
fn shadow_outcomes_follow_born_rule() {
    let mut rng = stream(14, &[]);
    let zero = State::basis_state(1, 0).unwrap();
    let set = shadow_set(&zero, 30_000, &MeasurementFrame::lab(), &mut rng).unwrap();
    let (mut x_total, mut x_plus) = (0usize, 0usize);
    for row in set.rows() {
        match row[0].axis {
            0 => {
                x_total += 1;
                x_plus += row[0].positive as usize;
            }
            2 => assert!(row[0].positive),
            _ => {}
        }
    }
    let frac = x_plus as f64 / x_total as f64;
    assert!((frac - 0.5).abs() < 0.02, "{frac}");
}

#[test]
fn shadow_bloch_reconstruction() {
    let mut rng = stream(15, &[]);
    for _ in 0..3 {
        let psi = random_state(2, &mut rng);
        let set = shadow_set(&psi, 100_000, &MeasurementFrame::default(), &mut rng).unwrap();
        for site in 0..2 {
            let (est, exact) = (set.bloch_estimate(site), bloch_oracle(&psi, site));
            for d in 0..3 {
                assert!((est[d] - exact[d]).abs() < 0.02, "{est:?} vs {exact:?}");
            }
        }
    }
}

#[test]
fn kernel_matches_bloch_overlap_oracle() {
    let mut rng = stream(16, &[]);
    let hp = KernelHyper { tau: 0.7, gamma: 0.3 };
    for n in [1usize, 3, 5] {
        let sets: Vec<_> = (0..4)
            .map(|_| shadow_set(&random_state(n, &mut rng), 9, &MeasurementFrame::default(), &mut rng).unwrap())
            .collect();
        let g = gram_matrix(&sets, &hp).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = kernel_oracle(&sets[i], &sets[j], &hp);
                assert!(((g.values[(i, j)] - want) / want).abs() < 1e-12);
                assert!(((kernel_entry(&sets[i], &sets[j], &hp).unwrap() - want) / want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn ward_matches_brute_force() {
    let mut rng = stream(17, &[]);
    for trial in 0..20 {
        let t = 2 + trial % 11;
        let points: Vec<Vec<f64>> = (0..t).map(|_| (0..3).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let tree = hac_ward(&points).unwrap();
        let want = ward_oracle(&points);
        for (m, o) in tree.merges.iter().zip(&want) {
            assert_eq!((m.left, m.right, m.size), (o.left, o.right, o.size));
            assert!((m.distance - o.distance).abs() < 1e-9);
        }
    }
}

#[test]
fn ward_two_point_distance() {
    let tree = hac_ward(&[vec![0.0, 0.0], vec![6.0, 8.0]]).unwrap();
    assert!((tree.last().distance - 10.0).abs() < 1e-12);
}

/// Kolmogorov-Smirnov statistic of `xs` against Uniform(0, 1).
fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn haar_single_qubit_is_uniform() {
    let mut rng = stream(18, &[]);
    let n = 4000;
    let xs: Vec<f64> = (0..n).map(|_| haar_1q(&mut rng)[0][0].norm_sqr()).collect();
    // 1% critical value
    assert!(ks_uniform(xs) < 1.63 / (n as f64).sqrt());
}

#[test]
fn cue_reference_matches_sampled_haar() {
    let mut rng = stream(19, &[]);
    let d = 8;
    let samples = 10_000;
    let mut acc = [0.0; 10];
    for _ in 0..samples {
        let u = haar_unitary(d, &mut rng);
        let mut p = DMatrix::<C64>::identity(d, d);
        for a in acc.iter_mut() {
            p = &u * &p;
            *a += (p.trace() / d as f64).norm_sqr();
        }
    }
    for (t, a) in acc.iter().enumerate() {
        let mean = a / samples as f64;
        let want = cue_reference(t + 1, d);
        assert!((mean - want).abs() < 0.08 * want, "t={}: {mean} vs {want}", t + 1);
    }
}

#[test]
fn hadamard_estimator_is_unbiased() {
    let mut rng = stream(20, &[]);
    let c = random_dtc(4, &mut rng);
    let z = trace_series(&c, 3).unwrap().z[2];
    let est = hadamard_test_sampled(&c, 3, 400_000, &mut rng).unwrap();
    assert!((est - z).norm() < 0.01, "{est} vs {z}");
}
