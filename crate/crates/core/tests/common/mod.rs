//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use floquet_discovery::circuits::{
    brickwork_unitary, dtc_unitary, unit_vector, BrickworkParams, Circuit, DtcParams, Gate,
};
use floquet_discovery::kernel::KernelHyper;
use floquet_discovery::shadows::ShadowSet;
use floquet_discovery::statevector::State;

pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Embeds every gate as a full `2^n × 2^n` matrix and multiplies them.
pub fn dense_oracle(c: &Circuit) -> DMatrix<C64> {
    let dim = c.dim();
    let mut u = DMatrix::<C64>::identity(dim, dim);
    for g in c.gates() {
        let (sites, local): (Vec<usize>, DMatrix<C64>) = match g {
            Gate::One(g) => (vec![g.site], DMatrix::from_fn(2, 2, |i, j| g.matrix[i][j])),
            Gate::Two(g) => (vec![g.sites.0, g.sites.1], DMatrix::from_fn(4, 4, |i, j| g.matrix[i][j])),
        };
        let mask: usize = sites.iter().map(|s| 1 << s).sum();
        // Local index: the first listed site is the most significant bit.
        let local_index = |x: usize| sites.iter().fold(0, |acc, &s| 2 * acc + ((x >> s) & 1));
        let e = DMatrix::from_fn(dim, dim, |i, j| {
            if i & !mask == j & !mask {
                local[(local_index(i), local_index(j))]
            } else {
                ZERO
            }
        });
        u = e * u;
    }
    u
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> State {
    let v: Vec<C64> = (0..1 << n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    State::from_amplitudes(v.into_iter().map(|z| z / norm).collect()).unwrap()
}

pub fn random_dtc<R: Rng>(n: usize, rng: &mut R) -> Circuit {
    let p = DtcParams {
        j: (0..n).map(|_| rng.random_range(0.0..3.2)).collect(),
        h: (0..n).map(|_| rng.random_range(0.0..3.2)).collect(),
        s_hat: unit_vector(rng.random_range(0.0..3.2), rng.random_range(0.0..6.3)),
        m_hat: unit_vector(rng.random_range(0.0..3.2), rng.random_range(0.0..6.3)),
        shared_j: false,
    };
    dtc_unitary(&p).unwrap()
}

pub fn random_brickwork<R: Rng>(n: usize, rng: &mut R) -> Circuit {
    let j = [rng.random_range(0.0..6.3), rng.random_range(0.0..6.3), rng.random_range(0.0..6.3)];
    brickwork_unitary(&BrickworkParams::haar(n, j, rng)).unwrap()
}

/// Haar unitary of size `d` from the QR decomposition of a Ginibre matrix
/// with the phases of `R`'s diagonal divided out.
pub fn haar_unitary<R: Rng>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let phase = r[(k, k)] / r[(k, k)].norm();
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Lab-frame unit vector of the measured axis.
fn outcome_vector(set: &ShadowSet, axis: u8) -> [f64; 3] {
    set.frame().axes[axis as usize]
}

/// `exp(τ · mean_{a,b} exp((γ/n) Σ_i (9|⟨a_i|b_i⟩|² − 4)))`, with overlaps
/// computed from Bloch vectors: `|⟨a|b⟩|² = (1 + r_a·r_b)/2`.
pub fn kernel_oracle(a: &ShadowSet, b: &ShadowSet, hp: &KernelHyper) -> f64 {
    let n = a.n() as f64;
    let mut acc = 0.0;
    for ra in a.rows() {
        for rb in b.rows() {
            let mut s = 0.0;
            for (x, y) in ra.iter().zip(rb) {
                let u = outcome_vector(a, x.axis).map(|v| v * x.sign());
                let w = outcome_vector(b, y.axis).map(|v| v * y.sign());
                let overlap = 0.5 * (1.0 + u[0] * w[0] + u[1] * w[1] + u[2] * w[2]);
                s += 9.0 * overlap - 4.0;
            }
            acc += (hp.gamma / n * s).exp();
        }
    }
    (hp.tau * acc / (a.len() * b.len()) as f64).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleMerge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

/// Ward clustering by brute force: every step recomputes
/// `√(2|A||B|/(|A|+|B|)) ‖c_A − c_B‖` for all active pairs from the member
/// points.
pub fn ward_oracle(points: &[Vec<f64>]) -> Vec<OracleMerge> {
    let t = points.len();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..t).map(|i| (i, vec![i])).collect();
    let centroid = |m: &[usize]| -> Vec<f64> {
        let d = points[0].len();
        (0..d).map(|k| m.iter().map(|&i| points[i][k]).sum::<f64>() / m.len() as f64).collect()
    };
    let mut merges = Vec::new();
    for step in 0..t - 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let (ia, ma) = &clusters[a];
                let (ib, mb) = &clusters[b];
                let (ca, cb) = (centroid(ma), centroid(mb));
                let (na, nb) = (ma.len() as f64, mb.len() as f64);
                let gap2: f64 = ca.iter().zip(&cb).map(|(x, y)| (x - y).powi(2)).sum();
                let d = (2.0 * na * nb / (na + nb) * gap2).sqrt();
                let key = (*ia.min(ib), *ia.max(ib));
                let better = match best {
                    None => true,
                    Some((bd, lo, hi, _, _)) => d < bd - 1e-12 || ((d - bd).abs() <= 1e-12 && key < (lo, hi)),
                };
                if better {
                    best = Some((d, key.0, key.1, a, b));
                }
            }
        }
        let (d, lo, hi, a, b) = best.unwrap();
        let mut members = clusters[a].1.clone();
        members.extend(clusters[b].1.iter().copied());
        clusters.remove(b);
        clusters.remove(a);
        merges.push(OracleMerge { left: lo, right: hi, distance: d, size: members.len() });
        clusters.push((t + step, members));
    }
    merges
}

/// `|z_t^A|²` from dense powers and an explicit partial trace over `A`.
pub fn psff_oracle(u: &DMatrix<C64>, n: usize, a_sites: &[usize], t_max: usize) -> Vec<f64> {
    let dim = 1usize << n;
    let comp: Vec<usize> = (0..n).filter(|s| !a_sites.contains(s)).collect();
    let scatter = |sites: &[usize], k: usize| -> usize {
        sites.iter().enumerate().map(|(b, &s)| ((k >> b) & 1) << s).sum()
    };
    let (da, db) = (1usize << a_sites.len(), 1usize << comp.len());
    let mut power = DMatrix::<C64>::identity(dim, dim);
    let mut out = Vec::new();
    for _ in 0..t_max {
        power = u * &power;
        let mut m = DMatrix::<C64>::zeros(db, db);
        for i in 0..db {
            for j in 0..db {
                for k in 0..da {
                    let ka = scatter(a_sites, k);
                    m[(i, j)] += power[(ka | scatter(&comp, i), ka | scatter(&comp, j))];
                }
            }
        }
        let tr = (m.adjoint() * &m).trace().re;
        out.push(tr / (db as f64 * (da * da) as f64));
    }
    out
}

pub fn apply_dense(u: &DMatrix<C64>, s: &State) -> DVector<C64> {
    u * DVector::from_column_slice(s.amps())
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Exact local Bloch vector of `site`.
pub fn bloch_oracle(s: &State, site: usize) -> [f64; 3] {
    let a = s.amps();
    let (mut r00, mut r11, mut r01) = (0.0, 0.0, ZERO);
    for (i, z) in a.iter().enumerate() {
        if (i >> site) & 1 == 0 {
            r00 += z.norm_sqr();
            r01 += z * a[i | (1 << site)].conj();
        } else {
            r11 += z.norm_sqr();
        }
    }
    [2.0 * r01.re, -2.0 * r01.im, r00 - r11]
}

/// Largest entry modulus of a complex matrix.
pub fn cmax<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}
