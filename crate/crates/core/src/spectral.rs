//! Traces of Floquet powers, spectral form factors and their estimators.
//!
//! `z_t = tr U^t / D` is accumulated by evolving every basis column for
//! `t_max` periods; the `D × D` matrix is never formed. Column sums are
//! reduced in fixed-size chunks in ascending column order, so results do not
//! depend on the number of worker threads.

use std::io::Write;
use std::ops::Range;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{brickwork_unitary, haar_1q, BrickworkParams, Circuit};
use crate::error::{domain, Error, Result};
use crate::seeding;
use crate::shadows::categorical;
use crate::statevector::{apply_1q_raw, dagger2, State, MAX_QUBITS, ONE, ZERO};

pub const DEFAULT_T_MAX: usize = 20;
pub const MAX_DENSE_QUBITS: usize = 10;
pub const MAX_COMPLEMENT_QUBITS: usize = 10;

const COLUMN_CHUNK: usize = 16;

/// `z_t` for `t = 1..=t_max` of a single circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSeries {
    pub n: usize,
    /// `z[t − 1] = z_t`.
    pub z: Vec<C64>,
}

impl SpectralSeries {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn t_max(&self) -> usize {
        self.z.len()
    }

    /// `|z_t|²` for `t = 1..=t_max`.
    pub fn sff(&self) -> Vec<f64> {
        self.z.iter().map(|z| z.norm_sqr()).collect()
    }
}

fn check_size(c: &Circuit) -> Result<()> {
    if c.n() > MAX_QUBITS {
        return Err(Error::UnsupportedSize(format!("{} qubits exceed {MAX_QUBITS}", c.n())));
    }
    Ok(())
}

/// Sums `f(chunk)` over fixed-size chunks of `0..count`, in chunk order.
fn chunked_reduce<F>(count: usize, len: usize, f: F) -> Vec<f64>
where
    F: Fn(Range<usize>) -> Vec<f64> + Sync + Send,
{
    let chunks: Vec<Range<usize>> = (0..count)
        .step_by(COLUMN_CHUNK)
        .map(|s| s..(s + COLUMN_CHUNK).min(count))
        .collect();
    let partial: Vec<Vec<f64>> = chunks.into_par_iter().map(f).collect();
    let mut total = vec![0.0; len];
    for p in partial {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// `z_t = (1/D) Σ_j ⟨j|U^t|j⟩` by column evolution.
pub fn trace_series(c: &Circuit, t_max: usize) -> Result<SpectralSeries> {
    if t_max == 0 {
        return domain("t_max must be at least 1");
    }
    check_size(c)?;
    let fused = c.fused();
    let dim = c.dim();
    // Interleaved (re, im) per t.
    let sums = chunked_reduce(dim, 2 * t_max, |cols| {
        let mut acc = vec![0.0; 2 * t_max];
        let mut amps = vec![ZERO; dim];
        for j in cols {
            amps.iter_mut().for_each(|a| *a = ZERO);
            amps[j] = ONE;
            for t in 0..t_max {
                fused.apply_raw(&mut amps);
                acc[2 * t] += amps[j].re;
                acc[2 * t + 1] += amps[j].im;
            }
        }
        acc
    });
    let z = (0..t_max)
        .map(|t| C64::new(sums[2 * t], sums[2 * t + 1]) / dim as f64)
        .collect();
    Ok(SpectralSeries { n: c.n(), z })
}

/// All eigenphases of one period in `(−π, π]`, from a dense complex Schur
/// decomposition.
pub fn eigenphases(c: &Circuit) -> Result<Vec<f64>> {
    if c.n() > MAX_DENSE_QUBITS {
        return Err(Error::UnsupportedSize(format!(
            "dense diagonalization limited to {MAX_DENSE_QUBITS} qubits, got {}",
            c.n()
        )));
    }
    let u = c.dense_matrix();
    let schur = nalgebra::Schur::try_new(u, 1e-14, 100_000)
        .ok_or_else(|| Error::Domain("Schur iteration did not converge".into()))?;
    let values = schur
        .eigenvalues()
        .ok_or_else(|| Error::Domain("Schur form not triangular".into()))?;
    let mut phases: Vec<f64> = values
        .iter()
        .map(|l| {
            let p = l.arg();
            if p <= -std::f64::consts::PI {
                std::f64::consts::PI
            } else {
                p
            }
        })
        .collect();
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// `(1/D) Σ_j e^{itθ_j}`.
pub fn z_from_phases(phases: &[f64], t: usize) -> C64 {
    let sum: C64 = phases.iter().map(|&p| C64::from_polar(1.0, t as f64 * p)).sum();
    sum / phases.len() as f64
}

/// `Π_i cos²(φ_i t)` for a product of single-qubit unitaries with
/// eigenphases `α_i ± φ_i`.
pub fn noninteracting_reference(phis: &[f64], t: usize) -> f64 {
    phis.iter().map(|&p| (p * t as f64).cos().powi(2)).product()
}

/// CUE mean of `|z_t|²`: `t/D²` on the ramp, `1/D` on the plateau.
pub fn cue_reference(t: usize, dim: usize) -> f64 {
    let d = dim as f64;
    if t < dim {
        t as f64 / (d * d)
    } else {
        1.0 / d
    }
}

/// Couplings of a brickwork ensemble; single-qubit layers are drawn per
/// realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrickworkTemplate {
    pub n: usize,
    pub j_xyz: [f64; 3],
}

impl BrickworkTemplate {
    /// Realization `r` of the ensemble rooted at `seed`.
    pub fn realization(&self, seed: u64, r: usize) -> BrickworkParams {
        let mut rng = seeding::stream(seed, &[r as u64]);
        BrickworkParams::haar(self.n, self.j_xyz, &mut rng)
    }
}

/// Ensemble statistics of `|z_t|²` and `|z_t|⁴`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSeries {
    pub n: usize,
    pub t_max: usize,
    pub n_real: usize,
    /// Per-realization `|z_t|²`, realization-major (`r * t_max + t − 1`).
    pub samples: Vec<f64>,
    pub mean_sq: Vec<f64>,
    pub stderr_sq: Vec<f64>,
    pub mean_quartic: Vec<f64>,
    pub stderr_quartic: Vec<f64>,
}

impl EnsembleSeries {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn realization(&self, r: usize) -> &[f64] {
        &self.samples[r * self.t_max..(r + 1) * self.t_max]
    }

    pub fn from_samples(n: usize, t_max: usize, samples: Vec<f64>) -> Result<Self> {
        if t_max == 0 || samples.len() % t_max != 0 {
            return domain("sample count must be a multiple of t_max");
        }
        let n_real = samples.len() / t_max;
        if n_real < 2 {
            return domain(format!("ensemble needs at least two realizations, got {n_real}"));
        }
        let column = |t: usize, pow: i32| -> Vec<f64> {
            (0..n_real).map(|r| samples[r * t_max + t].powi(pow)).collect()
        };
        let mut mean_sq = Vec::with_capacity(t_max);
        let mut stderr_sq = Vec::with_capacity(t_max);
        let mut mean_quartic = Vec::with_capacity(t_max);
        let mut stderr_quartic = Vec::with_capacity(t_max);
        for t in 0..t_max {
            let (m, e) = mean_stderr(&column(t, 1));
            mean_sq.push(m);
            stderr_sq.push(e);
            let (m, e) = mean_stderr(&column(t, 2));
            mean_quartic.push(m);
            stderr_quartic.push(e);
        }
        Ok(Self {
            n,
            t_max,
            n_real,
            samples,
            mean_sq,
            stderr_sq,
            mean_quartic,
            stderr_quartic,
        })
    }

    /// CSV with header `t,mean,stderr` for `|z_t|²`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,mean,stderr")?;
        for t in 0..self.t_max {
            writeln!(w, "{},{},{}", t + 1, self.mean_sq[t], self.stderr_sq[t])?;
        }
        Ok(())
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean and standard error of `|z_t|²` over `n_real` independent draws of all
/// single-qubit gates at fixed couplings. Realization `r` uses the stream
/// `(seed, r)`.
pub fn ensemble_sff(
    template: &BrickworkTemplate,
    n_real: usize,
    t_max: usize,
    seed: u64,
) -> Result<EnsembleSeries> {
    if n_real < 2 {
        return domain(format!("ensemble needs at least two realizations, got {n_real}"));
    }
    BrickworkParams::identity_layers(template.n, template.j_xyz).validate()?;
    let per_real: Vec<Result<Vec<f64>>> = (0..n_real)
        .into_par_iter()
        .map(|r| {
            let c = brickwork_unitary(&template.realization(seed, r))?;
            Ok(trace_series(&c, t_max)?.sff())
        })
        .collect();
    let mut samples = Vec::with_capacity(n_real * t_max);
    for r in per_real {
        samples.extend(r?);
    }
    EnsembleSeries::from_samples(template.n, t_max, samples)
}

/// Same as [`ensemble_sff`] with the base seed drawn from `rng`.
pub fn ensemble_sff_rng<R: Rng + ?Sized>(
    template: &BrickworkTemplate,
    n_real: usize,
    t_max: usize,
    rng: &mut R,
) -> Result<EnsembleSeries> {
    ensemble_sff(template, n_real, t_max, seeding::base_seed(rng))
}

/// A subsystem `A`; the complement is implied by the qubit count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    n: usize,
    sites: Vec<usize>,
}

impl Subsystem {
    pub fn new(n: usize, sites: &[usize]) -> Result<Self> {
        let mut sorted = sites.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != sites.len() {
            return domain("subsystem sites must be distinct");
        }
        if let Some(&s) = sorted.iter().find(|&&s| s >= n) {
            return domain(format!("site {s} outside a {n}-qubit system"));
        }
        Ok(Self { n, sites: sorted })
    }

    /// The first `size` sites `0..size`.
    pub fn contiguous(n: usize, size: usize) -> Result<Self> {
        Self::new(n, &(0..size).collect::<Vec<_>>())
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|s| !self.sites.contains(s)).collect()
    }

    pub fn dim_a(&self) -> usize {
        1 << self.sites.len()
    }

    pub fn dim_complement(&self) -> usize {
        1 << (self.n - self.sites.len())
    }

    pub fn mask(&self) -> usize {
        self.sites.iter().map(|s| 1usize << s).sum()
    }
}

/// Scatters the bits of `k` onto `sites`.
fn scatter_table(sites: &[usize]) -> Vec<usize> {
    (0..1usize << sites.len())
        .map(|k| {
            sites
                .iter()
                .enumerate()
                .filter(|(b, _)| (k >> b) & 1 == 1)
                .map(|(_, s)| 1usize << s)
                .sum()
        })
        .collect()
}

/// `|z_t^A|² = tr_Ā[tr_A(U^t)† tr_A(U^t)] / (D_Ā D_A²)` for `t = 1..=t_max`.
///
/// Column `b̄` of the partial trace `M_t = tr_A U^t` is accumulated from the
/// evolutions of `|a, b̄⟩` over all `a`, and only `Σ|M_t|²` is kept.
pub fn psff_exact(c: &Circuit, t_max: usize, a: &Subsystem) -> Result<Vec<f64>> {
    if t_max == 0 {
        return domain("t_max must be at least 1");
    }
    check_size(c)?;
    if a.n != c.n() {
        return domain(format!("subsystem of a {}-qubit system on a {}-qubit circuit", a.n, c.n()));
    }
    let comp = a.complement();
    if comp.len() > MAX_COMPLEMENT_QUBITS {
        return Err(Error::UnsupportedSize(format!(
            "complement of {} qubits exceeds {MAX_COMPLEMENT_QUBITS}",
            comp.len()
        )));
    }
    let fused = c.fused();
    let dim = c.dim();
    let idx_a = scatter_table(a.sites());
    let idx_b = scatter_table(&comp);
    let d_comp = idx_b.len();
    let sums = chunked_reduce(d_comp, t_max, |bars| {
        let mut acc = vec![0.0; t_max];
        let mut amps = vec![ZERO; dim];
        let mut column = vec![ZERO; t_max * d_comp];
        for b in bars {
            column.iter_mut().for_each(|m| *m = ZERO);
            for &ia in &idx_a {
                amps.iter_mut().for_each(|x| *x = ZERO);
                amps[ia | idx_b[b]] = ONE;
                for t in 0..t_max {
                    fused.apply_raw(&mut amps);
                    let row = &mut column[t * d_comp..(t + 1) * d_comp];
                    for (m, &ib) in row.iter_mut().zip(&idx_b) {
                        *m += amps[ia | ib];
                    }
                }
            }
            for (t, slot) in acc.iter_mut().enumerate() {
                *slot += column[t * d_comp..(t + 1) * d_comp]
                    .iter()
                    .map(|m| m.norm_sqr())
                    .sum::<f64>();
            }
        }
        acc
    });
    let da = a.dim_a() as f64;
    let norm = d_comp as f64 * da * da;
    Ok(sums.into_iter().map(|s| s / norm).collect())
}

/// Randomized-measurement estimate of `|z_t^A|²` from `m` shots.
///
/// Each shot draws fresh Haar gates `u_i`, prepares `⊗u_i|0⟩`, applies `t`
/// periods and `⊗u_i†`, and samples a bit string `s`. The estimator is the
/// shot mean of `(−2)^{−|s_A|}`, whose expectation over the local Haar gates
/// is the normalized pSFF.
pub fn psff_sampled<R: Rng + ?Sized>(
    c: &Circuit,
    t: usize,
    a: &Subsystem,
    m: usize,
    rng: &mut R,
) -> Result<f64> {
    Ok(psff_shots(c, t, a, m, rng)?.iter().sum::<f64>() / m as f64)
}

/// Per-shot values `(−2)^{−|s_A|}` of the randomized-measurement protocol.
pub fn psff_shots<R: Rng + ?Sized>(
    c: &Circuit,
    t: usize,
    a: &Subsystem,
    m: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if m == 0 {
        return domain("shot count must be positive");
    }
    check_size(c)?;
    if a.n != c.n() {
        return domain("subsystem and circuit sizes differ");
    }
    let n = c.n();
    let fused = c.fused();
    let mask = a.mask();
    let mut shots = Vec::with_capacity(m);
    for _ in 0..m {
        let us: Vec<_> = (0..n).map(|_| haar_1q(rng)).collect();
        let sites: Vec<[C64; 2]> = us.iter().map(|u| [u[0][0], u[1][0]]).collect();
        let mut amps = State::product(&sites)?.into_amps();
        for _ in 0..t {
            fused.apply_raw(&mut amps);
        }
        for (site, u) in us.iter().enumerate() {
            apply_1q_raw(&mut amps, &dagger2(u), site);
        }
        let s = categorical(&amps, rng);
        let weight = (s & mask).count_ones() as i32;
        shots.push((-0.5f64).powi(weight));
    }
    Ok(shots)
}

/// Hadamard-test estimate of `z_t`: `m` ancilla outcomes each for X and Y
/// with `P(+1) = (1 + Re z_t)/2` and `(1 + Im z_t)/2`. The exact `z_t` comes
/// from [`trace_series`]; returns `⟨X⟩ + i⟨Y⟩`.
pub fn hadamard_test_sampled<R: Rng + ?Sized>(
    c: &Circuit,
    t: usize,
    m: usize,
    rng: &mut R,
) -> Result<C64> {
    if t == 0 || m == 0 {
        return domain("time and shot count must be positive");
    }
    let z = trace_series(c, t)?.z[t - 1];
    Ok(hadamard_outcomes(z, m, rng))
}

pub(crate) fn hadamard_outcomes<R: Rng + ?Sized>(z: C64, m: usize, rng: &mut R) -> C64 {
    let mut mean_pm = |expect: f64| -> f64 {
        let p = ((1.0 + expect) / 2.0).clamp(0.0, 1.0);
        let ups = Binomial::new(m as u64, p).expect("valid binomial").sample(rng);
        2.0 * ups as f64 / m as f64 - 1.0
    };
    let x = mean_pm(z.re);
    let y = mean_pm(z.im);
    C64::new(x, y)
}

/// Domain-wall tension fit of an ensemble SFF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DwFit {
    pub tension: f64,
    /// Weighted sum of squared residuals at the optimum.
    pub residual: f64,
    pub window: (usize, usize),
    /// True when the optimum sits at the `τ = 0` boundary.
    pub at_zero: bool,
    /// `−n² e^{−4/τ}`, in units of `1/D²`.
    pub delta_f_rescaled: f64,
    /// `delta_f_rescaled / D²`.
    pub delta_f: f64,
}

fn dw_model(t: usize, dim: f64, pairs: f64, tau: f64) -> f64 {
    let tf = t as f64;
    let correction = if tau <= 0.0 {
        0.0
    } else {
        pairs * (tf - 1.0) * (-2.0 * tf / tau).exp()
    };
    tf / (dim * dim) * (1.0 + correction)
}

/// Weighted least squares for `τ ≥ 0` in
/// `⟨|z_t|²⟩ = (t/D²)(1 + n(n−1)/2 · (t−1) e^{−2t/τ})` over `t ∈ [2, t_max]`.
/// Weights are inverse variances when every standard error is positive and
/// `(D²/t)²` otherwise.
pub fn fit_dw_tension(ens: &EnsembleSeries, n: usize) -> Result<DwFit> {
    if ens.t_max < 2 {
        return domain("fit window needs t_max ≥ 2");
    }
    let dim = (1usize << n) as f64;
    let pairs = (n * (n - 1)) as f64 / 2.0;
    let window = (2, ens.t_max);
    let use_errors = ens.stderr_sq[1..].iter().all(|&e| e > 0.0);
    let chi2 = |tau: f64| -> f64 {
        (window.0..=window.1)
            .map(|t| {
                let y = ens.mean_sq[t - 1];
                let w = if use_errors {
                    ens.stderr_sq[t - 1].powi(-2)
                } else {
                    (dim * dim / t as f64).powi(2)
                };
                w * (y - dw_model(t, dim, pairs, tau)).powi(2)
            })
            .sum()
    };
    // Coarse log grid, then golden-section refinement around the best node.
    let grid: Vec<f64> = std::iter::once(0.0)
        .chain((0..=600).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 600.0)))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&tau| chi2(tau)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v < values[b] { i } else { b });
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(grid.len() - 1)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if chi2(x1) <= chi2(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let mut tension = 0.5 * (lo + hi);
    if chi2(0.0) <= chi2(tension) {
        tension = 0.0;
    }
    // Below this the correction term is numerically zero at t = 2.
    let at_zero = tension == 0.0 || pairs * (-4.0 / tension).exp() < f64::EPSILON;
    if at_zero {
        tension = 0.0;
    }
    let delta_f_rescaled = if tension > 0.0 {
        -(n as f64).powi(2) * (-4.0 / tension).exp()
    } else {
        0.0
    };
    Ok(DwFit {
        tension,
        residual: chi2(tension),
        window,
        at_zero,
        delta_f_rescaled,
        delta_f: delta_f_rescaled / (dim * dim),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{dtc_unitary, DtcParams};
    use crate::seeding::stream;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn single_z(h: f64) -> Circuit {
        let mut c = Circuit::new(1);
        c.push_1q(crate::circuits::field_gate(h, [0.0, 0.0, 1.0]), 0).unwrap();
        c
    }

    #[test]
    fn identity_traces() {
        let c = Circuit::new(3);
        let s = trace_series(&c, 5).unwrap();
        assert!(s.z.iter().all(|z| (z - ONE).norm() < 1e-15));
        assert_eq!(eigenphases(&c).unwrap(), vec![0.0; 8]);
    }

    #[test]
    fn single_qubit_rotation() {
        let h = 0.37;
        let s = trace_series(&single_z(h), 10).unwrap();
        for (t, z) in s.z.iter().enumerate() {
            let expected = (h * (t + 1) as f64).cos();
            assert!((z.re - expected).abs() < 1e-14 && z.im.abs() < 1e-14);
        }
        let p = eigenphases(&single_z(FRAC_PI_4)).unwrap();
        assert!((p[0] + FRAC_PI_4).abs() < 1e-14 && (p[1] - FRAC_PI_4).abs() < 1e-14);
    }

    #[test]
    fn eigenphases_match_traces() {
        let mut rng = stream(1, &[]);
        let p = BrickworkParams::haar(4, [0.3, 1.9, 0.8], &mut rng);
        let c = brickwork_unitary(&p).unwrap();
        let phases = eigenphases(&c).unwrap();
        let s = trace_series(&c, 12).unwrap();
        for t in 1..=12 {
            assert!((z_from_phases(&phases, t) - s.z[t - 1]).norm() < 1e-9);
        }
        assert!(phases.iter().all(|&p| p > -PI && p <= PI));
    }

    #[test]
    fn eigenphases_reject_large_systems() {
        let c = Circuit::new(11);
        assert!(matches!(eigenphases(&c), Err(Error::UnsupportedSize(_))));
    }

    #[test]
    fn noninteracting_values() {
        let t = 3;
        assert!((noninteracting_reference(&[PI / t as f64; 4], t) - 1.0).abs() < 1e-15);
        assert!(noninteracting_reference(&[0.2, PI / (2.0 * t as f64)], t) < 1e-30);
    }

    #[test]
    fn noninteracting_matches_product_circuit() {
        let phis = [0.3, 1.1, 2.0, 0.05];
        let mut c = Circuit::new(4);
        for (site, &p) in phis.iter().enumerate() {
            c.push_1q(crate::circuits::field_gate(p, [0.0, 0.0, 1.0]), site).unwrap();
        }
        let s = trace_series(&c, 8).unwrap();
        for t in 1..=8 {
            assert!((s.z[t - 1].norm_sqr() - noninteracting_reference(&phis, t)).abs() < 1e-10);
        }
    }

    #[test]
    fn cue_reference_values() {
        assert_eq!(cue_reference(1, 4), 1.0 / 16.0);
        assert_eq!(cue_reference(4, 4), 0.25);
        assert_eq!(cue_reference(9, 4), 0.25);
    }

    #[test]
    fn subsystem_validation() {
        assert!(Subsystem::new(4, &[0, 0]).is_err());
        assert!(Subsystem::new(4, &[4]).is_err());
        let a = Subsystem::new(4, &[2, 0]).unwrap();
        assert_eq!(a.sites(), &[0, 2]);
        assert_eq!(a.complement(), vec![1, 3]);
        assert_eq!(a.mask(), 0b101);
    }

    #[test]
    fn psff_limits() {
        let mut rng = stream(2, &[]);
        let c = brickwork_unitary(&BrickworkParams::haar(4, [1.0, 2.0, 0.5], &mut rng)).unwrap();
        let full = psff_exact(&c, 6, &Subsystem::contiguous(4, 4).unwrap()).unwrap();
        let sff = trace_series(&c, 6).unwrap().sff();
        for t in 0..6 {
            assert!((full[t] - sff[t]).abs() < 1e-10);
        }
        let empty = psff_exact(&c, 6, &Subsystem::new(4, &[]).unwrap()).unwrap();
        assert!(empty.iter().all(|v| (v - 1.0).abs() < 1e-10));
        let id = psff_exact(&Circuit::new(4), 3, &Subsystem::new(4, &[1, 3]).unwrap()).unwrap();
        assert!(id.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn psff_sampled_identity() {
        let c = Circuit::new(2);
        let a = Subsystem::new(2, &[0]).unwrap();
        let est = psff_sampled(&c, 3, &a, 2000, &mut stream(5, &[])).unwrap();
        assert!((est - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_identity_and_quarter_turn() {
        let m = 10_000;
        let bound = 3.0 / (m as f64).sqrt();
        let est = hadamard_test_sampled(&Circuit::new(2), 4, m, &mut stream(1, &[])).unwrap();
        assert!((est.re - 1.0).abs() < bound && est.im.abs() < bound);
        let est = hadamard_test_sampled(&single_z(FRAC_PI_2), 1, m, &mut stream(2, &[])).unwrap();
        assert!(est.re.abs() < bound);
    }

    #[test]
    fn dw_fit_on_synthetic_data() {
        let n = 8;
        let dim = 256.0;
        let pairs = 28.0;
        let t_max = 20;
        let samples: Vec<f64> = (0..2)
            .flat_map(|_| (1..=t_max).map(|t| dw_model(t, dim, pairs, 1.5)))
            .collect();
        let ens = EnsembleSeries::from_samples(n, t_max, samples).unwrap();
        let fit = fit_dw_tension(&ens, n).unwrap();
        assert!((fit.tension - 1.5).abs() < 0.03, "{fit:?}");
        assert!(!fit.at_zero);

        let flat: Vec<f64> = (0..2)
            .flat_map(|_| (1..=t_max).map(|t| t as f64 / (dim * dim)))
            .collect();
        let fit = fit_dw_tension(&EnsembleSeries::from_samples(n, t_max, flat).unwrap(), n).unwrap();
        assert_eq!(fit.tension, 0.0);
        assert!(fit.at_zero);
    }

    #[test]
    fn trace_series_of_dtc_period_two() {
        let p = DtcParams::uniform(4, FRAC_PI_4, FRAC_PI_2, [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]);
        let c = dtc_unitary(&p).unwrap();
        let s = trace_series(&c, 4).unwrap();
        // The global flip has no diagonal, so odd powers are traceless.
        assert!(s.z[0].norm() < 1e-12 && s.z[2].norm() < 1e-12);
        assert!(s.z.iter().all(|z| z.norm() <= 1.0 + 1e-12));
    }
}
