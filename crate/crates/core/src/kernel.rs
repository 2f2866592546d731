//! Shadow kernel, Gram matrices and kernel PCA.
//!
//! For two outcomes `a`, `b` in the same frame the single-site kernel
//! `Tr[M⁻¹(a) M⁻¹(b)]` with `M⁻¹(a) = 3|a⟩⟨a| − 1` equals `9|⟨a|b⟩|² − 4`:
//! 5 for identical outcomes, −4 for opposite signs on the same axis and
//! 1/2 for different axes. The N_s² pair sum of a Gram entry therefore only
//! depends on two per-pair counts (same axis, same outcome), which are
//! computed with bit masks.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::shadows::{MeasurementFrame, Outcome, ShadowSet};

pub const DEFAULT_TAU: f64 = 4.0;
pub const DEFAULT_GAMMA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelHyper {
    pub tau: f64,
    pub gamma: f64,
}

impl Default for KernelHyper {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            gamma: DEFAULT_GAMMA,
        }
    }
}

impl KernelHyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.gamma > 0.0) {
            return domain(format!(
                "kernel hyperparameters must be positive (tau={}, gamma={})",
                self.tau, self.gamma
            ));
        }
        Ok(())
    }
}

/// Single-site kernel value `9|⟨a|b⟩|² − 4`.
pub fn site_kernel(
    a: Outcome,
    frame_a: &MeasurementFrame,
    b: Outcome,
    frame_b: &MeasurementFrame,
) -> Result<f64> {
    if frame_a != frame_b {
        return domain("site kernel between outcomes in different frames");
    }
    Ok(site_kernel_same_frame(a, b))
}

pub(crate) fn site_kernel_same_frame(a: Outcome, b: Outcome) -> f64 {
    if a.axis != b.axis {
        0.5
    } else if a.positive == b.positive {
        5.0
    } else {
        -4.0
    }
}

/// Bit-packed snapshot row: for site `i`, bit `3i + axis` is set in `axis`,
/// and the same bit is set in `neg` when the outcome is negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PackedRow {
    axis: u64,
    neg: u64,
}

/// A shadow set prepared for kernel evaluation.
#[derive(Debug, Clone)]
pub struct PackedShadows {
    n: usize,
    frame: MeasurementFrame,
    rows: Vec<PackedRow>,
}

impl PackedShadows {
    pub fn new(set: &ShadowSet) -> Self {
        let rows = set
            .rows()
            .iter()
            .map(|row| {
                let mut p = PackedRow { axis: 0, neg: 0 };
                for (site, o) in row.iter().enumerate() {
                    let bit = 1u64 << (3 * site + o.axis as usize);
                    p.axis |= bit;
                    if !o.positive {
                        p.neg |= bit;
                    }
                }
                p
            })
            .collect();
        Self {
            n: set.n(),
            frame: *set.frame(),
            rows,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// `exp((γ/n) Σ_i k_i)` tabulated by (same-axis count, same-outcome count).
struct InnerTable {
    stride: usize,
    values: Vec<f64>,
}

impl InnerTable {
    fn new(n: usize, gamma: f64) -> Self {
        let stride = n + 1;
        let mut values = vec![0.0; stride * stride];
        for same_axis in 0..=n {
            for same in 0..=same_axis {
                let opposite = same_axis - same;
                let different = n - same_axis;
                let sum = 5.0 * same as f64 - 4.0 * opposite as f64 + 0.5 * different as f64;
                values[same_axis * stride + same] = (gamma / n as f64 * sum).exp();
            }
        }
        Self { stride, values }
    }
}

fn pair_histogram(a: &PackedShadows, b: &PackedShadows, stride: usize) -> Vec<u64> {
    let mut hist = vec![0u64; stride * stride];
    for ra in &a.rows {
        for rb in &b.rows {
            let common = ra.axis & rb.axis;
            let same_axis = common.count_ones() as usize;
            let same = (common & !(ra.neg ^ rb.neg)).count_ones() as usize;
            hist[same_axis * stride + same] += 1;
        }
    }
    hist
}

fn packed_entry(a: &PackedShadows, b: &PackedShadows, table: &InnerTable, tau: f64) -> f64 {
    let hist = pair_histogram(a, b, table.stride);
    let sum: f64 = hist
        .iter()
        .zip(&table.values)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &v)| c as f64 * v)
        .sum();
    let pairs = (a.rows.len() * b.rows.len()) as f64;
    (tau * sum / pairs).exp()
}

fn check_compatible(a: &PackedShadows, b: &PackedShadows) -> Result<()> {
    if a.n != b.n {
        return domain(format!("shadow sets on {} and {} qubits", a.n, b.n));
    }
    if a.frame != b.frame {
        return domain("shadow sets measured in different frames");
    }
    if a.n > 21 {
        return Err(Error::UnsupportedSize(format!("{} sites exceed the packed row width", a.n)));
    }
    Ok(())
}

/// `K(A,B) = exp[(τ/N_s²) Σ_{c,c'} exp((γ/n) Σ_i k(a_i^c, b_i^{c'}))]`,
/// summed exactly over all snapshot pairs.
pub fn kernel_entry(a: &ShadowSet, b: &ShadowSet, hp: &KernelHyper) -> Result<f64> {
    hp.validate()?;
    let (pa, pb) = (PackedShadows::new(a), PackedShadows::new(b));
    check_compatible(&pa, &pb)?;
    let table = InnerTable::new(pa.n, hp.gamma);
    Ok(packed_entry(&pa, &pb, &table, hp.tau))
}

/// A square real matrix over a state sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub values: DMatrix<f64>,
    pub centered: bool,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.values.nrows()
    }
}

/// All `T²` kernel entries; the upper triangle is computed and mirrored.
pub fn gram_matrix(sets: &[ShadowSet], hp: &KernelHyper) -> Result<GramMatrix> {
    hp.validate()?;
    if sets.len() < 2 {
        return domain(format!("Gram matrix needs at least two states, got {}", sets.len()));
    }
    let packed: Vec<PackedShadows> = sets.iter().map(PackedShadows::new).collect();
    for p in &packed[1..] {
        check_compatible(&packed[0], p)?;
    }
    let t = sets.len();
    let table = InnerTable::new(packed[0].n, hp.gamma);
    let pairs: Vec<(usize, usize)> = (0..t).flat_map(|i| (i..t).map(move |j| (i, j))).collect();
    let entries: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| packed_entry(&packed[i], &packed[j], &table, hp.tau))
        .collect();
    let mut values = DMatrix::zeros(t, t);
    for (&(i, j), &v) in pairs.iter().zip(&entries) {
        values[(i, j)] = v;
        values[(j, i)] = v;
    }
    Ok(GramMatrix {
        values,
        centered: false,
    })
}

/// `K_c = K − 1K/T − K1/T + 1K1/T²`.
pub fn center_gram(g: &GramMatrix) -> GramMatrix {
    let k = &g.values;
    let t = k.nrows();
    let tf = t as f64;
    let row_means: Vec<f64> = (0..t).map(|i| k.row(i).sum() / tf).collect();
    let col_means: Vec<f64> = (0..t).map(|j| k.column(j).sum() / tf).collect();
    let grand = row_means.iter().sum::<f64>() / tf;
    let values = DMatrix::from_fn(t, t, |i, j| k[(i, j)] - row_means[i] - col_means[j] + grand);
    GramMatrix {
        values,
        centered: true,
    }
}

/// Leading kernel-PCA components of a centered Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PcCoordinates {
    /// Retained eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors matching `eigenvalues`.
    pub vectors: Vec<Vec<f64>>,
    /// `coords[i][j] = √λ_j · v_j[i]`.
    pub coords: Vec<Vec<f64>>,
    /// Full spectrum of the centered matrix, descending.
    pub spectrum: Vec<f64>,
}

/// Relative threshold below which an eigenvalue counts as zero.
const POSITIVE_REL_TOL: f64 = 1e-12;

pub fn leading_components(kc: &GramMatrix, k: usize) -> Result<PcCoordinates> {
    if k == 0 {
        return domain("at least one component must be requested");
    }
    let t = kc.size();
    let eig = SymmetricEigen::new(kc.values.clone());
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let spectrum: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let scale = spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let positive = spectrum
        .iter()
        .take_while(|&&v| v > POSITIVE_REL_TOL * scale && v > 0.0)
        .count();
    if k > positive {
        return domain(format!(
            "requested {k} components but only {positive} positive eigenvalues"
        ));
    }
    let mut eigenvalues = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        // Sign convention: the largest-magnitude entry is positive.
        let pivot = v
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bv), (i, &x)| if x.abs() > bv.abs() { (i, x) } else { (bi, bv) })
            .0;
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        eigenvalues.push(eig.eigenvalues[idx]);
        vectors.push(v);
    }
    let coords = (0..t)
        .map(|i| {
            eigenvalues
                .iter()
                .zip(&vectors)
                .map(|(&l, v)| l.sqrt() * v[i])
                .collect()
        })
        .collect();
    Ok(PcCoordinates {
        eigenvalues,
        vectors,
        coords,
        spectrum,
    })
}
