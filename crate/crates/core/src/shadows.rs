//! Classical shadows from random per-site Pauli measurements.
//!
//! Each site draws one of three orthonormal frame axes uniformly; the joint
//! outcome is sampled from the Born distribution after rotating every site
//! into the eigenbasis of its chosen axis.

use std::io::{BufRead, Write};

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::dot3;
use crate::error::{domain, Error, Result};
use crate::statevector::{apply_1q_raw, pauli_dot, Mat2, State};

pub const DEFAULT_SHADOWS: usize = 500;
pub const DEFAULT_FRAME_ANGLE: f64 = 0.7;
pub const DEFAULT_FRAME_AXIS: [f64; 3] = [0.0, 1.0, 0.0];

const NORM_TOL: f64 = 1e-8;

/// Three orthonormal measurement axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementFrame {
    pub axes: [[f64; 3]; 3],
}

impl MeasurementFrame {
    pub fn lab() -> Self {
        Self {
            axes: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Largest deviation from orthonormality.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot3(self.axes[a], self.axes[b]) - target).abs());
            }
        }
        worst
    }

    /// Expresses a lab-frame vector in frame coordinates.
    pub fn to_frame(&self, v: [f64; 3]) -> [f64; 3] {
        self.axes.map(|a| dot3(a, v))
    }

    /// Maps frame coordinates back to the lab frame.
    pub fn to_lab(&self, c: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, axis) in self.axes.iter().enumerate() {
            for d in 0..3 {
                out[d] += c[k] * axis[d];
            }
        }
        out
    }
}

impl Default for MeasurementFrame {
    /// The lab frame rotated by 0.7 rad about ŷ.
    fn default() -> Self {
        frame_from_rotation(DEFAULT_FRAME_ANGLE, DEFAULT_FRAME_AXIS)
            .expect("default frame axis is a unit vector")
    }
}

/// Rotates the lab axes rigidly by `angle` about the unit vector `axis`.
pub fn frame_from_rotation(angle: f64, axis: [f64; 3]) -> Result<MeasurementFrame> {
    let norm = dot3(axis, axis).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return domain(format!("rotation axis has norm {norm}, expected 1"));
    }
    let (s, c) = angle.sin_cos();
    let [kx, ky, kz] = axis;
    // Rodrigues: R = c·1 + s·[k]× + (1−c)·k kᵀ
    let r = [
        [c + (1.0 - c) * kx * kx, (1.0 - c) * kx * ky - s * kz, (1.0 - c) * kx * kz + s * ky],
        [(1.0 - c) * ky * kx + s * kz, c + (1.0 - c) * ky * ky, (1.0 - c) * ky * kz - s * kx],
        [(1.0 - c) * kz * kx - s * ky, (1.0 - c) * kz * ky + s * kx, c + (1.0 - c) * kz * kz],
    ];
    let column = |j: usize| [r[0][j], r[1][j], r[2][j]];
    Ok(MeasurementFrame {
        axes: [column(0), column(1), column(2)],
    })
}

/// One site's outcome: the frame axis index and the eigenvalue sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome {
    pub axis: u8,
    pub positive: bool,
}

impl Outcome {
    pub fn sign(self) -> f64 {
        if self.positive {
            1.0
        } else {
            -1.0
        }
    }
}

pub type SnapshotRow = Vec<Outcome>;

/// `N_s` snapshot rows of one state, all taken in the same frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowSet {
    n: usize,
    frame: MeasurementFrame,
    rows: Vec<SnapshotRow>,
}

impl ShadowSet {
    pub fn new(n: usize, frame: MeasurementFrame, rows: Vec<SnapshotRow>) -> Result<Self> {
        if rows.is_empty() {
            return domain("a shadow set needs at least one snapshot");
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return domain(format!("snapshot {bad} has {} sites, expected {n}", rows[bad].len()));
        }
        if rows.iter().flatten().any(|o| o.axis > 2) {
            return domain("axis index must be 0, 1 or 2");
        }
        Ok(Self { n, frame, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn frame(&self) -> &MeasurementFrame {
        &self.frame
    }

    pub fn rows(&self) -> &[SnapshotRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Single-site Bloch vector estimate `mean(3 · sign · axis)` in the lab
    /// frame.
    pub fn bloch_estimate(&self, site: usize) -> [f64; 3] {
        let mut acc = [0.0; 3];
        for row in &self.rows {
            let o = row[site];
            let axis = self.frame.axes[o.axis as usize];
            for d in 0..3 {
                acc[d] += 3.0 * o.sign() * axis[d];
            }
        }
        acc.map(|v| v / self.rows.len() as f64)
    }

    /// Writes one CSV line per snapshot: `axis_0,sign_0,axis_1,sign_1,…`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (0..self.n)
            .flat_map(|i| [format!("axis_{i}"), format!("sign_{i}")])
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .flat_map(|o| [o.axis.to_string(), if o.positive { "1" } else { "-1" }.to_string()])
                .collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R, frame: MeasurementFrame) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Domain("empty shadow dump".into()))??;
        let cols = header.split(',').count();
        if cols % 2 != 0 || cols == 0 {
            return domain("shadow dump header must list axis/sign pairs");
        }
        let n = cols / 2;
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols {
                return domain(format!("shadow dump line {} has {} fields", lineno + 2, fields.len()));
            }
            let row = fields
                .chunks(2)
                .map(|p| {
                    let axis: u8 = p[0].trim().parse().map_err(|_| Error::Domain(format!("bad axis {:?}", p[0])))?;
                    let positive = match p[1].trim() {
                        "1" => true,
                        "-1" => false,
                        other => return domain(format!("bad sign {other:?}")),
                    };
                    Ok(Outcome { axis, positive })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(n, frame, rows)
    }
}

/// Basis-change gates `B` with rows `⟨+v|`, `⟨−v|` for each frame axis, so
/// that measuring Z after `B` measures `σ·v`.
fn basis_changes(frame: &MeasurementFrame) -> [Mat2; 3] {
    frame.axes.map(|v| {
        let plus = eigvec(v, 1.0);
        let minus = eigvec(v, -1.0);
        [
            [plus[0].conj(), plus[1].conj()],
            [minus[0].conj(), minus[1].conj()],
        ]
    })
}

/// Normalized eigenvector of `σ·v` with eigenvalue `sign`, read off the
/// largest column of the projector `(1 + sign σ·v)/2`.
fn eigvec(v: [f64; 3], sign: f64) -> [C64; 2] {
    let p = pauli_dot(v);
    let proj = [
        [(C64::new(1.0, 0.0) + p[0][0] * sign) * 0.5, p[0][1] * sign * 0.5],
        [p[1][0] * sign * 0.5, (C64::new(1.0, 0.0) + p[1][1] * sign) * 0.5],
    ];
    let col = |j: usize| [proj[0][j], proj[1][j]];
    let n0 = proj[0][0].norm_sqr() + proj[1][0].norm_sqr();
    let n1 = proj[0][1].norm_sqr() + proj[1][1].norm_sqr();
    let (c, norm) = if n0 >= n1 { (col(0), n0.sqrt()) } else { (col(1), n1.sqrt()) };
    [c[0] / norm, c[1] / norm]
}

fn check_normalized(s: &State) -> Result<()> {
    let norm = s.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Contract(format!("state norm {norm} deviates from 1")));
    }
    Ok(())
}

/// Reusable sampler; holds the basis-change gates and a scratch buffer.
pub struct SnapshotSampler {
    frame: MeasurementFrame,
    changes: [Mat2; 3],
    scratch: Vec<C64>,
}

impl SnapshotSampler {
    pub fn new(frame: MeasurementFrame) -> Self {
        Self {
            changes: basis_changes(&frame),
            frame,
            scratch: Vec::new(),
        }
    }

    pub fn frame(&self) -> &MeasurementFrame {
        &self.frame
    }

    /// Draws the axes (site 0 first), then one uniform variate for the
    /// joint outcome.
    pub fn sample<R: Rng + ?Sized>(&mut self, s: &State, rng: &mut R) -> SnapshotRow {
        let axes: Vec<u8> = (0..s.n()).map(|_| rng.random_range(0..3u8)).collect();
        self.sample_with_axes(s, &axes, rng)
    }

    pub fn sample_with_axes<R: Rng + ?Sized>(
        &mut self,
        s: &State,
        axes: &[u8],
        rng: &mut R,
    ) -> SnapshotRow {
        self.scratch.clear();
        self.scratch.extend_from_slice(s.amps());
        for (site, &a) in axes.iter().enumerate() {
            apply_1q_raw(&mut self.scratch, &self.changes[a as usize], site);
        }
        let index = categorical(&self.scratch, rng);
        axes.iter()
            .enumerate()
            .map(|(site, &axis)| Outcome {
                axis,
                positive: (index >> site) & 1 == 0,
            })
            .collect()
    }
}

/// Draws an index from `|amps|²` by inverse CDF with one uniform variate.
pub(crate) fn categorical<R: Rng + ?Sized>(amps: &[C64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let target = u * total;
    let mut acc = 0.0;
    for (i, a) in amps.iter().enumerate() {
        acc += a.norm_sqr();
        if acc > target {
            return i;
        }
    }
    // Rounding can leave `acc` marginally below `target`; fall back to the
    // last index with nonzero weight.
    amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
}

pub fn sample_snapshot<R: Rng + ?Sized>(
    s: &State,
    frame: &MeasurementFrame,
    rng: &mut R,
) -> Result<SnapshotRow> {
    check_normalized(s)?;
    Ok(SnapshotSampler::new(*frame).sample(s, rng))
}

pub fn shadow_set<R: Rng + ?Sized>(
    s: &State,
    n_shadows: usize,
    frame: &MeasurementFrame,
    rng: &mut R,
) -> Result<ShadowSet> {
    if n_shadows == 0 {
        return domain("shadow count must be positive");
    }
    check_normalized(s)?;
    let mut sampler = SnapshotSampler::new(*frame);
    let rows = (0..n_shadows).map(|_| sampler.sample(s, rng)).collect();
    Ok(ShadowSet {
        n: s.n(),
        frame: *frame,
        rows,
    })
}
