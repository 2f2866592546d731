//! Floquet circuit families and Haar-random single-qubit gates.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::statevector::{
    apply_1q_raw, apply_2q_raw, dagger2, identity2, kron2, mul2, mul4, pauli_dot, pauli_x,
    pauli_y, pauli_z, scale2, Gate1Q, Gate2Q, Mat2, Mat4, State, I, ONE, ZERO,
};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    One(Gate1Q),
    Two(Gate2Q),
}

/// One Floquet period as an ordered gate list.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let ok = match &gate {
            Gate::One(g) => g.site < self.n,
            Gate::Two(g) => g.sites.0 < self.n && g.sites.1 < self.n && g.sites.0 != g.sites.1,
        };
        if !ok {
            return domain(format!("gate {gate:?} does not fit a {}-qubit circuit", self.n));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn push_1q(&mut self, matrix: Mat2, site: usize) -> Result<()> {
        self.push(Gate::One(Gate1Q::new(matrix, site)))
    }

    pub fn push_2q(&mut self, matrix: Mat4, a: usize, b: usize) -> Result<()> {
        self.push(Gate::Two(Gate2Q::new(matrix, a, b)?))
    }

    /// Applies one period to `s`.
    pub fn apply(&self, s: &State) -> Result<State> {
        let mut out = s.clone();
        self.apply_mut(&mut out)?;
        Ok(out)
    }

    pub fn apply_mut(&self, s: &mut State) -> Result<()> {
        if s.n() != self.n {
            return domain(format!(
                "{}-qubit circuit applied to {}-qubit state",
                self.n,
                s.n()
            ));
        }
        self.apply_raw(s.amps_mut());
        Ok(())
    }

    pub(crate) fn apply_raw(&self, amps: &mut [C64]) {
        debug_assert_eq!(amps.len(), self.dim());
        for g in &self.gates {
            match g {
                Gate::One(g) => apply_1q_raw(amps, &g.matrix, g.site),
                Gate::Two(g) => apply_2q_raw(amps, &g.matrix, g.sites.0, g.sites.1),
            }
        }
    }

    /// An equivalent circuit in which every single-qubit gate is absorbed
    /// into the next two-qubit gate touching its site. Single-qubit gates
    /// with no later two-qubit partner are emitted at the end.
    pub fn fused(&self) -> Circuit {
        let mut pending: Vec<Option<Mat2>> = vec![None; self.n];
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match g {
                Gate::One(g) => {
                    let acc = pending[g.site].get_or_insert_with(identity2);
                    *acc = mul2(&g.matrix, acc);
                }
                Gate::Two(g) => {
                    let (a, b) = g.sites;
                    let pa = pending[a].take().unwrap_or_else(identity2);
                    let pb = pending[b].take().unwrap_or_else(identity2);
                    let matrix = mul4(&g.matrix, &kron2(&pa, &pb));
                    gates.push(Gate::Two(Gate2Q { matrix, sites: g.sites }));
                }
            }
        }
        for (site, p) in pending.into_iter().enumerate() {
            if let Some(matrix) = p {
                gates.push(Gate::One(Gate1Q { matrix, site }));
            }
        }
        Circuit { n: self.n, gates }
    }

    /// Full `2^n × 2^n` matrix of one period, built column by column.
    pub fn dense_matrix(&self) -> DMatrix<C64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        let mut col = vec![ZERO; dim];
        for j in 0..dim {
            col.iter_mut().for_each(|a| *a = ZERO);
            col[j] = ONE;
            self.apply_raw(&mut col);
            for (i, a) in col.iter().enumerate() {
                m[(i, j)] = *a;
            }
        }
        m
    }
}

/// Unit vector from polar angle `theta` and azimuth `phi`.
pub fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_unit(v: [f64; 3], what: &str) -> Result<()> {
    let norm = dot3(v, v).sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return domain(format!("{what} has norm {norm}, expected 1"));
    }
    Ok(())
}

/// Parameters of the kicked-Ising family `U = e^{iH_J} e^{iH_h}` with
/// `H_J = Σ J_i (σ_i·ŝ)(σ_{i+1}·ŝ)` and `H_h = Σ h_i σ_i·m̂` on a ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtcParams {
    pub j: Vec<f64>,
    pub h: Vec<f64>,
    pub s_hat: [f64; 3],
    pub m_hat: [f64; 3],
    pub shared_j: bool,
}

impl DtcParams {
    pub fn uniform(n: usize, j: f64, h: f64, s_hat: [f64; 3], m_hat: [f64; 3]) -> Self {
        Self {
            j: vec![j; n],
            h: vec![h; n],
            s_hat,
            m_hat,
            shared_j: true,
        }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.h.len();
        if n == 0 || self.j.len() != n {
            return domain(format!(
                "coupling and field vectors must share a positive length (got {} and {n})",
                self.j.len()
            ));
        }
        check_unit(self.s_hat, "Ising axis")?;
        check_unit(self.m_hat, "field axis")?;
        if self.shared_j && self.j.iter().any(|&j| j != self.j[0]) {
            return domain("shared_j set but couplings differ");
        }
        Ok(())
    }
}

/// `cos θ · 1 + i sin θ · P` for an involutory `P`.
fn involution_exp2(p: &Mat2, theta: f64) -> Mat2 {
    let mut out = scale2(p, C64::new(0.0, theta.sin()));
    out[0][0] += theta.cos();
    out[1][1] += theta.cos();
    out
}

fn involution_exp4(p: &Mat4, theta: f64) -> Mat4 {
    let mut out = p.map(|row| row.map(|v| v * C64::new(0.0, theta.sin())));
    for (k, row) in out.iter_mut().enumerate() {
        row[k] += theta.cos();
    }
    out
}

/// Field gate `exp(i h σ·m̂)`.
pub fn field_gate(h: f64, m_hat: [f64; 3]) -> Mat2 {
    involution_exp2(&pauli_dot(m_hat), h)
}

/// Ising bond gate `exp(i J (σ·ŝ)⊗(σ·ŝ))`.
pub fn ising_gate(j: f64, s_hat: [f64; 3]) -> Mat4 {
    let p = pauli_dot(s_hat);
    involution_exp4(&kron2(&p, &p), j)
}

/// One period of the kicked-Ising family: the field layer first, then the
/// Ising layer on bonds `(i, i+1 mod n)`.
pub fn dtc_unitary(p: &DtcParams) -> Result<Circuit> {
    p.validate()?;
    let n = p.n();
    let mut c = Circuit::new(n);
    for (site, &h) in p.h.iter().enumerate() {
        c.push_1q(field_gate(h, p.m_hat), site)?;
    }
    for (site, &j) in p.j.iter().enumerate() {
        let next = (site + 1) % n;
        if next == site {
            continue;
        }
        c.push_2q(ising_gate(j, p.s_hat), site, next)?;
    }
    Ok(c)
}

/// Parameters of the brickwork XYZ family. `layer_a` precedes the even
/// bonds, `layer_b` precedes the odd bonds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrickworkParams {
    pub n: usize,
    pub j_xyz: [f64; 3],
    pub layer_a: Vec<Mat2>,
    pub layer_b: Vec<Mat2>,
}

impl BrickworkParams {
    pub fn identity_layers(n: usize, j_xyz: [f64; 3]) -> Self {
        Self {
            n,
            j_xyz,
            layer_a: vec![identity2(); n],
            layer_b: vec![identity2(); n],
        }
    }

    /// Draws both single-qubit layers i.i.d. from the Haar measure, layer A
    /// site by site first, then layer B.
    pub fn haar<R: Rng + ?Sized>(n: usize, j_xyz: [f64; 3], rng: &mut R) -> Self {
        let layer_a = (0..n).map(|_| haar_1q(rng)).collect();
        let layer_b = (0..n).map(|_| haar_1q(rng)).collect();
        Self {
            n,
            j_xyz,
            layer_a,
            layer_b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n % 2 != 0 {
            return domain(format!("brickwork circuits need an even qubit count ≥ 2, got {}", self.n));
        }
        if self.layer_a.len() != self.n || self.layer_b.len() != self.n {
            return domain("single-qubit layers must have one gate per site");
        }
        for g in self.layer_a.iter().chain(&self.layer_b) {
            let d = crate::statevector::unitarity_defect2(g);
            if d > UNIT_TOL {
                return Err(Error::Contract(format!("single-qubit layer gate not unitary (defect {d:e})")));
            }
        }
        Ok(())
    }
}

/// `exp(i/4 (J_x XX + J_y YY + J_z ZZ))`, by spectral decomposition of the
/// Hermitian generator.
pub fn xyz_gate(j_xyz: [f64; 3]) -> Mat4 {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut gen = Matrix4::<C64>::zeros();
    for (p, &j) in paulis.iter().zip(&j_xyz) {
        let pp = kron2(p, p);
        for r in 0..4 {
            for c in 0..4 {
                gen[(r, c)] += pp[r][c] * (j / 4.0);
            }
        }
    }
    let eig = gen.symmetric_eigen();
    let mut out = [[ZERO; 4]; 4];
    for k in 0..4 {
        let phase = (I * eig.eigenvalues[k]).exp();
        let v = eig.eigenvectors.column(k);
        for r in 0..4 {
            for c in 0..4 {
                out[r][c] += v[r] * phase * v[c].conj();
            }
        }
    }
    out
}

/// One brickwork period: layer A, XYZ bricks on even bonds `(0,1),(2,3),…`,
/// layer B, XYZ bricks on odd bonds `(1,2),…,(n−1,0)`.
pub fn brickwork_unitary(p: &BrickworkParams) -> Result<Circuit> {
    p.validate()?;
    let n = p.n;
    let brick = xyz_gate(p.j_xyz);
    let mut c = Circuit::new(n);
    for (site, g) in p.layer_a.iter().enumerate() {
        c.push_1q(*g, site)?;
    }
    for a in (0..n).step_by(2) {
        c.push_2q(brick, a, a + 1)?;
    }
    for (site, g) in p.layer_b.iter().enumerate() {
        c.push_1q(*g, site)?;
    }
    if n > 2 {
        for a in (1..n).step_by(2) {
            c.push_2q(brick, a, (a + 1) % n)?;
        }
    } else {
        // On two sites the odd bond wraps onto the same pair.
        c.push_2q(brick, 1, 0)?;
    }
    Ok(c)
}

/// Haar-random 2×2 unitary: Gram–Schmidt on the columns of a complex
/// Ginibre matrix, which is QR with a positive-diagonal R.
///
/// Draw order is fixed: real then imaginary part of entries (0,0), (1,0),
/// (0,1), (1,1).
pub fn haar_1q<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let mut gauss = || -> C64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    };
    let z00 = gauss();
    let z10 = gauss();
    let z01 = gauss();
    let z11 = gauss();
    let n0 = (z00.norm_sqr() + z10.norm_sqr()).sqrt();
    let (q00, q10) = (z00 / n0, z10 / n0);
    let proj = q00.conj() * z01 + q10.conj() * z11;
    let (w0, w1) = (z01 - proj * q00, z11 - proj * q10);
    let n1 = (w0.norm_sqr() + w1.norm_sqr()).sqrt();
    [[q00, w0 / n1], [q10, w1 / n1]]
}

pub fn adjoint_1q(g: &Mat2) -> Mat2 {
    dagger2(g)
}
