//! Dense statevectors and one/two-qubit gate application.
//!
//! Site `i` is bit `i` of the basis index (site 0 is the least significant
//! bit). A two-qubit matrix acting on the ordered pair `(a, b)` uses the local
//! index `2 * bit_a + bit_b`, so a product gate `A ⊗ B` is `kron(A, B)`.

use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};

pub const MIN_QUBITS: usize = 1;
pub const MAX_QUBITS: usize = 14;

const UNITARY_TOL: f64 = 1e-12;

pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn identity4() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = ONE;
    }
    m
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Mat2 {
    [[ZERO, -I], [I, ZERO]]
}

pub fn pauli_z() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

/// `σ · v` for a real 3-vector `v`.
pub fn pauli_dot(v: [f64; 3]) -> Mat2 {
    [
        [C64::new(v[2], 0.0), C64::new(v[0], -v[1])],
        [C64::new(v[0], v[1]), C64::new(-v[2], 0.0)],
    ]
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn mul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub fn dagger2(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn dagger4(a: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = a[c][r].conj();
        }
    }
    out
}

pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for (ra, row_a) in a.iter().enumerate() {
        for (ca, &va) in row_a.iter().enumerate() {
            for (rb, row_b) in b.iter().enumerate() {
                for (cb, &vb) in row_b.iter().enumerate() {
                    out[2 * ra + rb][2 * ca + cb] = va * vb;
                }
            }
        }
    }
    out
}

pub fn scale2(a: &Mat2, s: C64) -> Mat2 {
    a.map(|row| row.map(|v| v * s))
}

pub fn add2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = *a;
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] += b[r][c];
        }
    }
    out
}

/// `max |G†G − 1|` over matrix entries.
pub fn unitarity_defect2(g: &Mat2) -> f64 {
    let p = mul2(&dagger2(g), g);
    defect(p.iter().map(|r| r.as_slice()))
}

pub fn unitarity_defect4(g: &Mat4) -> f64 {
    let p = mul4(&dagger4(g), g);
    defect(p.iter().map(|r| r.as_slice()))
}

fn defect<'a>(rows: impl Iterator<Item = &'a [C64]>) -> f64 {
    rows.enumerate()
        .flat_map(|(r, row)| {
            row.iter().enumerate().map(move |(c, v)| {
                let target = if r == c { ONE } else { ZERO };
                (v - target).norm()
            })
        })
        .fold(0.0, f64::max)
}

/// A 2×2 unitary acting on one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate1Q {
    pub matrix: Mat2,
    pub site: usize,
}

impl Gate1Q {
    pub fn new(matrix: Mat2, site: usize) -> Self {
        debug_assert!(
            unitarity_defect2(&matrix) < UNITARY_TOL,
            "non-unitary single-qubit gate"
        );
        Self { matrix, site }
    }
}

/// A 4×4 unitary acting on an ordered pair of distinct sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate2Q {
    pub matrix: Mat4,
    pub sites: (usize, usize),
}

impl Gate2Q {
    pub fn new(matrix: Mat4, a: usize, b: usize) -> Result<Self> {
        if a == b {
            return domain(format!("two-qubit gate on equal sites ({a}, {a})"));
        }
        debug_assert!(
            unitarity_defect4(&matrix) < UNITARY_TOL,
            "non-unitary two-qubit gate"
        );
        Ok(Self { matrix, sites: (a, b) })
    }
}

/// A normalized pure state on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    n: usize,
    amps: Vec<C64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        return Err(Error::UnsupportedSize(format!(
            "qubit count {n} outside {MIN_QUBITS}..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl State {
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return domain(format!("basis index {index} out of range for {n} qubits"));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; no
    /// normalization is applied.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return domain(format!("amplitude vector length {len} is not a power of two"));
        }
        let n = len.trailing_zeros() as usize;
        check_qubits(n)?;
        Ok(Self { n, amps })
    }

    /// `⊗_i v_i` where `v_i` is the single-site state on site `i`.
    pub fn product(sites: &[[C64; 2]]) -> Result<Self> {
        let n = sites.len();
        check_qubits(n)?;
        let mut amps = vec![ONE; 1 << n];
        for (idx, a) in amps.iter_mut().enumerate() {
            for (site, v) in sites.iter().enumerate() {
                *a *= v[(idx >> site) & 1];
            }
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &State) -> Result<C64> {
        if self.n != other.n {
            return domain(format!("overlap of {}- and {}-qubit states", self.n, other.n));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn apply_1q(&self, g: &Gate1Q) -> Result<State> {
        let mut out = self.clone();
        out.apply_1q_mut(g)?;
        Ok(out)
    }

    pub fn apply_2q(&self, g: &Gate2Q) -> Result<State> {
        let mut out = self.clone();
        out.apply_2q_mut(g)?;
        Ok(out)
    }

    pub fn apply_1q_mut(&mut self, g: &Gate1Q) -> Result<()> {
        if g.site >= self.n {
            return domain(format!("gate site {} on {}-qubit state", g.site, self.n));
        }
        apply_1q_raw(&mut self.amps, &g.matrix, g.site);
        Ok(())
    }

    pub fn apply_2q_mut(&mut self, g: &Gate2Q) -> Result<()> {
        let (a, b) = g.sites;
        if a == b {
            return domain(format!("two-qubit gate on equal sites ({a}, {a})"));
        }
        if a >= self.n || b >= self.n {
            return domain(format!("gate sites ({a}, {b}) on {}-qubit state", self.n));
        }
        apply_2q_raw(&mut self.amps, &g.matrix, a, b);
        Ok(())
    }
}

/// Applies `m` on `site` of a raw amplitude slice. Bounds are the caller's
/// responsibility.
pub(crate) fn apply_1q_raw(amps: &mut [C64], m: &Mat2, site: usize) {
    let stride = 1usize << site;
    let [[m00, m01], [m10, m11]] = *m;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
            let a0 = *x0;
            let a1 = *x1;
            *x0 = m00 * a0 + m01 * a1;
            *x1 = m10 * a0 + m11 * a1;
        }
    }
}

#[inline]
fn insert_zero_bit(x: usize, pos: usize) -> usize {
    let low = x & ((1usize << pos) - 1);
    ((x >> pos) << (pos + 1)) | low
}

pub(crate) fn apply_2q_raw(amps: &mut [C64], m: &Mat4, a: usize, b: usize) {
    let ma = 1usize << a;
    let mb = 1usize << b;
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let quarter = amps.len() >> 2;
    for k in 0..quarter {
        let base = insert_zero_bit(insert_zero_bit(k, lo), hi);
        let idx = [base, base | mb, base | ma, base | ma | mb];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &i) in idx.iter().enumerate() {
            let row = &m[r];
            amps[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    fn expm_hermitian_2(h: &Mat2, theta: f64) -> Mat2 {
        // exp(iθH) for H with H² = 1
        add2(
            &scale2(&identity2(), C64::new(theta.cos(), 0.0)),
            &scale2(h, C64::new(0.0, theta.sin())),
        )
    }

    #[test]
    fn basis_states() {
        let s = State::basis_state(2, 0).unwrap();
        assert_eq!(s.amps(), &[ONE, ZERO, ZERO, ZERO]);
        let s = State::basis_state(1, 1).unwrap();
        assert_eq!(s.amps(), &[ZERO, ONE]);
        let s = State::basis_state(3, 5).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.amps()[5], ONE);
        assert!(matches!(State::basis_state(2, 4), Err(Error::Domain(_))));
        assert!(State::basis_state(15, 0).is_err());
    }

    #[test]
    fn single_qubit_gates() {
        let zero = State::basis_state(1, 0).unwrap();
        let id = zero.apply_1q(&Gate1Q::new(identity2(), 0)).unwrap();
        assert_eq!(id, zero);
        let flipped = zero.apply_1q(&Gate1Q::new(pauli_x(), 0)).unwrap();
        assert_eq!(flipped.amps(), &[ZERO, ONE]);
        // exp(i π/2 X) = i X
        let g = expm_hermitian_2(&pauli_x(), std::f64::consts::FRAC_PI_2);
        let out = zero.apply_1q(&Gate1Q::new(g, 0)).unwrap();
        assert!(close(out.amps()[0], ZERO, 1e-15));
        assert!(close(out.amps()[1], I, 1e-15));
        assert!(zero.apply_1q(&Gate1Q::new(pauli_x(), 1)).is_err());
    }

    #[test]
    fn two_qubit_gates() {
        let swap = {
            let mut m = [[ZERO; 4]; 4];
            m[0][0] = ONE;
            m[1][2] = ONE;
            m[2][1] = ONE;
            m[3][3] = ONE;
            m
        };
        // |01⟩ in site order (site 0 = 0, site 1 = 1) is index 2.
        let s = State::basis_state(2, 0b10).unwrap();
        let out = s.apply_2q(&Gate2Q::new(swap, 0, 1).unwrap()).unwrap();
        assert_eq!(out.amps()[0b01], ONE);
        assert_eq!(
            s.apply_2q(&Gate2Q::new(identity4(), 0, 1).unwrap()).unwrap(),
            s
        );
        // exp(i π/4 Z⊗Z) on |00⟩
        let zz = kron2(&pauli_z(), &pauli_z());
        let c = std::f64::consts::FRAC_PI_4;
        let mut g = identity4();
        for r in 0..4 {
            g[r][r] = (C64::new(0.0, c) * zz[r][r]).exp();
        }
        let out = State::basis_state(2, 0)
            .unwrap()
            .apply_2q(&Gate2Q::new(g, 0, 1).unwrap())
            .unwrap();
        assert!(close(out.amps()[0], C64::from_polar(1.0, c), 1e-15));
        assert!(Gate2Q::new(identity4(), 1, 1).is_err());
    }

    #[test]
    fn two_qubit_ordering_matches_kron() {
        // X on site a, Z on site b: kron(X, Z) must flip site a only.
        let g = Gate2Q::new(kron2(&pauli_x(), &pauli_z()), 2, 0).unwrap();
        let s = State::basis_state(3, 0b001).unwrap();
        let out = s.apply_2q(&g).unwrap();
        assert!(close(out.amps()[0b101], -ONE, 1e-15));
    }

    #[test]
    fn overlaps() {
        let z0 = State::basis_state(1, 0).unwrap();
        let z1 = State::basis_state(1, 1).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let plus = State::from_amplitudes(vec![C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
        assert_eq!(z0.overlap(&z0).unwrap(), ONE);
        assert_eq!(z0.overlap(&z1).unwrap(), ZERO);
        assert!(close(z0.overlap(&plus).unwrap(), C64::new(h, 0.0), 1e-15));
        let two = State::basis_state(2, 0).unwrap();
        assert!(z0.overlap(&two).is_err());
    }

    #[test]
    fn product_state_layout() {
        let s = State::product(&[[ZERO, ONE], [ONE, ZERO], [ZERO, ONE]]).unwrap();
        assert_eq!(s.amps()[0b101], ONE);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }
}
