//! Dense complex linear algebra for desk-scale dimensions.
//!
//! Everything here works on small matrices (a few dozen rows at most), so
//! the routines favour clarity over blocking or SIMD: row-major storage,
//! cyclic Jacobi for Hermitian eigenproblems and scaling-and-squaring for
//! the exponential.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::TOL;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// One of the two parties of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::A => "A",
            Party::B => "B",
        })
    }
}

/// Local dimensions `(d_A, d_B)` of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::BadDims(format!(
                "local dimensions must be positive, got ({a}, {b})"
            )));
        }
        Ok(Dims { a, b })
    }

    pub fn total(self) -> usize {
        self.a * self.b
    }

    pub fn of(self, party: Party) -> usize {
        match party {
            Party::A => self.a,
            Party::B => self.b,
        }
    }

    /// Flat index of `|i⟩_A |j⟩_B`.
    pub fn index(self, i: usize, j: usize) -> usize {
        i * self.b + j
    }

    pub fn swapped(self) -> Dims {
        Dims { a: self.b, b: self.a }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.a, self.b)
    }
}

/// A dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::BadDims("vector must have at least one entry".into()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadDims("vector entries must be finite".into()));
        }
        Ok(ComplexVector(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|k⟩` of length `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut v = vec![ZERO; dim];
        v[k] = ONE;
        ComplexVector(v)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        ComplexVector(vec![ZERO; dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> C64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<ComplexVector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: C64) -> ComplexVector {
        ComplexVector(self.0.iter().map(|z| z * s).collect())
    }

    /// Kronecker product, `self` major.
    pub fn tensor(&self, other: &ComplexVector) -> ComplexVector {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in &self.0 {
            for b in &other.0 {
                out.push(a * b);
            }
        }
        ComplexVector(out)
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |i, j| self.0[i] * self.0[j].conj())
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.len(), rhs.len());
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.len(), rhs.len());
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// A dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::BadDims(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map(|c| c.len()).unwrap_or(0);
        if cols == 0 || columns.iter().any(|c| c.len() != rows) {
            return Err(Error::BadDims("columns must be non-empty and of equal length".into()));
        }
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|M_ij − conj(M_ji)|`; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= TOL.hermitian
    }

    /// `‖M†M − I‖_max`; infinite for non-square input.
    pub fn unitary_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_defect() <= TOL.unitary
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        ComplexVector(
            (0..self.rows)
                .map(|i| {
                    self.data[i * self.cols..(i + 1) * self.cols]
                        .iter()
                        .zip(v.as_slice())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        )
    }

    /// Kronecker product with `self` indices major.
    pub fn tensor(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// Partial trace over the party not in `keep`.
    pub fn partial_trace(&self, dims: Dims, keep: Party) -> Result<ComplexMatrix> {
        let n = dims.total();
        if self.rows != n || self.cols != n {
            return Err(Error::BadDims(format!(
                "partial trace over {dims} needs a {n}x{n} matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let out = match keep {
            Party::A => Self::from_fn(dims.a, dims.a, |i, k| {
                (0..dims.b).map(|j| self[(dims.index(i, j), dims.index(k, j))]).sum()
            }),
            Party::B => Self::from_fn(dims.b, dims.b, |j, l| {
                (0..dims.a).map(|i| self[(dims.index(i, j), dims.index(i, l))]).sum()
            }),
        };
        Ok(out)
    }

    /// Eigendecomposition of a Hermitian matrix.
    ///
    /// Eigenvalues come back ascending; column `k` of the returned matrix is
    /// the eigenvector of eigenvalue `k`.
    pub fn eigh(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let defect = self.hermitian_defect();
        if defect > TOL.hermitian_input * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(jacobi_eigh(self))
    }

    /// Eigenvalues only, ascending.
    pub fn eigvalsh(&self) -> Result<Vec<f64>> {
        self.eigh().map(|(w, _)| w)
    }

    /// `exp(i·h)` for Hermitian `h`.
    pub fn expm_skew_hermitian(&self) -> Result<ComplexMatrix> {
        let defect = self.hermitian_defect();
        if defect > TOL.hermitian_input * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(expm(&self.scale(I)))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product, `a` indices major.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

pub fn partial_trace(m: &ComplexMatrix, dims: Dims, keep: Party) -> Result<ComplexMatrix> {
    m.partial_trace(dims, keep)
}

pub fn eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    m.eigh()
}

pub fn expm_skew_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    h.expm_skew_hermitian()
}

/// Gram matrix `G[i][j] = ⟨v_i|v_j⟩`.
pub fn gram(vectors: &[ComplexVector]) -> Result<ComplexMatrix> {
    let n = vectors.len();
    let len = vectors
        .first()
        .map(|v| v.len())
        .ok_or_else(|| Error::BadDims("empty vector list".into()))?;
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::BadDims("gram: vectors differ in length".into()));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| vectors[i].inner(&vectors[j])))
}

fn jacobi_eigh(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.rows;
    // Symmetrize so that round-off asymmetry cannot leak into the rotations.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius();

    if scale > 0.0 {
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= TOL.jacobi * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
    let sorted = order.iter().map(|&k| values[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (sorted, vectors)
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = a.rows;
    let phase = apq / mag;
    let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = diag(1, conj(phase)) · [[c, s], [-s, c]] restricted to (p, q).
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    for k in 0..n {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * jpp + y * jqp;
        a[(k, q)] = x * jpq + y * jqq;
    }
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = jpp.conj() * x + jqp.conj() * y;
        a[(q, k)] = jpq.conj() * x + jqq.conj() * y;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * jpp + y * jqp;
        v[(k, q)] = x * jpq + y * jqq;
    }
}

fn norm1(m: &ComplexMatrix) -> f64 {
    (0..m.cols)
        .map(|j| (0..m.rows).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor series that
/// runs until the next term no longer changes the sum.
fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows;
    let norm = norm1(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));

    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..40 {
        term = (&term * &scaled).scale(C64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
        if term.max_abs() <= f64::EPSILON * 1e-2 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn basis_projector_tensor() {
        let p0 = ComplexVector::basis(2, 0).projector();
        let p1 = ComplexVector::basis(2, 1).projector();
        let m = tensor(&p0, &p1);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == 1 && j == 1 { ONE } else { ZERO };
                assert_eq!(m[(i, j)], expected);
            }
        }
    }

    #[test]
    fn sigma_x_on_a_flips_first_qubit() {
        let op = tensor(&sigma_x(), &ComplexMatrix::identity(2));
        let out = op.apply(&ComplexVector::basis(4, 0));
        assert_eq!(out, ComplexVector::basis(4, 2));
    }

    #[test]
    fn partial_trace_of_bell_state_is_half_identity() {
        let s = 0.5f64.sqrt();
        let phi = ComplexVector::from_real(&[s, 0.0, 0.0, s]).unwrap();
        let dims = Dims::new(2, 2).unwrap();
        let ra = phi.projector().partial_trace(dims, Party::A).unwrap();
        assert!(ra.max_abs_diff(&ComplexMatrix::identity(2).scale(c(0.5))) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let dims = Dims::new(2, 2).unwrap();
        let ket01 = ComplexVector::basis(4, 1);
        let ra = ket01.projector().partial_trace(dims, Party::A).unwrap();
        assert_eq!(ra, ComplexVector::basis(2, 0).projector());
        let rb = ket01.projector().partial_trace(dims, Party::B).unwrap();
        assert_eq!(rb, ComplexVector::basis(2, 1).projector());
    }

    #[test]
    fn partial_trace_rejects_wrong_size() {
        let err = ComplexMatrix::identity(3)
            .partial_trace(Dims::new(2, 2).unwrap(), Party::A)
            .unwrap_err();
        assert_eq!(err.code(), "bad-dims");
    }

    #[test]
    fn partial_trace_handles_unequal_dims() {
        // |1⟩_A ⊗ |0⟩_B in 3x2 has flat index 2.
        let dims = Dims::new(3, 2).unwrap();
        let rho = ComplexVector::basis(6, 2).projector();
        assert_eq!(
            rho.partial_trace(dims, Party::A).unwrap(),
            ComplexVector::basis(3, 1).projector()
        );
        assert_eq!(
            rho.partial_trace(dims, Party::B).unwrap(),
            ComplexVector::basis(2, 0).projector()
        );
    }

    #[test]
    fn eigh_diagonal() {
        let (w, _) = ComplexMatrix::diag_real(&[2.0 / 3.0, 1.0 / 3.0]).eigh().unwrap();
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((w[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn eigh_rank_one_all_ones() {
        let m = ComplexMatrix::from_fn(3, 3, |_, _| c(1.0 / 9.0));
        let w = m.eigvalsh().unwrap();
        assert!(w[0].abs() < 1e-14 && w[1].abs() < 1e-14);
        assert!((w[2] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_mixed_three_by_three() {
        // (1/3)diag(0,1,1) + J/9: the antisymmetric vector (0,1,-1) sits at 1/3
        // and the symmetric sector solves 27λ² − 18λ + 1 = 0.
        let m = ComplexMatrix::from_fn(3, 3, |i, j| {
            let d = if i == j && i > 0 { 1.0 / 3.0 } else { 0.0 };
            c(d + 1.0 / 9.0)
        });
        let w = m.eigvalsh().unwrap();
        let disc = (18.0f64 * 18.0 - 4.0 * 27.0).sqrt();
        let lo = (18.0 - disc) / 54.0;
        let hi = (18.0 + disc) / 54.0;
        assert!((w[0] - lo).abs() < 1e-12 && (lo - 0.061166).abs() < 1e-5);
        assert!((w[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((w[2] - hi).abs() < 1e-12 && (hi - 0.605500).abs() < 1e-5);
    }

    #[test]
    fn eigh_complex_residual() {
        let m = ComplexMatrix::new(
            3,
            3,
            vec![
                c(2.0),
                C64::new(0.3, -0.7),
                C64::new(0.0, 1.1),
                C64::new(0.3, 0.7),
                c(-1.0),
                C64::new(0.4, 0.2),
                C64::new(0.0, -1.1),
                C64::new(0.4, -0.2),
                c(0.5),
            ],
        )
        .unwrap();
        let (w, v) = m.eigh().unwrap();
        for (k, wk) in w.iter().enumerate() {
            let vk = v.column(k);
            let resid = &m.apply(&vk) - &vk.scale(c(*wk));
            assert!(resid.norm() < 1e-12);
        }
        assert!(v.unitary_defect() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.eigh().unwrap_err().code(), "not-hermitian");
    }

    #[test]
    fn expm_zero_is_identity() {
        let u = ComplexMatrix::zeros(3, 3).expm_skew_hermitian().unwrap();
        assert_eq!(u, ComplexMatrix::identity(3));
    }

    #[test]
    fn expm_half_pi_sigma_y_rotates_zero_to_one() {
        // exp(i(π/2)σ_y) = iσ_y = [[0, 1], [-1, 0]].
        let u = sigma_y()
            .scale(c(std::f64::consts::FRAC_PI_2))
            .expm_skew_hermitian()
            .unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        assert!(u.max_abs_diff(&expected) < 1e-14);
        let out = u.apply(&ComplexVector::basis(2, 0));
        assert!((out[1].norm() - 1.0).abs() < 1e-14);
        assert!(u.is_unitary());
    }

    #[test]
    fn expm_large_generator_stays_unitary() {
        let h = ComplexMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                c(10.0 * i as f64)
            } else if i < j {
                C64::new((i + j) as f64, (j as f64) - 0.5)
            } else {
                C64::new((i + j) as f64, 0.5 - (i as f64))
            }
        });
        let u = h.expm_skew_hermitian().unwrap();
        assert!(u.unitary_defect() < 1e-10);
        let v = h.scale(c(-1.0)).expm_skew_hermitian().unwrap();
        assert!((&u * &v).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.expm_skew_hermitian().unwrap_err().code(), "not-hermitian");
    }

    #[test]
    fn gram_of_zero_and_plus() {
        let s = 0.5f64.sqrt();
        let g = gram(&[ComplexVector::basis(2, 0), ComplexVector::from_real(&[s, s]).unwrap()]).unwrap();
        assert!((g[(0, 1)].re - s).abs() < 1e-15);
        assert!((g[(1, 0)].re - s).abs() < 1e-15);
        assert!((g[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gram_rejects_mixed_lengths() {
        let err = gram(&[ComplexVector::basis(2, 0), ComplexVector::basis(3, 0)]).unwrap_err();
        assert_eq!(err.code(), "bad-dims");
    }

    #[test]
    fn vector_rejects_non_finite() {
        assert!(ComplexVector::from_real(&[f64::NAN]).is_err());
        assert!(ComplexVector::new(vec![]).is_err());
    }
}
