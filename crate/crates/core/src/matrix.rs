// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices.
//!
//! Storage is row-major. Vectorization (`vec`) is column-stacking, so the
//! superoperator of `a ↦ x a y` is `kron(yᵀ, x)`. Decompositions are delegated
//! to `nalgebra`; everything that feeds a boolean verdict is made
//! deterministic (sorted spectra, phase-fixed vectors, projector-based
//! kernel bases).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance on normalized Frobenius distances.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalue floor used when deciding positive semidefiniteness.
pub const PSD_FLOOR: f64 = 1e-10;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| re(x)).collect())
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = re(x);
        }
        m
    }

    /// The matrix unit `E_ij` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    /// Column vector from entries.
    pub fn column(v: &[C64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Matrix product; panics on mismatched inner dimensions.
    pub fn dot(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "inner dimensions differ: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = vec![ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let dst = &mut out[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Self { rows: self.rows, cols: other.cols, data: out }
    }

    pub fn try_dot(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.dot(other))
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.dot(other) - &other.dot(self)
    }

    /// Column-stacking vectorization: entry `(i, j)` lands at `i + j·rows`.
    pub fn vec(&self) -> Vec<C64> {
        let mut v = vec![ZERO; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                v[i + j * self.rows] = self[(i, j)];
            }
        }
        v
    }

    /// Inverse of [`ComplexMatrix::vec`].
    pub fn unvec(rows: usize, cols: usize, v: &[C64]) -> Result<Self> {
        if v.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} cannot be reshaped to {rows}x{cols}",
                v.len()
            )));
        }
        Ok(Self::from_fn(rows, cols, |i, j| v[i + j * rows]))
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// `Σ_i v_i` for a column vector `v`, interpreted as a matrix-vector product.
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Hermitian within `tol`, relative to `max(1, ‖m‖)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && frob_distance_unchecked(self, &self.adjoint()) <= tol * self.frobenius_norm().max(1.0)
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(re(0.5))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
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
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.dot(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(re(-1.0))
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i1 in 0..ar {
        for j1 in 0..ac {
            let x = a[(i1, j1)];
            if x == ZERO {
                continue;
            }
            for i2 in 0..br {
                for j2 in 0..bc {
                    out[(i1 * br + i2, j1 * bc + j2)] = x * b[(i2, j2)];
                }
            }
        }
    }
    out
}

/// Partial trace of a square matrix on `C^left ⊗ C^right`.
///
/// `Side::First` traces out the left factor and returns a `right × right`
/// matrix; `Side::Second` returns a `left × left` matrix.
pub fn partial_trace(
    m: &ComplexMatrix,
    left: usize,
    right: usize,
    side: Side,
) -> Result<ComplexMatrix> {
    if !m.is_square() || left == 0 || right == 0 || m.rows != left * right {
        return Err(Error::BadFactorization { dim: m.rows.max(m.cols), left, right });
    }
    Ok(match side {
        Side::First => ComplexMatrix::from_fn(right, right, |b, b2| {
            (0..left).map(|a| m[(a * right + b, a * right + b2)]).sum()
        }),
        Side::Second => ComplexMatrix::from_fn(left, left, |a, a2| {
            (0..right).map(|b| m[(a * right + b, a2 * right + b)]).sum()
        }),
    })
}

fn frob_distance_unchecked(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.data.iter().zip(&b.data).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius norm of `a − b`.
pub fn frob_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(Error::DimensionMismatch(format!(
            "frob_distance of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(frob_distance_unchecked(a, b))
}

/// `‖a − b‖_F / max(1, ‖a‖_F, ‖b‖_F)`.
pub fn normalized_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let scale = a.frobenius_norm().max(b.frobenius_norm()).max(1.0);
    Ok(frob_distance(a, b)? / scale)
}

/// Matrices agree under the module-wide normalized tolerance convention.
pub fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    normalized_distance(a, b).map(|d| d <= tol).unwrap_or(false)
}

/// Eigen-decomposition of the Hermitian part of `m`.
///
/// Eigenvalues are sorted descending; each eigenvector has its
/// largest-magnitude entry made real and positive (the first such entry on
/// ties).
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("eigen of non-square {}x{}", m.rows, m.cols)));
    }
    let h = m.hermitian_part();
    let n = m.rows;
    let eig = h.to_nalgebra().symmetric_eigen();
    let finite = eig.eigenvalues.iter().all(|x| x.is_finite())
        && eig.eigenvectors.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let candidate: Option<(Vec<f64>, Vec<Vec<C64>>)> = finite.then(|| {
        (
            eig.eigenvalues.iter().copied().collect(),
            (0..n).map(|k| (0..n).map(|i| eig.eigenvectors[(i, k)]).collect()).collect(),
        )
    });
    let (raw_values, raw_vectors) = match candidate {
        Some((vals, vecs)) if eigen_defect(&h, &vals, &vecs) <= EIGEN_CHECK_TOL * h.frobenius_norm().max(1.0) => {
            (vals, vecs)
        }
        _ => jacobi_eigen(&h),
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw_values[b].total_cmp(&raw_values[a]));
    let values = order.iter().map(|&k| raw_values[k]).collect();
    let vectors = order.iter().map(|&k| fix_phase(raw_vectors[k].clone())).collect();
    Ok((values, vectors))
}

const EIGEN_CHECK_TOL: f64 = 1e-11;

/// Largest of the eigenpair residuals `|Hv − λv|` and the deviation of the
/// eigenvectors from orthonormality.
fn eigen_defect(h: &ComplexMatrix, values: &[f64], vectors: &[Vec<C64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, (lambda, v)) in values.iter().zip(vectors).enumerate() {
        let hv = h.apply_vec(v);
        let r = hv.iter().zip(v).map(|(a, b)| (a - b * *lambda).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });
        for w in &vectors[k..] {
            let dot: C64 = v.iter().zip(w).map(|(a, b)| a.conj() * b).sum();
            let target = if std::ptr::eq(v, w) { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

/// Cyclic Jacobi iteration for a Hermitian matrix; eigenvectors are returned
/// as columns of the accumulated rotation. Used when the tridiagonal QR in
/// nalgebra produces non-finite or inaccurate output, which it does on some
/// exactly symmetric rank-deficient inputs.
fn jacobi_eigen(h: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<C64>>) {
    let n = h.rows;
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= f64::EPSILON * total * 1e-2 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let abs = apq.norm();
                if abs <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / abs;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = diag(1, conj(phase)) followed by the real rotation [[c, s], [-s, c]]
                let jpp = re(c);
                let jpq = re(s);
                let jqp = phase.conj() * (-s);
                let jqq = phase.conj() * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
            }
        }
    }
    let values = (0..n).map(|k| a[(k, k)].re).collect();
    let vectors = (0..n).map(|k| v.col(k)).collect();
    (values, vectors)
}

/// Rotate the phase so that the largest-magnitude entry is real positive.
pub fn fix_phase(mut v: Vec<C64>) -> Vec<C64> {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        // Small slack so that ties resolve to the lowest index reproducibly.
        if z.norm() > best_abs * (1.0 + 1e-12) + 1e-15 {
            best = i;
            best_abs = z.norm();
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / v[best].norm();
        for z in &mut v {
            *z *= phase;
        }
    }
    v
}

/// Eigenvalues of the Hermitian part, sorted descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("eigen of non-square {}x{}", m.rows, m.cols)));
    }
    Ok(hermitian_eigen(m)?.0)
}

/// Eigenvalues of a general square matrix, sorted by real part (descending),
/// then by imaginary part.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("eigen of non-square {}x{}", m.rows, m.cols)));
    }
    let schur = m.to_nalgebra().schur();
    let vals = schur.eigenvalues().ok_or_else(|| {
        Error::DimensionMismatch("Schur decomposition did not converge".to_string())
    })?;
    let mut vals: Vec<C64> = vals.iter().copied().collect();
    vals.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(vals)
}

/// Hermitian within `tol` and smallest eigenvalue at least `−tol`, both
/// relative to `max(1, ‖m‖_F)`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    if !m.is_hermitian(tol) {
        return false;
    }
    min_eigenvalue(m).map(|e| e >= -tol * m.frobenius_norm().max(1.0)).unwrap_or(false)
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(*hermitian_eigenvalues(m)?.last().expect("non-empty"))
}

/// Matrix exponential (scaling and squaring with Padé approximants).
pub fn mat_exp(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("exp of non-square {}x{}", m.rows, m.cols)));
    }
    Ok(ComplexMatrix::from_nalgebra(&m.to_nalgebra().exp()))
}

/// Solve `a x = b` for square `a`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "solve with {}x{} system and {}x{} right-hand side",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let x = a.to_nalgebra().lu().solve(&b.to_nalgebra()).ok_or(Error::Singular)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(ComplexMatrix::from_nalgebra(&x))
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthonormal basis of the numerical kernel of `m`: right singular vectors
/// whose singular value is below `tol · σ_max`.
///
/// The basis is canonical: it is obtained by Gram–Schmidt on the columns of
/// the kernel projector in index order, so it depends only on the subspace.
pub fn nullspace(m: &ComplexMatrix, tol: f64) -> Vec<Vec<C64>> {
    let n = m.cols;
    // Pad to at least square so that the SVD exposes every kernel direction.
    let padded = if m.rows < n {
        let mut p = ComplexMatrix::zeros(n, n);
        for i in 0..m.rows {
            for j in 0..n {
                p[(i, j)] = m[(i, j)];
            }
        }
        p
    } else {
        m.clone()
    };
    let svd = padded.to_nalgebra().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = tol * sigma_max;
    let kernel: Vec<Vec<C64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| sigma_max == 0.0 || s < threshold)
        .map(|(k, _)| (0..n).map(|j| v_t[(k, j)].conj()).collect())
        .collect();
    canonical_basis(&kernel, n)
}

/// Canonical orthonormal basis for the span of orthonormal `vectors`.
pub(crate) fn canonical_basis(vectors: &[Vec<C64>], n: usize) -> Vec<Vec<C64>> {
    let k = vectors.len();
    if k == 0 {
        return Vec::new();
    }
    // Columns of the projector P = Σ v v*.
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(k);
    for j in 0..n {
        if out.len() == k {
            break;
        }
        let mut col: Vec<C64> = (0..n)
            .map(|i| vectors.iter().map(|v| v[i] * v[j].conj()).sum())
            .collect();
        for _ in 0..2 {
            for q in &out {
                let overlap: C64 = q.iter().zip(&col).map(|(a, b)| a.conj() * b).sum();
                for (c, qq) in col.iter_mut().zip(q) {
                    *c -= overlap * qq;
                }
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            out.push(fix_phase(col.into_iter().map(|z| z / norm).collect()));
        }
    }
    out
}
