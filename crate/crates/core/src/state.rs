// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Faithful states on full matrix algebras.
//!
//! A state is always diagonal in the computational basis, `ρ = diag(p)`.
//! The GNS space of `(M_n, ρ)` is `C^n ⊗ C^n` with cyclic vector
//! `Ω = Σ_i √p_i e_i ⊗ e_i`; the algebra acts as `a ⊗ 1` and its commutant as
//! `1 ⊗ c`. With this identification the modular conjugation becomes the
//! transpose in the fixed basis and
//!
//! ```text
//! ⟨Ω, (a ⊗ c) Ω⟩ = Tr(ρ^{1/2} a ρ^{1/2} cᵀ).
//! ```

use crate::error::{Error, Result};
use crate::matrix::{re, ComplexMatrix, C64, ZERO};

/// Tolerance on `Σ p_i = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FaithfulState {
    spectrum: Vec<f64>,
    sqrt_spectrum: Vec<f64>,
    inv_sqrt_spectrum: Vec<f64>,
}

impl FaithfulState {
    pub fn new(spectrum: Vec<f64>) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::DimensionMismatch("state of dimension 0".to_string()));
        }
        for (index, &value) in spectrum.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NotFaithful { index, value });
            }
        }
        let total: f64 = spectrum.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total));
        }
        let sqrt_spectrum: Vec<f64> = spectrum.iter().map(|p| p.sqrt()).collect();
        let inv_sqrt_spectrum = sqrt_spectrum.iter().map(|s| 1.0 / s).collect();
        Ok(Self { spectrum, sqrt_spectrum, inv_sqrt_spectrum })
    }

    /// The tracial state `p_i = 1/n`.
    pub fn tracial(n: usize) -> Self {
        Self::new(vec![1.0 / n as f64; n]).expect("uniform spectrum is a faithful state")
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn sqrt_spectrum(&self) -> &[f64] {
        &self.sqrt_spectrum
    }

    pub fn inv_sqrt_spectrum(&self) -> &[f64] {
        &self.inv_sqrt_spectrum
    }

    /// `ρ = diag(p)`.
    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::real_diag(&self.spectrum)
    }

    pub fn sqrt_density(&self) -> ComplexMatrix {
        ComplexMatrix::real_diag(&self.sqrt_spectrum)
    }

    pub fn inv_sqrt_density(&self) -> ComplexMatrix {
        ComplexMatrix::real_diag(&self.inv_sqrt_spectrum)
    }

    /// `Tr(ρ a)`.
    pub fn expect(&self, a: &ComplexMatrix) -> Result<C64> {
        self.check_operator(a)?;
        Ok(self.spectrum.iter().enumerate().map(|(i, &p)| a[(i, i)] * p).sum())
    }

    /// Same spectrum within `tol` (max-norm).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self.spectrum.iter().zip(&other.spectrum).all(|(a, b)| (a - b).abs() <= tol)
    }

    pub(crate) fn check_operator(&self, a: &ComplexMatrix) -> Result<()> {
        let n = self.dim();
        if a.rows() != n || a.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n}x{n} operator, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        Ok(())
    }

    /// Diagonal of the weight matrix of the KMS pairing in column-stacked
    /// coordinates: entry `i + j·n` is `√(p_i p_j)`.
    pub(crate) fn pairing_weights(&self) -> Vec<f64> {
        let n = self.dim();
        let mut w = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                w[i + j * n] = self.sqrt_spectrum[i] * self.sqrt_spectrum[j];
            }
        }
        w
    }
}

/// The cyclic vector `Ω = Σ_i √p_i e_i ⊗ e_i` in `C^n ⊗ C^n`.
pub fn gns_vector(s: &FaithfulState) -> Vec<C64> {
    let n = s.dim();
    let mut v = vec![ZERO; n * n];
    for (i, &q) in s.sqrt_spectrum().iter().enumerate() {
        v[i * n + i] = re(q);
    }
    v
}

/// `Tr(ρ^{1/2} a ρ^{1/2} bᵀ) = ⟨Ω, (a ⊗ b) Ω⟩`.
pub fn kms_pairing(s: &FaithfulState, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    s.check_operator(a)?;
    s.check_operator(b)?;
    let n = s.dim();
    let sq = s.sqrt_spectrum();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(i, j)] * (sq[i] * sq[j]);
        }
    }
    Ok(acc)
}

/// The transpose in the fixed basis, which realizes `j(a) = J a* J` under
/// the identification of the commutant with `1 ⊗ M_n`.
pub fn modular_transpose(a: &ComplexMatrix) -> ComplexMatrix {
    a.transpose()
}
