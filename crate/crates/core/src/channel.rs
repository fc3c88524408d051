// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Linear maps between matrix algebras and their duals.
//!
//! A [`QuantumChannel`] from `M_n` to `M_m` is stored as its `m² × n²`
//! superoperator on column-stacked matrices, with the Choi matrix
//! `Σ_ij E_ij ⊗ η(E_ij)` cached next to it. Maps act in the Heisenberg
//! picture: a Kraus family `{K_j}` gives `a ↦ Σ_j K_j* a K_j`, which is
//! unital when `Σ_j K_j* K_j = 1`.
//!
//! Three duals are provided for a state-preserving map `η : (M_n, ρ_in) →
//! (M_m, ρ_out)`:
//!
//! * [`QuantumChannel::dual`]: the adjoint with respect to the GNS pairing,
//!   `Tr(ρ_in^{1/2} a ρ_in^{1/2} η′(c)ᵀ) = Tr(ρ_out^{1/2} η(a) ρ_out^{1/2} cᵀ)`,
//!   with the commutant identified with `M_m` through `c ↔ 1 ⊗ c`;
//! * [`QuantumChannel::kms_dual`]: `η^σ = j ∘ η′ ∘ j`, the adjoint for the
//!   KMS pairing `Tr(ρ^{1/2} a ρ^{1/2} b)`;
//! * [`QuantumChannel::theta_kms_dual`]: `Θ ∘ η^σ ∘ Θ` for a reversing
//!   operation `Θ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{
    approx_eq, is_psd, kron, min_eigenvalue, normalized_distance, nullspace, re, solve,
    ComplexMatrix, C64, ONE, PSD_FLOOR,
};
use crate::state::FaithfulState;

/// Number of random operators probed by the Kadison–Schwarz check.
pub const SCHWARZ_SAMPLES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    superop: ComplexMatrix,
    choi: ComplexMatrix,
}

/// Outcome of [`QuantumChannel::validate_ucp`].
#[derive(Debug, Clone, PartialEq)]
pub struct UcpReport {
    pub cp: bool,
    pub unital: bool,
    pub schwarz_witness: bool,
    pub min_choi_eigenvalue: f64,
    pub unital_residual: f64,
    /// Smallest eigenvalue of `α(a*a) − α(a)*α(a)` over the samples.
    pub schwarz_min_eigenvalue: f64,
}

impl UcpReport {
    pub fn is_ucp(&self) -> bool {
        self.cp && self.unital && self.schwarz_witness
    }
}

/// Transpose as a superoperator on `n × n` matrices.
pub(crate) fn transpose_superop(n: usize) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            t[(j + i * n, i + j * n)] = ONE;
        }
    }
    t
}

/// Choi matrix `Σ_ij E_ij ⊗ η(E_ij)` from a superoperator.
pub(crate) fn choi_from_superop(superop: &ComplexMatrix, n: usize, m: usize) -> ComplexMatrix {
    let mut choi = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let col = i + j * n;
            for k in 0..m {
                for l in 0..m {
                    choi[(i * m + k, j * m + l)] = superop[(k + l * m, col)];
                }
            }
        }
    }
    choi
}

/// Adjoint of a superoperator `S: M_n → M_m` for the GNS pairings of the two
/// states: solves `W_in S′ = Sᵀ W_out` where `W` is the (diagonal) weight
/// matrix of `(x, y) ↦ Tr(ρ^{1/2} x ρ^{1/2} yᵀ)`.
pub(crate) fn weighted_adjoint(
    superop: &ComplexMatrix,
    s_in: &FaithfulState,
    s_out: &FaithfulState,
) -> Result<ComplexMatrix> {
    let w_in = ComplexMatrix::real_diag(&s_in.pairing_weights());
    let w_out = ComplexMatrix::real_diag(&s_out.pairing_weights());
    solve(&w_in, &superop.transpose().dot(&w_out))
}

/// `max_{a,b} |Tr(ρ_out S(E_ab)) − Tr(ρ_in E_ab)|`, or the same with the
/// target `0` when `generator` is set (state invariance `ζ ∘ L = 0`).
pub(crate) fn state_preservation_residual(
    superop: &ComplexMatrix,
    s_in: &FaithfulState,
    s_out: &FaithfulState,
    generator: bool,
) -> f64 {
    let (n, m) = (s_in.dim(), s_out.dim());
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let col = a + b * n;
            let image: C64 =
                (0..m).map(|i| superop[(i + i * m, col)] * s_out.spectrum()[i]).sum();
            let target = if generator || a != b { 0.0 } else { s_in.spectrum()[a] };
            worst = worst.max((image - re(target)).norm());
        }
    }
    worst
}

impl QuantumChannel {
    pub fn from_superoperator(dim_in: usize, dim_out: usize, superop: ComplexMatrix) -> Result<Self> {
        if superop.rows() != dim_out * dim_out || superop.cols() != dim_in * dim_in {
            return Err(Error::DimensionMismatch(format!(
                "superoperator for M_{dim_in} -> M_{dim_out} must be {}x{}, got {}x{}",
                dim_out * dim_out,
                dim_in * dim_in,
                superop.rows(),
                superop.cols()
            )));
        }
        let choi = choi_from_superop(&superop, dim_in, dim_out);
        Ok(Self { dim_in, dim_out, superop, choi })
    }

    /// `a ↦ Σ_j K_j* a K_j` with each `K_j` of shape `dim_in × dim_out`.
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty Kraus family".to_string()))?;
        let (n, m) = (first.rows(), first.cols());
        let mut superop = ComplexMatrix::zeros(m * m, n * n);
        for k in kraus {
            if (k.rows(), k.cols()) != (n, m) {
                return Err(Error::DimensionMismatch("Kraus operators differ in shape".to_string()));
            }
            superop = &superop + &kron(&k.transpose(), &k.adjoint());
        }
        Self::from_superoperator(n, m, superop)
    }

    /// Tabulate a linear map on the matrix units.
    pub fn from_fn(dim_in: usize, dim_out: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let mut superop = ComplexMatrix::zeros(dim_out * dim_out, dim_in * dim_in);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let image = f(&ComplexMatrix::unit(dim_in, i, j));
                assert_eq!((image.rows(), image.cols()), (dim_out, dim_out));
                for (r, z) in image.vec().into_iter().enumerate() {
                    superop[(r, i + j * dim_in)] = z;
                }
            }
        }
        Self::from_superoperator(dim_in, dim_out, superop).expect("shape is consistent")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_superoperator(n, n, ComplexMatrix::identity(n * n)).expect("square")
    }

    /// `a ↦ Tr(ρ a) 1_m`.
    pub fn constant(state: &FaithfulState, dim_out: usize) -> Self {
        let n = state.dim();
        let mut superop = ComplexMatrix::zeros(dim_out * dim_out, n * n);
        for k in 0..dim_out {
            for i in 0..n {
                superop[(k + k * dim_out, i + i * n)] = re(state.spectrum()[i]);
            }
        }
        Self::from_superoperator(n, dim_out, superop).expect("shape is consistent")
    }

    /// Diagonal pinching `a ↦ Σ_i E_ii a E_ii`.
    pub fn dephasing(n: usize) -> Self {
        let kraus: Vec<ComplexMatrix> = (0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect();
        Self::from_kraus(&kraus).expect("non-empty")
    }

    /// `a ↦ aᵀ` (positive but not completely positive).
    pub fn transpose_map(n: usize) -> Self {
        Self::from_superoperator(n, n, transpose_superop(n)).expect("square")
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn superoperator(&self) -> &ComplexMatrix {
        &self.superop
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn is_endomorphic(&self) -> bool {
        self.dim_in == self.dim_out
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.dim_in || a.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "channel on M_{} applied to {}x{} matrix",
                self.dim_in,
                a.rows(),
                a.cols()
            )));
        }
        ComplexMatrix::unvec(self.dim_out, self.dim_out, &self.superop.apply_vec(&a.vec()))
    }

    /// Complete positivity via the Choi matrix, unitality via `η(1) = 1`, and
    /// the Kadison–Schwarz inequality `η(a)*η(a) ≤ η(a*a)` on
    /// [`SCHWARZ_SAMPLES`] random operators drawn from `seed`.
    pub fn validate_ucp(&self, tol: f64, seed: u64) -> UcpReport {
        let min_choi = min_eigenvalue(&self.choi).unwrap_or(f64::NEG_INFINITY);
        let cp = is_psd(&self.choi, PSD_FLOOR);
        let one_in = ComplexMatrix::identity(self.dim_in);
        let image = self.apply(&one_in).expect("identity has the right shape");
        let unital_residual =
            normalized_distance(&image, &ComplexMatrix::identity(self.dim_out)).expect("same shape");
        let unital = unital_residual <= tol;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut schwarz_min = f64::INFINITY;
        let mut schwarz = true;
        for _ in 0..SCHWARZ_SAMPLES {
            let a = ComplexMatrix::from_fn(self.dim_in, self.dim_in, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let lhs = self.apply(&a.adjoint().dot(&a)).expect("shape");
            let ea = self.apply(&a).expect("shape");
            let gap = &lhs - &ea.adjoint().dot(&ea);
            let e = min_eigenvalue(&gap).unwrap_or(f64::NEG_INFINITY);
            schwarz_min = schwarz_min.min(e);
            if !is_psd(&gap, tol) {
                schwarz = false;
            }
        }
        UcpReport {
            cp,
            unital,
            schwarz_witness: schwarz,
            min_choi_eigenvalue: min_choi,
            unital_residual,
            schwarz_min_eigenvalue: schwarz_min,
        }
    }

    /// `max |Tr(ρ_out η(E_ab)) − Tr(ρ_in E_ab)|` over matrix units.
    pub fn state_preservation_residual(&self, s_in: &FaithfulState, s_out: &FaithfulState) -> Result<f64> {
        self.check_states(s_in, s_out)?;
        Ok(state_preservation_residual(&self.superop, s_in, s_out, false))
    }

    pub fn preserves(&self, s_in: &FaithfulState, s_out: &FaithfulState, tol: f64) -> Result<bool> {
        Ok(self.state_preservation_residual(s_in, s_out)? <= tol)
    }

    fn check_states(&self, s_in: &FaithfulState, s_out: &FaithfulState) -> Result<()> {
        if s_in.dim() != self.dim_in || s_out.dim() != self.dim_out {
            return Err(Error::DimensionMismatch(format!(
                "channel M_{} -> M_{} with states of dimension {} and {}",
                self.dim_in,
                self.dim_out,
                s_in.dim(),
                s_out.dim()
            )));
        }
        Ok(())
    }

    /// The dual `η′: M_m → M_n` with respect to the GNS pairings.
    pub fn dual(&self, s_in: &FaithfulState, s_out: &FaithfulState, tol: f64) -> Result<Self> {
        let residual = self.state_preservation_residual(s_in, s_out)?;
        if residual > tol {
            return Err(Error::DualUndefined(residual));
        }
        let superop = weighted_adjoint(&self.superop, s_in, s_out)?;
        Self::from_superoperator(self.dim_out, self.dim_in, superop)
    }

    /// The KMS-dual `η^σ = j ∘ η′ ∘ j`.
    pub fn kms_dual(&self, s_in: &FaithfulState, s_out: &FaithfulState, tol: f64) -> Result<Self> {
        let dual = self.dual(s_in, s_out, tol)?;
        let superop = transpose_superop(self.dim_in)
            .dot(&dual.superop)
            .dot(&transpose_superop(self.dim_out));
        Self::from_superoperator(self.dim_out, self.dim_in, superop)
    }

    /// The Θ-KMS-dual `Θ ∘ η^σ ∘ Θ` of an endomorphism.
    pub fn theta_kms_dual(&self, s: &FaithfulState, theta: &ReversingOperation, tol: f64) -> Result<Self> {
        if !self.is_endomorphic() {
            return Err(Error::DimensionMismatch("Θ-KMS-dual needs an endomorphism".to_string()));
        }
        theta.check_compatible(s, tol)?;
        let sigma = self.kms_dual(s, s, tol)?;
        let t = theta.superoperator();
        Self::from_superoperator(self.dim_in, self.dim_in, t.dot(&sigma.superop).dot(&t))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose M_{} -> M_{} after M_{} -> M_{}",
                self.dim_in, self.dim_out, inner.dim_in, inner.dim_out
            )));
        }
        Self::from_superoperator(inner.dim_in, self.dim_out, self.superop.dot(&inner.superop))
    }

    /// Hilbert–Schmidt orthonormal basis of `{b : η(b) = b}`.
    pub fn fixed_point_space(&self, tol: f64) -> Result<Vec<ComplexMatrix>> {
        if !self.is_endomorphic() {
            return Err(Error::DimensionMismatch("fixed points need an endomorphism".to_string()));
        }
        let shifted = &self.superop - &ComplexMatrix::identity(self.dim_in * self.dim_in);
        kernel_as_matrices(&shifted, self.dim_in, tol)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim_in == other.dim_in
            && self.dim_out == other.dim_out
            && approx_eq(&self.superop, &other.superop, tol)
    }
}

pub(crate) fn kernel_as_matrices(superop: &ComplexMatrix, n: usize, tol: f64) -> Result<Vec<ComplexMatrix>> {
    nullspace(superop, tol)
        .into_iter()
        .map(|v| ComplexMatrix::unvec(n, n, &v))
        .collect()
}

/// The compose convention used throughout: `compose_channels(f, g) = f ∘ g`.
pub fn compose_channels(f: &QuantumChannel, g: &QuantumChannel) -> Result<QuantumChannel> {
    f.compose(g)
}

/// A reversing operation `Θ(a) = u aᵀ u*` (plain transpose when `u = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct ReversingOperation {
    dim: usize,
    unitary: Option<ComplexMatrix>,
}

impl ReversingOperation {
    pub fn transpose(n: usize) -> Self {
        Self { dim: n, unitary: None }
    }

    /// `a ↦ u aᵀ u*`; `u` must be unitary and the map must square to the
    /// identity.
    pub fn with_unitary(u: ComplexMatrix, tol: f64) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::IncompatibleReversal("unitary must be square".to_string()));
        }
        let n = u.rows();
        if !approx_eq(&u.adjoint().dot(&u), &ComplexMatrix::identity(n), tol) {
            return Err(Error::IncompatibleReversal("u is not unitary".to_string()));
        }
        let th = Self { dim: n, unitary: Some(u) };
        let square = th.superoperator().dot(&th.superoperator());
        if !approx_eq(&square, &ComplexMatrix::identity(n * n), tol) {
            return Err(Error::IncompatibleReversal("Θ² ≠ id".to_string()));
        }
        Ok(th)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unitary(&self) -> Option<&ComplexMatrix> {
        self.unitary.as_ref()
    }

    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        match &self.unitary {
            None => a.transpose(),
            Some(u) => u.dot(&a.transpose()).dot(&u.adjoint()),
        }
    }

    pub fn superoperator(&self) -> ComplexMatrix {
        let t = transpose_superop(self.dim);
        match &self.unitary {
            None => t,
            Some(u) => kron(&u.conj(), u).dot(&t),
        }
    }

    /// `μ ∘ Θ = μ` on the matrix units.
    pub fn check_compatible(&self, s: &FaithfulState, tol: f64) -> Result<()> {
        if s.dim() != self.dim {
            return Err(Error::IncompatibleReversal(format!(
                "Θ acts on M_{} but the state has dimension {}",
                self.dim,
                s.dim()
            )));
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = ComplexMatrix::unit(self.dim, i, j);
                let d = s.expect(&self.apply(&e))? - s.expect(&e)?;
                worst = worst.max(d.norm());
            }
        }
        if worst > tol {
            return Err(Error::IncompatibleReversal(format!("μ∘Θ differs from μ by {worst:e}")));
        }
        Ok(())
    }

    /// Largest deviation from `Θ(xy) = Θ(y)Θ(x)`, `Θ(x*) = Θ(x)*` and
    /// `Θ² = id` over matrix units.
    pub fn antihomomorphism_residual(&self) -> f64 {
        let n = self.dim;
        let units: Vec<ComplexMatrix> =
            (0..n * n).map(|k| ComplexMatrix::unit(n, k % n, k / n)).collect();
        let mut worst: f64 = 0.0;
        for x in &units {
            let tx = self.apply(x);
            worst = worst.max(crate::matrix::frob_distance(&self.apply(&x.adjoint()), &tx.adjoint()).unwrap());
            worst = worst.max(crate::matrix::frob_distance(&self.apply(&tx), x).unwrap());
            for y in &units {
                let lhs = self.apply(&x.dot(y));
                let rhs = self.apply(y).dot(&tx);
                worst = worst.max(crate::matrix::frob_distance(&lhs, &rhs).unwrap());
            }
        }
        worst
    }
}
