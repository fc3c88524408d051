// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Couplings of two faithful states and the channels they induce.
//!
//! A coupling of `(M_n, ρ_A)` and `(M_m, ρ_B)` is a density matrix `κ` on
//! `C^n ⊗ C^m` whose partial traces are `ρ_A` and `ρ_B`; it is evaluated as
//! `ω(a ⊗ c) = Tr(κ (a ⊗ c))`, the second slot standing for the commutant of
//! `M_m` in its GNS representation.
//!
//! Every coupling determines a unital completely positive map
//! `E_ω : M_n → M_m` through
//!
//! ```text
//! ω(a ⊗ c) = Tr(ρ_B^{1/2} E_ω(a) ρ_B^{1/2} cᵀ),
//! ```
//!
//! and conversely every u.c.p. map with `ρ_B ∘ E = ρ_A` determines a coupling
//! `ω_E`. The two constructions are mutually inverse, which is what
//! [`Coupling::compose`] and [`Coupling::kms_flip`] rely on.

use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::matrix::{
    frob_distance, is_psd, kron, min_eigenvalue, partial_trace, re, ComplexMatrix, Side, C64,
    PSD_FLOOR,
};
use crate::state::{gns_vector, FaithfulState};

#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    kappa: ComplexMatrix,
    state_a: FaithfulState,
    state_b: FaithfulState,
}

/// Diagnostics for a candidate coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub trace_defect: f64,
    /// `‖Tr_second κ − ρ_A‖_F`.
    pub marginal_a_distance: f64,
    /// `‖Tr_first κ − ρ_B‖_F`.
    pub marginal_b_distance: f64,
    pub tolerance: f64,
}

impl CouplingCheck {
    pub fn is_valid(&self) -> bool {
        self.psd
            && self.trace_defect <= self.tolerance
            && self.marginal_a_distance <= self.tolerance
            && self.marginal_b_distance <= self.tolerance
    }

    fn describe(&self) -> String {
        let mut problems = Vec::new();
        if !self.psd {
            problems.push(format!("not positive semidefinite (min eigenvalue {:e})", self.min_eigenvalue));
        }
        if self.trace_defect > self.tolerance {
            problems.push(format!("trace defect {:e}", self.trace_defect));
        }
        if self.marginal_a_distance > self.tolerance {
            problems.push(format!("first marginal off by {:e}", self.marginal_a_distance));
        }
        if self.marginal_b_distance > self.tolerance {
            problems.push(format!("second marginal off by {:e}", self.marginal_b_distance));
        }
        problems.join("; ")
    }
}

/// Outcome of [`Coupling::is_orthogonal`].
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    pub orthogonal: bool,
    /// `‖κ_{ω∘ψ} − ρ_A ⊗ ρ_C‖_F`.
    pub residual: f64,
    pub hilbert_criterion: bool,
    /// Frobenius norm of the cross-Gram matrix of the centered GNS vectors.
    pub hilbert_residual: f64,
    pub agree: bool,
}

impl Coupling {
    /// Diagnose `kappa` as a coupling of `state_a` and `state_b`.
    pub fn check(
        kappa: &ComplexMatrix,
        state_a: &FaithfulState,
        state_b: &FaithfulState,
        tol: f64,
    ) -> Result<CouplingCheck> {
        let (n, m) = (state_a.dim(), state_b.dim());
        if kappa.rows() != n * m || kappa.cols() != n * m {
            return Err(Error::DimensionMismatch(format!(
                "coupling of M_{n} and M_{m} needs a {}x{} matrix, got {}x{}",
                n * m,
                n * m,
                kappa.rows(),
                kappa.cols()
            )));
        }
        let marginal_a = partial_trace(kappa, n, m, Side::Second)?;
        let marginal_b = partial_trace(kappa, n, m, Side::First)?;
        Ok(CouplingCheck {
            psd: is_psd(kappa, PSD_FLOOR.max(tol * 1e-1)),
            min_eigenvalue: min_eigenvalue(kappa)?,
            trace_defect: (kappa.trace() - re(1.0)).norm(),
            marginal_a_distance: frob_distance(&marginal_a, &state_a.density())?,
            marginal_b_distance: frob_distance(&marginal_b, &state_b.density())?,
            tolerance: tol,
        })
    }

    pub fn new(kappa: ComplexMatrix, state_a: FaithfulState, state_b: FaithfulState, tol: f64) -> Result<Self> {
        let check = Self::check(&kappa, &state_a, &state_b, tol)?;
        if !check.is_valid() {
            return Err(Error::NotACoupling(check.describe()));
        }
        Ok(Self { kappa, state_a, state_b })
    }

    /// The diagonal coupling `δ = ⟨Ω, (·) Ω⟩` of a state with itself.
    pub fn diagonal(s: &FaithfulState) -> Self {
        let omega = ComplexMatrix::column(&gns_vector(s));
        Self { kappa: omega.dot(&omega.adjoint()), state_a: s.clone(), state_b: s.clone() }
    }

    /// The trivial coupling `ρ_A ⊗ ρ_B`.
    pub fn product(state_a: &FaithfulState, state_b: &FaithfulState) -> Self {
        Self {
            kappa: kron(&state_a.density(), &state_b.density()),
            state_a: state_a.clone(),
            state_b: state_b.clone(),
        }
    }

    pub fn kappa(&self) -> &ComplexMatrix {
        &self.kappa
    }

    pub fn state_a(&self) -> &FaithfulState {
        &self.state_a
    }

    pub fn state_b(&self) -> &FaithfulState {
        &self.state_b
    }

    /// `ω(a ⊗ c) = Tr(κ (a ⊗ c))`.
    pub fn evaluate(&self, a: &ComplexMatrix, c: &ComplexMatrix) -> Result<C64> {
        self.state_a.check_operator(a)?;
        self.state_b.check_operator(c)?;
        let (n, m) = (self.state_a.dim(), self.state_b.dim());
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..m {
                for i2 in 0..n {
                    let x = a[(i2, i)];
                    if x.norm_sqr() == 0.0 {
                        continue;
                    }
                    for k2 in 0..m {
                        acc += self.kappa[(i * m + k, i2 * m + k2)] * x * c[(k2, k)];
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Matrix `M` with `ω(x ⊗ y) = vec(x)ᵀ M vec(y)`.
    pub fn bilinear_matrix(&self) -> ComplexMatrix {
        let (n, m) = (self.state_a.dim(), self.state_b.dim());
        ComplexMatrix::from_fn(n * n, m * m, |r, c| {
            let (i2, i) = (r % n, r / n);
            let (k2, k) = (c % m, c / m);
            self.kappa[(i * m + k, i2 * m + k2)]
        })
    }

    /// The channel `E_ω(a) = ρ_B^{-1/2} (Tr_first κ (a ⊗ 1))ᵀ ρ_B^{-1/2}`.
    pub fn extract_channel(&self) -> QuantumChannel {
        let (n, m) = (self.state_a.dim(), self.state_b.dim());
        let inv = self.state_b.inv_sqrt_spectrum();
        let mut superop = ComplexMatrix::zeros(m * m, n * n);
        for i in 0..n {
            for j in 0..n {
                let col = i + j * n;
                for u in 0..m {
                    for v in 0..m {
                        superop[(u + v * m, col)] =
                            self.kappa[(j * m + v, i * m + u)] * (inv[u] * inv[v]);
                    }
                }
            }
        }
        QuantumChannel::from_superoperator(n, m, superop).expect("shape is consistent")
    }

    /// The coupling `ω_E` of a u.c.p. map with `ρ_B ∘ E = ρ_A`:
    /// `κ_E = Σ_ij E_ij ⊗ (ρ_B^{1/2} E(E_ji) ρ_B^{1/2})ᵀ`.
    pub fn from_channel(
        channel: &QuantumChannel,
        state_a: &FaithfulState,
        state_b: &FaithfulState,
        tol: f64,
    ) -> Result<Self> {
        let residual = channel.state_preservation_residual(state_a, state_b)?;
        if residual > tol {
            return Err(Error::NotAState(format!("channel does not map ρ_B to ρ_A (residual {residual:e})")));
        }
        let report = channel.validate_ucp(tol, 0);
        if !report.cp {
            return Err(Error::NotAState(format!(
                "channel is not completely positive (min Choi eigenvalue {:e})",
                report.min_choi_eigenvalue
            )));
        }
        if !report.unital {
            return Err(Error::NotAState(format!("channel is not unital (residual {:e})", report.unital_residual)));
        }
        let kappa = Self::kappa_from_channel(channel, state_b);
        Self::new(kappa, state_a.clone(), state_b.clone(), tol)
    }

    fn kappa_from_channel(channel: &QuantumChannel, state_b: &FaithfulState) -> ComplexMatrix {
        let (n, m) = (channel.dim_in(), channel.dim_out());
        let sq = state_b.sqrt_spectrum();
        let superop = channel.superoperator();
        let mut kappa = ComplexMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                // E(E_ji) sits in column j + i·n
                let col = j + i * n;
                for u in 0..m {
                    for v in 0..m {
                        kappa[(i * m + u, j * m + v)] = superop[(v + u * m, col)] * (sq[u] * sq[v]);
                    }
                }
            }
        }
        kappa
    }

    /// Exchange the tensor factors: a coupling of `(ρ_B, ρ_A)` whose channel
    /// is the dual of `E_ω`.
    pub fn flip(&self) -> Self {
        let (n, m) = (self.state_a.dim(), self.state_b.dim());
        let kappa = ComplexMatrix::from_fn(n * m, n * m, |r, c| {
            let (b, a) = (r / n, r % n);
            let (b2, a2) = (c / n, c % n);
            self.kappa[(a * m + b, a2 * m + b2)]
        });
        Self { kappa, state_a: self.state_b.clone(), state_b: self.state_a.clone() }
    }

    /// `ω^σ`, the coupling of `(ρ_B, ρ_A)` whose channel is the KMS-dual of
    /// `E_ω`.
    pub fn kms_flip(&self, tol: f64) -> Result<Self> {
        let sigma = self.extract_channel().kms_dual(&self.state_a, &self.state_b, tol)?;
        Self::from_channel(&sigma, &self.state_b, &self.state_a, tol)
    }

    /// `ω ∘ ψ`, the coupling with channel `E_ψ ∘ E_ω`.
    pub fn compose(&self, psi: &Coupling, tol: f64) -> Result<Self> {
        if !self.state_b.approx_eq(&psi.state_a, tol) {
            return Err(Error::NotComposable(format!(
                "middle states differ: {:?} vs {:?}",
                self.state_b.spectrum(),
                psi.state_a.spectrum()
            )));
        }
        let channel = psi.extract_channel().compose(&self.extract_channel())?;
        Self::from_channel(&channel, &self.state_a, &psi.state_b, tol)
    }

    /// `κ = ρ_A ⊗ ρ_B` within `tol`.
    pub fn is_trivial(&self, tol: f64) -> bool {
        let product = kron(&self.state_a.density(), &self.state_b.density());
        frob_distance(&self.kappa, &product).map(|d| d <= tol).unwrap_or(false)
    }

    /// Decide `ω ∘ ψ = ρ_A ⊗ ρ_C` twice: directly on the composed density
    /// matrix, and through orthogonality of the centered images
    /// `(E_ω(a) − μ(a)) Λ` and `(1 ⊗ (E_ψ′(c) − ξ(c))) Λ` in the GNS space of
    /// the middle state.
    pub fn is_orthogonal(&self, psi: &Coupling, tol: f64) -> Result<OrthogonalityReport> {
        let composed = self.compose(psi, tol)?;
        let product = kron(&self.state_a.density(), &psi.state_b.density());
        let residual = frob_distance(composed.kappa(), &product)?;

        let mid = &self.state_b;
        let m = mid.dim();
        let e_omega = self.extract_channel();
        let e_psi_dual = psi.extract_channel().dual(&psi.state_a, &psi.state_b, tol)?;
        let one = ComplexMatrix::identity(m);
        let sqrt_mid = mid.sqrt_density();

        let left: Vec<ComplexMatrix> = units(self.state_a.dim())
            .map(|a| {
                let mu = self.state_a.expect(&a).expect("shape");
                let x = &e_omega.apply(&a).expect("shape") - &one.scale(mu);
                x.dot(&sqrt_mid)
            })
            .collect();
        let right: Vec<ComplexMatrix> = units(psi.state_b.dim())
            .map(|c| {
                let xi = psi.state_b.expect(&c).expect("shape");
                let y = &e_psi_dual.apply(&c).expect("shape") - &one.scale(xi);
                sqrt_mid.dot(&y.transpose())
            })
            .collect();
        let mut gram_sq = 0.0;
        for x in &left {
            for y in &right {
                let overlap: C64 = x.data().iter().zip(y.data()).map(|(p, q)| p.conj() * q).sum();
                gram_sq += overlap.norm_sqr();
            }
        }
        let hilbert_residual = gram_sq.sqrt();
        let orthogonal = residual < tol;
        let hilbert_criterion = hilbert_residual < tol;
        Ok(OrthogonalityReport {
            orthogonal,
            residual,
            hilbert_criterion,
            hilbert_residual,
            agree: orthogonal == hilbert_criterion,
        })
    }

    /// Same κ and states within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.state_a.approx_eq(&other.state_a, tol)
            && self.state_b.approx_eq(&other.state_b, tol)
            && frob_distance(&self.kappa, &other.kappa).map(|d| d <= tol).unwrap_or(false)
    }
}

pub(crate) fn units(n: usize) -> impl Iterator<Item = ComplexMatrix> {
    (0..n * n).map(move |k| ComplexMatrix::unit(n, k % n, k / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{solve, DEFAULT_TOL, ONE};
    use crate::state::kms_pairing;

    fn state3() -> FaithfulState {
        FaithfulState::new(vec![0.2, 0.3, 0.5]).unwrap()
    }

    fn state2() -> FaithfulState {
        FaithfulState::new(vec![0.35, 0.65]).unwrap()
    }

    /// Brute force: solve `ω(a ⊗ E_uv) = Tr(ρ^{1/2} E(a) ρ^{1/2} E_uvᵀ)` for
    /// `E(a)` as a dense linear system over the matrix units.
    fn oracle_channel(w: &Coupling) -> QuantumChannel {
        let (n, m) = (w.state_a().dim(), w.state_b().dim());
        let cs: Vec<ComplexMatrix> = units(m).collect();
        // pairing matrix G[c][x] = B(E_x, c) with E_x the x-th unit
        let g = ComplexMatrix::from_fn(m * m, m * m, |c, x| {
            kms_pairing(w.state_b(), &cs[x], &cs[c]).unwrap()
        });
        let mut superop = ComplexMatrix::zeros(m * m, n * n);
        for (col, a) in units(n).enumerate() {
            let rhs = ComplexMatrix::column(&cs.iter().map(|c| w.evaluate(&a, c).unwrap()).collect::<Vec<_>>());
            let sol = solve(&g, &rhs).unwrap();
            for r in 0..m * m {
                superop[(r, col)] = sol[(r, 0)];
            }
        }
        QuantumChannel::from_superoperator(n, m, superop).unwrap()
    }

    fn mixed_qubit() -> Coupling {
        let k = &kron(&ComplexMatrix::unit(2, 0, 0), &ComplexMatrix::unit(2, 0, 0))
            + &kron(&ComplexMatrix::unit(2, 1, 1), &ComplexMatrix::unit(2, 1, 1));
        let s = FaithfulState::tracial(2);
        Coupling::new(k.scale(re(0.5)), s.clone(), s, DEFAULT_TOL).unwrap()
    }

    /// A non-symmetric coupling of a 3-level and a 2-level state, built from
    /// a u.c.p. map that preserves the states.
    fn rectangular() -> Coupling {
        let sa = state3();
        let sb = FaithfulState::new(vec![0.5, 0.5]).unwrap();
        // E(a) = 0.6·Tr(ρ_A a)·1 + 0.4·(block average): a ↦ Σ Tr(P_k ρ_A a)/w_k E_kk
        // with blocks {0,1} -> 0 and {2} -> 1 (weights 0.5, 0.5)
        let e = QuantumChannel::from_fn(3, 2, |a| {
            let w0 = 0.2 * a[(0, 0)] + 0.3 * a[(1, 1)];
            let w1 = 0.5 * a[(2, 2)];
            let t = w0 + w1;
            &ComplexMatrix::identity(2).scale(t * 0.6)
                + &ComplexMatrix::diag(&[w0 / 0.5, w1 / 0.5]).scale(re(0.4))
        });
        Coupling::from_channel(&e, &sa, &sb, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn evaluate_cases() {
        let s = state3();
        let d = Coupling::diagonal(&s);
        let one = ComplexMatrix::identity(3);
        assert!((d.evaluate(&one, &one).unwrap() - ONE).norm() < 1e-15);
        let a = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64 - 1.0));
        assert!((d.evaluate(&a, &one).unwrap() - s.expect(&a).unwrap()).norm() < 1e-14);
        let p = Coupling::product(&s, &state2());
        let c = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(1.0 + i as f64, j as f64));
        let expected = s.expect(&a).unwrap() * state2().expect(&c).unwrap();
        assert!((p.evaluate(&a, &c).unwrap() - expected).norm() < 1e-14);
        assert!(p.evaluate(&c, &c).is_err());
    }

    #[test]
    fn diagonal_coupling_cases() {
        let d = Coupling::diagonal(&FaithfulState::tracial(2));
        let bell = ComplexMatrix::from_real(4, 4, &[0.5, 0., 0., 0.5, 0., 0., 0., 0., 0., 0., 0., 0., 0.5, 0., 0., 0.5]).unwrap();
        assert!(frob_distance(d.kappa(), &bell).unwrap() < 1e-15);
        let s = state3();
        let d = Coupling::diagonal(&s);
        assert!(Coupling::check(d.kappa(), &s, &s, DEFAULT_TOL).unwrap().is_valid());
        assert!(d.extract_channel().approx_eq(&QuantumChannel::identity(3), 1e-14));
        // δ(b ⊗ c) = Tr(ρ^{1/2} b ρ^{1/2} cᵀ)
        let b = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i + j) as f64, i as f64));
        let c = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(j as f64, -(i as f64)));
        assert!((d.evaluate(&b, &c).unwrap() - kms_pairing(&s, &b, &c).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn product_coupling_cases() {
        let p = Coupling::product(&state3(), &state2());
        assert!(p.extract_channel().approx_eq(&QuantumChannel::constant(&state3(), 2), 1e-14));
        assert!(p.is_trivial(DEFAULT_TOL));
        assert!(!Coupling::diagonal(&state3()).is_trivial(DEFAULT_TOL));
    }

    #[test]
    fn mixed_type_gives_dephasing() {
        let e = mixed_qubit().extract_channel();
        assert!(e.approx_eq(&oracle_channel(&mixed_qubit()), 1e-14));
        assert!(e.approx_eq(&QuantumChannel::dephasing(2), 1e-14));
    }

    #[test]
    fn closed_form_matches_bilinear_solve() {
        for w in [rectangular(), Coupling::diagonal(&state3()), mixed_qubit(), Coupling::product(&state2(), &state3())] {
            assert!(w.extract_channel().approx_eq(&oracle_channel(&w), 1e-12));
        }
    }

    #[test]
    fn extracted_channel_properties() {
        let w = rectangular();
        let e = w.extract_channel();
        assert!(e.validate_ucp(DEFAULT_TOL, 0).is_ucp());
        assert!(e.preserves(w.state_a(), w.state_b(), 1e-13).unwrap());
        // faithfulness: ν(E(a*a)) = μ(a*a) > 0 for every nonzero unit
        for a in units(3) {
            let v = w.state_b().expect(&e.apply(&a.adjoint().dot(&a)).unwrap()).unwrap();
            assert!(v.re > 0.0);
        }
    }

    #[test]
    fn channel_roundtrip() {
        let s = FaithfulState::tracial(2);
        let from_id = Coupling::from_channel(&QuantumChannel::identity(2), &s, &s, DEFAULT_TOL).unwrap();
        assert!(from_id.approx_eq(&Coupling::diagonal(&s), 1e-15));
        let from_const =
            Coupling::from_channel(&QuantumChannel::constant(&state3(), 2), &state3(), &state2(), DEFAULT_TOL).unwrap();
        assert!(from_const.approx_eq(&Coupling::product(&state3(), &state2()), 1e-14));
        let w = rectangular();
        let back = Coupling::from_channel(&w.extract_channel(), w.state_a(), w.state_b(), DEFAULT_TOL).unwrap();
        assert!(back.approx_eq(&w, 1e-13));
    }

    #[test]
    fn from_channel_rejects_bad_maps() {
        let s = FaithfulState::tracial(2);
        let t = QuantumChannel::transpose_map(2);
        assert!(matches!(Coupling::from_channel(&t, &s, &s, DEFAULT_TOL), Err(Error::NotAState(_))));
        let id = QuantumChannel::identity(2);
        assert!(matches!(Coupling::from_channel(&id, &state2(), &s, DEFAULT_TOL), Err(Error::NotAState(_))));
    }

    #[test]
    fn invalid_couplings_are_reported() {
        let s = FaithfulState::tracial(2);
        let k = Coupling::product(&s, &s).kappa().scale(re(0.9));
        let check = Coupling::check(&k, &s, &s, DEFAULT_TOL).unwrap();
        assert!(!check.is_valid());
        assert!((check.trace_defect - 0.1).abs() < 1e-12);
        assert!(matches!(Coupling::new(k, s.clone(), s.clone(), DEFAULT_TOL), Err(Error::NotACoupling(_))));
        let wrong = Coupling::product(&state2(), &s).kappa().clone();
        let check = Coupling::check(&wrong, &s, &s, DEFAULT_TOL).unwrap();
        assert!((check.marginal_a_distance - (0.15f64 * 0.15 * 2.0).sqrt()).abs() < 1e-12);
        assert!(Coupling::check(&ComplexMatrix::identity(3), &s, &s, DEFAULT_TOL).is_err());
    }

    #[test]
    fn flips() {
        let (a, b) = (state3(), state2());
        assert!(Coupling::product(&a, &b).flip().approx_eq(&Coupling::product(&b, &a), 1e-15));
        let d = Coupling::diagonal(&a);
        assert!(d.flip().approx_eq(&d, 1e-15));
        let w = rectangular();
        let dual = w.extract_channel().dual(w.state_a(), w.state_b(), DEFAULT_TOL).unwrap();
        assert!(w.flip().extract_channel().approx_eq(&dual, 1e-13));

        assert!(d.kms_flip(DEFAULT_TOL).unwrap().approx_eq(&d, 1e-13));
        assert!(Coupling::product(&a, &b).kms_flip(DEFAULT_TOL).unwrap().approx_eq(&Coupling::product(&b, &a), 1e-13));
        let back = w.kms_flip(DEFAULT_TOL).unwrap().kms_flip(DEFAULT_TOL).unwrap();
        assert!(back.approx_eq(&w, 1e-12));
        let sigma = w.extract_channel().kms_dual(w.state_a(), w.state_b(), DEFAULT_TOL).unwrap();
        assert!(w.kms_flip(DEFAULT_TOL).unwrap().extract_channel().approx_eq(&sigma, 1e-12));
    }

    #[test]
    fn composition_laws() {
        let w = rectangular(); // (3 -> 2)
        let psi = rectangular().flip(); // (2 -> 3)
        let d3 = Coupling::diagonal(w.state_a());
        let d2 = Coupling::diagonal(w.state_b());
        assert!(w.compose(&d2, DEFAULT_TOL).unwrap().approx_eq(&w, 1e-12));
        assert!(d3.compose(&w, DEFAULT_TOL).unwrap().approx_eq(&w, 1e-12));
        let prod = Coupling::product(w.state_a(), w.state_b());
        let c = prod.compose(&psi, DEFAULT_TOL).unwrap();
        assert!(c.is_trivial(1e-12));
        // ω∘ψ(a ⊗ c) = ψ(E_ω(a) ⊗ c) = ω(a ⊗ E_ψ′(c))
        let comp = w.compose(&psi, DEFAULT_TOL).unwrap();
        let e_w = w.extract_channel();
        let e_psi_dual = psi.extract_channel().dual(psi.state_a(), psi.state_b(), DEFAULT_TOL).unwrap();
        for a in units(3) {
            for c in units(3) {
                let lhs = comp.evaluate(&a, &c).unwrap();
                assert!((lhs - psi.evaluate(&e_w.apply(&a).unwrap(), &c).unwrap()).norm() < 1e-13);
                assert!((lhs - w.evaluate(&a, &e_psi_dual.apply(&c).unwrap()).unwrap()).norm() < 1e-13);
            }
        }
        assert!(matches!(w.compose(&w, DEFAULT_TOL), Err(Error::NotComposable(_))));
    }

    #[test]
    fn orthogonality() {
        let s = FaithfulState::tracial(2);
        let d = Coupling::diagonal(&s);
        let r = d.is_orthogonal(&d, DEFAULT_TOL).unwrap();
        assert!(!r.orthogonal && !r.hilbert_criterion && r.agree);
        let p = Coupling::product(&s, &s);
        let r = p.is_orthogonal(&mixed_qubit(), DEFAULT_TOL).unwrap();
        assert!(r.orthogonal && r.hilbert_criterion && r.agree);
        let r = mixed_qubit().is_orthogonal(&p, DEFAULT_TOL).unwrap();
        assert!(r.orthogonal && r.agree);
    }
}
