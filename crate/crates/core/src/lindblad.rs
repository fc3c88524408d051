// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad generators, their semigroups and duals, and the cycle scenarios
//! built from weighted cyclic shifts.
//!
//! A generator is stored in jump form,
//!
//! ```text
//! L(a) = Σ_j V_j* a V_j − ½{Σ_j V_j* V_j, a} + i[h, a],
//! ```
//!
//! together with its cached superoperator in the column-stacking convention.

use serde::{Deserialize, Serialize};

use crate::channel::{choi_from_superop, state_preservation_residual, weighted_adjoint, QuantumChannel, ReversingOperation};
use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::matrix::{
    approx_eq, frob_distance, hermitian_eigen, kron, mat_exp, re, ComplexMatrix, C64, I, ONE, ZERO,
};
use crate::state::FaithfulState;
use crate::system::System;

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    dim: usize,
    jumps: Vec<ComplexMatrix>,
    hamiltonian: ComplexMatrix,
    superop: ComplexMatrix,
}

impl LindbladGenerator {
    /// Build `L` from jump operators and a Hermitian Hamiltonian.
    pub fn new(jumps: Vec<ComplexMatrix>, hamiltonian: ComplexMatrix, tol: f64) -> Result<Self> {
        if !hamiltonian.is_square() {
            return Err(Error::InvalidGenerator(format!(
                "hamiltonian must be square, got {}x{}",
                hamiltonian.rows(),
                hamiltonian.cols()
            )));
        }
        let n = hamiltonian.rows();
        for (j, v) in jumps.iter().enumerate() {
            if v.rows() != n || v.cols() != n {
                return Err(Error::InvalidGenerator(format!(
                    "jump {j} is {}x{}, expected {n}x{n}",
                    v.rows(),
                    v.cols()
                )));
            }
        }
        let deviation = frob_distance(&hamiltonian, &hamiltonian.adjoint())?;
        if deviation > tol * hamiltonian.frobenius_norm().max(1.0) {
            return Err(Error::NonHermitianHamiltonian(deviation));
        }
        let hamiltonian = hamiltonian.hermitian_part();
        let superop = jump_superoperator(n, &jumps, &hamiltonian);
        Ok(Self { dim: n, jumps, hamiltonian, superop })
    }

    /// `i[h, ·]`.
    pub fn hamiltonian_only(hamiltonian: ComplexMatrix, tol: f64) -> Result<Self> {
        Self::new(Vec::new(), hamiltonian, tol)
    }

    /// Recover a jump form from a superoperator. Fails unless the map is a
    /// Lindblad generator within `tol` (conditionally completely positive,
    /// Hermiticity preserving and `L(1) = 0`).
    pub fn from_superoperator(n: usize, superop: &ComplexMatrix, tol: f64) -> Result<Self> {
        if superop.rows() != n * n || superop.cols() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "generator superoperator on M_{n} must be {}x{}",
                n * n,
                n * n
            )));
        }
        let scale = superop.frobenius_norm().max(1.0);
        let choi = choi_from_superop(superop, n, n);
        let mut omega = vec![ZERO; n * n];
        for i in 0..n {
            omega[i * n + i] = ONE;
        }
        let nf = n as f64;
        let proj = ComplexMatrix::from_fn(n * n, n * n, |r, c| {
            let id = if r == c { ONE } else { ZERO };
            id - omega[r] * omega[c].conj() / nf
        });
        let projected = proj.dot(&choi).dot(&proj);
        if frob_distance(&projected, &projected.adjoint())? > tol * scale {
            return Err(Error::InvalidGenerator("map does not preserve Hermiticity".to_string()));
        }
        let (values, vectors) = hermitian_eigen(&projected.hermitian_part())?;
        let mut jumps = Vec::new();
        for (lambda, w) in values.iter().zip(&vectors) {
            if *lambda < -tol * scale {
                return Err(Error::InvalidGenerator(format!(
                    "not conditionally completely positive (eigenvalue {lambda:e})"
                )));
            }
            if *lambda <= tol * scale * 1e-3 {
                continue;
            }
            // w[i·n + k] holds (V*)[k][i]
            let s = lambda.sqrt();
            let v_adj = ComplexMatrix::from_fn(n, n, |k, i| w[i * n + k] * s);
            jumps.push(v_adj.adjoint());
        }
        let dissipative = jump_superoperator(n, &jumps, &ComplexMatrix::zeros(n, n));
        // what is left has the form a ↦ G*a + aG
        let rest = superop - &dissipative;
        let c_rest = choi_from_superop(&rest, n, n);
        let c_omega = c_rest.apply_vec(&omega);
        let tr_g: C64 = omega.iter().zip(&c_omega).map(|(x, y)| x.conj() * y).sum::<C64>() / (2.0 * nf);
        let tr_g = re(tr_g.re);
        // (1 ⊗ G*) Ω̃ = (C Ω̃ − Tr G · Ω̃) / n, entry i·n + k is G*[k][i]
        let g_adj = ComplexMatrix::from_fn(n, n, |k, i| (c_omega[i * n + k] - tr_g * omega[i * n + k]) / nf);
        let g = g_adj.adjoint();
        let hamiltonian = (&g - &g_adj).scale(I * 0.5);
        let generator = Self::new(jumps, hamiltonian, tol)?;
        let mismatch = frob_distance(&generator.superop, superop)?;
        if mismatch > tol * scale {
            return Err(Error::InvalidGenerator(format!(
                "map is not of Lindblad form (reconstruction residual {mismatch:e})"
            )));
        }
        Ok(generator)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jumps(&self) -> &[ComplexMatrix] {
        &self.jumps
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn superoperator(&self) -> &ComplexMatrix {
        &self.superop
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.dim || a.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "generator on M_{} applied to {}x{}",
                self.dim,
                a.rows(),
                a.cols()
            )));
        }
        ComplexMatrix::unvec(self.dim, self.dim, &self.superop.apply_vec(&a.vec()))
    }

    /// `max |Tr(ρ L(E_ab))|` over matrix units.
    pub fn invariance_residual(&self, s: &FaithfulState) -> Result<f64> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "generator on M_{} with state of dimension {}",
                self.dim,
                s.dim()
            )));
        }
        Ok(state_preservation_residual(&self.superop, s, s, true))
    }

    /// `e^{tL}`.
    pub fn semigroup(&self, t: f64) -> Result<QuantumChannel> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        let exp = mat_exp(&self.superop.scale(re(t)))?;
        QuantumChannel::from_superoperator(self.dim, self.dim, exp)
    }

    /// The dual generator `L′` for the GNS pairing of `s`:
    /// jumps `ρ^{1/2} V_jᵀ ρ^{-1/2}` with `G̃ = ρ^{1/2} Gᵀ ρ^{-1/2}`, checked
    /// against the weighted adjoint of the superoperator.
    pub fn dual(&self, s: &FaithfulState, tol: f64) -> Result<Self> {
        let residual = self.invariance_residual(s)?;
        if residual > tol {
            return Err(Error::DualGeneratorUndefined(residual));
        }
        let (sq, isq) = (s.sqrt_density(), s.inv_sqrt_density());
        let twist = |x: &ComplexMatrix| sq.dot(&x.transpose()).dot(&isq);
        let jumps: Vec<ComplexMatrix> = self.jumps.iter().map(twist).collect();
        let g_dual = twist(&self.g());
        let hamiltonian = (&g_dual - &g_dual.adjoint()).scale(I * 0.5);
        let dual = Self::new(jumps, hamiltonian, tol)?;
        let solved = weighted_adjoint(&self.superop, s, s)?;
        let mismatch = frob_distance(&dual.superop, &solved)?;
        if mismatch > tol * self.superop.frobenius_norm().max(1.0) {
            return Err(Error::DualGeneratorUndefined(mismatch));
        }
        Ok(dual)
    }

    /// `L^σ = j ∘ L′ ∘ j`: jumps conjugated, hamiltonian `−h̃ᵀ`.
    pub fn kms_dual(&self, s: &FaithfulState, tol: f64) -> Result<Self> {
        let dual = self.dual(s, tol)?;
        let jumps = dual.jumps.iter().map(|v| v.conj()).collect();
        Self::new(jumps, dual.hamiltonian.transpose().scale(re(-1.0)), tol)
    }

    /// `Θ ∘ L^σ ∘ Θ`.
    pub fn theta_kms_dual(&self, s: &FaithfulState, theta: &ReversingOperation, tol: f64) -> Result<Self> {
        theta.check_compatible(s, tol)?;
        let sigma = self.kms_dual(s, tol)?;
        let t = theta.superoperator();
        Self::from_superoperator(self.dim, &t.dot(&sigma.superop).dot(&t), tol)
    }

    /// `G = −½ Σ V*V − i h`.
    fn g(&self) -> ComplexMatrix {
        let n = self.dim;
        let sum_vv = self.jumps.iter().fold(ComplexMatrix::zeros(n, n), |acc, v| &acc + &v.adjoint().dot(v));
        &sum_vv.scale(re(-0.5)) - &self.hamiltonian.scale(I)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && approx_eq(&self.superop, &other.superop, tol)
    }
}

/// Free-function form of [`LindbladGenerator::new`].
pub fn build_generator(jumps: Vec<ComplexMatrix>, hamiltonian: ComplexMatrix, tol: f64) -> Result<LindbladGenerator> {
    LindbladGenerator::new(jumps, hamiltonian, tol)
}

fn jump_superoperator(n: usize, jumps: &[ComplexMatrix], hamiltonian: &ComplexMatrix) -> ComplexMatrix {
    let one = ComplexMatrix::identity(n);
    let mut sum_vv = ComplexMatrix::zeros(n, n);
    let mut superop = ComplexMatrix::zeros(n * n, n * n);
    for v in jumps {
        // a ↦ V* a V
        superop = &superop + &kron(&v.transpose(), &v.adjoint());
        sum_vv = &sum_vv + &v.adjoint().dot(v);
    }
    let g = &sum_vv.scale(re(-0.5)) - &hamiltonian.scale(I);
    // a ↦ G* a + a G
    &(&superop + &kron(&one, &g.adjoint())) + &kron(&g.transpose(), &one)
}

/// Block-diagonal weighted cyclic shift: block `j` is `√k_j · O_{r_j}` with
/// `O e_1 = e_2, …, O e_r = e_1`.
pub fn cycle_shift(cycle_lengths: &[usize], weights: &[f64]) -> Result<ComplexMatrix> {
    if cycle_lengths.len() != weights.len() {
        return Err(Error::InvalidScenario(format!(
            "{} cycles but {} weights",
            cycle_lengths.len(),
            weights.len()
        )));
    }
    if let Some(&r) = cycle_lengths.iter().find(|&&r| r < 3) {
        return Err(Error::CycleTooShort(r));
    }
    let n: usize = cycle_lengths.iter().sum();
    let mut m = ComplexMatrix::zeros(n, n);
    let mut offset = 0;
    for (&r, &k) in cycle_lengths.iter().zip(weights) {
        let s = re(k.sqrt());
        for i in 0..r {
            m[(offset + (i + 1) % r, offset + i)] = s;
        }
        offset += r;
    }
    Ok(m)
}

/// `K(a) = R_k* a R_k + R_{1−k} a R_{1−k}* − a + i[diag(g), a]`.
pub fn cycle_generator(cycle_lengths: &[usize], k: &[f64], g: &[f64], tol: f64) -> Result<LindbladGenerator> {
    let r_k = cycle_shift(cycle_lengths, k)?;
    let complement: Vec<f64> = k.iter().map(|x| 1.0 - x).collect();
    let r_c = cycle_shift(cycle_lengths, &complement)?;
    if g.len() != r_k.rows() {
        return Err(Error::InvalidScenario(format!(
            "hamiltonian needs {} entries, got {}",
            r_k.rows(),
            g.len()
        )));
    }
    LindbladGenerator::new(vec![r_k, r_c.adjoint()], ComplexMatrix::real_diag(g), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockType {
    Entangled,
    Mixed,
    Product,
}

/// A cycle scenario. `block_probs[j]` is the total weight of cycle `j`, spread
/// evenly over its sites; `partition` groups cycle indices into blocks, each
/// coupled according to `types`. `k`, `l` are per cycle, `g`, `h` per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub cycles: Vec<usize>,
    pub block_probs: Vec<f64>,
    pub partition: Vec<Vec<usize>>,
    pub types: Vec<BlockType>,
    pub k: Vec<f64>,
    pub l: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

/// Output of [`scenario_build`].
#[derive(Debug, Clone)]
pub struct Scenario {
    pub system_a: System,
    pub system_b: System,
    pub coupling: Coupling,
}

/// The two halves of the balance condition for real κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitResiduals {
    /// Frobenius norm of the difference of the jump terms.
    pub dissipative: f64,
    /// `‖[g ⊗ 1, κ] − [1 ⊗ h, κ]‖_F`.
    pub commutator: f64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.cycles.is_empty() {
            return bad("no cycles".to_string());
        }
        if let Some(&r) = self.cycles.iter().find(|&&r| r < 3) {
            return Err(Error::CycleTooShort(r));
        }
        let c = self.cycles.len();
        for (name, v) in [("block_probs", &self.block_probs), ("k", &self.k), ("l", &self.l)] {
            if v.len() != c {
                return bad(format!("{name} has {} entries for {c} cycles", v.len()));
            }
        }
        if self.block_probs.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return bad("block_probs must be positive".to_string());
        }
        let total: f64 = self.block_probs.iter().sum();
        if (total - 1.0).abs() > crate::state::NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total));
        }
        for (name, v) in [("k", &self.k), ("l", &self.l)] {
            if let Some(x) = v.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
                return bad(format!("{name} entries must lie in (0,1), got {x}"));
            }
        }
        let n = self.dim();
        for (name, v) in [("g", &self.g), ("h", &self.h)] {
            if v.len() != n {
                return bad(format!("{name} has {} entries for dimension {n}", v.len()));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return bad(format!("{name} has non-finite entries"));
            }
        }
        if self.types.len() != self.partition.len() {
            return bad(format!("{} blocks but {} types", self.partition.len(), self.types.len()));
        }
        let mut seen = vec![false; c];
        for block in &self.partition {
            for &p in block {
                if p >= c {
                    return bad(format!("partition refers to cycle {p} of {c}"));
                }
                if seen[p] {
                    return bad(format!("cycle {p} appears in two blocks"));
                }
                seen[p] = true;
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return bad(format!("cycle {p} is in no block"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.cycles.iter().sum()
    }

    /// Site indices of cycle `p`.
    pub fn sites(&self, p: usize) -> std::ops::Range<usize> {
        let start: usize = self.cycles[..p].iter().sum();
        start..start + self.cycles[p]
    }

    /// Site indices of block `b` (the union of its cycles).
    pub fn block_sites(&self, b: usize) -> Vec<usize> {
        self.partition[b].iter().flat_map(|&p| self.sites(p)).collect()
    }

    /// `ρ_q = block_probs[j] / r_j` on cycle `j`.
    pub fn state(&self) -> Result<FaithfulState> {
        let mut p = Vec::with_capacity(self.dim());
        for (&r, &w) in self.cycles.iter().zip(&self.block_probs) {
            p.extend(std::iter::repeat(w / r as f64).take(r));
        }
        FaithfulState::new(p)
    }

    /// The coupling density `κ = Σ_n κ_n`.
    pub fn kappa(&self) -> Result<ComplexMatrix> {
        let state = self.state()?;
        let rho = state.spectrum();
        let n = self.dim();
        let mut kappa = ComplexMatrix::zeros(n * n, n * n);
        for (b, ty) in self.types.iter().enumerate() {
            let sites = self.block_sites(b);
            match ty {
                BlockType::Entangled => {
                    for &p in &sites {
                        for &q in &sites {
                            kappa[(p * n + p, q * n + q)] = re((rho[p] * rho[q]).sqrt());
                        }
                    }
                }
                BlockType::Mixed => {
                    for &q in &sites {
                        kappa[(q * n + q, q * n + q)] = re(rho[q]);
                    }
                }
                BlockType::Product => {
                    let w: f64 = sites.iter().map(|&q| rho[q]).sum();
                    for &p in &sites {
                        for &q in &sites {
                            kappa[(p * n + q, p * n + q)] = re(rho[p] * rho[q] / w);
                        }
                    }
                }
            }
        }
        Ok(kappa)
    }

    /// Both halves of the balance condition evaluated on `κ`.
    pub fn split_residuals(&self) -> Result<SplitResiduals> {
        self.validate()?;
        let n = self.dim();
        let kappa = self.kappa()?;
        let one = ComplexMatrix::identity(n);
        let comp = |v: &[f64]| v.iter().map(|x| 1.0 - x).collect::<Vec<_>>();
        let r_k = kron(&cycle_shift(&self.cycles, &self.k)?, &one);
        let r_kc = kron(&cycle_shift(&self.cycles, &comp(&self.k))?, &one);
        let r_l = kron(&one, &cycle_shift(&self.cycles, &self.l)?);
        let r_lc = kron(&one, &cycle_shift(&self.cycles, &comp(&self.l))?);
        let sandwich = |x: &ComplexMatrix| x.dot(&kappa).dot(&x.adjoint());
        let lhs = &sandwich(&r_k) + &sandwich(&r_kc.adjoint());
        let rhs = &sandwich(&r_lc) + &sandwich(&r_l.adjoint());
        let g1 = kron(&ComplexMatrix::real_diag(&self.g), &one);
        let h1 = kron(&one, &ComplexMatrix::real_diag(&self.h));
        Ok(SplitResiduals {
            dissipative: frob_distance(&lhs, &rhs)?,
            commutator: frob_distance(&g1.commutator(&kappa), &h1.commutator(&kappa))?,
        })
    }
}

/// Build the two systems and the coupling of a scenario.
pub fn scenario_build(spec: &ScenarioSpec, tol: f64) -> Result<Scenario> {
    spec.validate()?;
    let state = spec.state()?;
    let gen_a = cycle_generator(&spec.cycles, &spec.k, &spec.g, tol)?;
    let gen_b = cycle_generator(&spec.cycles, &spec.l, &spec.h, tol)?;
    let coupling = Coupling::new(spec.kappa()?, state.clone(), state.clone(), tol)?;
    Ok(Scenario {
        system_a: System::with_generator(state.clone(), gen_a, tol)?,
        system_b: System::with_generator(state, gen_b, tol)?,
        coupling,
    })
}

/// Arithmetic verdict: every entangled or mixed block needs `k_p = l_p` on its
/// cycles, and every entangled block needs `g − h` constant on its sites.
pub fn scenario_predict(spec: &ScenarioSpec) -> bool {
    const EXACT: f64 = 1e-12;
    spec.types.iter().enumerate().all(|(b, ty)| {
        if *ty == BlockType::Product {
            return true;
        }
        let rates = spec.partition[b].iter().all(|&p| (spec.k[p] - spec.l[p]).abs() <= EXACT);
        if *ty == BlockType::Mixed {
            return rates;
        }
        let sites = spec.block_sites(b);
        let shift = |q: usize| spec.g[q] - spec.h[q];
        rates && sites.iter().all(|&q| (shift(q) - shift(sites[0])).abs() <= EXACT)
    })
}
