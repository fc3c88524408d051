// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Balance between systems, detailed balance, ergodicity and the convergence
//! probe.
//!
//! `A` and `B` are in balance with respect to a coupling `ω` when
//! `ω(α(a) ⊗ c) = ω(a ⊗ β′(c))` for all `a`, `c`, which is the same as
//! `E_ω ∘ α = β ∘ E_ω`. Both forms are evaluated and compared. For
//! generators the check is made on the generators themselves; the semigroups
//! are sampled at a few times as a consistency check.

use crate::channel::{weighted_adjoint, QuantumChannel, ReversingOperation};
use crate::coupling::{units, Coupling};
use crate::error::{Error, Result};
use crate::matrix::{eigenvalues, nullspace, ComplexMatrix, C64, ONE, ZERO};
use crate::state::{kms_pairing, FaithfulState};
use crate::system::{Dynamics, System};

/// Times at which generator-level verdicts are compared with the semigroup.
pub const SAMPLE_TIMES: [f64; 3] = [0.1, 1.0, 5.0];

/// Threshold separating balanced from unbalanced semigroup samples.
pub const SAMPLE_TOL: f64 = 1e-8;

/// Deviation required of the convergence probe at `t = 50 / gap`.
pub const CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    pub balanced: bool,
    /// `‖S_E S_α − S_β S_E‖_F / (1 + ‖S_α‖_F + ‖S_β‖_F)`.
    pub residual: f64,
    /// `max |ω(α(a) ⊗ c) − ω(a ⊗ β′(c))|` over matrix units.
    pub definition_residual: f64,
    pub method_agreement: bool,
    /// Semigroup residuals at [`SAMPLE_TIMES`] (generators only).
    pub sampled: Option<SampledBalance>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledBalance {
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Balanced: every sample below [`SAMPLE_TOL`]; otherwise some sample above.
    pub consistent: bool,
}

fn normalized_gap(sa: &ComplexMatrix, sb: &ComplexMatrix, se: &ComplexMatrix) -> f64 {
    let diff = &se.dot(sa) - &sb.dot(se);
    diff.frobenius_norm() / (1.0 + sa.frobenius_norm() + sb.frobenius_norm())
}

fn check_pair(a: &System, b: &System, w: &Coupling, tol: f64) -> Result<()> {
    if !a.state().approx_eq(w.state_a(), tol) || !b.state().approx_eq(w.state_b(), tol) {
        return Err(Error::StateMismatch("coupling marginals differ from the system states".to_string()));
    }
    if a.is_generator() != b.is_generator() {
        return Err(Error::InvalidGenerator("cannot compare a channel with a generator".to_string()));
    }
    Ok(())
}

/// Decide `A ω B`.
pub fn is_balanced(a: &System, b: &System, w: &Coupling, tol: f64) -> Result<BalanceReport> {
    check_pair(a, b, w, tol)?;
    let (sa, sb) = (a.superoperator(), b.superoperator());
    let se = w.extract_channel().superoperator().clone();
    let residual = normalized_gap(sa, sb, &se);

    let beta_dual = weighted_adjoint(sb, b.state(), b.state())?;
    let m = w.bilinear_matrix();
    let lhs = sa.transpose().dot(&m);
    let rhs = m.dot(&beta_dual);
    let definition_residual = (&lhs - &rhs).max_abs();

    let balanced = residual < tol;
    let sampled = if a.is_generator() {
        let mut residuals = Vec::with_capacity(SAMPLE_TIMES.len());
        for &t in &SAMPLE_TIMES {
            let (ea, eb) = (a.at_time(t)?, b.at_time(t)?);
            residuals.push(normalized_gap(ea.superoperator(), eb.superoperator(), &se));
        }
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        let consistent = if balanced { worst < SAMPLE_TOL } else { worst > SAMPLE_TOL };
        Some(SampledBalance { times: SAMPLE_TIMES.to_vec(), residuals, consistent })
    } else {
        None
    };
    Ok(BalanceReport {
        balanced,
        residual,
        definition_residual,
        method_agreement: balanced == (definition_residual < tol),
        sampled,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqdbReport {
    pub sqdb: bool,
    /// `‖S_{α^Θ} − S_α‖_F / (1 + ‖S_α‖_F)`.
    pub residual: f64,
    /// `A δ_μ A^Θ`.
    pub via_balance: bool,
    pub balance_residual: f64,
    pub agree: bool,
}

/// Θ-standard quantum detailed balance, `α^Θ = α`.
pub fn check_theta_sqdb(sys: &System, theta: &ReversingOperation, tol: f64) -> Result<SqdbReport> {
    theta.check_compatible(sys.state(), tol)?;
    let reversed = sys.theta_kms_dual(theta, tol)?;
    let s = sys.superoperator();
    let residual = (reversed.superoperator() - s).frobenius_norm() / (1.0 + s.frobenius_norm());
    let via = is_balanced(sys, &reversed, &Coupling::diagonal(sys.state()), tol)?;
    let sqdb = residual < tol;
    Ok(SqdbReport {
        sqdb,
        residual,
        via_balance: via.balanced,
        balance_residual: via.residual,
        agree: sqdb == via.balanced,
    })
}

/// `‖S_{α^σ} − S_α‖_F / (1 + ‖S_α‖_F)`.
pub fn kms_symmetry_residual(sys: &System, tol: f64) -> Result<f64> {
    let sigma = sys.kms_dual(tol)?;
    let s = sys.superoperator();
    Ok((sigma.superoperator() - s).frobenius_norm() / (1.0 + s.frobenius_norm()))
}

/// `α^σ = α`.
pub fn is_kms_symmetric(sys: &System, tol: f64) -> Result<bool> {
    Ok(kms_symmetry_residual(sys, tol)? < tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlipReport {
    /// Both systems KMS-symmetric.
    pub hypothesis_met: bool,
    /// `A ω B`.
    pub forward: bool,
    /// `B ω^σ A`.
    pub backward: bool,
    /// `Some(forward == backward)` when the hypothesis holds.
    pub consistent: Option<bool>,
}

/// For KMS-symmetric systems, `A ω B ⇔ B ω^σ A`.
pub fn kms_symmetry_flip_check(a: &System, b: &System, w: &Coupling, tol: f64) -> Result<FlipReport> {
    let hypothesis_met = is_kms_symmetric(a, tol)? && is_kms_symmetric(b, tol)?;
    let forward = is_balanced(a, b, w, tol)?.balanced;
    let backward = is_balanced(b, a, &w.kms_flip(tol)?, tol)?.balanced;
    Ok(FlipReport { hypothesis_met, forward, backward, consistent: hypothesis_met.then_some(forward == backward) })
}

/// For KMS-symmetric `A`, `A ω A^Θ ⇔ A^Θ ω_E A` with `E = Θ ∘ E_ω ∘ Θ`.
pub fn theta_flip_check(sys: &System, w: &Coupling, theta: &ReversingOperation, tol: f64) -> Result<FlipReport> {
    let hypothesis_met = is_kms_symmetric(sys, tol)?;
    let reversed = sys.theta_kms_dual(theta, tol)?;
    let forward = is_balanced(sys, &reversed, w, tol)?.balanced;
    let t = theta.superoperator();
    let n = sys.dim();
    let e = QuantumChannel::from_superoperator(n, n, t.dot(w.extract_channel().superoperator()).dot(&t))?;
    let w_e = Coupling::from_channel(&e, sys.state(), sys.state(), tol)?;
    let backward = is_balanced(&reversed, sys, &w_e, tol)?.balanced;
    Ok(FlipReport { hypothesis_met, forward, backward, consistent: hypothesis_met.then_some(forward == backward) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualOrderReport {
    /// `A ω B`.
    pub direct: bool,
    /// `B′ ω′ A′`.
    pub dual: bool,
    /// `B^σ ω^σ A^σ`.
    pub kms: bool,
    pub consistent: bool,
}

pub fn dual_order_check(a: &System, b: &System, w: &Coupling, tol: f64) -> Result<DualOrderReport> {
    let direct = is_balanced(a, b, w, tol)?.balanced;
    let dual = is_balanced(&b.dual(tol)?, &a.dual(tol)?, &w.flip(), tol)?.balanced;
    let kms = is_balanced(&b.kms_dual(tol)?, &a.kms_dual(tol)?, &w.kms_flip(tol)?, tol)?.balanced;
    Ok(DualOrderReport { direct, dual, kms, consistent: direct == dual && dual == kms })
}

/// Hilbert–Schmidt orthonormal basis of the fixed points `{b : β(b) = b}`
/// (kernel of the generator for semigroups).
pub fn fixed_points(sys: &System, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let n = sys.dim();
    match sys.dynamics() {
        Dynamics::Channel(c) => c.fixed_point_space(tol),
        Dynamics::Generator(g) => nullspace(g.superoperator(), tol)
            .into_iter()
            .map(|v| ComplexMatrix::unvec(n, n, &v))
            .collect(),
    }
}

/// Fixed points are the scalars.
pub fn is_ergodic(sys: &System, tol: f64) -> Result<bool> {
    Ok(fixed_points(sys, tol)?.len() == 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisjointnessReport {
    pub ergodic: bool,
    pub fixed_dim: usize,
    pub witness: Option<IdentityWitness>,
}

/// A non-trivial balance between an identity system on the fixed-point
/// algebra and the probed system, via the restricted diagonal coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityWitness {
    pub basis: Vec<ComplexMatrix>,
    /// Distance of products of basis elements from the span.
    pub algebra_residual: f64,
    /// `max |ω(f ⊗ β′(c)) − ω(f ⊗ c)|` (`max |ω(f ⊗ L′(c))|` for generators).
    pub balance_residual: f64,
    /// `max |ω(f ⊗ c) − ν(f) ν(c)|`.
    pub nontriviality: f64,
    pub balanced: bool,
    pub nontrivial: bool,
}

fn project_onto(basis: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
    for f in basis {
        let c: C64 = f.data().iter().zip(x.data()).map(|(p, q)| p.conj() * q).sum();
        out = &out + &f.scale(c);
    }
    out
}

/// Build the identity-system witness against disjointness from identity
/// systems; `None` for ergodic systems.
pub fn disjointness_probe(sys: &System, tol: f64) -> Result<DisjointnessReport> {
    let basis = fixed_points(sys, tol)?;
    let fixed_dim = basis.len();
    if fixed_dim <= 1 {
        return Ok(DisjointnessReport { ergodic: true, fixed_dim, witness: None });
    }
    let mut algebra_residual: f64 = 0.0;
    for f in &basis {
        algebra_residual = algebra_residual.max((&f.adjoint() - &project_onto(&basis, &f.adjoint())).frobenius_norm());
        for g in &basis {
            let fg = f.dot(g);
            algebra_residual = algebra_residual.max((&fg - &project_onto(&basis, &fg)).frobenius_norm());
        }
    }
    if algebra_residual > tol.sqrt() {
        return Err(Error::NotAnAlgebra(algebra_residual));
    }
    let state = sys.state();
    let beta_dual = weighted_adjoint(sys.superoperator(), state, state)?;
    let n = sys.dim();
    let mut balance_residual: f64 = 0.0;
    let mut nontriviality: f64 = 0.0;
    for f in &basis {
        let nu_f = state.expect(f)?;
        for c in units(n) {
            let moved = ComplexMatrix::unvec(n, n, &beta_dual.apply_vec(&c.vec()))?;
            let paired = kms_pairing(state, f, &c)?;
            let d = if sys.is_generator() {
                kms_pairing(state, f, &moved)?
            } else {
                kms_pairing(state, f, &moved)? - paired
            };
            balance_residual = balance_residual.max(d.norm());
            nontriviality = nontriviality.max((paired - nu_f * state.expect(&c)?).norm());
        }
    }
    let witness = IdentityWitness {
        basis,
        algebra_residual,
        balance_residual,
        nontriviality,
        balanced: balance_residual < tol,
        nontrivial: nontriviality > tol,
    };
    Ok(DisjointnessReport { ergodic: false, fixed_dim, witness: Some(witness) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub balanced: bool,
    /// Kernel of `A`'s generator is the scalars and the rest of its spectrum
    /// lies in the open left half-plane.
    pub certified: bool,
    pub gap: Option<f64>,
    /// `E_ω(A) = C·1`, nothing to transfer.
    pub vacuous: bool,
    /// `(t, sup |λ(β_t(b)) − ν(b)|)` for the requested times and for `50 / gap`.
    pub deviations: Vec<(f64, f64)>,
    /// Deviation at `50 / gap` below [`CONVERGENCE_TOL`].
    pub converged: Option<bool>,
    pub note: String,
}

fn probe_states(n: usize) -> Vec<Vec<C64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let basis = |i: usize| (0..n).map(|k| if k == i { ONE } else { ZERO }).collect::<Vec<_>>();
    let mut out: Vec<Vec<C64>> = (0..n).map(basis).collect();
    for i in 0..n {
        for j in i + 1..n {
            let mut v = vec![ZERO; n];
            v[i] = C64::new(h, 0.0);
            v[j] = C64::new(h, 0.0);
            out.push(v.clone());
            v[j] = C64::new(0.0, h);
            out.push(v);
        }
    }
    out
}

/// Transfer of convergence from `A` to `B` across a balance.
pub fn convergence_probe(a: &System, b: &System, w: &Coupling, t_grid: &[f64], tol: f64) -> Result<ConvergenceReport> {
    if !a.is_generator() || !b.is_generator() {
        return Err(Error::InvalidGenerator("convergence probe needs generator dynamics".to_string()));
    }
    let balanced = is_balanced(a, b, w, tol)?.balanced;
    let mut report = ConvergenceReport {
        balanced,
        certified: false,
        gap: None,
        vacuous: false,
        deviations: Vec::new(),
        converged: None,
        note: String::new(),
    };
    if !balanced {
        report.note = "systems are not in balance".to_string();
        return Ok(report);
    }
    let sa = a.superoperator();
    let scale = sa.frobenius_norm().max(1.0);
    let spectrum = eigenvalues(sa)?;
    let kernel = fixed_points(a, tol)?.len();
    let top_is_zero = spectrum.first().map(|z| z.norm() < tol.sqrt() * scale).unwrap_or(false);
    let rest = spectrum.get(1).map(|z| -z.re);
    if kernel != 1 || !top_is_zero || rest.map(|g| g <= tol.sqrt() * scale).unwrap_or(true) {
        report.note = "spectral condition fails; the transfer statement does not apply".to_string();
        return Ok(report);
    }
    let gap = rest.expect("checked above");
    report.certified = true;
    report.gap = Some(gap);

    let e = w.extract_channel();
    let m = b.dim();
    let one = ComplexMatrix::identity(m);
    let observables: Vec<ComplexMatrix> = units(a.dim()).map(|u| e.apply(&u)).collect::<Result<_>>()?;
    report.vacuous = observables.iter().all(|x| {
        let c = x[(0, 0)];
        (x - &one.scale(c)).frobenius_norm() <= tol * x.frobenius_norm().max(1.0)
    });
    if report.vacuous {
        report.note = "E_ω(A) consists of scalars; the statement is vacuous".to_string();
    }
    let states = probe_states(m);
    let nu: &FaithfulState = b.state();
    let final_time = 50.0 / gap;
    let mut times: Vec<f64> = t_grid.to_vec();
    times.push(final_time);
    for &t in &times {
        let bt = b.at_time(t)?;
        let mut worst: f64 = 0.0;
        for x in &observables {
            let moved = bt.apply(x)?;
            let target = nu.expect(x)?;
            for v in &states {
                let mv = moved.apply_vec(v);
                let value: C64 = v.iter().zip(&mv).map(|(p, q)| p.conj() * q).sum();
                worst = worst.max((value - target).norm());
            }
        }
        report.deviations.push((t, worst));
    }
    let last = report.deviations.last().expect("final time pushed").1;
    report.converged = Some(last < CONVERGENCE_TOL);
    if report.note.is_empty() {
        report.note = format!("deviation {last:e} at t = {final_time}");
    }
    Ok(report)
}
