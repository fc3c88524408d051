// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON file formats and canonicalization of supplied density matrices.

use balance_lab::matrix::{hermitian_eigen, kron, ComplexMatrix, C64};
use balance_lab::{Coupling, Dynamics, FaithfulState, LindbladGenerator, QuantumChannel, System};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `{"rows": n, "cols": m, "data": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        let data = self.data.iter().map(|[a, b]| C64::new(*a, *b)).collect();
        Ok(ComplexMatrix::new(self.rows, self.cols, data)?)
    }
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), data: m.data().iter().map(|z| [z.re, z.im]).collect() }
    }
}

/// Either `{"dim": n, "spectrum": [...]}` or `{"density": <matrix>}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<MatrixJson>,
}

impl From<&FaithfulState> for StateJson {
    fn from(s: &FaithfulState) -> Self {
        Self { dim: Some(s.dim()), spectrum: Some(s.spectrum().to_vec()), density: None }
    }
}

/// `{"dim_in", "dim_out", "superoperator"}` for a channel, or
/// `{"kraus": [...], "hamiltonian": ...}`. The presence of `hamiltonian`, or
/// `"generator": true` next to a superoperator, marks a Lindblad generator
/// whose `kraus` entries are the jump operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_out: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub superoperator: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub generator: bool,
}

impl From<&QuantumChannel> for ChannelJson {
    fn from(c: &QuantumChannel) -> Self {
        Self {
            dim_in: Some(c.dim_in()),
            dim_out: Some(c.dim_out()),
            superoperator: Some(c.superoperator().into()),
            kraus: None,
            hamiltonian: None,
            generator: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingJson {
    pub kappa: MatrixJson,
    pub state_a: StateJson,
    pub state_b: StateJson,
}

impl From<&Coupling> for CouplingJson {
    fn from(w: &Coupling) -> Self {
        Self { kappa: w.kappa().into(), state_a: w.state_a().into(), state_b: w.state_b().into() }
    }
}

/// A state together with its dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub state: StateJson,
    pub dynamics: ChannelJson,
}

/// A state in diagonal form, with the unitary `U` such that the supplied
/// density matrix equals `U diag(p) U*` (absent when it was already diagonal).
#[derive(Debug, Clone)]
pub struct Canonical {
    pub state: FaithfulState,
    pub unitary: Option<ComplexMatrix>,
}

impl Canonical {
    /// `x ↦ U* x U`, the identity when no rotation was needed.
    pub fn rotate(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match &self.unitary {
            Some(u) => u.adjoint().dot(x).dot(u),
            None => x.clone(),
        }
    }

    /// Superoperator of `a ↦ U a U*`.
    fn unrotate_superop(&self) -> Option<ComplexMatrix> {
        self.unitary.as_ref().map(|u| kron(&u.conj(), u))
    }
}

pub fn ingest_state(s: &StateJson, tol: f64) -> Result<Canonical, CliError> {
    match (s.spectrum.as_ref(), s.density.as_ref()) {
        (Some(p), None) => {
            if let Some(d) = s.dim {
                if d != p.len() {
                    return Err(CliError::Input(format!("state dim {d} but spectrum has {} entries", p.len())));
                }
            }
            Ok(Canonical { state: FaithfulState::new(p.clone())?, unitary: None })
        }
        (None, Some(m)) => {
            let rho = m.to_matrix()?;
            if !rho.is_square() {
                return Err(CliError::Input(format!("density matrix is {}x{}", rho.rows(), rho.cols())));
            }
            if s.dim.is_some_and(|d| d != rho.rows()) {
                return Err(CliError::Input("state dim disagrees with density matrix".to_string()));
            }
            if !rho.is_hermitian(tol) {
                return Err(CliError::Invalid("density matrix is not Hermitian".to_string()));
            }
            let n = rho.rows();
            let off = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j);
            let off_max = off.map(|(i, j)| rho[(i, j)].norm()).fold(0.0, f64::max);
            if off_max <= tol {
                let p = (0..n).map(|i| rho[(i, i)].re).collect();
                return Ok(Canonical { state: FaithfulState::new(p)?, unitary: None });
            }
            let (values, vectors) = hermitian_eigen(&rho)?;
            let u = ComplexMatrix::from_fn(n, n, |i, k| vectors[k][i]);
            Ok(Canonical { state: FaithfulState::new(values)?, unitary: Some(u) })
        }
        _ => Err(CliError::Input("a state needs exactly one of \"spectrum\" or \"density\"".to_string())),
    }
}

/// Superoperator in the canonical frames: `Ad(W*) ∘ S ∘ Ad(U)`.
fn rotate_superop(s: &ComplexMatrix, input: &Canonical, output: &Canonical) -> ComplexMatrix {
    let mut out = s.clone();
    if let Some(k) = input.unrotate_superop() {
        out = out.dot(&k);
    }
    if let Some(k) = output.unrotate_superop() {
        out = k.adjoint().dot(&out);
    }
    out
}

fn matrices(list: &[MatrixJson]) -> Result<Vec<ComplexMatrix>, CliError> {
    list.iter().map(MatrixJson::to_matrix).collect()
}

/// A channel as supplied, without reference to any state.
pub fn raw_channel(c: &ChannelJson) -> Result<QuantumChannel, CliError> {
    if c.hamiltonian.is_some() || c.generator {
        return Err(CliError::Input("expected a channel, got a generator".to_string()));
    }
    match (&c.superoperator, &c.kraus) {
        (Some(s), None) => {
            let s = s.to_matrix()?;
            let side = |len: usize| {
                let n = (len as f64).sqrt().round() as usize;
                if n * n == len {
                    Ok(n)
                } else {
                    Err(CliError::Input(format!("superoperator side {len} is not a square number")))
                }
            };
            let n = c.dim_in.map_or_else(|| side(s.cols()), Ok)?;
            let m = c.dim_out.map_or_else(|| side(s.rows()), Ok)?;
            Ok(QuantumChannel::from_superoperator(n, m, s)?)
        }
        (None, Some(k)) => Ok(QuantumChannel::from_kraus(&matrices(k)?)?),
        _ => Err(CliError::Input("a channel needs exactly one of \"superoperator\" or \"kraus\"".to_string())),
    }
}

/// A channel from the algebra of `input` to that of `output`, in canonical frames.
pub fn ingest_channel(c: &ChannelJson, input: &Canonical, output: &Canonical) -> Result<QuantumChannel, CliError> {
    let channel = raw_channel(c)?;
    if channel.dim_in() != input.state.dim() || channel.dim_out() != output.state.dim() {
        return Err(CliError::Input(format!(
            "channel M_{} -> M_{} does not fit states of dimension {} and {}",
            channel.dim_in(),
            channel.dim_out(),
            input.state.dim(),
            output.state.dim()
        )));
    }
    if input.unitary.is_none() && output.unitary.is_none() {
        return Ok(channel);
    }
    let s = rotate_superop(channel.superoperator(), input, output);
    Ok(QuantumChannel::from_superoperator(channel.dim_in(), channel.dim_out(), s)?)
}

pub fn ingest_dynamics(c: &ChannelJson, state: &Canonical, tol: f64) -> Result<Dynamics, CliError> {
    if c.hamiltonian.is_none() && !c.generator {
        return Ok(Dynamics::Channel(ingest_channel(c, state, state)?));
    }
    let n = state.state.dim();
    let generator = match (&c.superoperator, &c.kraus) {
        (Some(s), None) => {
            let s = rotate_superop(&s.to_matrix()?, state, state);
            LindbladGenerator::from_superoperator(n, &s, tol)?
        }
        (None, jumps) => {
            let jumps: Vec<ComplexMatrix> = matrices(jumps.as_deref().unwrap_or(&[]))?.iter().map(|v| state.rotate(v)).collect();
            let h = match &c.hamiltonian {
                Some(h) => state.rotate(&h.to_matrix()?),
                None => ComplexMatrix::zeros(n, n),
            };
            if jumps.iter().chain([&h]).any(|v| v.rows() != n || v.cols() != n) {
                return Err(CliError::Input(format!("generator operators must be {n}x{n}")));
            }
            LindbladGenerator::new(jumps, h, tol)?
        }
        _ => return Err(CliError::Input("a generator takes \"kraus\" jumps or a \"superoperator\", not both".to_string())),
    };
    Ok(Dynamics::Generator(generator))
}

pub fn ingest_system(s: &SystemJson, tol: f64) -> Result<(System, Canonical), CliError> {
    let state = ingest_state(&s.state, tol)?;
    let dynamics = ingest_dynamics(&s.dynamics, &state, tol)?;
    Ok((System::new(state.state.clone(), dynamics, tol)?, state))
}

pub struct CanonicalCoupling {
    pub kappa: ComplexMatrix,
    pub a: Canonical,
    pub b: Canonical,
}

/// `κ ↦ (U ⊗ W)* κ (U ⊗ W)`; the result is not validated.
pub fn ingest_coupling_raw(c: &CouplingJson, tol: f64) -> Result<CanonicalCoupling, CliError> {
    let a = ingest_state(&c.state_a, tol)?;
    let b = ingest_state(&c.state_b, tol)?;
    let mut kappa = c.kappa.to_matrix()?;
    let (n, m) = (a.state.dim(), b.state.dim());
    if kappa.rows() != n * m || kappa.cols() != n * m {
        return Err(CliError::Input(format!(
            "kappa must be {0}x{0} for states of dimension {n} and {m}, got {1}x{2}",
            n * m,
            kappa.rows(),
            kappa.cols()
        )));
    }
    if a.unitary.is_some() || b.unitary.is_some() {
        let u = a.unitary.clone().unwrap_or_else(|| ComplexMatrix::identity(n));
        let w = b.unitary.clone().unwrap_or_else(|| ComplexMatrix::identity(m));
        let uw = kron(&u, &w);
        kappa = uw.adjoint().dot(&kappa).dot(&uw);
    }
    Ok(CanonicalCoupling { kappa, a, b })
}

pub fn ingest_coupling(c: &CouplingJson, tol: f64) -> Result<(Coupling, Canonical, Canonical), CliError> {
    let raw = ingest_coupling_raw(c, tol)?;
    let w = Coupling::new(raw.kappa, raw.a.state.clone(), raw.b.state.clone(), tol)?;
    Ok((w, raw.a, raw.b))
}
