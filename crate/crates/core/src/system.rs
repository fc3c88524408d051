// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Systems `(M_n, α, μ)`: a faithful state with state-preserving dynamics,
//! either a single u.c.p. map or a Lindblad generator.

use crate::channel::{QuantumChannel, ReversingOperation};
use crate::error::{Error, Result};
use crate::lindblad::LindbladGenerator;
use crate::matrix::{frob_distance, ComplexMatrix};
use crate::state::FaithfulState;

#[derive(Debug, Clone, PartialEq)]
pub enum Dynamics {
    Channel(QuantumChannel),
    Generator(LindbladGenerator),
}

impl Dynamics {
    pub fn dim(&self) -> usize {
        match self {
            Dynamics::Channel(c) => c.dim_in(),
            Dynamics::Generator(g) => g.dim(),
        }
    }

    pub fn superoperator(&self) -> &ComplexMatrix {
        match self {
            Dynamics::Channel(c) => c.superoperator(),
            Dynamics::Generator(g) => g.superoperator(),
        }
    }

    pub fn is_generator(&self) -> bool {
        matches!(self, Dynamics::Generator(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct System {
    state: FaithfulState,
    dynamics: Dynamics,
}

impl System {
    /// Validates that the dynamics acts on the state's algebra, is u.c.p.
    /// (channels) and leaves the state invariant.
    pub fn new(state: FaithfulState, dynamics: Dynamics, tol: f64) -> Result<Self> {
        if dynamics.dim() != state.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dynamics on M_{} with state of dimension {}",
                dynamics.dim(),
                state.dim()
            )));
        }
        match &dynamics {
            Dynamics::Channel(c) => {
                if !c.is_endomorphic() {
                    return Err(Error::InvalidChannel("system dynamics must map M_n to itself".to_string()));
                }
                let report = c.validate_ucp(tol, 0);
                if !report.is_ucp() {
                    return Err(Error::InvalidChannel(format!(
                        "not u.c.p. (min Choi eigenvalue {:e}, unital residual {:e})",
                        report.min_choi_eigenvalue, report.unital_residual
                    )));
                }
                let residual = c.state_preservation_residual(&state, &state)?;
                if residual > tol {
                    return Err(Error::StateMismatch(format!("dynamics does not preserve the state (residual {residual:e})")));
                }
            }
            Dynamics::Generator(g) => {
                let residual = g.invariance_residual(&state)?;
                if residual > tol {
                    return Err(Error::StateMismatch(format!("state is not invariant (residual {residual:e})")));
                }
            }
        }
        Ok(Self { state, dynamics })
    }

    pub fn with_channel(state: FaithfulState, channel: QuantumChannel, tol: f64) -> Result<Self> {
        Self::new(state, Dynamics::Channel(channel), tol)
    }

    pub fn with_generator(state: FaithfulState, generator: LindbladGenerator, tol: f64) -> Result<Self> {
        Self::new(state, Dynamics::Generator(generator), tol)
    }

    /// The identity system on a state.
    pub fn identity(state: FaithfulState) -> Self {
        let n = state.dim();
        Self { state, dynamics: Dynamics::Channel(QuantumChannel::identity(n)) }
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn state(&self) -> &FaithfulState {
        &self.state
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn superoperator(&self) -> &ComplexMatrix {
        self.dynamics.superoperator()
    }

    pub fn is_generator(&self) -> bool {
        self.dynamics.is_generator()
    }

    /// The map at time `t`: `e^{tL}` for a generator; for a channel only
    /// integer `t` makes sense and `α^t` is returned.
    pub fn at_time(&self, t: f64) -> Result<QuantumChannel> {
        match &self.dynamics {
            Dynamics::Generator(g) => g.semigroup(t),
            Dynamics::Channel(c) => {
                if !(t >= 0.0) {
                    return Err(Error::NegativeTime(t));
                }
                if t.fract() != 0.0 {
                    return Err(Error::InvalidChannel(format!("discrete-time dynamics at non-integer time {t}")));
                }
                let mut out = QuantumChannel::identity(c.dim_in());
                for _ in 0..t as usize {
                    out = c.compose(&out)?;
                }
                Ok(out)
            }
        }
    }

    /// `(M_n, α′, μ)`.
    pub fn dual(&self, tol: f64) -> Result<Self> {
        let dynamics = match &self.dynamics {
            Dynamics::Channel(c) => Dynamics::Channel(c.dual(&self.state, &self.state, tol)?),
            Dynamics::Generator(g) => Dynamics::Generator(g.dual(&self.state, tol)?),
        };
        Ok(Self { state: self.state.clone(), dynamics })
    }

    /// `(M_n, α^σ, μ)`.
    pub fn kms_dual(&self, tol: f64) -> Result<Self> {
        let dynamics = match &self.dynamics {
            Dynamics::Channel(c) => Dynamics::Channel(c.kms_dual(&self.state, &self.state, tol)?),
            Dynamics::Generator(g) => Dynamics::Generator(g.kms_dual(&self.state, tol)?),
        };
        Ok(Self { state: self.state.clone(), dynamics })
    }

    /// `A^Θ = (M_n, Θ ∘ α^σ ∘ Θ, μ)`.
    pub fn theta_kms_dual(&self, theta: &ReversingOperation, tol: f64) -> Result<Self> {
        let dynamics = match &self.dynamics {
            Dynamics::Channel(c) => Dynamics::Channel(c.theta_kms_dual(&self.state, theta, tol)?),
            Dynamics::Generator(g) => Dynamics::Generator(g.theta_kms_dual(&self.state, theta, tol)?),
        };
        Ok(Self { state: self.state.clone(), dynamics })
    }

    /// Same state and same dynamics superoperator within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.state.approx_eq(&other.state, tol)
            && self.is_generator() == other.is_generator()
            && frob_distance(self.superoperator(), other.superoperator()).map(|d| d <= tol).unwrap_or(false)
    }
}
