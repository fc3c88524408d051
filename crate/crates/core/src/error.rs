// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bad factorization: {dim}x{dim} matrix cannot be split as {left}x{right}")]
    BadFactorization { dim: usize, left: usize, right: usize },

    #[error("state not faithful: entry {index} is {value}")]
    NotFaithful { index: usize, value: f64 },

    #[error("not normalized: spectrum sums to {0}")]
    NotNormalized(f64),

    #[error("dual undefined for non-state-preserving map (residual {0:e})")]
    DualUndefined(f64),

    #[error("dual generator undefined: state not invariant (residual {0:e})")]
    DualGeneratorUndefined(f64),

    #[error("reversing operation incompatible with state: {0}")]
    IncompatibleReversal(String),

    #[error("not a coupling: {0}")]
    NotACoupling(String),

    #[error("omega_E is not a state: {0}")]
    NotAState(String),

    #[error("couplings not composable: {0}")]
    NotComposable(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("non-Hermitian hamiltonian (deviation {0:e})")]
    NonHermitianHamiltonian(f64),

    #[error("cycle too short: length {0} (cycles need at least 3 sites)")]
    CycleTooShort(usize),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("state mismatch: {0}")]
    StateMismatch(String),

    #[error("singular linear system")]
    Singular,

    #[error("fixed-point set not an algebra numerically (residual {0:e})")]
    NotAnAlgebra(f64),
}
