// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Balance, detailed balance and couplings of finite-dimensional quantum
//! Markov systems.

pub mod balance;
pub mod channel;
pub mod coupling;
pub mod error;
pub mod lindblad;
pub mod matrix;
pub mod state;
pub mod system;

pub use balance::{check_theta_sqdb, is_balanced, is_ergodic, is_kms_symmetric, BalanceReport};
pub use channel::{QuantumChannel, ReversingOperation, UcpReport};
pub use coupling::{Coupling, CouplingCheck, OrthogonalityReport};
pub use error::{Error, Result};
pub use lindblad::{scenario_build, scenario_predict, BlockType, LindbladGenerator, Scenario, ScenarioSpec};
pub use matrix::{ComplexMatrix, C64, DEFAULT_TOL};
pub use state::FaithfulState;
pub use system::{Dynamics, System};
