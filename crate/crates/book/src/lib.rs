// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! The chapters of the guide in `book/src`, compiled so that their code
//! listings run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/states.md")]
pub mod states {}

#[doc = include_str!("../../../book/src/channels.md")]
pub mod channels {}

#[doc = include_str!("../../../book/src/couplings.md")]
pub mod couplings {}

#[doc = include_str!("../../../book/src/generators.md")]
pub mod generators {}

#[doc = include_str!("../../../book/src/balance.md")]
pub mod balance {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
