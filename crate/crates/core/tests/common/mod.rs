// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Builders shared by the integration tests.

#![allow(dead_code)]

use balance_lab::lindblad::{cycle_generator, BlockType, LindbladGenerator, ScenarioSpec};
use balance_lab::matrix::{re, ComplexMatrix, C64};
use balance_lab::{FaithfulState, DEFAULT_TOL};

pub fn state_from_weights(w: &[f64]) -> FaithfulState {
    let total: f64 = w.iter().sum();
    FaithfulState::new(w.iter().map(|x| x / total).collect()).unwrap()
}

/// A generator with invariant state `s`: jumps `√(c_ij p_i) E_ij` with
/// symmetric rates `c`, diagonal dephasing, and a diagonal field.
pub fn davies_generator(s: &FaithfulState, rates: &[f64], dephasing: &[f64], field: &[f64]) -> LindbladGenerator {
    let n = s.dim();
    let p = s.spectrum();
    let mut jumps = Vec::new();
    let mut r = rates.iter().cycle();
    for i in 0..n {
        for j in i + 1..n {
            let c = *r.next().unwrap();
            jumps.push(ComplexMatrix::unit(n, i, j).scale(re((c * p[i]).sqrt())));
            jumps.push(ComplexMatrix::unit(n, j, i).scale(re((c * p[j]).sqrt())));
        }
    }
    let d: Vec<f64> = (0..n).map(|i| dephasing[i % dephasing.len()]).collect();
    jumps.push(ComplexMatrix::real_diag(&d));
    let h: Vec<f64> = (0..n).map(|i| field[i % field.len()]).collect();
    LindbladGenerator::new(jumps, ComplexMatrix::real_diag(&h), DEFAULT_TOL).unwrap()
}

pub fn matrix_from(n: usize, m: usize, values: &[(f64, f64)]) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, m, |i, j| {
        let (a, b) = values[(i * m + j) % values.len()];
        C64::new(a, b)
    })
}

/// Parameters of one side of a cycle scenario on `r = (3, 4)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dynamics {
    pub name: &'static str,
    pub rates: Vec<f64>,
    pub field: Vec<f64>,
}

pub fn zero_field() -> Vec<f64> {
    vec![0.0; 7]
}

/// `g − h` constant on each cycle but different between cycles.
pub fn cycle_constant_field() -> Vec<f64> {
    vec![0.2, 0.2, 0.2, 0.7, 0.7, 0.7, 0.7]
}

/// `g − h` varies inside each cycle.
pub fn ramp_field() -> Vec<f64> {
    (0..7).map(|q| 0.15 * q as f64).collect()
}

pub fn dynamics_set() -> Vec<Dynamics> {
    vec![
        Dynamics { name: "base", rates: vec![0.3, 0.6], field: zero_field() },
        Dynamics { name: "rate1", rates: vec![0.3, 0.5], field: zero_field() },
        Dynamics { name: "rate0", rates: vec![0.4, 0.6], field: zero_field() },
        Dynamics { name: "shift", rates: vec![0.3, 0.6], field: cycle_constant_field() },
        Dynamics { name: "ramp", rates: vec![0.3, 0.6], field: ramp_field() },
    ]
}

/// `(A, B)` pairs for the balance grid; every pair has `base` on one side.
pub fn dynamics_pairs() -> Vec<(Dynamics, Dynamics)> {
    let set = dynamics_set();
    let base = set[0].clone();
    let mut out = vec![(base.clone(), base.clone())];
    for d in &set[1..] {
        out.push((base.clone(), d.clone()));
    }
    out.push((set[3].clone(), base.clone()));
    out
}

/// Partitions and block types on two cycles: each cycle its own block (9
/// combinations) or one joint block (3 types).
pub fn block_layouts() -> Vec<(Vec<Vec<usize>>, Vec<BlockType>)> {
    use BlockType::*;
    let all = [Entangled, Mixed, Product];
    let mut out = Vec::new();
    for a in all {
        for b in all {
            out.push((vec![vec![0], vec![1]], vec![a, b]));
        }
    }
    for a in all {
        out.push((vec![vec![0, 1]], vec![a]));
    }
    out
}

pub fn spec_for(layout: &(Vec<Vec<usize>>, Vec<BlockType>), a: &Dynamics, b: &Dynamics) -> ScenarioSpec {
    ScenarioSpec {
        cycles: vec![3, 4],
        block_probs: vec![0.4, 0.6],
        partition: layout.0.clone(),
        types: layout.1.clone(),
        k: a.rates.clone(),
        l: b.rates.clone(),
        g: a.field.clone(),
        h: b.field.clone(),
    }
}

/// The full balance grid.
pub fn grid() -> Vec<ScenarioSpec> {
    let mut out = Vec::new();
    for (a, b) in dynamics_pairs() {
        for layout in block_layouts() {
            out.push(spec_for(&layout, &a, &b));
        }
    }
    out
}

pub fn scenario_state() -> FaithfulState {
    state_from_weights(&[0.4 / 3.0, 0.4 / 3.0, 0.4 / 3.0, 0.15, 0.15, 0.15, 0.15])
}

pub fn scenario_generator(d: &Dynamics) -> LindbladGenerator {
    cycle_generator(&[3, 4], &d.rates, &d.field, DEFAULT_TOL).unwrap()
}
