// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use balance_lab::balance::{
    check_theta_sqdb, convergence_probe, disjointness_probe, dual_order_check, is_balanced, kms_symmetry_residual,
};
use balance_lab::lindblad::{scenario_build, scenario_predict, ScenarioSpec};
use balance_lab::matrix::{frob_distance, ComplexMatrix};
use balance_lab::{Coupling, Dynamics, FaithfulState, LindbladGenerator, ReversingOperation, System};

use crate::formats::{
    ingest_channel, ingest_coupling, ingest_coupling_raw, ingest_dynamics, ingest_state, ingest_system, raw_channel,
    Canonical, ChannelJson, CouplingJson, MatrixJson, StateJson, SystemJson,
};
use crate::report::{to_json, RunReport};
use crate::{BalanceArgs, Cli, CliError, Command, ScenarioCommand, EXIT_INVALID, EXIT_MISMATCH, EXIT_OK};

type Outcome = Result<(RunReport, u8), CliError>;

pub fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx { tol: cli.tol, seed: cli.seed, jobs: cli.jobs.max(1) };
    if !(ctx.tol > 0.0 && ctx.tol.is_finite()) {
        return Err(CliError::Input(format!("tolerance must be positive, got {}", ctx.tol)));
    }
    match &cli.command {
        Command::Validate { file, state } => ctx.validate(file, state.as_deref()),
        Command::ExtractChannel { coupling, out } => ctx.extract_channel(coupling, out),
        Command::CouplingFromChannel { channel, state_a, state_b, out } => {
            ctx.coupling_from_channel(channel, state_a, state_b, out)
        }
        Command::CheckBalance(args) => ctx.check_balance(args),
        Command::Compose { omega, psi, out } => ctx.compose(omega, psi, out.as_deref()),
        Command::CheckOrthogonal { omega, psi } => ctx.check_orthogonal(omega, psi),
        Command::Sqdb { system, theta_unitary } => ctx.sqdb(system, theta_unitary.as_deref()),
        Command::Ergodic { system } => ctx.ergodic(system),
        Command::Convergence { balance, times } => ctx.convergence(balance, times),
        Command::Scenario(ScenarioCommand::Run { spec, write_dir }) => ctx.scenario_run(spec, write_dir.as_deref()),
        Command::Scenario(ScenarioCommand::Grid { specs }) => ctx.scenario_grid(specs),
    }
}

struct Ctx {
    tol: f64,
    seed: u64,
    jobs: usize,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse<T: DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Read and parse `path`, recording its digest under `role`.
fn load<T: DeserializeOwned>(report: &mut RunReport, role: &str, path: &Path) -> Result<T, CliError> {
    let bytes = read_bytes(path)?;
    report.input(role, &bytes);
    parse(path, &bytes)
}

fn write_file(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    std::fs::write(path, to_json(value)).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Record the rotation applied to a supplied density matrix.
fn note_frame(report: &mut RunReport, role: &str, c: &Canonical) {
    if let Some(u) = &c.unitary {
        report.witness(&format!("{role}_unitary"), u);
    }
}

fn generator_json(g: &LindbladGenerator) -> ChannelJson {
    ChannelJson {
        dim_in: None,
        dim_out: None,
        superoperator: None,
        kraus: Some(g.jumps().iter().map(MatrixJson::from).collect()),
        hamiltonian: Some(g.hamiltonian().into()),
        generator: false,
    }
}

fn system_json(s: &System) -> SystemJson {
    let dynamics = match s.dynamics() {
        Dynamics::Channel(c) => c.into(),
        Dynamics::Generator(g) => generator_json(g),
    };
    SystemJson { state: s.state().into(), dynamics }
}

impl Ctx {
    fn report(&self, command: &str) -> RunReport {
        RunReport::new(command, self.tol, self.seed)
    }

    fn validate(&self, file: &Path, state: Option<&Path>) -> Outcome {
        let mut report = self.report("validate");
        let value: Value = load(&mut report, "file", file)?;
        let has = |k: &str| value.get(k).is_some();
        let kind = if has("kappa") {
            "coupling"
        } else if has("dynamics") {
            "system"
        } else if has("spectrum") || has("density") {
            "state"
        } else if has("hamiltonian") || value.get("generator") == Some(&Value::Bool(true)) {
            "generator"
        } else if has("superoperator") || has("kraus") {
            "channel"
        } else {
            return Err(CliError::Input(format!("{}: not a state, channel, system or coupling", file.display())));
        };
        report.detail("kind", kind);
        let state = match state {
            Some(path) => {
                let s: StateJson = load(&mut report, "state", path)?;
                let c = ingest_state(&s, self.tol)?;
                note_frame(&mut report, "state", &c);
                Some(c)
            }
            None => None,
        };
        let valid = match kind {
            "state" => self.validate_state(&mut report, parse(file, &serde_json::to_vec(&value).unwrap())?)?,
            "coupling" => {
                let c: CouplingJson = serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
                let raw = ingest_coupling_raw(&c, self.tol)?;
                note_frame(&mut report, "state_a", &raw.a);
                note_frame(&mut report, "state_b", &raw.b);
                let check = Coupling::check(&raw.kappa, &raw.a.state, &raw.b.state, self.tol)?;
                report
                    .verdict("psd", check.psd)
                    .verdict("valid", check.is_valid())
                    .residual("min_eigenvalue", check.min_eigenvalue)
                    .residual("trace_defect", check.trace_defect)
                    .residual("marginal_a_distance", check.marginal_a_distance)
                    .residual("marginal_b_distance", check.marginal_b_distance);
                check.is_valid()
            }
            "system" => {
                let s: SystemJson = serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
                let (sys, frame) = ingest_system(&s, self.tol)?;
                note_frame(&mut report, "state", &frame);
                report.verdict("generator", sys.is_generator()).verdict("valid", true);
                true
            }
            _ => {
                let c: ChannelJson = serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
                self.validate_dynamics(&mut report, &c, state.as_ref())?
            }
        };
        Ok((report, if valid { EXIT_OK } else { EXIT_INVALID }))
    }

    fn validate_state(&self, report: &mut RunReport, s: StateJson) -> Result<bool, CliError> {
        let spectrum = match (&s.spectrum, &s.density) {
            (Some(p), None) => p.clone(),
            (None, Some(m)) => {
                let rho = m.to_matrix()?;
                if !rho.is_square() {
                    return Err(CliError::Input(format!("density matrix is {}x{}", rho.rows(), rho.cols())));
                }
                let herm = rho.is_hermitian(self.tol);
                report.verdict("hermitian", herm);
                if !herm {
                    return Ok(false);
                }
                balance_lab::matrix::hermitian_eigenvalues(&rho)?
            }
            _ => return Err(CliError::Input("a state needs exactly one of \"spectrum\" or \"density\"".to_string())),
        };
        if s.dim.is_some_and(|d| d != spectrum.len()) {
            return Err(CliError::Input("state dim disagrees with its entries".to_string()));
        }
        let total: f64 = spectrum.iter().sum();
        let min = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
        let normalized = (total - 1.0).abs() <= self.tol;
        let faithful = min > 0.0;
        report
            .verdict("normalized", normalized)
            .verdict("faithful", faithful)
            .verdict("valid", normalized && faithful)
            .residual("trace_defect", (total - 1.0).abs())
            .residual("min_eigenvalue", min);
        Ok(normalized && faithful)
    }

    fn validate_dynamics(&self, report: &mut RunReport, c: &ChannelJson, state: Option<&Canonical>) -> Result<bool, CliError> {
        if c.hamiltonian.is_some() || c.generator {
            let frame = match state {
                Some(s) => s.clone(),
                None => Canonical { state: FaithfulState::tracial(generator_dim(c)?), unitary: None },
            };
            let Dynamics::Generator(g) = ingest_dynamics(c, &frame, self.tol)? else {
                unreachable!("generator input yields a generator")
            };
            report.verdict("lindblad_form", true);
            let mut valid = true;
            if state.is_some() {
                let r = g.invariance_residual(&frame.state)?;
                let ok = r <= self.tol;
                report.verdict("preserves_state", ok).residual("invariance", r);
                valid &= ok;
            }
            report.verdict("valid", valid);
            return Ok(valid);
        }
        let channel = match state {
            Some(s) => ingest_channel(c, s, s)?,
            None => raw_channel(c)?,
        };
        let u = channel.validate_ucp(self.tol, self.seed);
        report
            .verdict("cp", u.cp)
            .verdict("unital", u.unital)
            .verdict("schwarz_witness", u.schwarz_witness)
            .verdict("ucp", u.is_ucp())
            .residual("min_choi_eigenvalue", u.min_choi_eigenvalue)
            .residual("unital_residual", u.unital_residual)
            .residual("schwarz_min_eigenvalue", u.schwarz_min_eigenvalue);
        let mut valid = u.is_ucp();
        if let Some(s) = state {
            let r = channel.state_preservation_residual(&s.state, &s.state)?;
            report.verdict("preserves_state", r <= self.tol).residual("state_preservation", r);
            valid &= r <= self.tol;
        }
        report.verdict("valid", valid);
        Ok(valid)
    }

    fn extract_channel(&self, coupling: &Path, out: &Path) -> Outcome {
        let mut report = self.report("extract-channel");
        let json: CouplingJson = load(&mut report, "coupling", coupling)?;
        let (w, a, b) = ingest_coupling(&json, self.tol)?;
        note_frame(&mut report, "state_a", &a);
        note_frame(&mut report, "state_b", &b);
        let e = w.extract_channel();
        let u = e.validate_ucp(self.tol, self.seed);
        let r = e.state_preservation_residual(w.state_a(), w.state_b())?;
        report.verdict("ucp", u.is_ucp()).residual("state_preservation", r);
        write_file(out, &ChannelJson::from(&e))?;
        Ok((report, EXIT_OK))
    }

    fn coupling_from_channel(&self, channel: &Path, state_a: &Path, state_b: &Path, out: &Path) -> Outcome {
        let mut report = self.report("coupling-from-channel");
        let c: ChannelJson = load(&mut report, "channel", channel)?;
        let sa: StateJson = load(&mut report, "state_a", state_a)?;
        let sb: StateJson = load(&mut report, "state_b", state_b)?;
        let a = ingest_state(&sa, self.tol)?;
        let b = ingest_state(&sb, self.tol)?;
        note_frame(&mut report, "state_a", &a);
        note_frame(&mut report, "state_b", &b);
        let e = ingest_channel(&c, &a, &b)?;
        let w = Coupling::from_channel(&e, &a.state, &b.state, self.tol)?;
        let check = Coupling::check(w.kappa(), w.state_a(), w.state_b(), self.tol)?;
        report
            .verdict("valid", check.is_valid())
            .residual("min_eigenvalue", check.min_eigenvalue)
            .residual("marginal_a_distance", check.marginal_a_distance)
            .residual("marginal_b_distance", check.marginal_b_distance);
        write_file(out, &CouplingJson::from(&w))?;
        Ok((report, EXIT_OK))
    }

    fn load_system(&self, report: &mut RunReport, role: &str, path: &Path) -> Result<System, CliError> {
        let s: SystemJson = load(report, role, path)?;
        let (sys, frame) = ingest_system(&s, self.tol)?;
        note_frame(report, role, &frame);
        Ok(sys)
    }

    fn load_coupling(&self, report: &mut RunReport, role: &str, path: &Path) -> Result<Coupling, CliError> {
        let json: CouplingJson = load(report, role, path)?;
        let (w, a, b) = ingest_coupling(&json, self.tol)?;
        note_frame(report, &format!("{role}_a"), &a);
        note_frame(report, &format!("{role}_b"), &b);
        Ok(w)
    }

    fn check_balance(&self, args: &BalanceArgs) -> Outcome {
        let mut report = self.report("check-balance");
        let a = self.load_system(&mut report, "a", &args.a)?;
        let b = self.load_system(&mut report, "b", &args.b)?;
        let w = self.load_coupling(&mut report, "coupling", &args.coupling)?;
        let r = is_balanced(&a, &b, &w, self.tol)?;
        let order = dual_order_check(&a, &b, &w, self.tol)?;
        report
            .verdict("balanced", r.balanced)
            .verdict("method_agreement", r.method_agreement)
            .verdict("dual_balanced", order.dual)
            .verdict("kms_dual_balanced", order.kms)
            .residual("residual", r.residual)
            .residual("definition_residual", r.definition_residual);
        let mut consistent = r.method_agreement && order.consistent;
        if let Some(s) = &r.sampled {
            report.verdict("sampled_consistent", s.consistent);
            for (t, res) in s.times.iter().zip(&s.residuals) {
                report.residual(&format!("sampled_t={t}"), *res);
            }
            consistent &= s.consistent;
        }
        Ok((report, if consistent { EXIT_OK } else { EXIT_MISMATCH }))
    }

    fn compose(&self, omega: &Path, psi: &Path, out: Option<&Path>) -> Outcome {
        let mut report = self.report("compose");
        let w1 = self.load_coupling(&mut report, "omega", omega)?;
        let w2 = self.load_coupling(&mut report, "psi", psi)?;
        let w = w1.compose(&w2, self.tol)?;
        let product = Coupling::product(w.state_a(), w.state_b());
        let d = frob_distance(w.kappa(), product.kappa())?;
        report.verdict("product", w.is_trivial(self.tol)).residual("distance_to_product", d);
        match out {
            Some(path) => write_file(path, &CouplingJson::from(&w))?,
            None => {
                report.witness("kappa", w.kappa());
            }
        }
        Ok((report, EXIT_OK))
    }

    fn check_orthogonal(&self, omega: &Path, psi: &Path) -> Outcome {
        let mut report = self.report("check-orthogonal");
        let w1 = self.load_coupling(&mut report, "omega", omega)?;
        let w2 = self.load_coupling(&mut report, "psi", psi)?;
        let r = w1.is_orthogonal(&w2, self.tol)?;
        report
            .verdict("orthogonal", r.orthogonal)
            .verdict("hilbert_criterion", r.hilbert_criterion)
            .verdict("agree", r.agree)
            .residual("residual", r.residual)
            .residual("hilbert_residual", r.hilbert_residual);
        Ok((report, if r.agree { EXIT_OK } else { EXIT_MISMATCH }))
    }

    fn sqdb(&self, system: &Path, theta_unitary: Option<&Path>) -> Outcome {
        let mut report = self.report("sqdb");
        let s: SystemJson = load(&mut report, "system", system)?;
        let (sys, frame) = ingest_system(&s, self.tol)?;
        note_frame(&mut report, "system", &frame);
        let supplied = match theta_unitary {
            Some(p) => Some(load::<MatrixJson>(&mut report, "theta_unitary", p)?.to_matrix()?),
            None => None,
        };
        let theta = reversal_in_frame(supplied, &frame, self.tol)?;
        let r = check_theta_sqdb(&sys, &theta, self.tol)?;
        let kms = kms_symmetry_residual(&sys, self.tol)?;
        report
            .verdict("sqdb", r.sqdb)
            .verdict("via_balance", r.via_balance)
            .verdict("agree", r.agree)
            .verdict("kms_symmetric", kms <= self.tol)
            .residual("residual", r.residual)
            .residual("balance_residual", r.balance_residual)
            .residual("kms_symmetry_residual", kms);
        Ok((report, if r.agree { EXIT_OK } else { EXIT_MISMATCH }))
    }

    fn ergodic(&self, system: &Path) -> Outcome {
        let mut report = self.report("ergodic");
        let sys = self.load_system(&mut report, "system", system)?;
        let r = disjointness_probe(&sys, self.tol)?;
        report.verdict("ergodic", r.ergodic).detail("fixed_dim", r.fixed_dim);
        if let Some(w) = &r.witness {
            report
                .verdict("witness_balanced", w.balanced)
                .verdict("witness_nontrivial", w.nontrivial)
                .residual("algebra_residual", w.algebra_residual)
                .residual("balance_residual", w.balance_residual)
                .residual("nontriviality", w.nontriviality);
            for (k, f) in w.basis.iter().enumerate() {
                report.witness(&format!("fixed_{k:02}"), f);
            }
        }
        Ok((report, EXIT_OK))
    }

    fn convergence(&self, args: &BalanceArgs, times: &[f64]) -> Outcome {
        let mut report = self.report("convergence");
        let a = self.load_system(&mut report, "a", &args.a)?;
        let b = self.load_system(&mut report, "b", &args.b)?;
        let w = self.load_coupling(&mut report, "coupling", &args.coupling)?;
        let r = convergence_probe(&a, &b, &w, times, self.tol)?;
        report
            .verdict("balanced", r.balanced)
            .verdict("certified", r.certified)
            .verdict("vacuous", r.vacuous)
            .detail("deviations", r.deviations.iter().map(|(t, d)| [*t, *d]).collect::<Vec<_>>())
            .detail("note", &r.note);
        if let Some(c) = r.converged {
            report.verdict("converged", c);
        }
        if let Some(g) = r.gap {
            report.residual("gap", g);
        }
        Ok((report, EXIT_OK))
    }

    fn scenario_run(&self, spec: &Path, write_dir: Option<&Path>) -> Outcome {
        let mut report = self.report("scenario run");
        let spec: ScenarioSpec = load(&mut report, "spec", spec)?;
        let row = scenario_row(&spec, self.tol)?;
        if let Some(dir) = write_dir {
            let sc = scenario_build(&spec, self.tol)?;
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
            write_file(&dir.join("coupling.json"), &CouplingJson::from(&sc.coupling))?;
            write_file(&dir.join("system_a.json"), &system_json(&sc.system_a))?;
            write_file(&dir.join("system_b.json"), &system_json(&sc.system_b))?;
        }
        for (k, v) in row.verdicts() {
            report.verdict(k, v);
        }
        for (k, v) in row.residuals() {
            report.residual(k, v);
        }
        let code = if row.consistent() { EXIT_OK } else { EXIT_MISMATCH };
        Ok((report, code))
    }

    fn scenario_grid(&self, specs: &Path) -> Outcome {
        use rayon::prelude::*;
        let mut report = self.report("scenario grid");
        let specs: Vec<ScenarioSpec> = load(&mut report, "specs", specs)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| CliError::Input(format!("cannot start {} workers: {e}", self.jobs)))?;
        let rows: Vec<Result<ScenarioRow, CliError>> =
            pool.install(|| specs.par_iter().map(|s| scenario_row(s, self.tol)).collect());
        let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
        let mismatches = rows.iter().filter(|r| !r.consistent()).count();
        let max_balanced = rows.iter().filter(|r| r.balanced).map(|r| r.residual).fold(0.0, f64::max);
        let min_unbalanced = rows.iter().filter(|r| !r.balanced).map(|r| r.residual).fold(f64::INFINITY, f64::min);
        let table: Vec<Value> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                json!({
                    "index": i,
                    "verdicts": r.verdicts().into_iter().collect::<std::collections::BTreeMap<_, _>>(),
                    "residuals": r.residuals().into_iter().collect::<std::collections::BTreeMap<_, _>>(),
                })
            })
            .collect();
        report
            .verdict("all_consistent", mismatches == 0)
            .detail("count", rows.len())
            .detail("mismatches", mismatches)
            .detail("rows", table)
            .residual("max_balanced_residual", max_balanced);
        if min_unbalanced.is_finite() {
            report.residual("min_unbalanced_residual", min_unbalanced);
        }
        Ok((report, if mismatches == 0 { EXIT_OK } else { EXIT_MISMATCH }))
    }
}

/// Generator dimension from its operators.
fn generator_dim(c: &ChannelJson) -> Result<usize, CliError> {
    if let Some(h) = &c.hamiltonian {
        return Ok(h.rows);
    }
    if let Some(v) = c.kraus.as_ref().and_then(|k| k.first()) {
        return Ok(v.rows);
    }
    if let Some(s) = &c.superoperator {
        let n = (s.rows as f64).sqrt().round() as usize;
        if n * n == s.rows {
            return Ok(n);
        }
    }
    Err(CliError::Input("cannot infer the generator dimension".to_string()))
}

/// The reversal `a ↦ U aᵀ U*` of the supplied frame, expressed in the
/// canonical frame `a' = V* a V`: `U' = V* U conj(V)`.
fn reversal_in_frame(u: Option<ComplexMatrix>, frame: &Canonical, tol: f64) -> Result<ReversingOperation, CliError> {
    let n = frame.state.dim();
    let theta = match (u, &frame.unitary) {
        (None, None) => ReversingOperation::transpose(n),
        (u, v) => {
            let u = u.unwrap_or_else(|| ComplexMatrix::identity(n));
            let u = match v {
                Some(v) => v.adjoint().dot(&u).dot(&v.conj()),
                None => u,
            };
            ReversingOperation::with_unitary(u, tol)?
        }
    };
    Ok(theta)
}

struct ScenarioRow {
    predicted: bool,
    balanced: bool,
    method_agreement: bool,
    sampled_consistent: bool,
    split_consistent: bool,
    sqdb_b: bool,
    residual: f64,
    definition_residual: f64,
    dissipative: f64,
    commutator: f64,
}

impl ScenarioRow {
    fn consistent(&self) -> bool {
        self.predicted == self.balanced && self.method_agreement && self.sampled_consistent && self.split_consistent
    }

    fn verdicts(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("predicted", self.predicted),
            ("balanced", self.balanced),
            ("prediction_agrees", self.predicted == self.balanced),
            ("method_agreement", self.method_agreement),
            ("sampled_consistent", self.sampled_consistent),
            ("split_consistent", self.split_consistent),
            ("sqdb_b", self.sqdb_b),
        ]
    }

    fn residuals(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("residual", self.residual),
            ("definition_residual", self.definition_residual),
            ("dissipative", self.dissipative),
            ("commutator", self.commutator),
        ]
    }
}

fn scenario_row(spec: &ScenarioSpec, tol: f64) -> Result<ScenarioRow, CliError> {
    let sc = scenario_build(spec, tol)?;
    let r = is_balanced(&sc.system_a, &sc.system_b, &sc.coupling, tol)?;
    let split = spec.split_residuals()?;
    let split_balanced = split.dissipative <= tol && split.commutator <= tol;
    let sqdb = check_theta_sqdb(&sc.system_b, &ReversingOperation::transpose(spec.dim()), tol)?;
    Ok(ScenarioRow {
        predicted: scenario_predict(spec),
        balanced: r.balanced,
        method_agreement: r.method_agreement && sqdb.agree,
        sampled_consistent: r.sampled.as_ref().is_none_or(|s| s.consistent),
        split_consistent: split_balanced == r.balanced,
        sqdb_b: sqdb.sqdb,
        residual: r.residual,
        definition_residual: r.definition_residual,
        dissipative: split.dissipative,
        commutator: split.commutator,
    })
}
