//! Reference implementations and generators shared by the integration tests.
//! The guard evaluator and the interpreter work from the plain model data and
//! never call into the simulator.
#![allow(dead_code)]

pub mod activation_table;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statetest_core::model::{CompareOp, LogicOp, StateDef, Trigger, VariableDecl};
use statetest_core::{
    Expr, Scenario, StateRef, StatechartModel, Stimulus, TraceEntry, ValidatedModel, Value,
};

pub const SM_SOURCE: &str = "statechart Sm {
  var value1: int = 0
  var value2: int = 0
  var value3: bool = false
  initial -> State1
  state State1 { when [value1 == 13] -> State2 }
  state State2 { when [value2 == 54] -> State3 }
  state State3 { when [value3 == true] -> final }
}
";

pub fn sm_scenario() -> Scenario {
    Scenario {
        machine: "Sm".into(),
        expectations: vec!["State2".into(), "State3".into(), "__final__".into()],
        variables: vec!["value1".into(), "value2".into(), "value3".into()],
        inputs: vec![Value::Int(13), Value::Int(54), Value::Bool(true)],
    }
}

pub const INT_DOMAIN: [i64; 4] = [0, 1, 13, 54];
pub const VALUE_DOMAIN: [Value; 6] = [
    Value::Int(0),
    Value::Int(1),
    Value::Int(13),
    Value::Int(54),
    Value::Bool(true),
    Value::Bool(false),
];

// ---------------------------------------------------------------------------
// Guard evaluation

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Val {
    I(i64),
    B(bool),
}

/// Tree-walking evaluator. `None` means the expression is ill-typed or
/// mentions an unbound variable.
pub fn oracle_eval(expr: &Expr, env: &BTreeMap<String, Value>) -> Option<Val> {
    Some(match expr {
        Expr::Int(v) => Val::I(*v),
        Expr::Bool(b) => Val::B(*b),
        Expr::Var(name) => match env.get(name)? {
            Value::Int(v) => Val::I(*v),
            Value::Bool(b) => Val::B(*b),
        },
        Expr::Not(inner) => match oracle_eval(inner, env)? {
            Val::B(b) => Val::B(!b),
            Val::I(_) => return None,
        },
        Expr::Logic { op, lhs, rhs } => {
            let (Val::B(a), Val::B(b)) = (oracle_eval(lhs, env)?, oracle_eval(rhs, env)?) else {
                return None;
            };
            Val::B(match op {
                LogicOp::And => a && b,
                LogicOp::Or => a || b,
            })
        }
        Expr::Compare { op, lhs, rhs } => {
            let a = oracle_eval(lhs, env)?;
            let b = oracle_eval(rhs, env)?;
            let outcome = match (a, b) {
                (Val::I(x), Val::I(y)) => match op {
                    CompareOp::Eq => x == y,
                    CompareOp::Ne => x != y,
                    CompareOp::Lt => x < y,
                    CompareOp::Le => x <= y,
                    CompareOp::Gt => x > y,
                    CompareOp::Ge => x >= y,
                },
                (Val::B(x), Val::B(y)) => match op {
                    CompareOp::Eq => x == y,
                    CompareOp::Ne => x != y,
                    _ => return None,
                },
                _ => return None,
            };
            Val::B(outcome)
        }
    })
}

// ---------------------------------------------------------------------------
// Brute-force interpreter

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleStatus {
    Ready,
    Running,
    Finalized,
    Faulted,
}

/// Outcome of one stimulus: the error code, or the transitions taken as
/// (source, target designator, declaration index).
pub type OracleStep = Result<Vec<(String, String, usize)>, &'static str>;

/// (source, target, declaration index) of one taken transition.
pub type OracleHop = (String, String, usize);

#[derive(Clone, Debug)]
pub struct Interpreter {
    pub model: StatechartModel,
    pub limit: usize,
    pub active: String,
    pub env: BTreeMap<String, Value>,
    pub status: OracleStatus,
    /// (stimulus, taken, active afterwards) for every recorded reaction.
    pub trace: Vec<(Stimulus, Vec<OracleHop>, String)>,
}

impl Interpreter {
    pub fn new(model: &StatechartModel, limit: usize) -> Self {
        Interpreter {
            model: model.clone(),
            limit,
            active: String::new(),
            env: BTreeMap::new(),
            status: OracleStatus::Ready,
            trace: Vec::new(),
        }
    }

    pub fn apply(&mut self, stimulus: &Stimulus) -> OracleStep {
        match stimulus {
            Stimulus::Enter => {
                if self.status != OracleStatus::Ready {
                    return Err("E_ALREADY_ENTERED");
                }
                self.env = self
                    .model
                    .variables
                    .iter()
                    .map(|v| (v.name.clone(), v.default))
                    .collect();
                self.active = self.model.initial_target.clone().unwrap();
                self.status = OracleStatus::Running;
                self.react(stimulus, None)
            }
            Stimulus::SetVar { name, value } => {
                if self.status != OracleStatus::Running {
                    return Err("E_NOT_RUNNING");
                }
                let Some(decl) = self.model.variables.iter().find(|v| &v.name == name) else {
                    return Err("E_UNKNOWN_VAR");
                };
                let same_type = matches!(
                    (decl.default, value),
                    (Value::Int(_), Value::Int(_)) | (Value::Bool(_), Value::Bool(_))
                );
                if !same_type {
                    return Err("E_TYPE");
                }
                self.env.insert(name.clone(), *value);
                self.react(stimulus, None)
            }
            Stimulus::Raise { name } => {
                if self.status != OracleStatus::Running {
                    return Err("E_NOT_RUNNING");
                }
                if !self.model.events.iter().any(|e| &e.name == name) {
                    return Err("E_UNKNOWN_EVENT");
                }
                self.react(stimulus, Some(name.as_str()))
            }
        }
    }

    fn react(&mut self, stimulus: &Stimulus, event: Option<&str>) -> OracleStep {
        let mut taken = Vec::new();
        let mut pending_event = event;
        let mut faulted = false;
        while self.active != "__final__" {
            // Gather every transition leaving the active state, in
            // declaration order, from the flat list of all transitions.
            let mut candidates: Vec<_> = self
                .model
                .states
                .iter()
                .flat_map(|s| s.transitions.iter())
                .filter(|t| t.source == self.active)
                .collect();
            candidates.sort_by_key(|t| t.decl_index);
            let next = candidates.into_iter().find(|t| {
                let trigger_ok = match (&t.trigger, pending_event) {
                    (Trigger::None, None) => true,
                    (Trigger::Event(e), Some(raised)) => e == raised,
                    _ => false,
                };
                let guard_ok = match &t.guard {
                    None => true,
                    Some(g) => oracle_eval(g, &self.env) == Some(Val::B(true)),
                };
                trigger_ok && guard_ok
            });
            let Some(t) = next else { break };
            if taken.len() >= self.limit {
                faulted = true;
                break;
            }
            let target = t.target.designator().to_string();
            taken.push((t.source.clone(), target.clone(), t.decl_index));
            self.active = target;
            pending_event = None;
        }
        self.trace
            .push((stimulus.clone(), taken.clone(), self.active.clone()));
        if faulted {
            self.status = OracleStatus::Faulted;
            return Err("E_MICROSTEP_LIMIT");
        }
        if self.active == "__final__" {
            self.status = OracleStatus::Finalized;
        }
        Ok(taken)
    }
}

/// Flattens a simulator trace entry into the interpreter's shape.
pub fn flatten(entry: &TraceEntry) -> (Stimulus, Vec<(String, String, usize)>, String) {
    (
        entry.stimulus.clone(),
        entry
            .taken
            .iter()
            .map(|t| {
                (
                    t.source.clone(),
                    t.target.designator().to_string(),
                    t.decl_index,
                )
            })
            .collect(),
        entry.resulting_active.designator().to_string(),
    )
}

/// Every set/raise stimulus over the value domain, including ill-typed ones.
pub fn stimulus_alphabet(model: &StatechartModel) -> Vec<Stimulus> {
    let mut out = Vec::new();
    for var in &model.variables {
        for value in VALUE_DOMAIN {
            out.push(Stimulus::SetVar {
                name: var.name.clone(),
                value,
            });
        }
    }
    for event in &model.events {
        out.push(Stimulus::Raise {
            name: event.name.clone(),
        });
    }
    out
}

// ---------------------------------------------------------------------------
// Random models

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_literal(rng: &mut impl Rng, int: bool) -> Expr {
    if int {
        Expr::Int(*INT_DOMAIN.choose(rng).unwrap())
    } else {
        Expr::Bool(rng.gen())
    }
}

fn random_comparison(rng: &mut impl Rng, vars: &[VariableDecl]) -> Expr {
    let Some(var) = vars.choose(rng) else {
        return Expr::Bool(rng.gen_bool(0.7));
    };
    let int = matches!(var.default, Value::Int(_));
    let op = if int {
        *CompareOp::ALL.choose(rng).unwrap()
    } else if rng.gen() {
        CompareOp::Eq
    } else {
        CompareOp::Ne
    };
    let mut lhs = Expr::var(&var.name);
    let mut rhs = random_literal(rng, int);
    if rng.gen_bool(0.2) {
        std::mem::swap(&mut lhs, &mut rhs);
    }
    Expr::compare(op, lhs, rhs)
}

fn random_guard(rng: &mut impl Rng, vars: &[VariableDecl], depth: u32) -> Expr {
    match rng.gen_range(0..10) {
        0 if depth > 0 => Expr::negate(random_guard(rng, vars, depth - 1)),
        1 if depth > 0 => Expr::logic(
            LogicOp::And,
            random_guard(rng, vars, depth - 1),
            random_guard(rng, vars, depth - 1),
        ),
        2 if depth > 0 => Expr::logic(
            LogicOp::Or,
            random_guard(rng, vars, depth - 1),
            random_guard(rng, vars, depth - 1),
        ),
        3 => Expr::Bool(rng.gen_bool(0.8)),
        _ => random_comparison(rng, vars),
    }
}

/// A valid model with at most 4 states, 3 variables, 2 events and 6
/// transitions; literals come from the shared value domain.
pub fn random_model(rng: &mut impl Rng) -> StatechartModel {
    let mut model = StatechartModel::new(["Sm", "Door", "m", "Pump"][rng.gen_range(0..4)]);
    for i in 0..rng.gen_range(0..=3) {
        let default = if rng.gen() {
            Value::Int(*INT_DOMAIN.choose(rng).unwrap())
        } else {
            Value::Bool(rng.gen())
        };
        model
            .variables
            .push(VariableDecl::new(format!("v{i}"), default));
    }
    let event_names: Vec<String> = (0..rng.gen_range(0..=2)).map(|i| format!("e{i}")).collect();
    for name in &event_names {
        model.events.push(statetest_core::model::EventDecl {
            name: name.clone(),
            loc: Default::default(),
        });
    }
    let state_count = rng.gen_range(1..=4);
    let names: Vec<String> = (0..state_count).map(|i| format!("S{i}")).collect();
    model.states = names.iter().map(StateDef::new).collect();
    model.initial_target = Some(names.choose(rng).unwrap().clone());

    for _ in 0..rng.gen_range(0..=6) {
        let source = rng.gen_range(0..state_count);
        let target = if rng.gen_bool(0.15) {
            StateRef::Final
        } else {
            StateRef::state(names.choose(rng).unwrap())
        };
        let trigger = if !event_names.is_empty() && rng.gen_bool(0.3) {
            Trigger::Event(event_names.choose(rng).unwrap().clone())
        } else {
            Trigger::None
        };
        let guard = if rng.gen_bool(0.8) {
            Some(random_guard(rng, &model.variables, 2))
        } else {
            None
        };
        model.states[source].push(target, trigger, guard);
    }
    model
}

pub fn random_valid_model(rng: &mut impl Rng) -> ValidatedModel {
    let model = random_model(rng);
    model
        .clone()
        .validate()
        .unwrap_or_else(|d| panic!("generator produced an invalid model {model:?}: {d:?}"))
}

/// A scenario for `model` whose expectations are a mix of random states
/// (often wrong) and whatever state the walk is likely in.
pub fn random_scenario(rng: &mut impl Rng, model: &ValidatedModel) -> Scenario {
    let mut designators: Vec<String> = model.states.iter().map(|s| s.name.clone()).collect();
    designators.push("__final__".into());
    let len = if model.variables.is_empty() {
        0
    } else {
        rng.gen_range(0..=5)
    };
    let mut scenario = Scenario {
        machine: model.name.clone(),
        expectations: Vec::new(),
        variables: Vec::new(),
        inputs: Vec::new(),
    };
    for _ in 0..len {
        let var = model.variables.choose(rng).unwrap();
        let value = match var.default {
            Value::Int(_) => Value::Int(*INT_DOMAIN.choose(rng).unwrap()),
            Value::Bool(_) => Value::Bool(rng.gen()),
        };
        scenario.variables.push(var.name.clone());
        scenario.inputs.push(value);
        scenario
            .expectations
            .push(designators.choose(rng).unwrap().clone());
    }
    scenario
}

// ---------------------------------------------------------------------------
// Differential checks

use statetest_core::{Session, Status};

fn same_status(sim: Status, oracle: &OracleStatus) -> bool {
    matches!(
        (sim, oracle),
        (Status::Ready, OracleStatus::Ready)
            | (Status::Running, OracleStatus::Running)
            | (Status::Finalized, OracleStatus::Finalized)
            | (Status::Faulted(_), OracleStatus::Faulted)
    )
}

/// Compares the state of both machines. Trace entries before `from` were
/// already compared at an ancestor node of the search.
fn compare(
    session: &Session,
    oracle: &Interpreter,
    path: &[Stimulus],
    from: usize,
) -> Result<(), String> {
    let sim_trace = session.trace();
    if sim_trace.len() != oracle.trace.len() {
        return Err(format!(
            "trace lengths differ after {path:?}: {} vs {}",
            sim_trace.len(),
            oracle.trace.len()
        ));
    }
    for (sim, expected) in sim_trace[from..].iter().zip(&oracle.trace[from..]) {
        let flat = flatten(sim);
        if &flat != expected {
            return Err(format!(
                "traces differ after {path:?}\n simulator: {flat:?}\n oracle:    {expected:?}"
            ));
        }
    }
    if !same_status(session.status(), &oracle.status) {
        return Err(format!(
            "status differs after {path:?}: {:?} vs {:?}",
            session.status(),
            oracle.status
        ));
    }
    if session.status() != Status::Ready {
        if session.active().designator() != oracle.active {
            return Err(format!("active state differs after {path:?}"));
        }
        let same_env = session.env().len() == oracle.env.len()
            && session
                .env()
                .iter()
                .all(|(k, v)| oracle.env.get(k) == Some(v));
        if !same_env {
            return Err(format!("variables differ after {path:?}"));
        }
    }
    Ok(())
}

/// Runs every sequence `enter, s1, .., sk` with `k <= depth` over the
/// stimulus alphabet through both the simulator and the interpreter.
/// Returns the number of sequences compared.
pub fn compare_with_oracle(
    model: &ValidatedModel,
    depth: usize,
    limit: usize,
) -> Result<usize, String> {
    let alphabet = stimulus_alphabet(model);
    let limit_nz = std::num::NonZeroUsize::new(limit).unwrap();
    let mut session = Session::with_limit(model.clone(), limit_nz);
    let mut oracle = Interpreter::new(model, limit);
    let sim = session.enter().map(|_| ()).map_err(|e| e.code().as_str());
    let expected = oracle.apply(&Stimulus::Enter).map(|_| ());
    if sim != expected {
        return Err(format!("enter: {sim:?} vs {expected:?}"));
    }
    let mut path = vec![Stimulus::Enter];
    compare(&session, &oracle, &path, 0)?;
    let mut count = 1;
    explore(&alphabet, depth, session, oracle, &mut path, &mut count)?;
    Ok(count)
}

fn explore(
    alphabet: &[Stimulus],
    remaining: usize,
    session: Session,
    oracle: Interpreter,
    path: &mut Vec<Stimulus>,
    count: &mut usize,
) -> Result<(), String> {
    if remaining == 0 {
        return Ok(());
    }
    if session.status() != Status::Running && oracle.status != OracleStatus::Running {
        // Every stimulus is rejected from here on, so both machines can be
        // driven in place; any change of state still shows up in `compare`.
        let (mut s, mut o) = (session, oracle);
        return explore_in_place(alphabet, remaining, &mut s, &mut o, path, count);
    }
    for stimulus in alphabet {
        let mut s = session.clone();
        let mut o = oracle.clone();
        path.push(stimulus.clone());
        step(stimulus, &mut s, &mut o, path)?;
        *count += 1;
        explore(alphabet, remaining - 1, s, o, path, count)?;
        path.pop();
    }
    Ok(())
}

fn explore_in_place(
    alphabet: &[Stimulus],
    remaining: usize,
    s: &mut Session,
    o: &mut Interpreter,
    path: &mut Vec<Stimulus>,
    count: &mut usize,
) -> Result<(), String> {
    if remaining == 0 {
        return Ok(());
    }
    for stimulus in alphabet {
        path.push(stimulus.clone());
        step(stimulus, s, o, path)?;
        *count += 1;
        explore_in_place(alphabet, remaining - 1, s, o, path, count)?;
        path.pop();
    }
    Ok(())
}

fn step(
    stimulus: &Stimulus,
    s: &mut Session,
    o: &mut Interpreter,
    path: &[Stimulus],
) -> Result<(), String> {
    let before = s.trace().len();
    let sim = s.apply(stimulus).map(|_| ()).map_err(|e| e.code().as_str());
    let expected = o.apply(stimulus).map(|_| ());
    if sim != expected {
        return Err(format!("{path:?}: simulator {sim:?}, oracle {expected:?}"));
    }
    compare(s, o, path, before)
}

// ---------------------------------------------------------------------------
// C toolchain

use std::path::Path;
use std::process::Command;

/// The C compiler to use, or `None` when C checks should be skipped.
/// `STATETEST_C_GATE=off` skips them, `require` fails when no compiler is
/// found, and the default runs them only if `$CC` (or `cc`) works.
pub fn c_compiler() -> Option<String> {
    let gate = std::env::var("STATETEST_C_GATE").unwrap_or_else(|_| "auto".into());
    if gate == "off" {
        return None;
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let works = Command::new(&cc)
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success());
    match (works, gate.as_str()) {
        (true, _) => Some(cc),
        (false, "require") => panic!("STATETEST_C_GATE=require but `{cc}` is not usable"),
        (false, _) => None,
    }
}

pub const C_FLAGS: [&str; 6] = [
    "-std=c99",
    "-Wall",
    "-Wextra",
    "-pedantic",
    "-Werror",
    "-O0",
];

/// Compiles `sources` (relative to `dir`) into `dir/<exe>` with warnings as
/// errors. Returns the compiler output on failure.
pub fn compile_c(
    cc: &str,
    dir: &Path,
    sources: &[&str],
    extra: &[&str],
    exe: &str,
) -> Result<std::path::PathBuf, String> {
    let out = dir.join(exe);
    let output = Command::new(cc)
        .current_dir(dir)
        .args(C_FLAGS)
        .args(["-I", ".", "-I", "src-gen"])
        .args(sources)
        .args(extra)
        .arg("-o")
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    if output.status.success() {
        Ok(out)
    } else {
        Err(String::from_utf8_lossy(&output.stderr).into_owned())
    }
}
