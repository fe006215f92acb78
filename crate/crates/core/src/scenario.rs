//! Scenarios: the (expectations, variables, inputs) triple, binding against a
//! model, and execution on the simulator.
//!
//! `expectations[i]` is the state expected to be active after assigning
//! `inputs[i]` to `variables[i]`. The initial-state check is derived from the
//! model, so a scenario of length n performs n + 1 checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diag::{DiagCode, Diagnostic};
use crate::model::{StateRef, ValidatedModel, Value};
use crate::sim::{Session, SimError, Status};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub machine: String,
    pub expectations: Vec<String>,
    pub variables: Vec<String>,
    pub inputs: Vec<Value>,
}

impl Scenario {
    pub fn len(&self) -> usize {
        self.expectations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expectations.is_empty()
    }

    /// Pretty JSON in the `.scenario.json` layout, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario serializes");
        text.push('\n');
        text
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundStep {
    pub variable: String,
    pub input: Value,
    pub expected: StateRef,
}

/// A scenario whose names all resolve against `model`.
#[derive(Clone, Debug)]
pub struct BoundScenario {
    model: ValidatedModel,
    steps: Vec<BoundStep>,
}

impl BoundScenario {
    pub fn model(&self) -> &ValidatedModel {
        &self.model
    }

    pub fn steps(&self) -> &[BoundStep] {
        &self.steps
    }

    pub fn initial_expectation(&self) -> StateRef {
        StateRef::state(self.model.initial_target())
    }
}

pub fn bind(scenario: &Scenario, model: &ValidatedModel) -> Result<BoundScenario, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    if scenario.machine != model.name {
        diags.push(Diagnostic::new(
            DiagCode::MachineMismatch,
            format!(
                "scenario is for machine `{}` but the model is `{}`",
                scenario.machine, model.name
            ),
        ));
    }
    if scenario.variables.len() != scenario.len() || scenario.inputs.len() != scenario.len() {
        diags.push(Diagnostic::new(
            DiagCode::LengthMismatch,
            "expectations, variables and inputs differ in length",
        ));
        return Err(diags);
    }

    let mut steps = Vec::with_capacity(scenario.len());
    for (i, ((expectation, variable), input)) in scenario
        .expectations
        .iter()
        .zip(&scenario.variables)
        .zip(&scenario.inputs)
        .enumerate()
    {
        let expected = StateRef::from_designator(expectation);
        if !model.knows(&expected) {
            diags.push(Diagnostic::new(
                DiagCode::UnknownState,
                format!(
                    "step {i}: expectation `{expectation}` is not a state of `{}`",
                    model.name
                ),
            ));
        }
        match model.var_type(variable) {
            None => diags.push(Diagnostic::new(
                DiagCode::UnknownVar,
                format!(
                    "step {i}: `{variable}` is not a variable of `{}`",
                    model.name
                ),
            )),
            Some(vtype) if vtype != input.vtype() => diags.push(Diagnostic::new(
                DiagCode::Type,
                format!(
                    "step {i}: `{variable}` is {vtype} but input `{input}` is {}",
                    input.vtype()
                ),
            )),
            Some(_) => {}
        }
        steps.push(BoundStep {
            variable: variable.clone(),
            input: *input,
            expected,
        });
    }

    if diags.is_empty() {
        Ok(BoundScenario {
            model: model.clone(),
            steps,
        })
    } else {
        Err(diags)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InitialCheck {
    pub expected: StateRef,
    pub observed: Option<StateRef>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub variable: String,
    pub input: Value,
    pub expected: StateRef,
    /// `None` when the session faulted and no state can be observed.
    pub observed: Option<StateRef>,
    pub pass: bool,
}

/// Where a scenario first diverged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Checkpoint {
    Initial,
    Step(usize),
}

impl Serialize for Checkpoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Checkpoint::Initial => serializer.serialize_str("initial"),
            Checkpoint::Step(i) => serializer.serialize_u64(*i as u64),
        }
    }
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Checkpoint::Initial => f.write_str("initial check"),
            Checkpoint::Step(i) => write!(f, "step {i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail {
        first_failure: Checkpoint,
    },
    Error {
        at: Checkpoint,
        diagnostic: Diagnostic,
    },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    pub machine: String,
    pub initial_check: InitialCheck,
    pub steps: Vec<StepReport>,
    pub verdict: Verdict,
}

impl ScenarioReport {
    /// Observed states in check order, starting with the initial check.
    pub fn observed_sequence(&self) -> Vec<Option<StateRef>> {
        std::iter::once(self.initial_check.observed.clone())
            .chain(self.steps.iter().map(|s| s.observed.clone()))
            .collect()
    }

    pub fn render_text(&self) -> String {
        use fmt::Write;
        let mut out = String::new();
        let show = |s: &Option<StateRef>| s.as_ref().map_or("-".to_string(), ToString::to_string);
        let mark = |pass: bool| if pass { "ok  " } else { "FAIL" };
        writeln!(out, "scenario for {}", self.machine).unwrap();
        writeln!(
            out,
            "  {} initial: expected {}, observed {}",
            mark(self.initial_check.pass),
            self.initial_check.expected,
            show(&self.initial_check.observed)
        )
        .unwrap();
        for s in &self.steps {
            writeln!(
                out,
                "  {} step {}: {} = {} -> expected {}, observed {}",
                mark(s.pass),
                s.index,
                s.variable,
                s.input,
                s.expected,
                show(&s.observed)
            )
            .unwrap();
        }
        match &self.verdict {
            Verdict::Pass => writeln!(out, "PASS").unwrap(),
            Verdict::Fail { first_failure } => {
                writeln!(out, "FAIL (first failure at {first_failure})").unwrap()
            }
            Verdict::Error { at, diagnostic } => {
                writeln!(out, "ERROR at {at}: {diagnostic}").unwrap()
            }
        }
        out
    }
}

/// One externally visible action of a test run, in the shape shared by the
/// scenario runner and the generated C tests.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioAction {
    Init,
    Enter,
    Set { variable: String, value: Value },
    AssertActive(StateRef),
}

pub fn run_scenario(bound: &BoundScenario) -> ScenarioReport {
    run_scenario_logged(bound).0
}

/// Runs the scenario and also returns the action sequence actually performed.
///
/// Execution continues past failed checks. Once the machine reaches the final
/// state, further assignments are absorbed (the machine stays final), which
/// is also what the generated C code does. A simulator fault ends the
/// observable part of the run: remaining steps are still attempted and
/// reported, but with no observed state.
pub fn run_scenario_logged(bound: &BoundScenario) -> (ScenarioReport, Vec<ScenarioAction>) {
    let mut actions = vec![ScenarioAction::Init];
    let mut session = Session::new(bound.model.clone());
    let mut error: Option<(Checkpoint, SimError)> = None;

    actions.push(ScenarioAction::Enter);
    if let Err(e) = session.enter() {
        error = Some((Checkpoint::Initial, e));
    }
    let expected = bound.initial_expectation();
    actions.push(ScenarioAction::AssertActive(expected.clone()));
    let observed = observe(&session);
    let initial_check = InitialCheck {
        pass: observed.as_ref() == Some(&expected),
        expected,
        observed,
    };

    let mut steps = Vec::with_capacity(bound.steps.len());
    for (index, step) in bound.steps.iter().enumerate() {
        actions.push(ScenarioAction::Set {
            variable: step.variable.clone(),
            value: step.input,
        });
        if session.status() == Status::Running {
            if let Err(e) = session.set_variable(&step.variable, step.input) {
                error.get_or_insert((Checkpoint::Step(index), e));
            }
        }
        actions.push(ScenarioAction::AssertActive(step.expected.clone()));
        let observed = observe(&session);
        steps.push(StepReport {
            index,
            variable: step.variable.clone(),
            input: step.input,
            pass: observed.as_ref() == Some(&step.expected),
            expected: step.expected.clone(),
            observed,
        });
    }

    let verdict = if let Some((at, e)) = error {
        Verdict::Error {
            at,
            diagnostic: e.to_diagnostic(),
        }
    } else if !initial_check.pass {
        Verdict::Fail {
            first_failure: Checkpoint::Initial,
        }
    } else if let Some(s) = steps.iter().find(|s| !s.pass) {
        Verdict::Fail {
            first_failure: Checkpoint::Step(s.index),
        }
    } else {
        Verdict::Pass
    };

    let report = ScenarioReport {
        machine: bound.model.name.clone(),
        initial_check,
        steps,
        verdict,
    };
    (report, actions)
}

fn observe(session: &Session) -> Option<StateRef> {
    match session.status() {
        Status::Running | Status::Finalized => Some(session.active().clone()),
        Status::Ready | Status::Faulted(_) => None,
    }
}
