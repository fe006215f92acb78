//! Deterministic run-to-completion execution of a validated statechart.
//!
//! A stimulus (entering the machine, assigning a variable, raising an event)
//! is followed by micro-steps until no transition is enabled. Each micro-step
//! takes the enabled transition of the active state with the smallest
//! declaration index. A raised event is only visible to the first micro-step;
//! later ones consider eventless transitions only.

use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag::{DiagCode, Diagnostic};
use crate::model::{
    eval_guard, Env, StateRef, Transition, Trigger, ValidatedModel, Value, VarType,
};

pub const DEFAULT_MICROSTEP_LIMIT: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Ready,
    Running,
    Finalized,
    Faulted(DiagCode),
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ready => "READY",
            Status::Running => "RUNNING",
            Status::Finalized => "FINALIZED",
            Status::Faulted(_) => "FAULTED",
        }
    }

    pub fn fault(self) -> Option<DiagCode> {
        match self {
            Status::Faulted(code) => Some(code),
            _ => None,
        }
    }
}

impl Serialize for Status {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stimulus {
    Enter,
    SetVar { name: String, value: Value },
    Raise { name: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TakenTransition {
    pub source: String,
    pub target: StateRef,
    pub decl_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceEntry {
    pub stimulus: Stimulus,
    pub taken: Vec<TakenTransition>,
    pub resulting_active: StateRef,
}

impl TraceEntry {
    /// Each taken transition starts where the previous one ended.
    pub fn is_chained(&self) -> bool {
        self.taken
            .windows(2)
            .all(|w| w[0].target == StateRef::State(w[1].source.clone()))
            && self
                .taken
                .last()
                .is_none_or(|t| t.target == self.resulting_active)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("session has already been entered")]
    AlreadyEntered,
    #[error("session is {status}, not RUNNING")]
    NotRunning { status: &'static str },
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("variable `{name}` is {expected}, got {found}")]
    Type {
        name: String,
        expected: VarType,
        found: VarType,
    },
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("run-to-completion exceeded {limit} micro-steps")]
    MicrostepLimit { limit: usize },
}

impl SimError {
    pub fn code(&self) -> DiagCode {
        match self {
            SimError::AlreadyEntered => DiagCode::AlreadyEntered,
            SimError::NotRunning { .. } => DiagCode::NotRunning,
            SimError::UnknownVar(_) => DiagCode::UnknownVar,
            SimError::Type { .. } => DiagCode::Type,
            SimError::UnknownEvent(_) => DiagCode::UnknownEvent,
            SimError::UnknownState(_) => DiagCode::UnknownState,
            SimError::MicrostepLimit { .. } => DiagCode::MicrostepLimit,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::new(self.code(), self.to_string())
    }
}

/// Live simulation state for one machine.
#[derive(Clone, Debug)]
pub struct Session {
    model: ValidatedModel,
    active: StateRef,
    env: Env,
    trace: Vec<TraceEntry>,
    status: Status,
    microstep_limit: usize,
}

impl Session {
    pub fn new(model: ValidatedModel) -> Self {
        Session::with_limit(model, NonZeroUsize::new(DEFAULT_MICROSTEP_LIMIT).unwrap())
    }

    pub fn with_limit(model: ValidatedModel, microstep_limit: NonZeroUsize) -> Self {
        let env = model.default_env();
        let active = StateRef::state(model.initial_target());
        Session {
            model,
            active,
            env,
            trace: Vec::new(),
            status: Status::Ready,
            microstep_limit: microstep_limit.get(),
        }
    }

    /// Builds a fresh session and applies `stimuli` in order, stopping at the
    /// first error.
    #[allow(clippy::result_large_err)]
    pub fn replay<'a>(
        model: ValidatedModel,
        stimuli: impl IntoIterator<Item = &'a Stimulus>,
    ) -> Result<Session, (Session, SimError)> {
        let mut session = Session::new(model);
        for stimulus in stimuli {
            if let Err(e) = session.apply(stimulus) {
                return Err((session, e));
            }
        }
        Ok(session)
    }

    pub fn model(&self) -> &ValidatedModel {
        &self.model
    }

    pub fn active(&self) -> &StateRef {
        &self.active
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn microstep_limit(&self) -> usize {
        self.microstep_limit
    }

    pub fn apply(&mut self, stimulus: &Stimulus) -> Result<&TraceEntry, SimError> {
        match stimulus {
            Stimulus::Enter => self.enter(),
            Stimulus::SetVar { name, value } => self.set_variable(name, *value),
            Stimulus::Raise { name } => self.raise_event(name),
        }
    }

    pub fn enter(&mut self) -> Result<&TraceEntry, SimError> {
        if self.status != Status::Ready {
            return Err(SimError::AlreadyEntered);
        }
        self.env = self.model.default_env();
        self.active = StateRef::state(self.model.initial_target());
        self.status = Status::Running;
        self.react(Stimulus::Enter, None)
    }

    pub fn set_variable(&mut self, name: &str, value: Value) -> Result<&TraceEntry, SimError> {
        self.ensure_running()?;
        let expected = self
            .model
            .var_type(name)
            .ok_or_else(|| SimError::UnknownVar(name.to_string()))?;
        if value.vtype() != expected {
            return Err(SimError::Type {
                name: name.to_string(),
                expected,
                found: value.vtype(),
            });
        }
        self.env.insert(name.to_string(), value);
        let stimulus = Stimulus::SetVar {
            name: name.to_string(),
            value,
        };
        self.react(stimulus, None)
    }

    pub fn raise_event(&mut self, event: &str) -> Result<&TraceEntry, SimError> {
        self.ensure_running()?;
        if !self.model.has_event(event) {
            return Err(SimError::UnknownEvent(event.to_string()));
        }
        let stimulus = Stimulus::Raise {
            name: event.to_string(),
        };
        self.react(stimulus, Some(event))
    }

    pub fn is_active(&self, state: &StateRef) -> Result<bool, SimError> {
        if self.status == Status::Ready {
            return Err(SimError::NotRunning { status: "READY" });
        }
        if !self.model.knows(state) {
            return Err(SimError::UnknownState(state.to_string()));
        }
        Ok(&self.active == state)
    }

    /// Discards the trace and returns to a freshly entered session.
    pub fn reset(&mut self) -> Result<&TraceEntry, SimError> {
        self.trace.clear();
        self.status = Status::Ready;
        self.enter()
    }

    fn ensure_running(&self) -> Result<(), SimError> {
        match self.status {
            Status::Running => Ok(()),
            other => Err(SimError::NotRunning {
                status: other.label(),
            }),
        }
    }

    fn react(&mut self, stimulus: Stimulus, event: Option<&str>) -> Result<&TraceEntry, SimError> {
        let mut taken = Vec::new();
        let outcome = self.run_to_completion(event, &mut taken);
        self.trace.push(TraceEntry {
            stimulus,
            taken,
            resulting_active: self.active.clone(),
        });
        outcome?;
        Ok(self.trace.last().expect("entry just pushed"))
    }

    fn run_to_completion(
        &mut self,
        mut event: Option<&str>,
        taken: &mut Vec<TakenTransition>,
    ) -> Result<(), SimError> {
        loop {
            let StateRef::State(name) = &self.active else {
                self.status = Status::Finalized;
                return Ok(());
            };
            let state = self
                .model
                .state(name)
                .expect("active state exists in a validated model");
            let chosen = state
                .transitions
                .iter()
                .find(|t| enabled(t, event, &self.env));
            let Some(t) = chosen else {
                return Ok(());
            };
            if taken.len() == self.microstep_limit {
                self.status = Status::Faulted(DiagCode::MicrostepLimit);
                return Err(SimError::MicrostepLimit {
                    limit: self.microstep_limit,
                });
            }
            taken.push(TakenTransition {
                source: t.source.clone(),
                target: t.target.clone(),
                decl_index: t.decl_index,
            });
            self.active = t.target.clone();
            event = None;
        }
    }
}

fn enabled(t: &Transition, event: Option<&str>, env: &Env) -> bool {
    let triggered = match (&t.trigger, event) {
        (Trigger::None, None) => true,
        (Trigger::Event(name), Some(raised)) => name == raised,
        _ => false,
    };
    triggered && t.guard.as_ref().is_none_or(|g| eval_guard(g, env))
}
