//! Fault-injection doubles: a per-function activation state that decides
//! whether a call is routed to its double, and generated C wrappers that
//! apply the same rules at link time.

mod shims;

use std::fmt;
use std::num::NonZeroU64;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag::{DiagCode, Diagnostic};

pub use shims::{generate_shims, parse_double_specs, DoubleSpec};

/// Names a doubled function. By convention the id of `malloc` is `_malloc`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FunctionId(String);

impl FunctionId {
    pub fn new(id: impl Into<String>) -> Self {
        FunctionId(id.into())
    }

    /// The id of the double of `function`.
    pub fn of(function: &str) -> Self {
        FunctionId(format!("_{function}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ActivationState {
    #[default]
    Off,
    Always,
    /// The next `n` calls are doubled.
    Count(NonZeroU64),
    /// Doubled while inside at least one region; depth 0 is inactive.
    Region(u64),
}

impl ActivationState {
    pub fn count(n: u64) -> ActivationState {
        NonZeroU64::new(n).map_or(ActivationState::Off, ActivationState::Count)
    }

    /// `n > 0` doubles the next `n` calls, `-1` doubles every call, `0`
    /// turns the double off. Replaces whatever mode was active.
    pub fn after_set_status(self, n: i64) -> Result<ActivationState, i64> {
        match n {
            -1 => Ok(ActivationState::Always),
            0 => Ok(ActivationState::Off),
            n if n > 0 => Ok(ActivationState::count(n as u64)),
            n => Err(n),
        }
    }

    /// Whether the call is doubled, and the mode afterwards.
    pub fn after_consume(self) -> (bool, ActivationState) {
        match self {
            ActivationState::Off => (false, self),
            ActivationState::Always => (true, self),
            ActivationState::Count(n) => (true, ActivationState::count(n.get() - 1)),
            ActivationState::Region(depth) => (depth > 0, self),
        }
    }

    pub fn after_region_enter(self) -> ActivationState {
        match self {
            ActivationState::Region(depth) => ActivationState::Region(depth + 1),
            _ => ActivationState::Region(1),
        }
    }

    /// `None` when there is no open region to leave.
    pub fn after_region_exit(self) -> Option<ActivationState> {
        match self {
            ActivationState::Region(depth) if depth > 0 => Some(ActivationState::Region(depth - 1)),
            _ => None,
        }
    }
}

impl fmt::Display for ActivationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActivationState::Off => f.write_str("off"),
            ActivationState::Always => f.write_str("always"),
            ActivationState::Count(n) => write!(f, "count({n})"),
            ActivationState::Region(depth) => write!(f, "region({depth})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DoublesError {
    #[error("no double is registered for `{0}`")]
    UnknownFunction(FunctionId),
    #[error("invalid call count {0}; expected -1, 0 or a positive count")]
    BadCount(i64),
    #[error("`{0}` has no open region to exit")]
    RegionUnderflow(FunctionId),
    #[error("`{name}` is defined twice ({detail})")]
    NameCollision { name: String, detail: String },
    #[error("{0}")]
    Signature(String),
}

impl DoublesError {
    pub fn code(&self) -> DiagCode {
        match self {
            DoublesError::UnknownFunction(_) => DiagCode::UnknownFunction,
            DoublesError::BadCount(_) => DiagCode::BadCount,
            DoublesError::RegionUnderflow(_) => DiagCode::RegionUnderflow,
            DoublesError::NameCollision { .. } => DiagCode::NameCollision,
            DoublesError::Signature(_) => DiagCode::Signature,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::new(self.code(), self.to_string())
    }
}

/// Activation state of every registered double, plus a log of the outcome
/// of each call routed through [`DoubleRegistry::consume`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DoubleRegistry {
    entries: IndexMap<FunctionId, ActivationState>,
    call_log: Vec<(FunctionId, bool)>,
}

impl DoubleRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_functions<I: IntoIterator<Item = FunctionId>>(
        ids: I,
    ) -> Result<Self, DoublesError> {
        let mut reg = Self::new();
        for id in ids {
            reg.register(id)?;
        }
        Ok(reg)
    }

    pub fn register(&mut self, id: FunctionId) -> Result<(), DoublesError> {
        if self.entries.contains_key(&id) {
            return Err(DoublesError::NameCollision {
                name: id.0,
                detail: "already registered".into(),
            });
        }
        self.entries.insert(id, ActivationState::Off);
        Ok(())
    }

    pub fn state(&self, id: &FunctionId) -> Option<ActivationState> {
        self.entries.get(id).copied()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&FunctionId, ActivationState)> {
        self.entries.iter().map(|(id, s)| (id, *s))
    }

    pub fn call_log(&self) -> &[(FunctionId, bool)] {
        &self.call_log
    }

    fn entry(&mut self, id: &FunctionId) -> Result<&mut ActivationState, DoublesError> {
        self.entries
            .get_mut(id)
            .ok_or_else(|| DoublesError::UnknownFunction(id.clone()))
    }

    pub fn set_status(&mut self, id: &FunctionId, n: i64) -> Result<(), DoublesError> {
        let entry = self.entry(id)?;
        *entry = entry.after_set_status(n).map_err(DoublesError::BadCount)?;
        Ok(())
    }

    /// Decides whether the current call of `id` goes to its double.
    pub fn consume(&mut self, id: &FunctionId) -> Result<bool, DoublesError> {
        let entry = self.entry(id)?;
        let (doubled, next) = entry.after_consume();
        *entry = next;
        self.call_log.push((id.clone(), doubled));
        Ok(doubled)
    }

    pub fn region_enter(&mut self, id: &FunctionId) -> Result<(), DoublesError> {
        let entry = self.entry(id)?;
        *entry = entry.after_region_enter();
        Ok(())
    }

    pub fn region_exit(&mut self, id: &FunctionId) -> Result<(), DoublesError> {
        let entry = self.entry(id)?;
        *entry = entry
            .after_region_exit()
            .ok_or_else(|| DoublesError::RegionUnderflow(id.clone()))?;
        Ok(())
    }
}
