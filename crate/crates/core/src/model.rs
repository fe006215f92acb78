//! In-memory statechart model: a flat machine with typed variables, events and
//! guarded transitions, plus its validator and guard evaluator.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::diag::{DiagCode, Diagnostic, Loc};

/// Designator of the final pseudo-state in scenarios, traces and APIs.
pub const FINAL_NAME: &str = "__final__";

/// Words of the DSL that may not be used as names.
pub const KEYWORDS: &[&str] = &[
    "statechart",
    "state",
    "initial",
    "final",
    "var",
    "event",
    "when",
    "on",
    "int",
    "bool",
    "true",
    "false",
];

pub fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn is_reserved(text: &str) -> bool {
    KEYWORDS.contains(&text) || text == FINAL_NAME
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarType {
    Int,
    Bool,
}

impl fmt::Display for VarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarType::Int => "int",
            VarType::Bool => "bool",
        })
    }
}

/// A runtime value. Serializes as a bare JSON number or boolean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn vtype(self) -> VarType {
        match self {
            Value::Int(_) => VarType::Int,
            Value::Bool(_) => VarType::Bool,
        }
    }

    /// Parses `13`, `-4`, `true` or `false`, trimming surrounding whitespace.
    pub fn parse(text: &str) -> Option<Value> {
        match text.trim() {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            other => other.parse().ok().map(Value::Int),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
        }
    }
}

/// A state designator: a declared state or the final pseudo-state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateRef {
    State(String),
    Final,
}

impl StateRef {
    pub fn state(name: impl Into<String>) -> Self {
        StateRef::State(name.into())
    }

    /// `__final__` names the final pseudo-state; anything else a state.
    pub fn from_designator(text: &str) -> Self {
        if text == FINAL_NAME {
            StateRef::Final
        } else {
            StateRef::State(text.to_string())
        }
    }

    pub fn designator(&self) -> &str {
        match self {
            StateRef::State(name) => name,
            StateRef::Final => FINAL_NAME,
        }
    }

    pub fn is_final(&self) -> bool {
        matches!(self, StateRef::Final)
    }
}

impl fmt::Display for StateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.designator())
    }
}

impl Serialize for StateRef {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.designator())
    }
}

impl<'de> Deserialize<'de> for StateRef {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Ok(StateRef::from_designator(&text))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub const ALL: [CompareOp; 6] = [
        CompareOp::Eq,
        CompareOp::Ne,
        CompareOp::Lt,
        CompareOp::Le,
        CompareOp::Gt,
        CompareOp::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "==",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    /// Only `==` and `!=` accept boolean operands.
    pub fn accepts_bool(self) -> bool {
        matches!(self, CompareOp::Eq | CompareOp::Ne)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogicOp {
    And,
    Or,
}

impl LogicOp {
    pub fn symbol(self) -> &'static str {
        match self {
            LogicOp::And => "&&",
            LogicOp::Or => "||",
        }
    }
}

/// Guard expression tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(String),
    Compare {
        op: CompareOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Logic {
        op: LogicOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Not(Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn compare(op: CompareOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Compare {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn logic(op: LogicOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Logic {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn negate(operand: Expr) -> Expr {
        Expr::Not(Box::new(operand))
    }

    /// Visits every variable reference in evaluation order.
    pub fn for_each_var<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Var(name) => f(name),
            Expr::Compare { lhs, rhs, .. } | Expr::Logic { lhs, rhs, .. } => {
                lhs.for_each_var(f);
                rhs.for_each_var(f);
            }
            Expr::Not(operand) => operand.for_each_var(f),
        }
    }

    /// Type of the expression under `lookup`, or the first rule it breaks.
    pub fn type_check(
        &self,
        lookup: &impl Fn(&str) -> Option<VarType>,
    ) -> Result<VarType, (DiagCode, String)> {
        match self {
            Expr::Int(_) => Ok(VarType::Int),
            Expr::Bool(_) => Ok(VarType::Bool),
            Expr::Var(name) => lookup(name).ok_or_else(|| {
                (
                    DiagCode::UnknownVar,
                    format!("guard references undeclared variable `{name}`"),
                )
            }),
            Expr::Compare { op, lhs, rhs } => {
                let l = lhs.type_check(lookup)?;
                let r = rhs.type_check(lookup)?;
                match (l, r) {
                    (VarType::Int, VarType::Int) => Ok(VarType::Bool),
                    (VarType::Bool, VarType::Bool) if op.accepts_bool() => Ok(VarType::Bool),
                    _ => Err((
                        DiagCode::GuardType,
                        format!("`{}` cannot compare {l} with {r}", op.symbol()),
                    )),
                }
            }
            Expr::Logic { op, lhs, rhs } => {
                let l = lhs.type_check(lookup)?;
                let r = rhs.type_check(lookup)?;
                if l == VarType::Bool && r == VarType::Bool {
                    Ok(VarType::Bool)
                } else {
                    Err((
                        DiagCode::GuardType,
                        format!("`{}` needs bool operands, found {l} and {r}", op.symbol()),
                    ))
                }
            }
            Expr::Not(operand) => match operand.type_check(lookup)? {
                VarType::Bool => Ok(VarType::Bool),
                other => Err((
                    DiagCode::GuardType,
                    format!("`!` needs a bool, found {other}"),
                )),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub vtype: VarType,
    pub default: Value,
    pub loc: Loc,
}

impl VariableDecl {
    pub fn new(name: impl Into<String>, default: Value) -> Self {
        VariableDecl {
            name: name.into(),
            vtype: default.vtype(),
            default,
            loc: Loc::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventDecl {
    pub name: String,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Trigger {
    None,
    Event(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub source: String,
    pub target: StateRef,
    pub trigger: Trigger,
    pub guard: Option<Expr>,
    /// Position within the source state's transition list, starting at 0.
    pub decl_index: usize,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateDef {
    pub name: String,
    pub transitions: Vec<Transition>,
    pub loc: Loc,
}

impl StateDef {
    pub fn new(name: impl Into<String>) -> Self {
        StateDef {
            name: name.into(),
            transitions: Vec::new(),
            loc: Loc::default(),
        }
    }

    /// Appends a transition, assigning the next declaration index.
    pub fn push(&mut self, target: StateRef, trigger: Trigger, guard: Option<Expr>) -> &mut Self {
        let decl_index = self.transitions.len();
        self.transitions.push(Transition {
            source: self.name.clone(),
            target,
            trigger,
            guard,
            decl_index,
            loc: Loc::default(),
        });
        self
    }
}

/// An unvalidated statechart as produced by the parser or built in code.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StatechartModel {
    pub name: String,
    pub variables: Vec<VariableDecl>,
    pub events: Vec<EventDecl>,
    pub states: Vec<StateDef>,
    pub initial_target: Option<String>,
    pub name_loc: Loc,
    pub initial_loc: Loc,
}

impl StatechartModel {
    pub fn new(name: impl Into<String>) -> Self {
        StatechartModel {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn state(&self, name: &str) -> Option<&StateDef> {
        self.states.iter().find(|s| s.name == name)
    }

    pub fn variable(&self, name: &str) -> Option<&VariableDecl> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn transitions(&self) -> impl Iterator<Item = &Transition> {
        self.states.iter().flat_map(|s| s.transitions.iter())
    }

    pub fn validate(self) -> Result<ValidatedModel, Vec<Diagnostic>> {
        validate(self)
    }
}

/// Checks every model invariant, collecting all violations.
pub fn validate(model: StatechartModel) -> Result<ValidatedModel, Vec<Diagnostic>> {
    let mut diags = Vec::new();

    check_name(&mut diags, "statechart", &model.name, model.name_loc);

    // Variables, events and states share a single namespace.
    let declared = model
        .variables
        .iter()
        .map(|v| ("variable", v.name.as_str(), v.loc))
        .chain(
            model
                .events
                .iter()
                .map(|e| ("event", e.name.as_str(), e.loc)),
        )
        .chain(
            model
                .states
                .iter()
                .map(|s| ("state", s.name.as_str(), s.loc)),
        );
    let mut seen: HashMap<&str, &str> = HashMap::new();
    for (kind, name, loc) in declared {
        check_name(&mut diags, kind, name, loc);
        if let Some(prev) = seen.get(name) {
            diags.push(Diagnostic::at(
                DiagCode::DupName,
                format!("{kind} `{name}` clashes with an earlier {prev} of the same name"),
                loc,
            ));
        } else {
            seen.insert(name, kind);
        }
    }
    for var in &model.variables {
        if var.default.vtype() != var.vtype {
            diags.push(Diagnostic::at(
                DiagCode::Type,
                format!(
                    "variable `{}` is {} but its default `{}` is {}",
                    var.name,
                    var.vtype,
                    var.default,
                    var.default.vtype()
                ),
                var.loc,
            ));
        }
    }

    let var_types: HashMap<&str, VarType> = model
        .variables
        .iter()
        .map(|v| (v.name.as_str(), v.vtype))
        .collect();
    let state_names: HashMap<&str, usize> = model
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.as_str(), i))
        .collect();
    let event_names: HashMap<&str, usize> = model
        .events
        .iter()
        .enumerate()
        .map(|(i, e)| (e.name.as_str(), i))
        .collect();

    match &model.initial_target {
        None => diags.push(Diagnostic::at(
            DiagCode::NoInitial,
            format!(
                "statechart `{}` has no `initial -> State` declaration",
                model.name
            ),
            model.name_loc,
        )),
        Some(target) if !state_names.contains_key(target.as_str()) => diags.push(Diagnostic::at(
            DiagCode::UnknownState,
            format!("initial target `{target}` is not a declared state"),
            model.initial_loc,
        )),
        Some(_) => {}
    }

    let lookup = |name: &str| var_types.get(name).copied();
    for state in &model.states {
        let mut last_index: Option<usize> = None;
        for t in &state.transitions {
            if t.source != state.name {
                diags.push(Diagnostic::at(
                    DiagCode::UnknownState,
                    format!(
                        "transition source `{}` does not match enclosing state `{}`",
                        t.source, state.name
                    ),
                    t.loc,
                ));
            }
            if last_index.is_some_and(|prev| t.decl_index <= prev) {
                diags.push(Diagnostic::at(
                    DiagCode::Syntax,
                    format!(
                        "transition order in state `{}` is not strictly increasing",
                        state.name
                    ),
                    t.loc,
                ));
            }
            last_index = Some(t.decl_index);
            if let StateRef::State(target) = &t.target {
                if !state_names.contains_key(target.as_str()) {
                    diags.push(Diagnostic::at(
                        DiagCode::UnknownState,
                        format!("transition target `{target}` is not a declared state"),
                        t.loc,
                    ));
                }
            }
            if let Trigger::Event(event) = &t.trigger {
                if !event_names.contains_key(event.as_str()) {
                    diags.push(Diagnostic::at(
                        DiagCode::UnknownEvent,
                        format!("trigger `{event}` is not a declared event"),
                        t.loc,
                    ));
                }
            }
            if let Some(guard) = &t.guard {
                match guard.type_check(&lookup) {
                    Ok(VarType::Bool) => {}
                    Ok(other) => diags.push(Diagnostic::at(
                        DiagCode::GuardType,
                        format!("guard must be bool, found {other}"),
                        t.loc,
                    )),
                    Err((code, message)) => diags.push(Diagnostic::at(code, message, t.loc)),
                }
            }
        }
    }

    if !diags.is_empty() {
        return Err(diags);
    }

    let index = ModelIndex {
        states: owned(state_names),
        variables: model
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.clone(), i))
            .collect(),
        events: owned(event_names),
    };
    Ok(ValidatedModel {
        inner: Arc::new(ValidatedInner { model, index }),
    })
}

fn owned(map: HashMap<&str, usize>) -> HashMap<String, usize> {
    map.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn check_name(diags: &mut Vec<Diagnostic>, kind: &str, name: &str, loc: Loc) {
    if !is_identifier(name) {
        diags.push(Diagnostic::at(
            DiagCode::Identifier,
            format!("{kind} name `{name}` is not an identifier"),
            loc,
        ));
    } else if is_reserved(name) {
        diags.push(Diagnostic::at(
            DiagCode::ReservedName,
            format!("{kind} name `{name}` is a reserved word"),
            loc,
        ));
    }
}

#[derive(Debug)]
struct ModelIndex {
    states: HashMap<String, usize>,
    variables: HashMap<String, usize>,
    events: HashMap<String, usize>,
}

#[derive(Debug)]
struct ValidatedInner {
    model: StatechartModel,
    index: ModelIndex,
}

/// A model that satisfies every invariant. Cheap to clone and immutable.
#[derive(Clone, Debug)]
pub struct ValidatedModel {
    inner: Arc<ValidatedInner>,
}

impl ValidatedModel {
    pub fn model(&self) -> &StatechartModel {
        &self.inner.model
    }

    pub fn initial_target(&self) -> &str {
        self.inner
            .model
            .initial_target
            .as_deref()
            .expect("validated models have an initial target")
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.inner.index.states.get(name).copied()
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.inner.index.variables.get(name).copied()
    }

    pub fn var_type(&self, name: &str) -> Option<VarType> {
        self.variable_index(name)
            .map(|i| self.inner.model.variables[i].vtype)
    }

    pub fn has_event(&self, name: &str) -> bool {
        self.inner.index.events.contains_key(name)
    }

    /// Whether `state` names a declared state or the final pseudo-state.
    pub fn knows(&self, state: &StateRef) -> bool {
        match state {
            StateRef::Final => true,
            StateRef::State(name) => self.state_index(name).is_some(),
        }
    }

    pub fn default_env(&self) -> Env {
        self.inner
            .model
            .variables
            .iter()
            .map(|v| (v.name.clone(), v.default))
            .collect()
    }

    /// Unwraps the underlying model for re-validation or editing.
    pub fn into_model(self) -> StatechartModel {
        Arc::try_unwrap(self.inner)
            .map(|inner| inner.model)
            .unwrap_or_else(|shared| shared.model.clone())
    }
}

impl Deref for ValidatedModel {
    type Target = StatechartModel;

    fn deref(&self) -> &StatechartModel {
        &self.inner.model
    }
}

/// Variable environment in declaration order.
pub type Env = IndexMap<String, Value>;

/// Evaluates a type-checked guard.
///
/// # Panics
///
/// Panics if `expr` references a variable missing from `env` or is ill-typed;
/// validation rules both out.
pub fn eval_guard(expr: &Expr, env: &Env) -> bool {
    match eval(expr, env) {
        Value::Bool(b) => b,
        Value::Int(_) => panic!("guard evaluated to an integer"),
    }
}

fn eval(expr: &Expr, env: &Env) -> Value {
    match expr {
        Expr::Int(v) => Value::Int(*v),
        Expr::Bool(v) => Value::Bool(*v),
        Expr::Var(name) => *env
            .get(name)
            .unwrap_or_else(|| panic!("variable `{name}` is not bound")),
        Expr::Compare { op, lhs, rhs } => {
            let result = match (eval(lhs, env), eval(rhs, env)) {
                (Value::Int(l), Value::Int(r)) => match op {
                    CompareOp::Eq => l == r,
                    CompareOp::Ne => l != r,
                    CompareOp::Lt => l < r,
                    CompareOp::Le => l <= r,
                    CompareOp::Gt => l > r,
                    CompareOp::Ge => l >= r,
                },
                (Value::Bool(l), Value::Bool(r)) if op.accepts_bool() => match op {
                    CompareOp::Eq => l == r,
                    _ => l != r,
                },
                (l, r) => panic!("ill-typed comparison {l} {} {r}", op.symbol()),
            };
            Value::Bool(result)
        }
        Expr::Logic { op, lhs, rhs } => {
            let l = eval_guard(lhs, env);
            Value::Bool(match op {
                LogicOp::And => l && eval_guard(rhs, env),
                LogicOp::Or => l || eval_guard(rhs, env),
            })
        }
        Expr::Not(operand) => Value::Bool(!eval_guard(operand, env)),
    }
}
