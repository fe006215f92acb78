//! Statechart-driven test tooling for embedded C.
//!
//! Model a flat state machine in a small textual DSL, simulate it, check
//! scenarios against the simulator, and generate C artifacts: the machine
//! itself, tests that replay a scenario against it, and fault-injection
//! wrappers for library functions.
//!
//! ```
//! use statetest_core::{parse_statechart, SourceText, Session, StateRef, Value};
//!
//! let src = SourceText::new(
//!     "statechart Sm {
//!        var value1: int = 0
//!        initial -> State1
//!        state State1 { when [value1 == 13] -> State2 }
//!        state State2 {}
//!      }",
//! );
//! let model = parse_statechart(&src).unwrap().validate().unwrap();
//! let mut session = Session::new(model);
//! session.enter().unwrap();
//! session.set_variable("value1", Value::Int(13)).unwrap();
//! assert!(session.is_active(&StateRef::state("State2")).unwrap());
//! ```

pub mod codegen;
pub mod diag;
pub mod doubles;
pub mod model;
pub mod scenario;
pub mod sim;
pub mod syntax;

pub use codegen::{
    generate_machine, generate_test, ArtifactKind, CodegenError, GeneratedArtifact, NamingScheme,
    TestFlavor,
};
pub use diag::{DiagCode, Diagnostic, Span};
pub use doubles::{ActivationState, DoubleRegistry, DoubleSpec, DoublesError, FunctionId};
pub use model::{
    eval_guard, validate, Env, Expr, StateRef, StatechartModel, ValidatedModel, Value, VarType,
    FINAL_NAME,
};
pub use scenario::{
    bind, run_scenario, BoundScenario, Scenario, ScenarioAction, ScenarioReport, Verdict,
};
pub use sim::{Session, SimError, Status, Stimulus, TraceEntry};
pub use syntax::{parse_scenario, parse_statechart, serialize_statechart, SourceText};

/// Parses and validates a statechart in one go.
pub fn load_model(src: &SourceText) -> Result<ValidatedModel, Vec<Diagnostic>> {
    parse_statechart(src)?.validate()
}
