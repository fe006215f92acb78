use serde::Serialize;
use statetest_core::model::Trigger;
use statetest_core::syntax::expr_text;
use statetest_core::{StateRef, ValidatedModel, FINAL_NAME};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramState {
    pub name: String,
    pub is_initial: bool,
    pub is_final: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramTransition {
    pub source: String,
    pub target: String,
    /// Trigger and guard as written, e.g. `go [x > 1]`; empty when neither.
    pub label: String,
    pub decl_index: usize,
}

/// Topology of a model for drawing. The final state appears only when some
/// transition targets it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramView {
    pub states: Vec<DiagramState>,
    pub transitions: Vec<DiagramTransition>,
}

impl DiagramView {
    pub fn of(model: &ValidatedModel) -> Self {
        let mut states: Vec<DiagramState> = model
            .states
            .iter()
            .map(|s| DiagramState {
                name: s.name.clone(),
                is_initial: s.name == model.initial_target(),
                is_final: false,
            })
            .collect();
        if model.transitions().any(|t| t.target == StateRef::Final) {
            states.push(DiagramState {
                name: FINAL_NAME.to_string(),
                is_initial: false,
                is_final: true,
            });
        }
        let transitions = model
            .transitions()
            .map(|t| {
                let mut label = match &t.trigger {
                    Trigger::None => String::new(),
                    Trigger::Event(e) => e.clone(),
                };
                if let Some(guard) = &t.guard {
                    if !label.is_empty() {
                        label.push(' ');
                    }
                    label.push_str(&format!("[{}]", expr_text(guard)));
                }
                DiagramTransition {
                    source: t.source.clone(),
                    target: t.target.designator().to_string(),
                    label,
                    decl_index: t.decl_index,
                }
            })
            .collect();
        DiagramView {
            states,
            transitions,
        }
    }
}
