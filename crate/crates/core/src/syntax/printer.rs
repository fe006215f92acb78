use std::fmt::Write;

use crate::model::{Expr, StateRef, StatechartModel, Transition, Trigger};

const INDENT: &str = "  ";

/// Canonical text form: declaration order, two-space indentation, one item
/// per line, and parentheses around every non-atomic operand.
pub(crate) fn print_model(model: &StatechartModel) -> String {
    let mut out = String::new();
    writeln!(out, "statechart {} {{", model.name).unwrap();
    for var in &model.variables {
        writeln!(
            out,
            "{INDENT}var {}: {} = {}",
            var.name, var.vtype, var.default
        )
        .unwrap();
    }
    for event in &model.events {
        writeln!(out, "{INDENT}event {}", event.name).unwrap();
    }
    if let Some(initial) = &model.initial_target {
        writeln!(out, "{INDENT}initial -> {initial}").unwrap();
    }
    for state in &model.states {
        if state.transitions.is_empty() {
            writeln!(out, "{INDENT}state {} {{}}", state.name).unwrap();
            continue;
        }
        writeln!(out, "{INDENT}state {} {{", state.name).unwrap();
        for t in &state.transitions {
            writeln!(out, "{INDENT}{INDENT}{}", transition_text(t)).unwrap();
        }
        writeln!(out, "{INDENT}}}").unwrap();
    }
    out.push_str("}\n");
    out
}

/// `when [guard] -> Target` / `on ev -> final`.
pub fn transition_text(t: &Transition) -> String {
    let mut out = match &t.trigger {
        Trigger::None => "when".to_string(),
        Trigger::Event(event) => format!("on {event}"),
    };
    if let Some(guard) = &t.guard {
        write!(out, " [{}]", expr_text(guard)).unwrap();
    }
    let target = match &t.target {
        StateRef::State(name) => name.as_str(),
        StateRef::Final => "final",
    };
    write!(out, " -> {target}").unwrap();
    out
}

pub fn expr_text(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr);
    out
}

fn write_expr(out: &mut String, expr: &Expr) {
    match expr {
        Expr::Int(v) => write!(out, "{v}").unwrap(),
        Expr::Bool(v) => write!(out, "{v}").unwrap(),
        Expr::Var(name) => out.push_str(name),
        Expr::Compare { op, lhs, rhs } => {
            write_operand(out, lhs);
            write!(out, " {} ", op.symbol()).unwrap();
            write_operand(out, rhs);
        }
        Expr::Logic { op, lhs, rhs } => {
            write_operand(out, lhs);
            write!(out, " {} ", op.symbol()).unwrap();
            write_operand(out, rhs);
        }
        Expr::Not(operand) => {
            out.push('!');
            write_operand(out, operand);
        }
    }
}

fn write_operand(out: &mut String, expr: &Expr) {
    if matches!(expr, Expr::Int(_) | Expr::Bool(_) | Expr::Var(_)) {
        write_expr(out, expr);
    } else {
        out.push('(');
        write_expr(out, expr);
        out.push(')');
    }
}
