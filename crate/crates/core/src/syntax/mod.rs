//! Concrete syntax: the statechart DSL (`.sct.txt`) and scenario files
//! (`.scenario.json`). Nothing else in the crate knows about text formats.

mod lexer;
mod parser;
mod printer;

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::diag::{DiagCode, Diagnostic, Span};
use crate::model::{StatechartModel, Value};
use crate::scenario::Scenario;

pub use printer::{expr_text, transition_text};

/// Source text plus where it came from, for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceText {
    pub content: String,
    pub origin: String,
}

impl SourceText {
    pub fn new(content: impl Into<String>) -> Self {
        SourceText {
            content: content.into(),
            origin: "<memory>".to_string(),
        }
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        Ok(SourceText {
            content: std::fs::read_to_string(path)?,
            origin: path.display().to_string(),
        })
    }

    pub fn with_origin(mut self, origin: impl Into<PathBuf>) -> Self {
        self.origin = origin.into().display().to_string();
        self
    }
}

impl From<&str> for SourceText {
    fn from(content: &str) -> Self {
        SourceText::new(content)
    }
}

/// Parses a statechart. The result is structurally complete but unvalidated.
pub fn parse_statechart(src: &SourceText) -> Result<StatechartModel, Vec<Diagnostic>> {
    parser::parse(&src.content)
}

/// Canonical text for `model`; always re-parses to a structurally equal model.
pub fn serialize_statechart(model: &StatechartModel) -> SourceText {
    SourceText::new(printer::print_model(model))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    machine: String,
    expectations: Vec<String>,
    variables: Vec<String>,
    inputs: Vec<Value>,
}

/// Parses a `.scenario.json` document. Names are not resolved here.
pub fn parse_scenario(src: &SourceText) -> Result<Scenario, Vec<Diagnostic>> {
    let text = &src.content;
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| vec![json_error(&e, text, "scenario file")])?;

    let expected = file.expectations.len();
    let mut diags = Vec::new();
    for (key, len) in [
        ("variables", file.variables.len()),
        ("inputs", file.inputs.len()),
    ] {
        if len != expected {
            diags.push(Diagnostic::at(
                DiagCode::LengthMismatch,
                format!("`{key}` has {len} entries but `expectations` has {expected}"),
                key_span(text, key),
            ));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(Scenario {
        machine: file.machine,
        expectations: file.expectations,
        variables: file.variables,
        inputs: file.inputs,
    })
}

/// An E_SYNTAX diagnostic positioned where `serde_json` gave up.
pub(crate) fn json_error(e: &serde_json::Error, text: &str, what: &str) -> Diagnostic {
    let span = if e.line() == 0 {
        lexer::eof_span(text)
    } else {
        Span::new(e.line() as u32, e.column().max(1) as u32, 1)
    };
    Diagnostic::at(
        DiagCode::Syntax,
        format!("invalid {what}: {}", strip_position(&e.to_string())),
        clamp(span, text),
    )
}

/// Builds a scenario from three comma-separated lists, the quick form used by
/// the command line. Entries are trimmed; an empty string is an empty list.
pub fn scenario_from_lists(
    machine: &str,
    expectations: &str,
    variables: &str,
    inputs: &str,
) -> Result<Scenario, Vec<Diagnostic>> {
    fn split(list: &str) -> Vec<String> {
        if list.trim().is_empty() {
            return Vec::new();
        }
        list.split(',').map(|s| s.trim().to_string()).collect()
    }
    let expectations = split(expectations);
    let variables = split(variables);
    let mut diags = Vec::new();
    let mut values = Vec::new();
    for raw in split(inputs) {
        match Value::parse(&raw) {
            Some(v) => values.push(v),
            None => diags.push(Diagnostic::new(
                DiagCode::Syntax,
                format!("input `{raw}` is neither an integer nor true/false"),
            )),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    for (key, len) in [("variables", variables.len()), ("inputs", values.len())] {
        if len != expectations.len() {
            diags.push(Diagnostic::new(
                DiagCode::LengthMismatch,
                format!(
                    "{key} has {len} entries but expectations has {}",
                    expectations.len()
                ),
            ));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(Scenario {
        machine: machine.to_string(),
        expectations,
        variables,
        inputs: values,
    })
}

fn strip_position(message: &str) -> &str {
    message
        .rfind(" at line ")
        .map_or(message, |idx| &message[..idx])
}

fn key_span(text: &str, key: &str) -> Span {
    let needle = format!("\"{key}\"");
    match text.find(&needle) {
        Some(offset) => {
            let before = &text[..offset];
            let line = before.matches('\n').count() as u32 + 1;
            let column = before.rsplit('\n').next().unwrap_or("").chars().count() as u32 + 1;
            Span::new(line, column, needle.chars().count() as u32)
        }
        None => Span::new(1, 1, 0),
    }
}

/// Pulls a span reported by an external parser back inside `text`.
fn clamp(span: Span, text: &str) -> Span {
    let lines: Vec<&str> = text.split('\n').collect();
    let line = span.line.clamp(1, lines.len() as u32);
    let width = lines[line as usize - 1].chars().count() as u32;
    let column = span.column.clamp(1, width + 1);
    let length = if column > width {
        0
    } else {
        span.length.min(width + 1 - column)
    };
    Span::new(line, column, length)
}
