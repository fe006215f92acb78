//! C code generation. All output is byte-stable: LF line endings, a trailing
//! newline, and no timestamps.

mod machine;
mod naming;
mod test_file;

use std::collections::HashSet;
use std::path::Path;

use thiserror::Error;

use crate::diag::{DiagCode, Diagnostic};
use crate::model::{StateRef, ValidatedModel, Value};
use crate::scenario::{BoundScenario, ScenarioAction};

pub use naming::NamingScheme;
pub(crate) use naming::C_KEYWORDS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArtifactKind {
    SmHeader,
    SmSource,
    TestSource,
    DoublesHeader,
    DoublesSource,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedArtifact {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub content: String,
    pub kind: ArtifactKind,
}

impl GeneratedArtifact {
    /// Writes the artifact below `root`, creating parent directories.
    pub fn write_under(&self, root: &Path) -> std::io::Result<std::path::PathBuf> {
        let path = root.join(&self.path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, &self.content)?;
        Ok(path)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum TestFlavor {
    /// gtest fixture with `EXPECT_TRUE`, written to `tests/Test<P>.cpp`.
    #[default]
    Gtest,
    /// Self-contained C99 `main()`, written to `tests/test_<p>.c`.
    Minimal,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CodegenError {
    #[error("`{0}` cannot be used as a C identifier")]
    Identifier(String),
    #[error("generated name `{name}` is used by both {first} and {second}")]
    NameCollision {
        name: String,
        first: String,
        second: String,
    },
    #[error("{context}: {value} does not fit in a 32-bit C integer")]
    Range { value: i64, context: String },
    #[error("scenario was bound to machine `{scenario}`, not `{model}`")]
    ModelMismatch { scenario: String, model: String },
}

impl CodegenError {
    pub fn code(&self) -> DiagCode {
        match self {
            CodegenError::Identifier(_) => DiagCode::Identifier,
            CodegenError::NameCollision { .. } => DiagCode::NameCollision,
            CodegenError::Range { .. } => DiagCode::Range,
            CodegenError::ModelMismatch { .. } => DiagCode::MachineMismatch,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::new(self.code(), self.to_string())
    }
}

pub(crate) fn banner() -> String {
    format!(
        "/* Generated by statetest {}. Do not edit. */\n\n",
        env!("CARGO_PKG_VERSION")
    )
}

/// A C expression for `v`. `INT32_MIN` has no literal form.
pub(crate) fn c_int(v: i64) -> String {
    if v == i64::from(i32::MIN) {
        "(-2147483647 - 1)".to_string()
    } else {
        v.to_string()
    }
}

const SC_TYPES: &str = "#ifndef SC_TYPES_H_
#define SC_TYPES_H_

#include <stdint.h>
#include <stdbool.h>

typedef int32_t sc_integer;
typedef bool sc_boolean;

#endif /* SC_TYPES_H_ */
";

/// `src-gen/<P>.h`, `src-gen/<P>.c` and `src-gen/sc_types.h`.
pub fn generate_machine(model: &ValidatedModel) -> Result<Vec<GeneratedArtifact>, CodegenError> {
    let n = NamingScheme::new(model)?;
    let source = machine::source(model, &n)?;
    Ok(vec![
        GeneratedArtifact {
            path: format!("src-gen/{}.h", n.handle_type()),
            content: machine::header(model, &n),
            kind: ArtifactKind::SmHeader,
        },
        GeneratedArtifact {
            path: format!("src-gen/{}.c", n.handle_type()),
            content: source,
            kind: ArtifactKind::SmSource,
        },
        GeneratedArtifact {
            path: "src-gen/sc_types.h".to_string(),
            content: format!("{}{SC_TYPES}", banner()),
            kind: ArtifactKind::SmHeader,
        },
    ])
}

pub fn generate_test(
    model: &ValidatedModel,
    bound: &BoundScenario,
    flavor: TestFlavor,
) -> Result<GeneratedArtifact, CodegenError> {
    if bound.model().model() != model.model() {
        return Err(CodegenError::ModelMismatch {
            scenario: bound.model().name.clone(),
            model: model.name.clone(),
        });
    }
    let n = NamingScheme::new(model)?;
    let content = test_file::test_source(bound, &n, flavor)?;
    let path = match flavor {
        TestFlavor::Gtest => format!("tests/Test{}.cpp", n.handle_type()),
        TestFlavor::Minimal => format!("tests/test_{}.c", n.prefix),
    };
    Ok(GeneratedArtifact {
        path,
        content,
        kind: ArtifactKind::TestSource,
    })
}

/// Recovers the init/enter/set/assert sequence from a generated test file.
/// Lines that are not one of those calls are ignored.
pub fn extract_actions(test_source: &str, n: &NamingScheme) -> Vec<ScenarioAction> {
    let init = format!("{}(&handle);", n.init());
    let enter = format!("{}(&handle);", n.enter());
    let assert_prefix = format!("EXPECT_TRUE({}(&handle, ", n.is_active());
    let setter_prefix = format!("{}Iface{}_set_", n.prefix, n.type_name);

    let mut actions = Vec::new();
    for line in test_source.lines().map(str::trim) {
        if line == init {
            actions.push(ScenarioAction::Init);
        } else if line == enter {
            actions.push(ScenarioAction::Enter);
        } else if let Some(rest) = line.strip_prefix(&assert_prefix) {
            if let Some(state) = rest.strip_suffix("));").and_then(|c| n.state_from_const(c)) {
                actions.push(ScenarioAction::AssertActive(state));
            }
        } else if let Some(rest) = line.strip_prefix(&setter_prefix) {
            let parsed = rest.split_once("(&handle, ").and_then(|(var, arg)| {
                let arg = arg.strip_suffix(");")?;
                let value = if arg == "(-2147483647 - 1)" {
                    Value::Int(i64::from(i32::MIN))
                } else {
                    Value::parse(arg)?
                };
                Some((var.to_string(), value))
            });
            if let Some((variable, value)) = parsed {
                actions.push(ScenarioAction::Set { variable, value });
            }
        }
    }
    actions
}

/// Identifiers in `c_source` (outside comments, strings and `#include`
/// lines) that are neither C keywords, support types, names derived by the
/// naming scheme, model element names, nor listed in `extra`.
pub fn foreign_identifiers(
    c_source: &str,
    model: &ValidatedModel,
    n: &NamingScheme,
    extra: &[&str],
) -> Vec<String> {
    let mut allowed: HashSet<String> = n
        .global_names(model)
        .into_iter()
        .map(|(name, _)| name)
        .collect();
    allowed.extend(model.variables.iter().map(|v| v.name.clone()));
    allowed.extend(
        model
            .states
            .iter()
            .map(|s| n.state_const(&StateRef::state(&s.name))),
    );
    allowed.extend(
        naming::C_KEYWORDS
            .iter()
            .chain(naming::SUPPORT_NAMES)
            .chain(naming::LOCAL_NAMES)
            .chain(extra)
            .map(|s| s.to_string()),
    );
    allowed.extend(
        [
            "define",
            "ifndef",
            "ifdef",
            "endif",
            "include",
            "__cplusplus",
            "SC_TYPES_H_",
        ]
        .iter()
        .map(|s| s.to_string()),
    );

    let mut foreign = Vec::new();
    for ident in c_identifiers(c_source) {
        if !allowed.contains(&ident) && !foreign.contains(&ident) {
            foreign.push(ident);
        }
    }
    foreign
}

fn c_identifiers(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            i += 2;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '"' || c == '\'' || c == '<' && is_include_line(&chars, i) {
            let close = if c == '<' { '>' } else { c };
            i += 1;
            while i < chars.len() && chars[i] != close {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
        } else {
            i += 1;
        }
    }
    out
}

fn is_include_line(chars: &[char], pos: usize) -> bool {
    let line_start = chars[..pos]
        .iter()
        .rposition(|&c| c == '\n')
        .map_or(0, |p| p + 1);
    let line: String = chars[line_start..pos].iter().collect();
    line.trim_start().starts_with("#include")
}
