//! Diagnostics shared by every stage of the toolkit.
//!
//! Each diagnostic carries a machine-readable [`DiagCode`] drawn from a closed
//! set, a human message, and (when the offending element came from source
//! text) a 1-based [`Span`].

use std::fmt;

use serde::{Deserialize, Serialize};

/// A 1-based source region. `length` counts characters on `line`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl Span {
    pub fn new(line: u32, column: u32, length: u32) -> Self {
        Span {
            line,
            column,
            length,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Optional source location attached to model elements.
///
/// Equality always holds so that models compare structurally regardless of
/// where (or whether) they were parsed from.
#[derive(Clone, Copy, Debug, Default)]
pub struct Loc(pub Option<Span>);

impl PartialEq for Loc {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Loc {}

impl std::hash::Hash for Loc {
    fn hash<H: std::hash::Hasher>(&self, _state: &mut H) {}
}

impl From<Span> for Loc {
    fn from(span: Span) -> Self {
        Loc(Some(span))
    }
}

macro_rules! diag_codes {
    ($($variant:ident => $text:literal,)*) => {
        /// The closed set of diagnostic codes. See `docs/diagnostics.md`.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum DiagCode {
            $($variant,)*
        }

        impl DiagCode {
            pub const ALL: &'static [DiagCode] = &[$(DiagCode::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(DiagCode::$variant => $text,)*
                }
            }

            pub fn parse(text: &str) -> Option<DiagCode> {
                match text {
                    $($text => Some(DiagCode::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

diag_codes! {
    Lexical => "E_LEXICAL",
    Syntax => "E_SYNTAX",
    LengthMismatch => "E_LENGTH_MISMATCH",
    DupName => "E_DUP_NAME",
    ReservedName => "E_RESERVED_NAME",
    UnknownState => "E_UNKNOWN_STATE",
    UnknownEvent => "E_UNKNOWN_EVENT",
    UnknownVar => "E_UNKNOWN_VAR",
    GuardType => "E_GUARD_TYPE",
    NoInitial => "E_NO_INITIAL",
    Type => "E_TYPE",
    MachineMismatch => "E_MACHINE_MISMATCH",
    AlreadyEntered => "E_ALREADY_ENTERED",
    NotRunning => "E_NOT_RUNNING",
    MicrostepLimit => "E_MICROSTEP_LIMIT",
    NameCollision => "E_NAME_COLLISION",
    Identifier => "E_IDENTIFIER",
    Range => "E_RANGE",
    Signature => "E_SIGNATURE",
    UnknownFunction => "E_UNKNOWN_FUNCTION",
    BadCount => "E_BAD_COUNT",
    RegionUnderflow => "E_REGION_UNDERFLOW",
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for DiagCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for DiagCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        DiagCode::parse(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown diagnostic code `{text}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<Span>,
}

impl Diagnostic {
    pub fn new(code: DiagCode, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            span: None,
        }
    }

    pub fn at(code: DiagCode, message: impl Into<String>, loc: impl Into<Loc>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            span: loc.into().0,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(span) => write!(f, "{span}: {}: {}", self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

impl std::error::Error for Diagnostic {}

/// Renders a diagnostic list one per line, prefixed by `origin`.
pub fn render_all(origin: &str, diags: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diags {
        out.push_str(origin);
        out.push(':');
        out.push_str(&d.to_string());
        out.push('\n');
    }
    out
}
