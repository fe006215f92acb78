use std::collections::BTreeMap;

use crate::model::{is_identifier, StateRef, ValidatedModel};

use super::CodegenError;

/// Keywords of C99 and C++ (the header is also included from C++ tests).
pub(crate) const C_KEYWORDS: &[&str] = &[
    "auto",
    "break",
    "case",
    "char",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extern",
    "float",
    "for",
    "goto",
    "if",
    "inline",
    "int",
    "long",
    "register",
    "restrict",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "struct",
    "switch",
    "typedef",
    "union",
    "unsigned",
    "void",
    "volatile",
    "while",
    "_Bool",
    "_Complex",
    "_Imaginary",
    "alignas",
    "alignof",
    "and",
    "and_eq",
    "asm",
    "bitand",
    "bitor",
    "bool",
    "catch",
    "class",
    "compl",
    "constexpr",
    "const_cast",
    "decltype",
    "delete",
    "dynamic_cast",
    "explicit",
    "export",
    "false",
    "friend",
    "mutable",
    "namespace",
    "new",
    "noexcept",
    "not",
    "not_eq",
    "nullptr",
    "operator",
    "or",
    "or_eq",
    "private",
    "protected",
    "public",
    "reinterpret_cast",
    "static_assert",
    "static_cast",
    "template",
    "this",
    "thread_local",
    "throw",
    "true",
    "try",
    "typeid",
    "typename",
    "using",
    "virtual",
    "wchar_t",
    "xor",
    "xor_eq",
];

/// Identifiers the generated machine code relies on besides its own names.
pub(crate) const SUPPORT_NAMES: &[&str] = &[
    "sc_integer",
    "sc_boolean",
    "int32_t",
    "int64_t",
    "uint32_t",
    "uint8_t",
    "bool",
    "true",
    "false",
    "NULL",
];

/// Field and parameter names used inside generated functions.
pub(crate) const LOCAL_NAMES: &[&str] = &[
    "handle", "state", "target", "steps", "value", "active", "status", "iface",
];

/// Every C name derived from a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamingScheme {
    /// Lower-cased machine name, e.g. `sm`.
    pub prefix: String,
    /// Capitalized machine name, e.g. `Sm`; also the handle type.
    pub type_name: String,
    pub region: String,
}

impl NamingScheme {
    pub fn new(model: &ValidatedModel) -> Result<NamingScheme, CodegenError> {
        let name = &model.name;
        let mut chars = name.chars();
        let type_name = match chars.next() {
            Some(first) => first.to_ascii_uppercase().to_string() + chars.as_str(),
            None => String::new(),
        };
        let scheme = NamingScheme {
            prefix: name.to_ascii_lowercase(),
            type_name,
            region: "main_region".to_string(),
        };

        let element_names = std::iter::once(name)
            .chain(model.states.iter().map(|s| &s.name))
            .chain(model.variables.iter().map(|v| &v.name))
            .chain(model.events.iter().map(|e| &e.name));
        for element in element_names {
            if C_KEYWORDS.contains(&element.as_str()) || !is_identifier(element) {
                return Err(CodegenError::Identifier(element.clone()));
            }
        }

        scheme.check_collisions(model)?;
        Ok(scheme)
    }

    pub fn handle_type(&self) -> &str {
        &self.type_name
    }

    pub fn states_enum(&self) -> String {
        format!("{}States", self.type_name)
    }

    pub fn status_enum(&self) -> String {
        format!("{}Status", self.type_name)
    }

    pub fn iface_type(&self) -> String {
        format!("{}Iface{}", self.type_name, self.type_name)
    }

    pub fn init(&self) -> String {
        format!("{}_init", self.prefix)
    }

    pub fn enter(&self) -> String {
        format!("{}_enter", self.prefix)
    }

    pub fn is_active(&self) -> String {
        format!("{}_isActive", self.prefix)
    }

    pub fn is_final(&self) -> String {
        format!("{}_isFinal", self.prefix)
    }

    pub fn is_faulted(&self) -> String {
        format!("{}_isFaulted", self.prefix)
    }

    fn iface_fn(&self, verb: &str, name: &str) -> String {
        format!("{}Iface{}_{verb}_{name}", self.prefix, self.type_name)
    }

    pub fn setter(&self, var: &str) -> String {
        self.iface_fn("set", var)
    }

    pub fn getter(&self, var: &str) -> String {
        self.iface_fn("get", var)
    }

    pub fn raiser(&self, event: &str) -> String {
        self.iface_fn("raise", event)
    }

    pub fn state_const(&self, state: &StateRef) -> String {
        match state {
            StateRef::State(name) => format!("{}_{}_{}", self.prefix, self.region, name),
            StateRef::Final => format!("{}_{}__final_", self.prefix, self.region),
        }
    }

    /// Maps a state constant back to its designator.
    pub fn state_from_const(&self, constant: &str) -> Option<StateRef> {
        let rest = constant.strip_prefix(&format!("{}_{}_", self.prefix, self.region))?;
        if rest == "_final_" {
            Some(StateRef::Final)
        } else if rest.is_empty() {
            None
        } else {
            Some(StateRef::state(rest))
        }
    }

    pub fn status_const(&self, status: &str) -> String {
        format!("{}_status_{status}", self.prefix)
    }

    pub fn limit_macro(&self) -> String {
        format!("{}_MICROSTEP_LIMIT", self.prefix.to_ascii_uppercase())
    }

    pub fn guard_macro(&self) -> String {
        format!("{}_H_", self.prefix.to_ascii_uppercase())
    }

    pub(crate) fn select_fn(&self) -> String {
        format!("{}_select", self.prefix)
    }

    pub(crate) fn take_fn(&self) -> String {
        format!("{}_take", self.prefix)
    }

    pub(crate) fn complete_fn(&self) -> String {
        format!("{}_complete", self.prefix)
    }

    /// Every file-scope name the generated machine declares, with its origin.
    pub fn global_names(&self, model: &ValidatedModel) -> Vec<(String, String)> {
        let mut names = vec![
            (self.handle_type().to_string(), "handle type".to_string()),
            (self.states_enum(), "states enum".to_string()),
            (self.status_enum(), "status enum".to_string()),
            (self.init(), "init function".to_string()),
            (self.enter(), "enter function".to_string()),
            (self.is_active(), "isActive function".to_string()),
            (self.is_final(), "isFinal function".to_string()),
            (self.is_faulted(), "isFaulted function".to_string()),
            (self.select_fn(), "internal function".to_string()),
            (self.take_fn(), "internal function".to_string()),
            (self.complete_fn(), "internal function".to_string()),
            (self.limit_macro(), "micro-step limit macro".to_string()),
            (self.guard_macro(), "include guard".to_string()),
            (
                self.state_const(&StateRef::Final),
                "final state".to_string(),
            ),
        ];
        if !model.variables.is_empty() {
            names.push((self.iface_type(), "interface struct".to_string()));
        }
        for status in ["ready", "running", "finalized", "faulted"] {
            names.push((self.status_const(status), "status constant".to_string()));
        }
        for state in &model.states {
            names.push((
                self.state_const(&StateRef::state(&state.name)),
                format!("state `{}`", state.name),
            ));
        }
        for var in &model.variables {
            names.push((self.setter(&var.name), format!("setter of `{}`", var.name)));
            names.push((self.getter(&var.name), format!("getter of `{}`", var.name)));
        }
        for event in &model.events {
            names.push((
                self.raiser(&event.name),
                format!("raiser of `{}`", event.name),
            ));
        }
        names
    }

    fn check_collisions(&self, model: &ValidatedModel) -> Result<(), CodegenError> {
        let mut seen: BTreeMap<String, String> = SUPPORT_NAMES
            .iter()
            .chain(C_KEYWORDS)
            .map(|n| (n.to_string(), "a reserved C name".to_string()))
            .collect();
        for (name, origin) in self.global_names(model) {
            if let Some(prev) = seen.get(&name) {
                return Err(CodegenError::NameCollision {
                    name,
                    first: prev.clone(),
                    second: origin,
                });
            }
            seen.insert(name, origin);
        }
        Ok(())
    }
}
