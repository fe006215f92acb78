//! C wrappers for the `--wrap` linker convention. Calls to `f` in the code
//! under test resolve to `__wrap_f`, which asks the registry whether to run
//! the double body or forward to `__real_f`.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::codegen::{banner, ArtifactKind, GeneratedArtifact, C_KEYWORDS};
use crate::diag::Diagnostic;
use crate::model::is_identifier;
use crate::syntax::{json_error, SourceText};

use super::DoublesError;

/// One entry of a `.doubles.json` file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleSpec {
    /// Name of the real function, e.g. `malloc`.
    pub name: String,
    /// Its C prototype, e.g. `void *malloc(size_t size)`.
    pub signature: String,
    /// Statements run instead of the real function while doubled.
    pub body: String,
}

pub fn parse_double_specs(src: &SourceText) -> Result<Vec<DoubleSpec>, Vec<Diagnostic>> {
    serde_json::from_str(&src.content)
        .map_err(|e| vec![json_error(&e, &src.content, "doubles file")])
}

const API_NAMES: &[&str] = &["set_status", "region_enter", "region_exit"];

struct Prototype<'a> {
    ret: &'a str,
    params: &'a str,
    args: Vec<&'a str>,
}

impl Prototype<'_> {
    fn returns_void(&self) -> bool {
        self.ret == "void"
    }

    fn declare(&self, name: &str) -> String {
        let sep = if self.ret.ends_with('*') { "" } else { " " };
        let params = if self.params.is_empty() {
            "void"
        } else {
            self.params
        };
        format!("{}{sep}{name}({params})", self.ret)
    }
}

#[derive(Debug, PartialEq)]
enum Tok<'a> {
    Ident(&'a str),
    Punct(char),
    Ellipsis,
}

fn tokens(text: &str) -> Result<Vec<(usize, Tok<'_>)>, String> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(&text[start..i])));
        } else if text[i..].starts_with("...") {
            out.push((i, Tok::Ellipsis));
            i += 3;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
        } else if b"()[]*,;".contains(&c) {
            out.push((i, Tok::Punct(c as char)));
            i += 1;
        } else {
            return Err(format!(
                "unexpected character `{}`",
                text[i..].chars().next().unwrap()
            ));
        }
    }
    Ok(out)
}

/// Token-level check of a prototype for `name`. Every parameter must be
/// named so the wrapper can forward it.
fn prototype<'a>(name: &str, signature: &'a str) -> Result<Prototype<'a>, String> {
    let toks = tokens(signature)?;
    let open = toks
        .iter()
        .position(|(_, t)| *t == Tok::Punct('('))
        .ok_or("missing parameter list")?;
    let close = toks
        .iter()
        .rposition(|(_, t)| *t == Tok::Punct(')'))
        .ok_or("missing `)`")?;
    if close < open {
        return Err("unbalanced parentheses".into());
    }
    if toks[close + 1..].iter().any(|(_, t)| *t != Tok::Punct(';')) || toks[close + 1..].len() > 1 {
        return Err("unexpected text after the parameter list".into());
    }
    if open < 2 {
        return Err("expected a return type and a function name".into());
    }
    match toks[open - 1].1 {
        Tok::Ident(n) if n == name => {}
        Tok::Ident(n) => return Err(format!("prototype declares `{n}`, not `{name}`")),
        _ => return Err("expected a function name before `(`".into()),
    }
    if toks[..open - 1]
        .iter()
        .any(|(_, t)| !matches!(t, Tok::Ident(_) | Tok::Punct('*')))
    {
        return Err("unsupported return type".into());
    }

    let name_at = toks[open - 1].0;
    let ret = signature[..name_at].trim_end();
    let params = signature[toks[open].0 + 1..toks[close].0].trim();
    let inner = &toks[open + 1..close];

    let mut args = Vec::new();
    let is_void = matches!(inner, [(_, Tok::Ident("void"))]);
    if !inner.is_empty() && !is_void {
        for param in inner.split(|(_, t)| *t == Tok::Punct(',')) {
            if param.iter().any(|(_, t)| *t == Tok::Ellipsis) {
                return Err("variadic functions cannot be forwarded".into());
            }
            if param
                .iter()
                .any(|(_, t)| matches!(t, Tok::Punct('(' | ')')))
            {
                return Err("function pointer parameters are not supported".into());
            }
            let head = match param.iter().position(|(_, t)| *t == Tok::Punct('[')) {
                Some(bracket) => &param[..bracket],
                None => param,
            };
            match head.split_last() {
                Some(((_, Tok::Ident(arg)), ty))
                    if ty.iter().any(|(_, t)| matches!(t, Tok::Ident(_))) =>
                {
                    args.push(*arg)
                }
                _ => return Err("every parameter needs a type and a name".into()),
            }
        }
    }
    if args.iter().any(|a| C_KEYWORDS.contains(a)) {
        return Err("parameter names must not be C keywords".into());
    }
    Ok(Prototype { ret, params, args })
}

/// Header and source for the wrappers of `specs`, written to
/// `doubles/<unit>_doubles.{h,c}`.
pub fn generate_shims(
    unit: &str,
    specs: &[DoubleSpec],
) -> Result<Vec<GeneratedArtifact>, DoublesError> {
    if !is_identifier(unit) || C_KEYWORDS.contains(&unit) {
        return Err(DoublesError::Signature(format!(
            "`{unit}` cannot be used as a doubles unit name"
        )));
    }
    let mut seen = BTreeSet::new();
    let mut protos = Vec::new();
    for spec in specs {
        if !is_identifier(&spec.name) || C_KEYWORDS.contains(&spec.name.as_str()) {
            return Err(DoublesError::Signature(format!(
                "`{}` is not a C function name",
                spec.name
            )));
        }
        if API_NAMES.contains(&spec.name.as_str()) {
            return Err(DoublesError::NameCollision {
                name: spec.name.clone(),
                detail: "part of the generated doubles interface".into(),
            });
        }
        if !seen.insert(spec.name.as_str()) {
            return Err(DoublesError::NameCollision {
                name: spec.name.clone(),
                detail: "listed twice".into(),
            });
        }
        let proto = prototype(&spec.name, &spec.signature)
            .map_err(|e| DoublesError::Signature(format!("`{}`: {e}", spec.signature)))?;
        protos.push(proto);
    }

    let header_name = format!("{unit}_doubles.h");
    Ok(vec![
        GeneratedArtifact {
            path: format!("doubles/{header_name}"),
            content: header(unit, specs),
            kind: ArtifactKind::DoublesHeader,
        },
        GeneratedArtifact {
            path: format!("doubles/{unit}_doubles.c"),
            content: source(unit, &header_name, specs, &protos),
            kind: ArtifactKind::DoublesSource,
        },
    ])
}

fn header(unit: &str, specs: &[DoubleSpec]) -> String {
    let guard = format!("{}_DOUBLES_H_", unit.to_ascii_uppercase());
    let mut out = banner();
    if !specs.is_empty() {
        let flags: Vec<String> = specs
            .iter()
            .map(|s| format!("-Wl,--wrap={}", s.name))
            .collect();
        writeln!(out, "/* Link with: {} */\n", flags.join(" ")).unwrap();
    }
    writeln!(out, "#ifndef {guard}\n#define {guard}\n").unwrap();
    out.push_str("#ifdef __cplusplus\nextern \"C\" {\n#endif\n\n");
    for (name, value) in [
        ("DOUBLES_OK", 0),
        ("DOUBLES_UNKNOWN_FUNCTION", 1),
        ("DOUBLES_BAD_COUNT", 2),
        ("DOUBLES_REGION_UNDERFLOW", 3),
    ] {
        writeln!(out, "#ifndef {name}\n#define {name} {value}\n#endif").unwrap();
    }
    out.push_str("\ntypedef enum\n{\n");
    for spec in specs {
        writeln!(out, "    _{},", spec.name).unwrap();
    }
    writeln!(out, "    {unit}_double_count\n}} {unit}_double_id;\n").unwrap();
    out.push_str("/* n > 0: double the next n calls; -1: every call; 0: none. */\n");
    writeln!(out, "int set_status({unit}_double_id id, int n);").unwrap();
    writeln!(out, "int region_enter({unit}_double_id id);").unwrap();
    writeln!(out, "int region_exit({unit}_double_id id);").unwrap();
    writeln!(out, "void {unit}_doubles_reset(void);\n").unwrap();
    out.push_str("#ifdef __cplusplus\n}\n#endif\n\n");
    writeln!(out, "#endif /* {guard} */").unwrap();
    out
}

fn source(unit: &str, header_name: &str, specs: &[DoubleSpec], protos: &[Prototype<'_>]) -> String {
    let mut out = banner();
    for sys in ["stddef.h", "stdint.h", "stdbool.h", "stdio.h", "stdlib.h"] {
        writeln!(out, "#include <{sys}>").unwrap();
    }
    writeln!(out, "#include \"{header_name}\"\n").unwrap();

    let id_type = format!("{unit}_double_id");
    let count = format!("{unit}_double_count");
    if specs.is_empty() {
        for f in ["set_status", "region_enter", "region_exit"] {
            let extra = if f == "set_status" { ", int n" } else { "" };
            writeln!(out, "int {f}({id_type} id{extra})\n{{").unwrap();
            out.push_str("    (void)id;\n");
            if f == "set_status" {
                out.push_str("    (void)n;\n");
            }
            out.push_str("    return DOUBLES_UNKNOWN_FUNCTION;\n}\n\n");
        }
        writeln!(out, "void {unit}_doubles_reset(void)\n{{\n}}").unwrap();
        return out;
    }

    let mode = |m: &str| format!("{unit}_mode_{m}");
    let table = format!("{unit}_doubles");
    let consume = format!("{unit}_consume");
    let known = format!("(unsigned)id >= (unsigned){count}");
    writeln!(
        out,
        "typedef enum\n{{\n    {},\n    {},\n    {},\n    {}\n}} {unit}_double_mode;\n",
        mode("off"),
        mode("always"),
        mode("count"),
        mode("region")
    )
    .unwrap();
    out.push_str("/* Not thread-safe: meant for single-threaded test binaries. */\n");
    writeln!(
        out,
        "static struct\n{{\n    {unit}_double_mode mode;\n    long remaining; /* calls under count, depth under region */\n}} {table}[{count}];\n"
    )
    .unwrap();

    writeln!(out, "int set_status({id_type} id, int n)\n{{").unwrap();
    writeln!(
        out,
        "    if ({known}) {{\n        return DOUBLES_UNKNOWN_FUNCTION;\n    }}"
    )
    .unwrap();
    out.push_str("    if (n < -1) {\n        return DOUBLES_BAD_COUNT;\n    }\n");
    writeln!(
        out,
        "    {table}[id].mode = n == -1 ? {} : n == 0 ? {} : {};",
        mode("always"),
        mode("off"),
        mode("count")
    )
    .unwrap();
    writeln!(out, "    {table}[id].remaining = n > 0 ? n : 0;").unwrap();
    out.push_str("    return DOUBLES_OK;\n}\n\n");

    writeln!(out, "int region_enter({id_type} id)\n{{").unwrap();
    writeln!(
        out,
        "    if ({known}) {{\n        return DOUBLES_UNKNOWN_FUNCTION;\n    }}"
    )
    .unwrap();
    writeln!(out, "    if ({table}[id].mode == {}) {{", mode("region")).unwrap();
    writeln!(out, "        {table}[id].remaining++;\n    }} else {{").unwrap();
    writeln!(out, "        {table}[id].mode = {};", mode("region")).unwrap();
    writeln!(out, "        {table}[id].remaining = 1;\n    }}").unwrap();
    out.push_str("    return DOUBLES_OK;\n}\n\n");

    writeln!(out, "int region_exit({id_type} id)\n{{").unwrap();
    writeln!(
        out,
        "    if ({known}) {{\n        return DOUBLES_UNKNOWN_FUNCTION;\n    }}"
    )
    .unwrap();
    writeln!(
        out,
        "    if ({table}[id].mode != {} || {table}[id].remaining == 0) {{",
        mode("region")
    )
    .unwrap();
    out.push_str("        return DOUBLES_REGION_UNDERFLOW;\n    }\n");
    writeln!(out, "    {table}[id].remaining--;").unwrap();
    out.push_str("    return DOUBLES_OK;\n}\n\n");

    writeln!(out, "void {unit}_doubles_reset(void)\n{{").unwrap();
    out.push_str("    size_t i;\n");
    writeln!(out, "    for (i = 0; i < (size_t){count}; i++) {{").unwrap();
    writeln!(out, "        {table}[i].mode = {};", mode("off")).unwrap();
    writeln!(out, "        {table}[i].remaining = 0;\n    }}\n}}\n").unwrap();

    writeln!(out, "static bool {consume}({id_type} id)\n{{").unwrap();
    writeln!(out, "    switch ({table}[id].mode) {{").unwrap();
    writeln!(out, "    case {}:\n        return true;", mode("always")).unwrap();
    writeln!(out, "    case {}:", mode("count")).unwrap();
    writeln!(out, "        if (--{table}[id].remaining == 0) {{").unwrap();
    writeln!(
        out,
        "            {table}[id].mode = {};\n        }}",
        mode("off")
    )
    .unwrap();
    out.push_str("        return true;\n");
    writeln!(
        out,
        "    case {}:\n        return {table}[id].remaining > 0;",
        mode("region")
    )
    .unwrap();
    writeln!(
        out,
        "    case {}:\n    default:\n        return false;\n    }}\n}}",
        mode("off")
    )
    .unwrap();

    for (spec, proto) in specs.iter().zip(protos) {
        let real = format!("__real_{}", spec.name);
        let wrap = format!("__wrap_{}", spec.name);
        writeln!(out, "\n{};", proto.declare(&real)).unwrap();
        writeln!(out, "{};\n", proto.declare(&wrap)).unwrap();
        writeln!(out, "{}\n{{", proto.declare(&wrap)).unwrap();
        writeln!(out, "    if ({consume}(_{})) {{", spec.name).unwrap();
        for line in spec.body.trim().lines() {
            let line = line.trim_end();
            if line.is_empty() {
                out.push('\n');
            } else {
                writeln!(out, "        {line}").unwrap();
            }
        }
        out.push_str("    } else {\n");
        let call = format!("{real}({})", proto.args.join(", "));
        if proto.returns_void() {
            writeln!(out, "        {call};").unwrap();
        } else {
            writeln!(out, "        return {call};").unwrap();
        }
        out.push_str("    }\n}\n");
    }
    out
}
