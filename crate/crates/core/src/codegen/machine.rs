//! C99 implementation of a validated machine: `src-gen/<P>.h` and
//! `src-gen/<P>.c`. The run-to-completion loop mirrors [`crate::sim`]: the
//! first enabled transition in declaration order wins, a raised event is seen
//! by the first micro-step only, and exceeding the micro-step limit faults
//! the machine.

use std::fmt::Write;

use crate::model::{Expr, StateRef, Transition, Trigger, ValidatedModel, Value, VarType};
use crate::sim::DEFAULT_MICROSTEP_LIMIT;

use super::{banner, c_int, CodegenError, NamingScheme};

pub(crate) fn header(model: &ValidatedModel, n: &NamingScheme) -> String {
    let mut out = banner();
    let guard = n.guard_macro();
    let p = n.handle_type();
    writeln!(out, "#ifndef {guard}").unwrap();
    writeln!(out, "#define {guard}").unwrap();
    out.push_str("\n#include \"sc_types.h\"\n\n");
    out.push_str("#ifdef __cplusplus\nextern \"C\" {\n#endif\n\n");

    out.push_str(
        "/* Transitions taken while processing one stimulus before the machine faults. */\n",
    );
    writeln!(
        out,
        "#define {} {}\n",
        n.limit_macro(),
        DEFAULT_MICROSTEP_LIMIT
    )
    .unwrap();

    let mut constants: Vec<String> = model
        .states
        .iter()
        .map(|s| n.state_const(&StateRef::state(&s.name)))
        .collect();
    constants.push(n.state_const(&StateRef::Final));
    write_enum(&mut out, &n.states_enum(), &constants);

    let statuses: Vec<String> = ["ready", "running", "finalized", "faulted"]
        .iter()
        .map(|s| n.status_const(s))
        .collect();
    write_enum(&mut out, &n.status_enum(), &statuses);

    if !model.variables.is_empty() {
        out.push_str("typedef struct\n{\n");
        for var in &model.variables {
            writeln!(out, "    {} {};", c_type(var.vtype), var.name).unwrap();
        }
        writeln!(out, "}} {};\n", n.iface_type()).unwrap();
    }

    out.push_str("typedef struct\n{\n");
    writeln!(out, "    {} active;", n.states_enum()).unwrap();
    writeln!(out, "    {} status;", n.status_enum()).unwrap();
    if !model.variables.is_empty() {
        writeln!(out, "    {} iface;", n.iface_type()).unwrap();
    }
    writeln!(out, "}} {p};\n").unwrap();

    writeln!(out, "void {}({p}* handle);", n.init()).unwrap();
    writeln!(out, "void {}({p}* handle);", n.enter()).unwrap();
    writeln!(
        out,
        "sc_boolean {}(const {p}* handle, {} state);",
        n.is_active(),
        n.states_enum()
    )
    .unwrap();
    writeln!(out, "sc_boolean {}(const {p}* handle);", n.is_final()).unwrap();
    writeln!(out, "sc_boolean {}(const {p}* handle);", n.is_faulted()).unwrap();
    if !model.variables.is_empty() {
        out.push('\n');
    }
    for var in &model.variables {
        let ty = c_type(var.vtype);
        writeln!(
            out,
            "void {}({p}* handle, {ty} value);",
            n.setter(&var.name)
        )
        .unwrap();
        writeln!(out, "{ty} {}(const {p}* handle);", n.getter(&var.name)).unwrap();
    }
    if !model.events.is_empty() {
        out.push('\n');
    }
    for event in &model.events {
        writeln!(out, "void {}({p}* handle);", n.raiser(&event.name)).unwrap();
    }

    out.push_str("\n#ifdef __cplusplus\n}\n#endif\n\n");
    writeln!(out, "#endif /* {guard} */").unwrap();
    out
}

pub(crate) fn source(model: &ValidatedModel, n: &NamingScheme) -> Result<String, CodegenError> {
    check_ranges(model)?;
    let p = n.handle_type();
    let states = n.states_enum();
    let mut out = banner();
    writeln!(out, "#include \"{p}.h\"\n").unwrap();

    // take
    writeln!(
        out,
        "static void {}({p}* handle, {states} target)\n{{",
        n.take_fn()
    )
    .unwrap();
    out.push_str("    handle->active = target;\n");
    writeln!(
        out,
        "    if (target == {})\n    {{",
        n.state_const(&StateRef::Final)
    )
    .unwrap();
    writeln!(
        out,
        "        handle->status = {};",
        n.status_const("finalized")
    )
    .unwrap();
    out.push_str("    }\n}\n\n");

    // select: first enabled eventless transition of the active state
    writeln!(
        out,
        "static sc_boolean {}(const {p}* handle, {states}* target)\n{{",
        n.select_fn()
    )
    .unwrap();
    let eventless = |t: &&Transition| t.trigger == Trigger::None;
    if model.transitions().any(|t| eventless(&t)) {
        out.push_str("    switch (handle->active)\n    {\n");
        for state in &model.states {
            let transitions: Vec<&Transition> =
                state.transitions.iter().filter(eventless).collect();
            if transitions.is_empty() {
                continue;
            }
            writeln!(
                out,
                "    case {}:",
                n.state_const(&StateRef::state(&state.name))
            )
            .unwrap();
            let closed = write_candidates(&mut out, &transitions, |t| {
                vec![
                    format!("*target = {};", n.state_const(&t.target)),
                    "return true;".to_string(),
                ]
            });
            if !closed {
                out.push_str("        break;\n");
            }
        }
        out.push_str("    default:\n        break;\n    }\n    return false;\n}\n\n");
    } else {
        out.push_str("    (void)handle;\n    (void)target;\n    return false;\n}\n\n");
    }

    // complete: eventless micro-steps until quiescent
    writeln!(
        out,
        "static void {}({p}* handle, sc_integer steps)\n{{",
        n.complete_fn()
    )
    .unwrap();
    writeln!(out, "    {states} target = handle->active;").unwrap();
    writeln!(
        out,
        "    while (handle->status == {} && {}(handle, &target))\n    {{",
        n.status_const("running"),
        n.select_fn()
    )
    .unwrap();
    writeln!(out, "        if (steps == {})\n        {{", n.limit_macro()).unwrap();
    writeln!(
        out,
        "            handle->status = {};",
        n.status_const("faulted")
    )
    .unwrap();
    out.push_str("            return;\n        }\n");
    writeln!(out, "        {}(handle, target);", n.take_fn()).unwrap();
    out.push_str("        steps++;\n    }\n}\n\n");

    let initial = n.state_const(&StateRef::state(model.initial_target()));

    writeln!(out, "void {}({p}* handle)\n{{", n.init()).unwrap();
    writeln!(out, "    handle->active = {initial};").unwrap();
    writeln!(out, "    handle->status = {};", n.status_const("ready")).unwrap();
    write_defaults(&mut out, model);
    out.push_str("}\n\n");

    writeln!(out, "void {}({p}* handle)\n{{", n.enter()).unwrap();
    writeln!(
        out,
        "    if (handle->status != {})\n    {{",
        n.status_const("ready")
    )
    .unwrap();
    out.push_str("        return;\n    }\n");
    write_defaults(&mut out, model);
    writeln!(out, "    handle->active = {initial};").unwrap();
    writeln!(out, "    handle->status = {};", n.status_const("running")).unwrap();
    writeln!(out, "    {}(handle, 0);", n.complete_fn()).unwrap();
    out.push_str("}\n\n");

    writeln!(
        out,
        "sc_boolean {}(const {p}* handle, {states} state)\n{{",
        n.is_active()
    )
    .unwrap();
    writeln!(
        out,
        "    return handle->status != {} && handle->active == state;\n}}\n",
        n.status_const("ready")
    )
    .unwrap();

    writeln!(out, "sc_boolean {}(const {p}* handle)\n{{", n.is_final()).unwrap();
    writeln!(
        out,
        "    return handle->status == {};\n}}\n",
        n.status_const("finalized")
    )
    .unwrap();

    writeln!(out, "sc_boolean {}(const {p}* handle)\n{{", n.is_faulted()).unwrap();
    writeln!(
        out,
        "    return handle->status == {};\n}}\n",
        n.status_const("faulted")
    )
    .unwrap();

    for var in &model.variables {
        let ty = c_type(var.vtype);
        writeln!(
            out,
            "void {}({p}* handle, {ty} value)\n{{",
            n.setter(&var.name)
        )
        .unwrap();
        writeln!(
            out,
            "    if (handle->status != {})\n    {{",
            n.status_const("running")
        )
        .unwrap();
        out.push_str("        return;\n    }\n");
        writeln!(out, "    handle->iface.{} = value;", var.name).unwrap();
        writeln!(out, "    {}(handle, 0);\n}}\n", n.complete_fn()).unwrap();

        writeln!(out, "{ty} {}(const {p}* handle)\n{{", n.getter(&var.name)).unwrap();
        writeln!(out, "    return handle->iface.{};\n}}\n", var.name).unwrap();
    }

    for event in &model.events {
        writeln!(out, "void {}({p}* handle)\n{{", n.raiser(&event.name)).unwrap();
        writeln!(
            out,
            "    if (handle->status != {})\n    {{",
            n.status_const("running")
        )
        .unwrap();
        out.push_str("        return;\n    }\n");
        let triggered = |t: &&Transition| t.trigger == Trigger::Event(event.name.clone());
        if model.transitions().any(|t| triggered(&t)) {
            out.push_str("    switch (handle->active)\n    {\n");
            for state in &model.states {
                let transitions: Vec<&Transition> =
                    state.transitions.iter().filter(triggered).collect();
                if transitions.is_empty() {
                    continue;
                }
                writeln!(
                    out,
                    "    case {}:",
                    n.state_const(&StateRef::state(&state.name))
                )
                .unwrap();
                let closed = write_candidates(&mut out, &transitions, |t| {
                    vec![
                        format!("{}(handle, {});", n.take_fn(), n.state_const(&t.target)),
                        format!("{}(handle, 1);", n.complete_fn()),
                        "return;".to_string(),
                    ]
                });
                if !closed {
                    out.push_str("        break;\n");
                }
            }
            out.push_str("    default:\n        break;\n    }\n");
        }
        out.push_str("}\n\n");
    }

    // exactly one trailing newline
    while out.ends_with("\n\n") {
        out.pop();
    }
    Ok(out)
}

/// Emits the candidates of one `case` in declaration order. Returns true when
/// an unguarded candidate made the rest of the case unreachable.
fn write_candidates(
    out: &mut String,
    transitions: &[&Transition],
    body: impl Fn(&Transition) -> Vec<String>,
) -> bool {
    for t in transitions {
        match &t.guard {
            Some(guard) => {
                writeln!(out, "        if ({})\n        {{", c_expr(guard)).unwrap();
                for line in body(t) {
                    writeln!(out, "            {line}").unwrap();
                }
                out.push_str("        }\n");
            }
            None => {
                for line in body(t) {
                    writeln!(out, "        {line}").unwrap();
                }
                return true;
            }
        }
    }
    false
}

fn write_defaults(out: &mut String, model: &ValidatedModel) {
    for var in &model.variables {
        writeln!(
            out,
            "    handle->iface.{} = {};",
            var.name,
            c_value(var.default)
        )
        .unwrap();
    }
}

fn write_enum(out: &mut String, name: &str, constants: &[String]) {
    out.push_str("typedef enum\n{\n");
    for (i, c) in constants.iter().enumerate() {
        let sep = if i + 1 == constants.len() { "" } else { "," };
        writeln!(out, "    {c}{sep}").unwrap();
    }
    writeln!(out, "}} {name};\n").unwrap();
}

fn c_type(vtype: VarType) -> &'static str {
    match vtype {
        VarType::Int => "sc_integer",
        VarType::Bool => "sc_boolean",
    }
}

pub(crate) fn c_value(value: Value) -> String {
    match value {
        Value::Int(v) => c_int(v),
        Value::Bool(v) => v.to_string(),
    }
}

fn c_expr(expr: &Expr) -> String {
    match expr {
        Expr::Int(v) => c_int(*v),
        Expr::Bool(v) => v.to_string(),
        Expr::Var(name) => format!("handle->iface.{name}"),
        Expr::Compare { op, lhs, rhs } => {
            format!("{} {} {}", c_operand(lhs), op.symbol(), c_operand(rhs))
        }
        Expr::Logic { op, lhs, rhs } => {
            format!("{} {} {}", c_operand(lhs), op.symbol(), c_operand(rhs))
        }
        Expr::Not(operand) => format!("!{}", c_operand(operand)),
    }
}

fn c_operand(expr: &Expr) -> String {
    match expr {
        Expr::Bool(_) | Expr::Var(_) => c_expr(expr),
        Expr::Int(v) if *v >= 0 => c_expr(expr),
        _ => format!("({})", c_expr(expr)),
    }
}

fn check_ranges(model: &ValidatedModel) -> Result<(), CodegenError> {
    let fits = |v: i64| i32::try_from(v).is_ok();
    for var in &model.variables {
        if let Value::Int(v) = var.default {
            if !fits(v) {
                return Err(CodegenError::Range {
                    value: v,
                    context: format!("default of `{}`", var.name),
                });
            }
        }
    }
    for t in model.transitions() {
        let mut bad = None;
        if let Some(guard) = &t.guard {
            visit_ints(guard, &mut |v| {
                if !fits(v) && bad.is_none() {
                    bad = Some(v);
                }
            });
        }
        if let Some(value) = bad {
            return Err(CodegenError::Range {
                value,
                context: format!("guard of transition {} from `{}`", t.decl_index, t.source),
            });
        }
    }
    Ok(())
}

fn visit_ints(expr: &Expr, f: &mut impl FnMut(i64)) {
    match expr {
        Expr::Int(v) => f(*v),
        Expr::Bool(_) | Expr::Var(_) => {}
        Expr::Compare { lhs, rhs, .. } | Expr::Logic { lhs, rhs, .. } => {
            visit_ints(lhs, f);
            visit_ints(rhs, f);
        }
        Expr::Not(operand) => visit_ints(operand, f),
    }
}
