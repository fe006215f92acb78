use std::io::{self, BufRead, Write};

use statetest_core::{Session, StateRef, Stimulus, ValidatedModel, Value};

const HELP: &str = "commands: show, set <var> <value>, raise <event>, trace, reset, quit";

/// Reads commands line by line until `quit` or end of input. Errors are
/// reported as `error: ...` lines and leave the session unchanged.
pub(crate) fn run(
    model: ValidatedModel,
    input: impl BufRead,
    mut out: impl Write,
    prompt: bool,
) -> io::Result<u8> {
    let mut session = Session::new(model);
    match session.enter() {
        Ok(_) => writeln!(out, "active: {}", session.active())?,
        Err(e) => writeln!(out, "error: {}", e.to_diagnostic())?,
    }
    let mut lines = input.lines();
    loop {
        if prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        let Some(line) = lines.next() else { break };
        let line = line?;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            ["quit" | "exit"] => break,
            ["help"] => writeln!(out, "{HELP}")?,
            ["show"] => show(&session, &mut out)?,
            ["trace"] => {
                for (i, entry) in session.trace().iter().enumerate() {
                    let path: Vec<String> = entry
                        .taken
                        .iter()
                        .map(|t| format!("{} -> {}", t.source, t.target))
                        .collect();
                    writeln!(
                        out,
                        "{i}: {} => {}{}",
                        describe(&entry.stimulus),
                        entry.resulting_active,
                        if path.is_empty() {
                            String::new()
                        } else {
                            format!(" via {}", path.join(", "))
                        }
                    )?;
                }
            }
            ["reset"] => report(session.reset().map(|_| ()), &session, &mut out)?,
            ["set", name, raw] => match Value::parse(raw) {
                Some(value) => report(
                    session.set_variable(name, value).map(|_| ()),
                    &session,
                    &mut out,
                )?,
                None => writeln!(out, "error: `{raw}` is neither an integer nor true/false")?,
            },
            ["raise", event] => report(session.raise_event(event).map(|_| ()), &session, &mut out)?,
            _ => writeln!(out, "error: unrecognized command `{}`; {HELP}", line.trim())?,
        }
    }
    Ok(0)
}

fn report(
    result: Result<(), statetest_core::SimError>,
    session: &Session,
    out: &mut impl Write,
) -> io::Result<()> {
    match result {
        Ok(()) if session.active() == &StateRef::Final => {
            writeln!(
                out,
                "active: {} ({})",
                session.active(),
                session.status().label()
            )
        }
        Ok(()) => writeln!(out, "active: {}", session.active()),
        Err(e) => writeln!(out, "error: {}", e.to_diagnostic()),
    }
}

fn show(session: &Session, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "active: {}", session.active())?;
    writeln!(out, "status: {}", session.status().label())?;
    for (name, value) in session.env() {
        writeln!(out, "  {name} = {value}")?;
    }
    Ok(())
}

fn describe(stimulus: &Stimulus) -> String {
    match stimulus {
        Stimulus::Enter => "enter".to_string(),
        Stimulus::SetVar { name, value } => format!("set {name} {value}"),
        Stimulus::Raise { name } => format!("raise {name}"),
    }
}
