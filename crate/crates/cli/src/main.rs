//! `statetest`: validate statecharts, run scenarios, generate C and serve the
//! simulation API.
//!
//! Exit statuses: 0 success or PASS, 1 scenario FAIL, 2 usage error or
//! unreadable input, 3 diagnostics, 4 runtime fault or output I/O error.

mod repl;

use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use statetest_core::diag::render_all;
use statetest_core::doubles::{generate_shims, parse_double_specs};
use statetest_core::syntax::scenario_from_lists;
use statetest_core::{
    bind, generate_machine, generate_test, load_model, parse_scenario, run_scenario, BoundScenario,
    Diagnostic, GeneratedArtifact, SourceText, TestFlavor, ValidatedModel, Verdict,
};

#[derive(Parser)]
#[command(
    name = "statetest",
    version,
    about = "Statechart-driven tests for embedded C"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model.
    Validate {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a scenario against the simulator.
    Run {
        model: PathBuf,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Step a model interactively from stdin.
    Repl { model: PathBuf },
    /// Generate C artifacts.
    Gen {
        #[command(subcommand)]
        target: GenTarget,
    },
    /// Serve the simulation API over HTTP on 127.0.0.1.
    Serve {
        #[arg(long, env = "STATETEST_PORT", default_value_t = statetest_service::DEFAULT_PORT)]
        port: u16,
        /// Directory with the built web UI, served as static files.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenTarget {
    /// The state machine: `src-gen/<P>.h`, `src-gen/<P>.c` and `src-gen/sc_types.h`.
    Sm {
        model: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// A test replaying a scenario against the generated machine.
    Test {
        model: PathBuf,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = Flavor::Gtest)]
        flavor: Flavor,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Link-time wrappers from a `<unit>.doubles.json` file.
    Doubles {
        spec: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

/// Either a scenario file or the three comma-separated lists.
#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, conflicts_with_all = ["expectations", "variables", "inputs"])]
    scenario: Option<PathBuf>,
    /// Expected states, e.g. `State2,State3,__final__`.
    #[arg(long, requires_all = ["variables", "inputs"])]
    expectations: Option<String>,
    #[arg(long, requires_all = ["expectations", "inputs"])]
    variables: Option<String>,
    #[arg(long, requires_all = ["expectations", "variables"])]
    inputs: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Flavor {
    Gtest,
    Minimal,
}

impl From<Flavor> for TestFlavor {
    fn from(f: Flavor) -> Self {
        match f {
            Flavor::Gtest => TestFlavor::Gtest,
            Flavor::Minimal => TestFlavor::Minimal,
        }
    }
}

pub(crate) const EXIT_FAIL: u8 = 1;
pub(crate) const EXIT_USAGE: u8 = 2;
pub(crate) const EXIT_DIAGNOSTICS: u8 = 3;
pub(crate) const EXIT_RUNTIME: u8 = 4;

/// An early exit: what to print on stderr and the status to return.
struct Failure {
    status: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            status: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            status: EXIT_RUNTIME,
            message: message.into(),
        }
    }

    fn diagnostics(origin: &Path, diags: &[Diagnostic]) -> Self {
        Failure {
            status: EXIT_DIAGNOSTICS,
            message: render_all(&origin.display().to_string(), diags),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate { model, format } => validate(&model, format),
        Command::Run {
            model,
            scenario,
            format,
        } => run(&model, &scenario, format),
        Command::Repl { model } => read_model(&model).and_then(|m| {
            let stdin = io::stdin();
            let prompt = stdin.is_terminal();
            repl::run(m, stdin.lock(), io::stdout().lock(), prompt)
                .map_err(|e| Failure::runtime(e.to_string()))
        }),
        Command::Gen { target } => generate(target),
        Command::Serve { port, ui_dir } => serve(port, ui_dir),
    };
    match outcome {
        Ok(status) => ExitCode::from(status),
        Err(failure) => {
            let message = failure.message.trim_end();
            if !message.is_empty() {
                eprintln!("{message}");
            }
            ExitCode::from(failure.status)
        }
    }
}

fn read_source(path: &Path) -> Result<SourceText, Failure> {
    SourceText::read(path)
        .map(|s| s.with_origin(path))
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn read_model(path: &Path) -> Result<ValidatedModel, Failure> {
    load_model(&read_source(path)?).map_err(|d| Failure::diagnostics(path, &d))
}

fn validate(path: &Path, format: Format) -> Outcome {
    let source = read_source(path)?;
    let diags = load_model(&source).err().unwrap_or_default();
    match format {
        Format::Json => println!(
            "{}",
            serde_json::json!({ "valid": diags.is_empty(), "diagnostics": diags })
        ),
        Format::Text if diags.is_empty() => println!("{}: ok", path.display()),
        Format::Text => eprint!("{}", render_all(&path.display().to_string(), &diags)),
    }
    Ok(if diags.is_empty() {
        0
    } else {
        EXIT_DIAGNOSTICS
    })
}

fn bound_scenario(model_path: &Path, args: &ScenarioArgs) -> Result<BoundScenario, Failure> {
    let model = read_model(model_path)?;
    let (scenario, origin) = match (&args.scenario, &args.expectations) {
        (Some(path), _) => {
            let scenario =
                parse_scenario(&read_source(path)?).map_err(|d| Failure::diagnostics(path, &d))?;
            (scenario, path.clone())
        }
        (None, Some(expectations)) => {
            let scenario = scenario_from_lists(
                &model.name,
                expectations,
                args.variables.as_deref().unwrap_or_default(),
                args.inputs.as_deref().unwrap_or_default(),
            )
            .map_err(|d| Failure::diagnostics(Path::new("<arguments>"), &d))?;
            (scenario, PathBuf::from("<arguments>"))
        }
        (None, None) => {
            return Err(Failure::usage(
                "give --scenario <file> or --expectations, --variables and --inputs",
            ))
        }
    };
    bind(&scenario, &model).map_err(|d| Failure::diagnostics(&origin, &d))
}

fn run(model_path: &Path, args: &ScenarioArgs, format: Format) -> Outcome {
    let bound = bound_scenario(model_path, args)?;
    let report = run_scenario(&bound);
    match format {
        Format::Text => print!("{}", report.render_text()),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
    }
    Ok(match report.verdict {
        Verdict::Pass => 0,
        Verdict::Fail { .. } => EXIT_FAIL,
        Verdict::Error { .. } => EXIT_RUNTIME,
    })
}

fn generate(target: GenTarget) -> Outcome {
    let (artifacts, out) = match target {
        GenTarget::Sm { model, out } => {
            let model_value = read_model(&model)?;
            let artifacts = generate_machine(&model_value)
                .map_err(|e| Failure::diagnostics(&model, &[e.to_diagnostic()]))?;
            (artifacts, out)
        }
        GenTarget::Test {
            model,
            scenario,
            flavor,
            out,
        } => {
            let bound = bound_scenario(&model, &scenario)?;
            let artifacts = generate_test(bound.model(), &bound, flavor.into())
                .map_err(|e| Failure::diagnostics(&model, &[e.to_diagnostic()]))?;
            (vec![artifacts], out)
        }
        GenTarget::Doubles { spec, out } => {
            let unit = doubles_unit(&spec)?;
            let specs = parse_double_specs(&read_source(&spec)?)
                .map_err(|d| Failure::diagnostics(&spec, &d))?;
            let artifacts = generate_shims(&unit, &specs)
                .map_err(|e| Failure::diagnostics(&spec, &[e.to_diagnostic()]))?;
            (artifacts, out)
        }
    };
    write_all(&artifacts, &out)
}

/// `alloc.doubles.json` names the unit `alloc`.
fn doubles_unit(spec: &Path) -> Result<String, Failure> {
    let name = spec
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Failure::usage(format!("{} has no file name", spec.display())))?;
    let stem = name.strip_suffix(".json").unwrap_or(name);
    Ok(stem.strip_suffix(".doubles").unwrap_or(stem).to_string())
}

fn write_all(artifacts: &[GeneratedArtifact], out: &Path) -> Outcome {
    let mut stdout = io::stdout().lock();
    for artifact in artifacts {
        let path = artifact.write_under(out).map_err(|e| {
            Failure::runtime(format!(
                "cannot write {}: {e}",
                out.join(&artifact.path).display()
            ))
        })?;
        writeln!(stdout, "{}", path.display()).map_err(|e| Failure::runtime(e.to_string()))?;
    }
    Ok(0)
}

fn serve(port: u16, ui_dir: Option<PathBuf>) -> Outcome {
    if let Some(dir) = &ui_dir {
        if !dir.is_dir() {
            return Err(Failure::usage(format!(
                "{} is not a directory",
                dir.display()
            )));
        }
    }
    let config = statetest_service::ServiceConfig {
        ui_dir,
        ..Default::default()
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::runtime(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
            .await
            .map_err(|e| Failure::runtime(format!("cannot bind port {port}: {e}")))?;
        let addr = listener
            .local_addr()
            .map_err(|e| Failure::runtime(e.to_string()))?;
        println!("listening on http://{addr}");
        io::stdout().flush().ok();
        let shutdown = async {
            tokio::signal::ctrl_c().await.ok();
        };
        statetest_service::serve(listener, &config, shutdown)
            .await
            .map_err(|e| Failure::runtime(e.to_string()))?;
        println!("shut down");
        Ok(0)
    })
}
