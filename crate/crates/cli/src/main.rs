mod problem;
mod run;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use problem::{ProblemFile, VERSION};
use run::{dispatch, CliError, Settings};

#[derive(Parser)]
#[command(name = "cpmackey", version, about = "Exact computations with C_p-Mackey and Green functors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mackey and Green axioms for a list of functors
    Validate(Flags),
    /// Box product with generator provenance, and box-product laws on a corpus
    Box(Flags),
    /// Green functor axioms and commutativity
    GreenCheck(Flags),
    /// Mackey field detection with a witness ideal
    FieldCheck(Flags),
    /// Shape of a Mackey field
    Classify(Flags),
    /// Homotopy Mackey functors of the Eilenberg-Mac Lane spectrum of a field
    EmHomotopy(Flags),
    /// Search for graded ideals of a field's homotopy on a window
    GradedFieldWindow(Flags),
    /// Simplicial circle models: census, subdivision, p-circle, fold, pinch, counit
    Circle(Flags),
    /// Twisted Hochschild homology from the cyclic bar complex
    Hh(Flags),
    /// Tor from the two-sided bar complex
    Tor(Flags),
    /// E2 page for a polynomial tower with the Koszul comparison
    E2(Flags),
    /// Bidegree and Leibniz checks for a candidate differential
    Leibniz(Flags),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Table,
}

#[derive(clap::Args)]
struct Flags {
    /// Problem file (JSON)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Problem file, as an alternative to --input
    #[arg(value_name = "FILE")]
    file: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Upper bound on generators of any presentation
    #[arg(long, value_name = "N")]
    limit_generators: Option<usize>,
    /// Degree window, e.g. "a=-2..2,m=-2..2"
    #[arg(long, value_name = "SPEC")]
    window: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::Validate(f) => ("validate", f),
            Command::Box(f) => ("box", f),
            Command::GreenCheck(f) => ("green-check", f),
            Command::FieldCheck(f) => ("field-check", f),
            Command::Classify(f) => ("classify", f),
            Command::EmHomotopy(f) => ("em-homotopy", f),
            Command::GradedFieldWindow(f) => ("graded-field-window", f),
            Command::Circle(f) => ("circle", f),
            Command::Hh(f) => ("hh", f),
            Command::Tor(f) => ("tor", f),
            Command::E2(f) => ("e2", f),
            Command::Leibniz(f) => ("leibniz", f),
        }
    }
}

fn load(command: &str, flags: &Flags) -> Result<(ProblemFile, Settings), CliError> {
    let path = flags.input.as_ref().or(flags.file.as_ref()).ok_or_else(|| CliError::Schema {
        pointer: String::new(),
        message: "no problem file given (use --input FILE)".into(),
    })?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Schema { pointer: String::new(), message: format!("cannot read {}: {e}", path.display()) })?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Schema { pointer: String::new(), message: format!("not JSON: {e}") })?;
    let file: ProblemFile = run::parse(&raw, "")?;
    if file.version != VERSION {
        return Err(CliError::Schema { pointer: "/version".into(), message: format!("unsupported version {}", file.version) });
    }
    if file.command != command {
        return Err(CliError::Schema {
            pointer: "/command".into(),
            message: format!("file is for {:?}, invoked as {command:?}", file.command),
        });
    }
    let settings = Settings {
        limit: flags.limit_generators.or(file.limits.generators).unwrap_or_else(run::default_limit),
        window: flags.window.clone().or_else(|| file.limits.window.clone()),
    };
    Ok((file, settings))
}

fn emit(flags: &Flags, text: &str) -> Result<(), String> {
    match &flags.output {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = cli.command.parts();
    let result = load(command, flags).and_then(|(file, settings)| dispatch(command, &file.payload, &settings));
    match result {
        Ok(report) => {
            let body = match flags.format {
                Format::Json => {
                    let mut v = json!({"command": command, "success": report.success});
                    v["report"] = report.json;
                    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
                }
                Format::Table => report.table,
            };
            if let Err(e) = emit(flags, &body) {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if report.success { 0 } else { 1 })
        }
        Err(e) => {
            let body = serde_json::to_string_pretty(&e.to_json()).expect("serializable") + "\n";
            eprint!("{body}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
