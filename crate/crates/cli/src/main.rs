//! Command-line driver: load a document, run the requested checks, print a
//! text, JSON, or LaTeX-valued report.
//!
//! ```text
//! jetreduce <command> <file> [--format=text|json|latex] [--tol=FLOAT]
//!           [--jet-order=INT] [--seed=INT]
//! ```
//!
//! Commands: `el`, `symmetry`, `verify-momap`, `zero-locus`, `selftest`.
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error,
//! 3 internal verification failure.

mod commands;
mod report;

use commands::{CommandError, Format, Options};
use std::process::ExitCode;

const USAGE: &str = "usage: jetreduce <command> <file> [--format=text|json|latex] [--tol=FLOAT] [--jet-order=INT] [--seed=INT]
commands:
  el            Euler-Lagrange form, boundary form, premultisymplectic form
  symmetry      Noether / manifest classification and currents
  verify-momap  homotopy momentum map relations and obstruction cross-check
  zero-locus    classify field samples against the homotopy zero locus
  selftest      seeded randomized property suites (no file needed)";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("{message}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &[String]) -> Result<ExitCode, String> {
    let mut command = None;
    let mut file = None;
    let mut opts = Options {
        format: Format::Text,
        tol: None,
        jet_order: None,
        seed: 0,
    };
    for arg in args {
        if let Some(value) = arg.strip_prefix("--format=") {
            opts.format = match value {
                "text" => Format::Text,
                "json" => Format::Json,
                "latex" => Format::Latex,
                other => return Err(format!("unknown format `{other}`\n{USAGE}")),
            };
        } else if let Some(value) = arg.strip_prefix("--tol=") {
            opts.tol =
                Some(value.parse().map_err(|_| format!("bad tolerance `{value}`\n{USAGE}"))?);
        } else if let Some(value) = arg.strip_prefix("--jet-order=") {
            opts.jet_order =
                Some(value.parse().map_err(|_| format!("bad jet order `{value}`\n{USAGE}"))?);
        } else if let Some(value) = arg.strip_prefix("--seed=") {
            opts.seed = value.parse().map_err(|_| format!("bad seed `{value}`\n{USAGE}"))?;
        } else if arg.starts_with("--") {
            return Err(format!("unknown flag `{arg}`\n{USAGE}"));
        } else if command.is_none() {
            command = Some(arg.clone());
        } else if file.is_none() {
            file = Some(arg.clone());
        } else {
            return Err(format!("unexpected argument `{arg}`\n{USAGE}"));
        }
    }
    let Some(command) = command else {
        return Err(USAGE.to_string());
    };

    let load_doc = |file: &Option<String>| -> Result<(jetreduce_dsl::Document, Vec<String>), String> {
        let Some(path) = file else {
            return Err(format!("command `{command}` needs an input file\n{USAGE}"));
        };
        let source = std::fs::read_to_string(path)
            .map_err(|e| format!("{path}: {e}"))?;
        let doc = jetreduce_dsl::load(&source)
            .map_err(|diag| format!("{path}:{}", diag.render(&source)))?;
        Ok((doc, vec![path.clone()]))
    };

    let outcome = match command.as_str() {
        "el" => {
            let (doc, inputs) = load_doc(&file)?;
            commands::cmd_el(doc, inputs, &opts)
        }
        "symmetry" => {
            let (doc, inputs) = load_doc(&file)?;
            commands::cmd_symmetry(doc, inputs, &opts)
        }
        "verify-momap" => {
            let (doc, inputs) = load_doc(&file)?;
            commands::cmd_verify_momap(doc, inputs, &opts)
        }
        "zero-locus" => {
            let (doc, inputs) = load_doc(&file)?;
            commands::cmd_zero_locus(doc, inputs, &opts)
        }
        "selftest" => commands::cmd_selftest(file.into_iter().collect(), &opts),
        other => return Err(format!("unknown command `{other}`\n{USAGE}")),
    };

    match outcome {
        Ok(report) => {
            match opts.format {
                Format::Json => println!("{}", report.to_json()),
                _ => print!("{}", report.to_text()),
            }
            Ok(if report.pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Err(CommandError::Usage(message)) => {
            eprintln!("error: {message}");
            Ok(ExitCode::from(2))
        }
        Err(CommandError::Internal(message)) => {
            eprintln!("internal verification failure: {message}");
            Ok(ExitCode::from(3))
        }
    }
}
