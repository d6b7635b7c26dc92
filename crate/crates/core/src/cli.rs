//! Command-line front end: `parse`, `eval`, `trace`, `check` and `equiv`.
//!
//! Exit codes: 0 on success; 1 on unreadable or unparsable input, an
//! invalid derivation, or a non-equivalent case; 2 when evaluation fails.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::ast::well_formed;
use crate::checker::{format_path, validate};
use crate::deriv_io::{read_derivation, write_derivation, HEADER};
use crate::equiv::{check_equiv, parse_bindings, read_manifest, report_line};
use crate::eval::{eval_expr, EvalConfig, EvalOutcome, DEFAULT_FUEL};
use crate::parser::parse_expr;
use crate::printer::format_expr;

#[derive(Debug, Parser)]
#[command(name = "core-erlang", version, about = "Evaluate and check Core Erlang derivations")]
pub struct CliInvocation {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the canonical form of a source file
    Parse {
        /// Source file, or `-` for standard input
        file: PathBuf,
    },
    /// Evaluate a source file and print its value
    Eval(RunArgs),
    /// Evaluate and emit the derivation tree
    Trace {
        #[command(flatten)]
        run: RunArgs,
        /// Write the derivation here and print only the value
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a derivation file
    Check {
        /// Derivation file, or `-` for standard input
        file: PathBuf,
    },
    /// Run an equivalence manifest
    Equiv {
        manifest: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = parse_fuel)]
        fuel: usize,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Source file, or `-` for standard input
    pub file: PathBuf,
    /// Maximum derivation height
    #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = parse_fuel)]
    pub fuel: usize,
    /// Initial bindings, e.g. `X=5,Y='ok'` (literals only)
    #[arg(long)]
    pub env: Option<String>,
}

fn parse_fuel(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("fuel must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

fn read_input(path: &Path, stdin: &mut dyn Read) -> Result<String, String> {
    if path == Path::new("-") {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| format!("<stdin>: {e}"))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run(inv: &CliInvocation, io: &mut Io<'_>) -> i32 {
    match execute(inv, io) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(io.err, "error: {msg}");
            1
        }
    }
}

fn execute(inv: &CliInvocation, io: &mut Io<'_>) -> Result<i32, String> {
    let io_err = |e: std::io::Error| e.to_string();
    match &inv.command {
        Command::Parse { file } => {
            let src = read_input(file, io.stdin)?;
            let e = parse_expr(&src).map_err(|e| format!("{}:{e}", file.display()))?;
            for d in well_formed(&e) {
                writeln!(io.err, "warning: {d}").map_err(io_err)?;
            }
            writeln!(io.out, "{}", format_expr(&e)).map_err(io_err)?;
            Ok(0)
        }
        Command::Eval(args) => {
            let outcome = evaluate(args, io.stdin)?;
            report_outcome(&outcome, io).map_err(io_err)
        }
        Command::Trace { run, out } => {
            let outcome = evaluate(run, io.stdin)?;
            let EvalOutcome::Success { value, derivation } = &outcome else {
                return report_outcome(&outcome, io).map_err(io_err);
            };
            let text = write_derivation(derivation);
            match out {
                Some(path) => {
                    fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
                    writeln!(io.out, "{value}").map_err(io_err)?;
                }
                None => {
                    // the value rides along as a comment so the stream stays checkable
                    let body = text.strip_prefix(HEADER).unwrap_or(&text);
                    write!(io.out, "{HEADER}\n% value {value}{body}").map_err(io_err)?;
                }
            }
            Ok(0)
        }
        Command::Check { file } => {
            let text = read_input(file, io.stdin)?;
            let d = read_derivation(&text).map_err(|e| format!("{}: {e}", file.display()))?;
            let report = validate(&d);
            write!(io.out, "{report}").map_err(io_err)?;
            if report.valid() {
                writeln!(io.out).map_err(io_err)?;
                Ok(0)
            } else {
                Ok(1)
            }
        }
        Command::Equiv { manifest, fuel } => {
            let cases = read_manifest(manifest).map_err(|e| e.to_string())?;
            let mut all = true;
            for case in &cases {
                let verdict = check_equiv(case, *fuel);
                all &= verdict.is_equivalent();
                writeln!(io.out, "{}", report_line(case, &verdict)).map_err(io_err)?;
            }
            Ok(if all { 0 } else { 1 })
        }
    }
}

fn evaluate(args: &RunArgs, stdin: &mut dyn Read) -> Result<EvalOutcome, String> {
    let src = read_input(&args.file, stdin)?;
    let expr = parse_expr(&src).map_err(|e| format!("{}:{e}", args.file.display()))?;
    let env = match &args.env {
        Some(b) => parse_bindings(b).map_err(|e| format!("--env: {e}"))?,
        None => Default::default(),
    };
    let cfg = EvalConfig::new(expr).with_env(env).with_fuel(args.fuel);
    Ok(eval_expr(&cfg))
}

fn report_outcome(outcome: &EvalOutcome, io: &mut Io<'_>) -> std::io::Result<i32> {
    match outcome {
        EvalOutcome::Success { value, .. } => {
            writeln!(io.out, "{value}")?;
            Ok(0)
        }
        EvalOutcome::Failure(e) => {
            writeln!(io.out, "{}", e.kind.name())?;
            writeln!(io.err, "{e} at {}", format_path(&e.path))?;
            Ok(2)
        }
    }
}

/// Parses process arguments and runs against the real standard streams.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let inv = match CliInvocation::try_parse_from(args) {
        Ok(inv) => inv,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut io = Io {
        stdin: &mut stdin.lock(),
        out: &mut stdout.lock(),
        err: &mut stderr.lock(),
    };
    run(&inv, &mut io)
}
