//! Command-line front end. Exit codes: 0 success or holds, 1 a check or
//! entailment failed, 2 bad input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::engine::EngineRegistry;
use crate::error::{Error, ParseError};
use crate::gates::GateRegistry;
use crate::harness::{check_assertion, format_ket, format_result, script_context, trace_assertion, Verdict};
use crate::interp::{InterpContext, MAX_QUBITS};
use crate::logic::{parse, Term};
use crate::rewrite::RuleTable;
use crate::script::parse_script_with;
use crate::subspace::{inclusion_residual, ToleranceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qlv", version, about = "Check propositions about quantum circuits, read as subspaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct TolArg {
    /// Scale all tolerances: eps_rank = eps_ortho = E, eps_incl = 10 E.
    #[arg(long, value_name = "E")]
    tol: Option<f64>,
}

impl TolArg {
    fn config(&self) -> Result<ToleranceConfig, Error> {
        match self.tol {
            Some(e) => ToleranceConfig::scaled(e),
            None => Ok(ToleranceConfig::default()),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every assertion of a script.
    Check {
        file: PathBuf,
        #[command(flatten)]
        tol: TolArg,
        /// Print the left-hand side's dimension after each stage.
        #[arg(long)]
        trace: bool,
        /// Forward-image strategy: numeric or symbolic.
        #[arg(long, default_value = EngineRegistry::DEFAULT)]
        engine: String,
    },
    /// Print the dimension and an orthonormal basis of a term's subspace.
    Eval {
        #[arg(short = 'n', value_name = "N")]
        qubits: usize,
        term: String,
        #[command(flatten)]
        tol: TolArg,
        /// Only print the dimension.
        #[arg(long)]
        dim_only: bool,
        #[arg(long, default_value = EngineRegistry::DEFAULT)]
        engine: String,
    },
    /// Decide p ⊩ q; prints HOLDS or FAILS.
    Entail {
        #[arg(short = 'n', value_name = "N")]
        qubits: usize,
        p: String,
        q: String,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Print the validated rewrite table and the rows that failed validation.
    Rules {
        /// Also learn rows for the custom gates of this script.
        #[arg(long, value_name = "FILE")]
        script: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArg,
    },
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run_cli<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(cli.command, out) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_INPUT
        }
    }
}

fn term_arg(text: &str, what: &str) -> Result<Term, String> {
    parse(text).map_err(|e: ParseError| {
        let mut msg = format!("cannot parse {what}: {}\n  {text}\n  {}^", e.message, " ".repeat(text[..e.position.min(text.len())].chars().count()));
        if !e.expected.is_empty() {
            msg.push_str(&format!("\n  expected one of: {}", e.expected.join(", ")));
        }
        msg
    })
}

fn context(n: usize, tol: &TolArg) -> Result<InterpContext, String> {
    if n == 0 || n > MAX_QUBITS {
        return Err(format!("-n must be between 1 and {MAX_QUBITS}"));
    }
    let tol = tol.config().map_err(|e| e.to_string())?;
    InterpContext::with(n, GateRegistry::builtin(), tol).map_err(|e| e.to_string())
}

fn io(e: std::io::Error) -> String {
    format!("cannot write output: {e}")
}

fn run(command: Command, out: &mut dyn Write) -> Result<i32, String> {
    match command {
        Command::Check { file, tol, trace, engine } => {
            let text = std::fs::read_to_string(&file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
            let tol = tol.config().map_err(|e| e.to_string())?;
            let script = parse_script_with(&text, tol).map_err(|e| format!("{}: {e}", file.display()))?;
            let ctx = script_context(&script, tol).map_err(|e| e.to_string())?;
            let engines = EngineRegistry::standard(&script.gates, tol).map_err(|e| e.to_string())?;
            let engine = engines.get(&engine).map_err(|e| e.to_string())?;
            let mut passed = 0;
            for a in &script.assertions {
                let result = check_assertion(&script, a, engine.as_ref(), &ctx).map_err(|e| e.to_string())?;
                writeln!(out, "{}", format_result(a, &result, script.n)).map_err(io)?;
                if trace {
                    for (k, name, dim) in trace_assertion(&script, a, engine.as_ref(), &ctx).map_err(|e| e.to_string())? {
                        writeln!(out, "  @{k} {name}: dim {dim}").map_err(io)?;
                    }
                }
                if result.verdict == Verdict::Pass {
                    passed += 1;
                }
            }
            let total = script.assertions.len();
            writeln!(out, "{passed}/{total} assertions passed").map_err(io)?;
            Ok(if passed == total { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Eval { qubits, term, tol, dim_only, engine } => {
            let t = term_arg(&term, "term")?;
            let ctx = context(qubits, &tol)?;
            let engines = EngineRegistry::standard(&ctx.gates, ctx.tol).map_err(|e| e.to_string())?;
            let engine = engines.get(&engine).map_err(|e| e.to_string())?;
            let s = engine.denote(&t, &ctx).map_err(|e| e.to_string())?;
            writeln!(out, "dim {}", s.rank()).map_err(io)?;
            if !dim_only {
                for v in s.basis().columns() {
                    writeln!(out, "  {}", format_ket(v, qubits)).map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Entail { qubits, p, q, tol } => {
            let (p, q) = (term_arg(&p, "p")?, term_arg(&q, "q")?);
            let ctx = context(qubits, &tol)?;
            let sp = crate::interp::interpret(&p, &ctx).map_err(|e| e.to_string())?;
            let sq = crate::interp::interpret(&q, &ctx).map_err(|e| e.to_string())?;
            let r = inclusion_residual(&sp, &sq).map_err(|e| e.to_string())?;
            let holds = r <= ctx.tol.eps_incl;
            writeln!(out, "{}  (residual {r:.3e})", if holds { "HOLDS" } else { "FAILS" }).map_err(io)?;
            Ok(if holds { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Rules { script, tol } => {
            let tol = tol.config().map_err(|e| e.to_string())?;
            let mut table = RuleTable::standard(tol).map_err(|e| e.to_string())?;
            if let Some(file) = script {
                let text = std::fs::read_to_string(&file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
                let script = parse_script_with(&text, tol).map_err(|e| format!("{}: {e}", file.display()))?;
                for name in &script.custom_gates {
                    let gate = script.gates.get(name).map_err(|e| e.to_string())?;
                    table.learn_gate(&gate, &script.gates, tol).map_err(|e| e.to_string())?;
                }
            }
            let width = table.rules().map(|r| r.to_string().chars().count()).max().unwrap_or(0);
            for rule in table.rules() {
                writeln!(out, "{:<width$}  {:<10}  validated", rule.to_string(), rule.provenance.to_string()).map_err(io)?;
            }
            for rejected in table.rejected() {
                write!(out, "{:<width$}  {:<10}  REJECTED", rejected.rule.to_string(), rejected.rule.provenance.to_string()).map_err(io)?;
                match &rejected.replaced_by {
                    Some(t) => writeln!(out, "; replaced by {t}").map_err(io)?,
                    None => writeln!(out).map_err(io)?,
                }
            }
            Ok(EXIT_OK)
        }
    }
}
