//! Command-line front end: compile `.bspec` specifications to rule-base
//! dumps and run `.uql` scenarios against the compiled model.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use belmod_core::compiler::compile;
use belmod_core::parse::{check_restrictions, parse_spec, sort_check, Spec};
use belmod_core::uql::{parse_script, run_script, ModelRuntime};

#[derive(Parser)]
#[command(
    name = "belmod",
    about = "Belief-model compiler and runtime for cooperative task domains",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a specification and write the rule-base dump.
    Compile {
        /// Path to the `.bspec` specification.
        spec: PathBuf,
        /// Which declared agent the model speaks for.
        #[arg(long = "self", value_name = "AGENT")]
        self_agent: String,
        /// Output path for the rule dump (stdout when omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also print the clausal standard form before expansion.
        #[arg(long)]
        dump_cnf: bool,
    },
    /// Compile a specification, then execute an update/query script.
    Run {
        /// Path to the `.bspec` specification.
        spec: PathBuf,
        /// Path to the `.uql` script.
        script: PathBuf,
        /// Which declared agent the model speaks for.
        #[arg(long = "self", value_name = "AGENT")]
        self_agent: String,
        /// Write one line per rule firing to this file.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Write the final node/justification/nogood listing to this file.
        #[arg(long, value_name = "FILE")]
        dump_state: Option<PathBuf>,
        /// Write the final justification graph in DOT format to this file.
        #[arg(long, value_name = "FILE")]
        dump_graph: Option<PathBuf>,
        /// Print the clausal standard form before expansion.
        #[arg(long)]
        dump_cnf: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Compile { spec, self_agent, out, dump_cnf } => {
            let parsed = load_checked_spec(&spec)?;
            let parsed = match parsed {
                Ok(s) => s,
                Err(code) => return Ok(code),
            };
            if dump_cnf {
                print_cnf(&parsed)?;
            }
            let model = compile(&parsed, &self_agent).map_err(|e| anyhow::anyhow!("{e}"))?;
            for w in &model.warnings {
                eprintln!("warning: {w}");
            }
            let dump = model.render_rule_base();
            match out {
                Some(path) => fs::write(&path, dump)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{dump}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { spec, script, self_agent, trace, dump_state, dump_graph, dump_cnf } => {
            let parsed = load_checked_spec(&spec)?;
            let parsed = match parsed {
                Ok(s) => s,
                Err(code) => return Ok(code),
            };
            if dump_cnf {
                print_cnf(&parsed)?;
            }
            let model = compile(&parsed, &self_agent).map_err(|e| anyhow::anyhow!("{e}"))?;
            for w in &model.warnings {
                eprintln!("warning: {w}");
            }
            let script_text = fs::read_to_string(&script)
                .with_context(|| format!("reading {}", script.display()))?;
            let statements = parse_script(&script_text)
                .map_err(|e| anyhow::anyhow!("{}: {e}", script.display()))?;
            let mut rt = ModelRuntime::new(model).map_err(|e| anyhow::anyhow!("{e}"))?;
            let transcript = run_script(&mut rt, &statements);
            print!("{}", transcript.text);
            if let Some(path) = trace {
                let mut text = rt.engine.trace.join("\n");
                if !text.is_empty() {
                    text.push('\n');
                }
                fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = dump_state {
                fs::write(&path, rt.engine.atms.dump())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = dump_graph {
                fs::write(&path, rt.engine.atms.to_dot())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if transcript.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

/// Parses a specification and runs the sort and restriction checkers.
/// Violations are printed one per line as `LABEL:KIND:message` and turn
/// into a nonzero exit.
fn load_checked_spec(path: &PathBuf) -> Result<Result<Spec, ExitCode>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = match parse_spec(&text) {
        Ok(s) => s,
        Err(e) => bail!("{}:{e}", path.display()),
    };
    let mut violations = sort_check(&spec);
    violations.extend(check_restrictions(&spec));
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("{v}");
        }
        return Ok(Err(ExitCode::FAILURE));
    }
    Ok(Ok(spec))
}

fn print_cnf(spec: &Spec) -> Result<()> {
    for (label, f) in &spec.axioms {
        let clauses =
            belmod_core::cnf::to_modal_cnf(f).map_err(|e| anyhow::anyhow!("axiom {label}: {e}"))?;
        for c in clauses {
            println!("{label}: {c}");
        }
    }
    Ok(())
}
