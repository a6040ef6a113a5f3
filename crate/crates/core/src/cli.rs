//! Command-line front end.
//!
//! Exit codes: 0 success, 1 `equiv` found a counterexample, 2 parse or
//! validation error, 3 iteration budget exceeded, 4 invariant breach.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::automaton::Automaton;
use crate::error::Error;
use crate::format::{parse_automaton, print_automaton, to_dot};
use crate::learner::{learn, LearnConfig};
use crate::syntax::{parse_tree, show_tree};
use crate::teacher::{AutomatonTeacher, CachingTeacher};

#[derive(Debug, Parser)]
#[command(
    name = "tree-lstar",
    version,
    about = "Learn and manipulate word and tree automata"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn the language of a target automaton from queries.
    Learn {
        #[arg(long)]
        target: PathBuf,
        /// Write the step trace as JSON lines.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Write the learned automaton as Graphviz.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Print every closed and consistent table.
        #[arg(long)]
        dump_tables: bool,
        /// Check learning invariants at runtime.
        #[arg(long)]
        audit: bool,
    },
    /// Print the output of the target on a tree.
    Member {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        tree: String,
    },
    /// Check two automata for language equivalence.
    Equiv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Minimize an automaton.
    Minimize {
        #[arg(long)]
        target: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Render an automaton as Graphviz.
    ExportDot {
        #[arg(long)]
        target: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Parse and validate an automaton file.
    Validate {
        #[arg(long)]
        target: PathBuf,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::IterationBudgetExceeded(_) => 3,
            Error::InvariantBreach(_) | Error::WellDefinednessBreach(_) => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    }
}

fn load(path: &Path) -> Result<Automaton, Failure> {
    let src = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    parse_automaton(&src).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, contents),
        None => out.write_all(contents.as_bytes()).map_err(|e| Failure {
            code: 2,
            message: e.to_string(),
        }),
    }
}

fn check_exists(paths: &[&Path]) -> Result<(), Failure> {
    for p in paths {
        if !p.is_file() {
            return Err(Failure {
                code: 2,
                message: format!("{}: no such file", p.display()),
            });
        }
    }
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = |out: &mut dyn Write, s: String| emit(out, None, &s);
    match cmd {
        Command::Learn {
            target,
            stats,
            dot,
            dump_tables,
            audit,
        } => {
            check_exists(&[&target])?;
            let teacher = CachingTeacher::new(AutomatonTeacher::new(load(&target)?)?);
            let config = LearnConfig {
                audit,
                dump_tables,
                ..LearnConfig::default()
            };
            let outcome = learn(&teacher, &config)?;
            let sig = outcome.automaton.signature().clone();
            if let Some(path) = &stats {
                write_file(path, &outcome.trace.to_json_lines())?;
            }
            if let Some(path) = &dot {
                write_file(path, &to_dot(&outcome.automaton))?;
            }
            for table in &outcome.tables {
                text(out, format!("{table}\n"))?;
            }
            let mut listing = String::new();
            for (q, rep) in outcome.representatives.iter().enumerate() {
                listing.push_str(&format!(
                    "# {} = {}\n",
                    outcome.automaton.state_name(q),
                    show_tree(rep, &sig)
                ));
            }
            listing.push_str(&print_automaton(&outcome.automaton));
            text(out, listing)?;
            Ok(0)
        }
        Command::Member { target, tree } => {
            check_exists(&[&target])?;
            let aut = load(&target)?;
            let t = parse_tree(&tree, aut.signature())?;
            let o = aut.language_of(&t)?;
            text(out, format!("{}\n", aut.signature().outputs.name(o)))?;
            Ok(0)
        }
        Command::Equiv { a, b } => {
            check_exists(&[&a, &b])?;
            let (x, y) = (load(&a)?, load(&b)?);
            match x.equivalent(&y)? {
                None => {
                    text(out, "equivalent\n".into())?;
                    Ok(0)
                }
                Some(t) => {
                    text(
                        out,
                        format!("counterexample: {}\n", show_tree(&t, x.signature())),
                    )?;
                    Ok(1)
                }
            }
        }
        Command::Minimize { target, output } => {
            check_exists(&[&target])?;
            let m = load(&target)?.minimize()?;
            emit(out, output.as_deref(), &print_automaton(&m))?;
            Ok(0)
        }
        Command::ExportDot { target, output } => {
            check_exists(&[&target])?;
            emit(out, output.as_deref(), &to_dot(&load(&target)?))?;
            Ok(0)
        }
        Command::Validate { target } => {
            check_exists(&[&target])?;
            load(&target)?;
            text(out, "ok\n".into())?;
            Ok(0)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Payload goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
