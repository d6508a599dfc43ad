//! `lgn`: evaluate surface diagrams, multiply elements, run verification suites.
//!
//! Exit codes: 0 on success, 1 when a verification suite reports failures,
//! 2 on usage, parse or validation errors.

mod input;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lgn_core::holonomy::{eval_diagram, hol_stated, parse_states, DiagramIR, HolonomyError};
use lgn_core::lgn::{basis_enumerate, restricted_dimension, LgnError};
use lgn_core::torus::{composition_series_report, TorusError};
use lgn_core::vacuum::VacuumError;
use lgn_core::{LgnAlgebra, Mode, Surface};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Lgn(#[from] LgnError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Vacuum(#[from] VacuumError),
}

#[derive(Parser, Debug)]
#[command(
    name = "lgn",
    version,
    about = "Quantum character-variety algebras of surfaces and their diagrams"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Genus of the surface.
    #[arg(long, global = true, default_value_t = 0)]
    pub g: u32,
    /// Number of punctures.
    #[arg(long, global = true, default_value_t = 1)]
    pub n: u32,
    /// Coefficient mode.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Generic)]
    pub mode: ModeArg,
    /// Root-of-unity order for restricted mode and the torus report.
    #[arg(long, global = true, default_value_t = 2)]
    pub p: u32,
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Size cap: strands and word length for random suites, monomial count for `basis`.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Number of random cases per check in the randomized suites.
    #[arg(long, global = true, default_value_t = 20)]
    pub cases: usize,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Generic,
    Restricted,
}

impl Opts {
    pub fn mode(&self) -> Result<Mode, CliError> {
        match self.mode {
            ModeArg::Generic => Ok(Mode::Generic),
            ModeArg::Restricted if self.p >= 2 => Ok(Mode::Restricted(self.p)),
            ModeArg::Restricted => Err(CliError::Usage(format!("--p must be at least 2, got {}", self.p))),
        }
    }

    pub fn surface(&self) -> Result<Surface, CliError> {
        Surface::new(self.g, self.n).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a diagram file: the holonomy tensor, or the stated value when states are given.
    Eval {
        file: PathBuf,
        /// Boundary states, bottom-to-top reading order, e.g. `-+`.
        #[arg(long)]
        states: Option<String>,
    },
    /// Multiply two element files.
    Mul { left: PathBuf, right: PathBuf },
    /// Run a verification suite and report the failures.
    Verify {
        suite: suites::Suite,
        /// Dictionary used by the `iso` suite.
        #[arg(long, value_enum, default_value_t = suites::Table::Defining)]
        table: suites::Table,
    },
    /// Enumerate the basis of the restricted quotient.
    Basis,
    /// Composition-series report for the torus representation at a root of unity.
    Torus,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Run one command; `Ok(false)` means a suite reported failures.
fn run(cli: &Cli) -> Result<bool, CliError> {
    let o = &cli.opts;
    match &cli.cmd {
        Command::Eval { file, states } => {
            let text = input::read(file)?;
            let mut d = DiagramIR::parse(&text)?;
            if let Some(s) = states {
                let st =
                    parse_states(s).ok_or_else(|| CliError::Usage(format!("bad states {s:?}: use '-' and '+'")))?;
                d = d.with_states(st);
            }
            cmd_eval(&d, o)?;
            Ok(true)
        }
        Command::Mul { left, right } => {
            let x = input::element(left, o)?;
            let y = input::element(right, o)?;
            let z = x.mul(&y)?;
            if o.json {
                print_json(&json!({
                    "surface": surface_json(z.algebra().surface()),
                    "mode": z.algebra().mode().to_string(),
                    "element": z.to_string(),
                }));
            } else {
                println!("{z}");
            }
            Ok(true)
        }
        Command::Verify { suite, table } => {
            let report = suites::run(*suite, *table, o)?;
            if o.json {
                print_json(&report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            Ok(report.failures.is_empty())
        }
        Command::Basis => {
            let s = o.surface()?;
            let budget = o.budget.unwrap_or(1 << 16);
            let basis = basis_enumerate(s, o.p, budget)?;
            let alg = LgnAlgebra::get(s, Mode::Restricted(o.p))?;
            let names: Vec<String> = basis
                .iter()
                .map(|m| match alg.mono_name(m) {
                    n if n.is_empty() => "1".to_string(),
                    n => n,
                })
                .collect();
            if o.json {
                print_json(&json!({
                    "surface": surface_json(s),
                    "p": o.p,
                    "dimension": restricted_dimension(s, o.p).to_string(),
                    "count": names.len(),
                    "basis": names,
                }));
            } else {
                println!("{} basis monomials on {s} at p = {}", names.len(), o.p);
                for n in names {
                    println!("{n}");
                }
            }
            Ok(true)
        }
        Command::Torus => {
            let r = composition_series_report(o.p)?;
            if o.json {
                print_json(&serde_json::to_value(&r).expect("report serializes"));
            } else {
                println!(
                    "p = {}: dimension {}, factor dimensions {:?}",
                    r.p, r.dim, r.factor_dims
                );
                println!("J1 invariant: {}, J2 invariant: {}", r.j1_invariant, r.j2_invariant);
                for b in &r.burnside {
                    println!(
                        "{}: dim {}, word span {} (length {}){}",
                        b.label,
                        b.dim,
                        b.span_dim,
                        b.word_length,
                        b.diagnostic.as_deref().map(|d| format!(" -- {d}")).unwrap_or_default()
                    );
                }
                for row in &r.eigenvalues {
                    println!(
                        "a on {}: {} ≈ {:.6} {}",
                        row.vector,
                        row.exact,
                        row.approx,
                        if row.matches { "ok" } else { "MISMATCH" }
                    );
                }
                println!("composition series: {}", r.composition_series);
            }
            Ok(r.composition_series && r.eigenvalues_ok)
        }
    }
}

fn cmd_eval(d: &DiagramIR, o: &Opts) -> Result<(), CliError> {
    let mode = o.mode()?;
    if d.states.is_some() {
        let x = hol_stated(d, mode)?;
        if o.json {
            print_json(
                &json!({ "surface": surface_json(d.surface), "mode": mode.to_string(), "element": x.to_string() }),
            );
        } else {
            println!("{x}");
        }
        return Ok(());
    }
    let t = eval_diagram(d, mode)?;
    if o.json {
        let entries: serde_json::Map<String, Value> = t
            .entries()
            .iter()
            .map(|(i, e)| {
                let st: String = lgn_core::tensor::unpack(*i, t.arity())
                    .iter()
                    .map(|s| s.symbol())
                    .collect();
                (st, Value::String(e.to_string()))
            })
            .collect();
        print_json(&json!({
            "surface": surface_json(d.surface),
            "mode": mode.to_string(),
            "arity": t.arity(),
            "entries": entries,
        }));
    } else {
        print!("{t}");
        if t.arity() == 0 {
            println!();
        }
    }
    Ok(())
}

pub fn surface_json(s: Surface) -> Value {
    json!({ "g": s.g, "n": s.n })
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}
