use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cqt_core::bell::{chsh, coplanar, lhv_classical_bound};
use cqt_core::frameworks::{query_with_tol, QueryResult};
use cqt_core::histories::history_probability_with_tol;
use cqt_core::scenario::{
    builtin, builtin_names, builtin_source, parse_event_label, parse_scenario, render_machine,
    render_text, run_scenario_with_tol, ScenarioDoc, ScenarioError,
};
use cqt_core::{Error, EPS_CONS};

const EXIT_ERROR: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;

/// Consistency checks and probabilities for families of quantum histories.
#[derive(Parser)]
#[command(name = "cqt", version)]
struct Cli {
    /// Overlap tolerance for the consistency conditions.
    #[arg(long, global = true, default_value_t = EPS_CONS)]
    tol: f64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Consistency report for every family in a scenario file.
    Check { file: PathBuf },
    /// Probability of one history (1-based) of a consistent family.
    Prob {
        file: PathBuf,
        family: String,
        history: usize,
    },
    /// Probability of an event such as `x1+` within one framework.
    Query {
        file: PathBuf,
        family: String,
        event: String,
    },
    /// Singlet CHSH value for coplanar angles a a' b b' in degrees.
    Chsh {
        #[arg(num_args = 0..=4, allow_negative_numbers = true)]
        angles: Vec<f64>,
    },
    /// Names of the built-in scenarios.
    ListBuiltin,
    /// Consistency report for a built-in scenario.
    RunBuiltin { name: String },
    /// Print a built-in scenario's source text.
    ShowBuiltin { name: String },
}

enum Failure {
    Scenario(ScenarioError),
    Core(Error),
    Other(String),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::Scenario(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn load(path: &PathBuf) -> Result<ScenarioDoc, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    Ok(parse_scenario(&text)?)
}

fn load_builtin(name: &str) -> Result<ScenarioDoc, Failure> {
    builtin(name).ok_or_else(|| {
        Failure::Other(format!(
            "no built-in scenario `{name}` (try: {})",
            builtin_names().join(", ")
        ))
    })
}

fn report(doc: &ScenarioDoc, cli: &Cli) -> Result<u8, Failure> {
    let run = run_scenario_with_tol(doc, cli.tol)?;
    match cli.format {
        Format::Text => print!("{}", render_text(&run)),
        Format::Machine => print!("{}", render_machine(&run.report)),
    }
    Ok(if run.all_consistent() {
        0
    } else {
        EXIT_INCONSISTENT
    })
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Check { file } => report(&load(file)?, cli),
        Command::RunBuiltin { name } => report(&load_builtin(name)?, cli),
        Command::ShowBuiltin { name } => {
            load_builtin(name)?;
            print!("{}", builtin_source(name).expect("checked"));
            Ok(0)
        }
        Command::ListBuiltin => {
            for name in builtin_names() {
                println!("{name}");
            }
            Ok(0)
        }
        Command::Prob {
            file,
            family,
            history,
        } => {
            let doc = load(file)?;
            let spec = doc
                .family(family)
                .ok_or_else(|| Failure::Other(format!("no family `{family}`")))?;
            let f = doc.build_family(spec)?;
            let h = f.history(*history).ok_or_else(|| {
                Failure::Other(format!(
                    "history {history} out of range 1..={}",
                    f.histories().len()
                ))
            })?;
            let p = history_probability_with_tol(h, &f, cli.tol)?;
            match cli.format {
                Format::Text => println!("{}  {}", h.label_string(), p),
                Format::Machine => println!(
                    "{}",
                    json!({"family": family, "history": history, "probability": p})
                ),
            }
            Ok(0)
        }
        Command::Query {
            file,
            family,
            event,
        } => {
            let doc = load(file)?;
            let spec = doc
                .family(family)
                .ok_or_else(|| Failure::Other(format!("no family `{family}`")))?;
            let f = doc.build_family(spec)?;
            let prop = parse_event_label(&doc, event)?;
            let answer = query_with_tol(&f, &prop, cli.tol)?;
            match (cli.format, &answer) {
                (Format::Text, QueryResult::Probability(p)) => println!("{}  {p}", prop.label()),
                (Format::Text, QueryResult::Meaningless(why)) => {
                    println!("{}  meaningless: {why}", prop.label())
                }
                (Format::Machine, QueryResult::Probability(p)) => println!(
                    "{}",
                    json!({"family": family, "event": prop.label(), "probability": p})
                ),
                (Format::Machine, QueryResult::Meaningless(why)) => println!(
                    "{}",
                    json!({"family": family, "event": prop.label(), "meaningless": why})
                ),
            }
            Ok(0)
        }
        Command::Chsh { angles } => {
            let a = match angles.as_slice() {
                [] => [0.0, 90.0, 45.0, 135.0],
                [a, a2, b, b2] => [*a, *a2, *b, *b2],
                _ => return Err(Failure::Other("chsh takes zero or four angles".into())),
            };
            let s = chsh(
                coplanar(a[0]),
                coplanar(a[1]),
                coplanar(a[2]),
                coplanar(a[3]),
            );
            let bound = lhv_classical_bound();
            match cli.format {
                Format::Text => {
                    println!(
                        "settings (deg)   a={} a'={} b={} b'={}",
                        a[0], a[1], a[2], a[3]
                    );
                    println!("quantum S        {s}");
                    println!("local bound      {bound}");
                    println!("violation        {}", s.abs() > bound);
                }
                Format::Machine => println!(
                    "{}",
                    json!({"angles_deg": a, "quantum": s, "local_bound": bound})
                ),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Scenario(e)) => {
            eprintln!("cqt: {e}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Core(e @ Error::QueryOnInconsistentFamily { .. })) => {
            eprintln!("cqt: {e}");
            ExitCode::from(EXIT_INCONSISTENT)
        }
        Err(Failure::Core(e)) => {
            eprintln!("cqt: {e}");
            ExitCode::from(EXIT_ERROR)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("cqt: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
