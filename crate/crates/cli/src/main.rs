//! `intw`: fusion checks, KZ prefix builds, obstruction scans and
//! singular-vector candidates from the command line.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use report::{Outcome, Report};

/// Exit status when every computation succeeded (fusion rule 1 or 0).
pub const EXIT_OK: u8 = 0;
/// Malformed input or a failed computation.
pub const EXIT_MALFORMED: u8 = 1;
/// Fusion verdict is undecided.
pub const EXIT_UNKNOWN: u8 = 2;
/// The KZ recursion was obstructed before the requested degree.
pub const EXIT_OBSTRUCTED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "intw", version, about = "Intertwining operators among affine generalized Verma modules")]
struct Cli {
    /// Print the full JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,

    /// Write the JSON report to this file (overrides INTW_OUTPUT_DIR).
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    #[command(flatten)]
    Run(Command),
    /// Re-run the configuration embedded in a report.
    Replay {
        report: PathBuf,
        /// Exit 1 unless the regenerated report is byte-identical.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "command")]
pub enum Command {
    /// Algebra configuration utilities.
    Algebra {
        #[command(subcommand)]
        action: AlgebraCmd,
    },
    /// Decide an sl2 fusion rule.
    Fusion(FusionArgs),
    /// Build the prefix Y_0..Y_N of an intertwining operator.
    Kz(KzArgs),
    /// Singular-vector candidates at the first obstruction.
    Candidate(CandidateArgs),
    /// Evaluate fusion queries from a JSON-lines file.
    Batch(BatchArgs),
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "action")]
pub enum AlgebraCmd {
    /// Check antisymmetry, Jacobi and invariance of the form.
    Validate {
        /// `builtin:sl2` or a TOML/JSON file.
        #[arg(default_value = "builtin:sl2")]
        source: String,
    },
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionArgs {
    /// A rational level, `a+b*sqrt(d)`, or `generic`.
    #[arg(long, allow_hyphen_values = true)]
    pub level: String,
    /// p q r for finite modules.
    #[arg(long, num_args = 3, value_names = ["P", "Q", "R"], group = "query")]
    pub finite: Option<Vec<u32>>,
    /// p λ μ: L_p with highest weight modules of weights λ, μ.
    #[arg(long, num_args = 3, value_names = ["P", "LAMBDA", "MU"], allow_hyphen_values = true, group = "query")]
    pub mixed: Option<Vec<String>>,
    /// λ1 λ2 λ3 for three highest weight modules.
    #[arg(long, num_args = 3, value_names = ["L1", "L2", "L3"], allow_hyphen_values = true, group = "query")]
    pub highest: Option<Vec<String>>,
    /// λ̄ δ [δ3]: L_1 with a dense module, target δ3 defaulting to δ.
    #[arg(long, num_args = 2..=3, value_names = ["LAMBDA", "DELTA"], allow_hyphen_values = true, group = "query")]
    pub dense: Option<Vec<String>>,
    /// Module descriptors `U1 U2 U3` (e.g. `finite:2 hw:-3/2 hw:-1/2`).
    #[arg(long, num_args = 3, value_names = ["U1", "U2", "U3"], allow_hyphen_values = true, group = "query")]
    pub modules: Option<Vec<String>>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KzArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub level: String,
    #[arg(long, default_value = "builtin:sl2")]
    pub algebra: String,
    #[arg(long, allow_hyphen_values = true)]
    pub u1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub u2: String,
    /// `verma:X` or `contragredient:X`, X a descriptor or an sl2 weight.
    #[arg(long, allow_hyphen_values = true)]
    pub target: String,
    /// Highest degree N of the prefix.
    #[arg(short = 'N', long = "degree", default_value_t = 2)]
    pub degree: usize,
    /// Index of the seed in the computed basis of the hom space.
    #[arg(long, default_value_t = 0)]
    pub hom: usize,
    /// Weights of U1⊗U2 to materialize (infinite-dimensional cases).
    #[arg(long, num_args = 1.., allow_hyphen_values = true)]
    pub window: Option<Vec<String>>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub level: String,
    #[arg(long, default_value = "builtin:sl2")]
    pub algebra: String,
    #[arg(long, required_unless_present = "u1")]
    pub p: Option<u32>,
    #[arg(long, required_unless_present = "u2")]
    pub q: Option<u32>,
    #[arg(long, required_unless_present = "u3")]
    pub r: Option<u32>,
    #[arg(long, conflicts_with = "p", allow_hyphen_values = true)]
    pub u1: Option<String>,
    #[arg(long, conflicts_with = "q", allow_hyphen_values = true)]
    pub u2: Option<String>,
    #[arg(long, conflicts_with = "r", allow_hyphen_values = true)]
    pub u3: Option<String>,
    /// Largest degree searched for an obstruction.
    #[arg(long, default_value_t = 12)]
    pub max_degree: usize,
    #[arg(long, default_value_t = 0)]
    pub hom: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchArgs {
    /// JSON-lines file of `{"level", "u1", "u2", "u3"}` queries.
    pub input: PathBuf,
    /// Worker threads (0 picks the number of cores).
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub jobs: usize,
}

fn emit(report: &Report, outcome: &Outcome, cli_json: bool, output: Option<&PathBuf>) -> Result<(), String> {
    let text = report.to_string_pretty();
    if cli_json {
        println!("{text}");
    } else {
        print!("{}", outcome.summary);
    }
    if let Some(path) = report::output_path(report, output) {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
        }
        std::fs::write(&path, format!("{text}\n")).map_err(|e| format!("{}: {e}", path.display()))?;
        if !cli_json {
            println!("report: {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, check) = match cli.command {
        Cmd::Run(c) => (c, None),
        Cmd::Replay { report, check } => match Report::load(&report) {
            Ok(r) => {
                let original = check.then(|| r.to_string_pretty());
                (r.config, original)
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_MALFORMED);
            }
        },
    };
    let outcome = commands::run(&command);
    let report = Report::new(command, &outcome);
    if let Some(original) = check {
        if original != report.to_string_pretty() {
            eprintln!("error: replayed report differs from the original");
            return ExitCode::from(EXIT_MALFORMED);
        }
    }
    if let Some(err) = &outcome.error {
        eprintln!("error: {err}");
    }
    if let Err(e) = emit(&report, &outcome, cli.json, cli.output.as_ref()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_MALFORMED);
    }
    ExitCode::from(outcome.exit_code)
}
