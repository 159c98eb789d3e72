//! `logichint`: check proofs, search, hint, build prompts, evaluate model
//! output and run the tutor server.
//!
//! Exit codes: 0 success, 2 bad input, 3 verification failure, 4 backend
//! failure, 5 I/O failure.

mod commands;
mod error;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use logichint_prompt::{Role, Strategy, Task};

use crate::error::CliError;
use crate::settings::{Overrides, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "logichint",
    version,
    about = "Propositional proof checking, search, hints and model evaluation"
)]
struct Cli {
    /// TOML config file; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory with `problems/*.json` to use instead of the bundled set.
    #[arg(long, global = true, value_name = "DIR")]
    data_dir: Option<PathBuf>,
    /// Backend preset name or a backend TOML file.
    #[arg(long, global = true, value_name = "NAME|FILE")]
    backend: Option<String>,
    /// Replay completions from this cassette.
    #[arg(long, global = true, value_name = "FILE")]
    cassette: Option<PathBuf>,
    /// Model name override.
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Machine-readable output; errors become JSON on stderr.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a formula and print its normal form and metrics.
    Parse { formula: String },
    /// Check every step of a proof document.
    CheckProof { file: PathBuf },
    /// Search for proofs of bundled or random problems.
    Solve(SolveArgs),
    /// Suggest the next step for a problem-solving state.
    Hint(HintArgs),
    /// Turn interaction logs into problem-solving states.
    ExtractPss {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the prompt sent for a task and strategy.
    Prompt(PromptArgs),
    /// Run a prove or hint evaluation against a backend.
    Eval(EvalArgs),
    /// Rate hint explanations with the rubric.
    Grade(GradeArgs),
    /// Agreement between two raters.
    Stats {
        #[arg(long, num_args = 2, required = true, value_names = ["A", "B"])]
        ratings: Vec<PathBuf>,
        /// Also write agreement.json here.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Run the tutor REST service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Problem ids; every problem when empty.
    ids: Vec<String>,
    /// Solve this many random problems instead.
    #[arg(long, value_name = "N", conflicts_with = "ids")]
    fuzz: Option<usize>,
    /// Forward steps used to build each random problem.
    #[arg(long, default_value_t = 4, requires = "fuzz")]
    steps: usize,
    #[arg(long, default_value_t = 4, requires = "fuzz")]
    atoms: usize,
    /// Prove by contradiction.
    #[arg(long)]
    indirect: bool,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    max_frontier: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Source {
    Search,
    Llm,
}

#[derive(Debug, Args)]
struct HintArgs {
    /// A state document, or a set of states from `extract-pss`.
    #[arg(required_unless_present = "problem", conflicts_with = "problem")]
    state: Option<PathBuf>,
    /// Start from this problem instead of a state file.
    #[arg(long)]
    problem: Option<String>,
    /// With --problem: take this many steps of the reference solution.
    #[arg(long, default_value_t = 0, requires = "problem")]
    steps_done: usize,
    #[arg(long, value_enum, default_value = "search")]
    source: Source,
    #[arg(long, default_value = "FS_CoT")]
    strategy: Strategy,
}

#[derive(Debug, Args)]
struct PromptArgs {
    #[arg(long)]
    task: Task,
    #[arg(long, default_value = "ZS")]
    strategy: Strategy,
    #[arg(long, required_unless_present = "state")]
    problem: Option<String>,
    #[arg(long, default_value_t = 0)]
    steps_done: usize,
    /// A state document (hint and grade tasks).
    #[arg(long, conflicts_with = "problem")]
    state: Option<PathBuf>,
    /// The explanation to rate (grade task).
    #[arg(long)]
    explanation: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RoleArg {
    Training,
    Validation,
    Test,
}

impl From<RoleArg> for Role {
    fn from(r: RoleArg) -> Role {
        match r {
            RoleArg::Training => Role::Training,
            RoleArg::Validation => Role::Validation,
            RoleArg::Test => Role::Test,
        }
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Evaluate hints for these states; proofs of the problem set otherwise.
    #[arg(long, value_name = "FILE")]
    states: Option<PathBuf>,
    /// Comma-separated; every strategy when absent.
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<Strategy>,
    /// Split TOML; the bundled split when absent.
    #[arg(long, value_name = "FILE")]
    split: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "test")]
    role: RoleArg,
    /// Write report.csv, summary.json and friends here.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Two rating CSVs to compare in the report.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    ratings: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct GradeArgs {
    /// `explanations.json` from a hint evaluation.
    items: PathBuf,
    /// Share of items to rate, sampled with the seed.
    #[arg(long, default_value_t = logichint_eval::RATING_FRACTION)]
    fraction: f64,
    /// Rater label; the model name when absent.
    #[arg(long)]
    rater: Option<String>,
    /// Print the sampled item ids without rating them.
    #[arg(long)]
    sample_only: bool,
    /// Ratings CSV; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long)]
    bind: Option<String>,
    /// Service data directory; session logs go to `<DIR>/sessions`.
    #[arg(long, value_name = "DIR")]
    sessions: Option<PathBuf>,
    /// Print the resolved settings and replay sessions without listening.
    #[arg(long)]
    dry_run: bool,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let settings = Settings::resolve(Overrides {
        config: cli.config,
        data_dir: cli.data_dir,
        backend: cli.backend,
        cassette: cli.cassette,
        model: cli.model,
        seed: cli.seed,
    })?;
    let out = commands::Out { json: cli.json };
    match cli.command {
        Command::Parse { formula } => commands::parse(&out, &formula),
        Command::CheckProof { file } => commands::check_proof(&out, &settings, &file),
        Command::Solve(a) => commands::solve(
            &out,
            &settings,
            commands::SolveOptions {
                ids: a.ids,
                fuzz: a.fuzz,
                steps: a.steps,
                atoms: a.atoms,
                indirect: a.indirect,
                max_depth: a.max_depth,
                max_frontier: a.max_frontier,
            },
        ),
        Command::Hint(a) => commands::hint(
            &out,
            &settings,
            commands::HintOptions {
                state: a.state,
                problem: a.problem,
                steps_done: a.steps_done,
                llm: matches!(a.source, Source::Llm),
                strategy: a.strategy,
            },
        ),
        Command::ExtractPss { logs, out: path } => {
            commands::extract_pss(&out, &settings, &logs, path.as_deref())
        }
        Command::Prompt(a) => commands::prompt(
            &out,
            &settings,
            commands::PromptOptions {
                task: a.task,
                strategy: a.strategy,
                problem: a.problem,
                steps_done: a.steps_done,
                state: a.state,
                explanation: a.explanation,
            },
        ),
        Command::Eval(a) => commands::eval(
            &out,
            &settings,
            commands::EvalOptions {
                states: a.states,
                strategies: a.strategy,
                split: a.split,
                role: a.role.into(),
                out: a.out,
                ratings: a.ratings,
            },
        ),
        Command::Grade(a) => commands::grade(
            &out,
            &settings,
            commands::GradeOptions {
                items: a.items,
                fraction: a.fraction,
                rater: a.rater,
                sample_only: a.sample_only,
                out: a.out,
            },
        ),
        Command::Stats { ratings, out: dir } => {
            commands::stats(&out, &ratings[0], &ratings[1], dir.as_deref())
        }
        Command::Serve(a) => commands::serve(&out, settings, a.bind, a.sessions, a.dry_run),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if json {
                eprintln!("{}", e.to_json());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}
