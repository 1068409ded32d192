use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sr_difficulty_cli::config::ConfigArgs;
use sr_difficulty_cli::{cmd_artifact_map, cmd_compare, cmd_eval, cmd_score, CommandError, DifficultySource, ExitStatus, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "sr-difficulty", version, about = "Difficulty-aware evaluation of super-resolution results")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score LR images by HFI, EI and RIEI
    Score {
        #[arg(long)]
        input: PathBuf,
        /// Per-image score CSV
        #[arg(long)]
        out: PathBuf,
        /// Summary JSON (defaults to <out>.summary.json)
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Evaluate SR outputs against HR images with a quadrant breakdown
    Eval {
        #[arg(long)]
        hr: PathBuf,
        #[arg(long)]
        sr: PathBuf,
        /// LR images to score (paired with HR by relative path)
        #[arg(long, conflicts_with = "scores")]
        lr: Option<PathBuf>,
        /// Precomputed score CSV
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two eval files (A - B)
    Compare {
        eval_a: PathBuf,
        eval_b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the PSNR99 artifact map of one HR/SR pair
    ArtifactMap {
        #[arg(long)]
        hr: PathBuf,
        #[arg(long)]
        sr: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitStatus, CommandError> {
    let cfg = RunConfig::try_from(&cli.config).map_err(CommandError::usage)?;
    match cli.command {
        Command::Score { input, out, summary } => cmd_score(&input, &out, summary.as_deref(), &cfg),
        Command::Eval { hr, sr, lr, scores, out } => {
            let source = match (lr, scores) {
                (Some(dir), _) => DifficultySource::LrDir(dir),
                (None, Some(csv)) => DifficultySource::Scores(csv),
                (None, None) => DifficultySource::SyntheticFromHr,
            };
            cmd_eval(&hr, &sr, &source, &out, &cfg)
        }
        Command::Compare { eval_a, eval_b, out } => cmd_compare(&eval_a, &eval_b, &out, &cfg),
        Command::ArtifactMap { hr, sr, out } => cmd_artifact_map(&hr, &sr, &out, &cfg, &mut std::io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_error = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage_error { ExitStatus::Usage.code() as u8 } else { 0 });
        }
    };
    let status = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.status
    });
    ExitCode::from(status.code() as u8)
}
