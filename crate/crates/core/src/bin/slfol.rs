use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sl_foliation::linalg::Tolerances;
use sl_foliation::report::{self, compare_golden, GoldenMatch, Outcome, ReportError};

/// Checks and constructions for Lie SL(n)-foliations. Exit codes: 0 pass,
/// 2 input error, 3 check failed.
#[derive(Parser)]
#[command(name = "slfol", version)]
struct Cli {
    /// Compare each report byte-for-byte with `<dir>/<stem>.<command>.json`.
    #[arg(long, global = true)]
    golden: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1e-10)]
    eq_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    residual_tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit the exact structure table of sl(n).
    VerifyBrackets {
        #[arg(long)]
        n: usize,
    },
    /// Iwasawa factors of matrices read from JSON files.
    Decompose { files: Vec<PathBuf> },
    /// Flatness, equivariance and consistency of foliation spec files.
    CheckFoliation { files: Vec<PathBuf> },
    /// Circle fibration from closed cochain files.
    Tischler {
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
    },
    /// End-to-end pipeline on SL(n) foliation spec files.
    Pipeline {
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyBrackets { .. } => "verify-brackets",
            Command::Decompose { .. } => "decompose",
            Command::CheckFoliation { .. } => "check-foliation",
            Command::Tischler { .. } => "tischler",
            Command::Pipeline { .. } => "pipeline",
        }
    }
}

fn finish(result: Result<Outcome, ReportError>, golden: Option<PathBuf>) -> (String, String, i32) {
    let outcome = match result {
        Ok(o) => o,
        Err(e) => return (String::new(), format!("error: {e}\n"), 2),
    };
    let rendered = outcome.render();
    let Some(path) = golden else {
        return (rendered, String::new(), outcome.exit_code());
    };
    match compare_golden(&rendered, &path) {
        Ok(GoldenMatch::Identical) => (rendered, String::new(), outcome.exit_code()),
        Ok(GoldenMatch::Differs) => (
            rendered,
            format!("golden mismatch: {}\n", path.display()),
            3,
        ),
        Err(e) => (rendered, format!("error: {e}\n"), 2),
    }
}

fn golden_path(dir: Option<&Path>, stem: &str, command: &str) -> Option<PathBuf> {
    dir.map(|d| d.join(format!("{stem}.{command}.json")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match Tolerances::new(cli.eq_tol, cli.residual_tol) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let name = cli.command.name();
    let golden = cli.golden.as_deref();

    let results: Vec<(String, String, i32)> = match &cli.command {
        Command::VerifyBrackets { n } => {
            vec![finish(
                report::verify_brackets(*n),
                golden_path(golden, &format!("n{n}"), name),
            )]
        }
        Command::Decompose { files }
        | Command::CheckFoliation { files }
        | Command::Tischler { files, .. }
        | Command::Pipeline { files, .. } => {
            if files.is_empty() {
                eprintln!("error: no input files");
                return ExitCode::from(2);
            }
            let run = |path: &PathBuf| {
                let stem = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let text = match std::fs::read_to_string(path) {
                    Ok(t) => t,
                    Err(e) => {
                        return (
                            String::new(),
                            format!("error: {}: {e}\n", path.display()),
                            2,
                        )
                    }
                };
                let result = match &cli.command {
                    Command::Decompose { .. } => report::decompose(&text, &tol),
                    Command::CheckFoliation { .. } => report::check_foliation(&text, &tol),
                    Command::Tischler { epsilon, .. } => report::tischler(&text, *epsilon, &tol),
                    Command::Pipeline { epsilon, .. } => report::pipeline(&text, *epsilon, &tol),
                    Command::VerifyBrackets { .. } => unreachable!("handled above"),
                };
                finish(result, golden_path(golden, &stem, name))
            };
            std::thread::scope(|s| {
                let handles: Vec<_> = files.iter().map(|f| s.spawn(|| run(f))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect()
            })
        }
    };

    let mut code = 0;
    for (out, err, c) in results {
        print!("{out}");
        eprint!("{err}");
        code = code.max(c);
    }
    ExitCode::from(code as u8)
}
