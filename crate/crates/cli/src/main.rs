use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abelbank::TransversalConvention;
use abelbank_cli::{analyze, apply, dual, parse_bank, parse_signal, verify_pr, Failure, Output, Settings};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Verify, analyze and apply filter banks on discrete abelian groups.
#[derive(Parser)]
#[command(name = "abelbank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check perfect reconstruction (exit 0 if it holds, 1 if not).
    VerifyPr {
        bank: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Frame bounds, tightness, Riesz verdict and modulation residuals.
    Analyze {
        bank: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the bank with its synthesis filters set to the canonical dual.
    Dual {
        bank: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the bank on a signal and emit subbands and output.
    Apply {
        bank: PathBuf,
        signal: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Torus points per dimension for sampled bounds on Z^d.
    #[arg(long, default_value_t = abelbank::DEFAULT_GRID)]
    grid: usize,
    /// Numerical tolerance for verdicts.
    #[arg(long, default_value_t = abelbank::DEFAULT_TOL)]
    tol: f64,
    /// Override the document's transversal convention.
    #[arg(long, value_enum)]
    transversal: Option<Transversal>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Transversal {
    Lex,
    Negative,
}

impl Common {
    fn settings(&self) -> Settings {
        Settings {
            grid: self.grid,
            tol: self.tol,
            transversal: self.transversal.map(|t| match t {
                Transversal::Lex => TransversalConvention::Lex,
                Transversal::Negative => TransversalConvention::Negative,
            }),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(Output, Option<PathBuf>), Failure> {
    Ok(match cli.command {
        Command::VerifyPr { bank, common } => (verify_pr(&parse_bank(&read(&bank)?)?, &common.settings())?, common.out),
        Command::Analyze { bank, common } => (analyze(&parse_bank(&read(&bank)?)?, &common.settings())?, common.out),
        Command::Dual { bank, common } => (dual(&parse_bank(&read(&bank)?)?, &common.settings())?, common.out),
        Command::Apply { bank, signal, common } => {
            let b = parse_bank(&read(&bank)?)?;
            let s = parse_signal(&read(&signal)?)?;
            (apply(&b, &s, &common.settings())?, common.out)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { abelbank_cli::EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok((output, out)) => {
            let text = output.to_pretty();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(abelbank_cli::EXIT_INPUT);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(output.code)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
