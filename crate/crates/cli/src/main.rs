use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

mod commands;
mod render;

/// Exit statuses shared by every subcommand.
pub mod exit {
    pub const OK: u8 = 0;
    pub const NEGATIVE: u8 = 1;
    pub const INCONCLUSIVE: u8 = 2;
    pub const USAGE: u8 = 64;
    pub const RESOURCE: u8 = 65;
    pub const INPUT: u8 = 66;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Working precision in bits (at least 64)
    #[arg(long, global = true, env = "ROBIN_PRECISION_BITS", default_value_t = 128)]
    pub precision: u32,
    /// Sieve primes up to this bound (at least 100); grown as candidates need
    #[arg(long, global = true, default_value_t = 2_000_000)]
    pub prime_limit: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Maximum number of normalization steps
    #[arg(long, global = true, default_value_t = 10_000)]
    pub step_limit: usize,
}

#[derive(Debug, Parser)]
#[command(
    name = "robin",
    version,
    about = "Robin's inequality: range checks, abundant numbers, candidate audits"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check σ(n) < e^γ n log log n for every n in a range
    Verify {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// List superabundant numbers up to a limit
    Sa {
        #[arg(long)]
        limit: u64,
    },
    /// Colossally abundant candidates for one ε or a geometric sweep
    #[command(group(ArgGroup::new("mode").required(true).args(["eps", "sweep"])))]
    Ca {
        /// ε as a decimal or a fraction p/q
        #[arg(long)]
        eps: Option<String>,
        /// Number of distinct candidates to emit
        #[arg(long)]
        sweep: Option<usize>,
        /// First ε of the sweep
        #[arg(long, default_value = "0.5", requires = "sweep")]
        eps0: String,
        /// Ratio between successive sweep values
        #[arg(long, default_value = "0.9", requires = "sweep")]
        ratio: String,
    },
    /// Run every necessary-condition check on a candidate file
    Audit {
        #[arg(long)]
        input: PathBuf,
    },
    /// Move a candidate into the exponent window
    Normalize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Alternative log-window form `p_r <= log n (1 − 0.005587 / log log n)`
    Form1 {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the embedded oracle-equivalence suite
    Selftest {
        /// Replace the built-in γ enclosure (harness use)
        #[arg(long, hide = true)]
        gamma_override: Option<String>,
    },
}

/// What a command prints and how it exits.
pub struct Outcome {
    pub stdout: String,
    pub stderr: Option<String>,
    pub code: u8,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    if g.precision < robin_core::numeric::MIN_PRECISION {
        return Err(CliError::new(
            exit::USAGE,
            format!("--precision must be at least 64, got {}", g.precision),
        ));
    }
    if g.prime_limit < 100 {
        return Err(CliError::new(
            exit::USAGE,
            format!("--prime-limit must be at least 100, got {}", g.prime_limit),
        ));
    }
    match cli.command {
        Command::Verify { from, to } => commands::verify(g, from, to),
        Command::Sa { limit } => commands::sa(g, limit),
        Command::Ca {
            eps,
            sweep,
            eps0,
            ratio,
        } => match (eps, sweep) {
            (Some(e), _) => commands::ca_single(g, &e),
            (None, Some(k)) => commands::ca_sweep(g, &eps0, &ratio, k),
            (None, None) => unreachable!("clap requires one of --eps and --sweep"),
        },
        Command::Audit { input } => commands::audit(g, &input),
        Command::Normalize { input } => commands::normalize(g, &input),
        Command::Form1 { input } => commands::form1(g, &input),
        Command::Selftest { gamma_override } => commands::selftest(g, gamma_override.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::OK,
                _ => exit::USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            if let Some(msg) = out.stderr {
                eprintln!("{msg}");
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("robin: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
