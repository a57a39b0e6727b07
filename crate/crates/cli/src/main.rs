use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bpd_core::Error;

mod commands;
mod io;

#[derive(Parser)]
#[command(name = "bpd", version, about = "Bounded pushdown gamblers, compressors and LZ78 experiments")]
struct Cli {
    /// Input alphabet for --input strings, in symbol order. Machines use their own; lz defaults to 01.
    #[arg(long, global = true)]
    alphabet: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct InputArgs {
    /// Input string, or @FILE to read it from a file. `~` is the empty string.
    #[arg(long)]
    input: Option<String>,
    /// Generated sequence, `sep:K:N` for S through S_N with parameter K.
    #[arg(long)]
    seq: Option<String>,
}

#[derive(Copy, Clone, ValueEnum)]
enum PrecisionArg {
    Exact,
    Log,
    Auto,
}

#[derive(Copy, Clone, ValueEnum)]
enum LzCode {
    Fixed,
    Gamma,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Corrected,
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a machine file.
    Validate { file: PathBuf },
    /// Run a gambler and report its capital.
    RunGambler {
        file: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated prefix lengths, or step:S.
        #[arg(long)]
        checkpoints: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        precision: PrecisionArg,
    },
    /// Run a compressor and report its output.
    RunCompressor {
        file: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        checkpoints: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Exhaustive information-losslessness check.
    IlCheck {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_len: usize,
    },
    /// Build the block gambler G(C, k) from a compressor.
    C2g {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        /// Write the tabulated gambler here.
        #[arg(long)]
        export: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Build the block compressor C(G, k) from a gambler.
    G2c {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        /// Mix every bet with the uniform one first: rho·β + (1-rho)/|Σ|.
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        export: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// LZ78 parsing and compression ratio.
    Lz {
        #[command(subcommand)]
        action: LzAction,
    },
    /// Write the separation sequence S through S_N.
    GenSeq {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        upto: usize,
        #[arg(long)]
        out: PathBuf,
        /// Zone annotation CSV.
        #[arg(long)]
        zones: Option<PathBuf>,
    },
    /// Write the separation gambler as a machine file.
    SepGambler {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "corrected")]
        mode: ModeArg,
        #[arg(long)]
        export: PathBuf,
    },
    /// Run a verification suite.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
}

#[derive(Subcommand)]
enum LzAction {
    Parse {
        #[command(flatten)]
        input: InputArgs,
        /// Phrase table dump, one `i parent symbol` line per phrase.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "fixed")]
        code: LzCode,
    },
    Ratio {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        checkpoints: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "fixed")]
        code: LzCode,
    },
}

#[derive(Subcommand)]
enum VerifySuite {
    /// Fairness, block identities, both bounds and the nonvanishing transform on the fixtures.
    Lemmas {
        /// Longest word enumerated by the bound checks.
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// LZ78 parses each S_n into T_n and its two flags.
    ParseClaim {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 6)]
        upto: usize,
    },
    /// The separation gambler's capital on S.
    Separation {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 12)]
        upto: usize,
        #[arg(long, value_enum, default_value = "corrected")]
        mode: ModeArg,
        /// Capital at each stage end.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// A failure with its exit code and one-line class.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    class: &'static str,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            class: "usage",
            message: message.into(),
        }
    }

    pub fn machine(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            class: "machine",
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            class: "verification",
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let class = e.class();
        let code = match class {
            "alphabet" | "capacity" | "domain" | "io" | "degenerate-zone" => 2,
            "straddling-phrase" | "zero-capital" => 1,
            _ => 3,
        };
        CliError {
            code,
            class,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.class, e.message);
            ExitCode::from(e.code)
        }
    }
}
