//! `kloost`: run the experiments and acceptance checks from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kloost_core::harness::WORKERS_ENV;

#[derive(Parser, Debug)]
#[command(
    name = "kloost",
    version,
    about = "Kloosterman-type sums, bilinear averages and squarefree numbers in progressions"
)]
pub struct Cli {
    /// Worker threads (defaults to the sweep config value, then to all cores).
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,

    /// Seed for sampled experiments.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Write the result table here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Result table format: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    pub format: String,

    /// Append a JSON line describing each run (timestamp, wall time, summary) to this file.
    #[arg(long, global = true, env = "KLOOST_RUN_LOG")]
    pub run_log: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate S(m, n; q) and compare with the Weil bound 3 sqrt(q).
    Expsum {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
    },
    /// List the exception pairs (alpha, beta) for q, with their sources.
    Exceptions {
        #[arg(long)]
        q: u64,
    },
    /// Evaluate a bilinear sum sum_{m <= M} sum_n alpha_m K(m n^j) against its bounds.
    Bilinear {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 2)]
        j: u32,
        /// k1, k2, s or klk
        #[arg(long, default_value = "k2")]
        kernel: String,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        b: u64,
        /// k for the klk kernel.
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long = "M")]
        m_len: usize,
        #[arg(long = "N")]
        n_len: u64,
        /// First n of the interval.
        #[arg(long, default_value_t = 1)]
        n_start: u64,
        /// ones or random:<seed>
        #[arg(long, default_value = "ones")]
        alpha: String,
    },
    /// Scan |Sigma_j(K, b, h)| / q over non-diagonal quadruples b.
    Scan {
        #[arg(long)]
        q: u64,
        #[arg(long = "B")]
        big_b: u64,
        #[arg(long, default_value_t = 2)]
        j: u32,
        /// k1 or k2
        #[arg(long, default_value = "k2")]
        kernel: String,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        b: u64,
        /// Scan exhaustively when (#quadruples) * q is at most this.
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
        /// Sampled quadruples otherwise.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Sampled h per quadruple.
        #[arg(long, default_value_t = 50)]
        h_samples: usize,
    },
    /// Error term for squarefree n <= X in progressions mod q, computed two ways.
    SqfreeError {
        #[arg(long = "X")]
        x: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, required_unless_present = "all_a", conflicts_with = "all_a")]
        a: Option<u64>,
        #[arg(long)]
        all_a: bool,
    },
    /// Compare the smoothed count over m n^2 = a mod q with its Poisson dual.
    PoissonCheck {
        #[arg(long)]
        q: u64,
        #[arg(long = "M")]
        m_len: f64,
        #[arg(long = "N")]
        n_len: f64,
        #[arg(long = "T", default_value_t = 8)]
        cutoff_t: u64,
        #[arg(long, default_value_t = 1)]
        a: u64,
    },
    /// Error-term sweep over (X, theta) from a key=value config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run acceptance checks: identities, lemmas, bilinear, sqfree or all.
    Acceptance {
        #[arg(default_value = "all")]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kloost: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
