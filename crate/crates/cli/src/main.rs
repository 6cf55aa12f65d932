//! `cvclone`: parameter sweeps, optimum search, figure-data reproduction,
//! asymmetric-network evaluation, and validation runs for the
//! continuous-variable telecloning simulator.
//!
//! Exit codes: 0 on success, 2 on usage errors (bad flags or specs), 1 on
//! I/O failures or failed validation.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cvclone",
    version,
    about = "Continuous-variable telecloning simulator",
    after_help = "Resource specs: tmsv | ps:n1,n2 | pa:n1,n2 | asym:t1,t2,...\n\
                  Input specs:    coherent[:re,im] | squeezed:s[,re,im][,p]\n\
                  Thread count precedence: --threads > CVCLONE_THREADS > default."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the computational subcommands; any of them may also be
/// given in a `key = value` config file (flags win on conflict).
#[derive(Args, Debug, Clone, Default)]
struct Shared {
    /// Protocol: irreversible | reversible | asymmetric
    #[arg(long)]
    protocol: Option<String>,
    /// Resource spec (see below)
    #[arg(long)]
    resource: Option<String>,
    /// Input state spec (default coherent vacuum amplitude)
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    r_steps: Option<usize>,
    /// Ancilla squeezing ε (fixed per run)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Transmissivities for the asymmetric network, comma separated
    #[arg(long)]
    taus: Option<String>,
    /// Output path (file for sweep/network, directory for figure)
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (overrides CVCLONE_THREADS)
    #[arg(long)]
    threads: Option<usize>,
    /// Config file with `key = value` lines; flags take precedence
    #[arg(long)]
    config: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Grid sweep over the resource squeezing, one CSV row per grid point
    /// and clone
    Sweep(Shared),
    /// Locate a fidelity optimum over r or ε (coarse grid plus
    /// golden-section)
    Optimize {
        #[command(flatten)]
        shared: Shared,
        /// Which parameter to optimize
        #[arg(long, value_parser = ["r", "epsilon"])]
        target: String,
        /// Fixed r while optimizing ε
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        eps_min: f64,
        #[arg(long, default_value_t = 0.9)]
        eps_max: f64,
    },
    /// Emit one of the reference figure data sets as a CSV bundle plus
    /// a gnuplot script
    Figure {
        #[command(flatten)]
        shared: Shared,
        /// fig2 | fig3 | fig4 | fig5 | fig6
        id: String,
    },
    /// Asymmetric network: per-clone fidelity and q by closed form and by
    /// covariance simulation, with a discrepancy column
    Network(Shared),
    /// Run the oracle suite and every acceptance criterion
    Validate {
        #[command(flatten)]
        shared: Shared,
        /// Run only checks whose id starts with this prefix
        #[arg(long)]
        only: Option<String>,
        /// Fault injection for negative-control testing
        #[arg(long, value_parser = ["overlap-prefactor"])]
        inject: Option<String>,
    },
}

fn init_threads(threads: Option<usize>) {
    let count = threads.or_else(|| {
        std::env::var("CVCLONE_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = count {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(shared) => config::resolve(shared).and_then(commands::sweep),
        Command::Optimize {
            shared,
            target,
            r,
            eps_min,
            eps_max,
        } => config::resolve(shared)
            .and_then(|cfg| commands::optimize(cfg, &target, r, eps_min, eps_max)),
        Command::Figure { shared, id } => {
            config::resolve(shared).and_then(|cfg| commands::figure(cfg, &id))
        }
        Command::Network(shared) => config::resolve(shared).and_then(commands::network),
        Command::Validate {
            shared,
            only,
            inject,
        } => config::resolve(shared)
            .and_then(|cfg| commands::validate(cfg, only.as_deref(), inject.as_deref())),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            if let Some(io) = err.downcast_ref::<std::io::Error>() {
                if io.kind() == std::io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
            }
            eprintln!("error: {err:#}");
            // spec/parse problems are usage errors; everything else is runtime
            if err.downcast_ref::<cvclone_core::Error>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
