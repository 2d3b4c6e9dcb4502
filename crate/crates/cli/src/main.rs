use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rabf_core::beamformer::{derive_params, factorize_presumed, initial_point, solve_inner_socp};
use rabf_core::experiment::{emit_csv, parse_config, run_experiment};
use rabf_core::hermitian::ComplexMatrixJson;
use rabf_core::oracle::multistart_minimize;
use rabf_core::{Error, HermitianMatrix, Result};

#[derive(Parser)]
#[command(name = "rabf", about = "Robust adaptive beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured Monte Carlo sweep and write a CSV of results.
    Run {
        /// Plain-text key = value experiment config file.
        #[arg(long)]
        config: String,
        /// Output CSV path; overrides output_path from the config.
        #[arg(long)]
        out: Option<String>,
    },
    /// Solve a single instance from matrix files and print the result as JSON.
    Solve {
        /// Sample covariance matrix (JSON with "re"/"im" row arrays).
        #[arg(long)]
        rhat: String,
        /// Presumed signal covariance matrix (same JSON format).
        #[arg(long)]
        rs: String,
        /// Diagonal loading; default 0.1 * ||Rhat||_F.
        #[arg(long)]
        gamma: Option<f64>,
        /// Mismatch radius; default 0.5 * sqrt(trace(Rs)).
        #[arg(long)]
        eta: Option<f64>,
        /// Outer termination tolerance; default 1e-8.
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Multi-start oracle for a single instance; prints the report as JSON.
    Oracle {
        #[arg(long)]
        rhat: String,
        #[arg(long)]
        rs: String,
        /// Number of random starts.
        #[arg(long, default_value_t = 200)]
        starts: usize,
        /// RNG seed for the starts.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config).map_err(|source| Error::Io {
                path: config.clone(),
                source,
            })?;
            let cfg = parse_config(&text)?;
            let rows = run_experiment(&cfg)?;
            let path = out.unwrap_or_else(|| cfg.output_path.clone());
            emit_csv(&rows, &path)?;
            println!("wrote {} rows to {path}", rows.len());
            Ok(())
        }
        Command::Solve {
            rhat,
            rs,
            gamma,
            eta,
            xi,
        } => {
            let rhat = load_hermitian(&rhat)?;
            let rs = load_hermitian(&rs)?;
            let mut params = derive_params(&rhat, &rs);
            if let Some(g) = gamma {
                params.gamma = g;
            }
            if let Some(e) = eta {
                params.eta = e;
            }
            if let Some(x) = xi {
                params.xi = x;
            }
            let q = factorize_presumed(&rs, None)?;
            let w0 = initial_point(&q, params.eta)?;
            let result = solve_inner_socp(&rhat, &q, &params, &w0)?;
            println!("{}", serde_json::to_string_pretty(&result.to_json())?);
            Ok(())
        }
        Command::Oracle {
            rhat,
            rs,
            starts,
            seed,
        } => {
            let rhat = load_hermitian(&rhat)?;
            let rs = load_hermitian(&rs)?;
            let params = derive_params(&rhat, &rs);
            let q = factorize_presumed(&rs, None)?;
            let report = multistart_minimize(&rhat, params.gamma, &q, params.eta, starts, seed)?;
            println!("{}", serde_json::to_string_pretty(&report.to_json())?);
            Ok(())
        }
    }
}

fn load_hermitian(path: &str) -> Result<HermitianMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })?;
    let json: ComplexMatrixJson = serde_json::from_str(&text)?;
    HermitianMatrix::new(json.to_cmat()?)
}
