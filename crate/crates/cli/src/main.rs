//! `branchcut`: branch-cut portraits, convergence rates and holomorphic
//! embedding power flow from the command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 nonconvergence verdict,
//! 3 input error, 4 precision floor.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use branchcut::cut::Plane;
use branchcut::series::{CaseId, ExpansionPoint};
use clap::{Parser, Subcommand};

use commands::CliError;
use config::{parse_list, parse_point, parse_rect, Command, RunConfig, SpecSource};

#[derive(Parser, Debug)]
#[command(name = "branchcut", version, about = "High-precision Padé approximant laboratory")]
struct Cli {
    /// Working precision in bits
    #[arg(long, global = true, env = "BRANCHCUT_BITS", default_value_t = 512)]
    bits: u32,
    /// Output directory for reports and portraits
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Portrait of a case-table function developed at infinity
    Case {
        case: CaseId,
        #[arg(long, default_value_t = 99)]
        degree: usize,
        #[arg(long, default_value_t = 0.05)]
        band: f64,
    },
    /// Portrait of a spec file (or builtin:A..D, builtin:segment)
    Logfn {
        spec: String,
        #[arg(long, default_value = "infinity")]
        expansion: ExpansionPoint,
        #[arg(long, default_value_t = 25)]
        degree: usize,
        #[arg(long, default_value = "inverse-alpha")]
        plane: Plane,
        #[arg(long, default_value_t = 0.05)]
        band: f64,
    },
    /// Error against degree and the fitted convergence factor at a point
    Convergence {
        spec: String,
        /// `re` or `re,im`
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "10,15,20,25")]
        degrees: String,
        /// Capacity of the cut, for the predicted factor cap/|point|
        #[arg(long)]
        capacity: Option<f64>,
    },
    /// Area of the eps-bad set on a grid, per degree
    Badness {
        spec: String,
        /// x_min,x_max,y_min,y_max
        #[arg(long, default_value = "-4,4,-4,4", allow_hyphen_values = true)]
        rect: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value = "25,51,99")]
        degrees: String,
    },
    /// Solve a network at loading alpha
    Hem {
        network: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 40)]
        max_m: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Estimate the saddle-node bifurcation point of a network
    Snbp {
        network: PathBuf,
        #[arg(long, default_value_t = 30)]
        max_m: usize,
        #[arg(long, default_value_t = 1e6)]
        horizon: f64,
    },
}

fn config(cli: Cli) -> Result<RunConfig, String> {
    let command = match cli.command {
        Sub::Case { case, degree, band } => Command::Case { case, degree, band },
        Sub::Logfn {
            spec,
            expansion,
            degree,
            plane,
            band,
        } => Command::Logfn {
            spec: SpecSource::parse(&spec)?,
            expansion,
            degree,
            plane,
            band,
        },
        Sub::Convergence {
            spec,
            point,
            degrees,
            capacity,
        } => Command::Convergence {
            spec: SpecSource::parse(&spec)?,
            point: parse_point(&point)?,
            degrees: parse_list(&degrees)?,
            capacity,
        },
        Sub::Badness {
            spec,
            rect,
            grid,
            eps,
            degrees,
        } => Command::Badness {
            spec: SpecSource::parse(&spec)?,
            rect: parse_rect(&rect)?,
            grid,
            eps,
            degrees: parse_list(&degrees)?,
        },
        Sub::Hem {
            network,
            alpha,
            max_m,
            tol,
        } => Command::Hem {
            network,
            alpha,
            max_m,
            tol,
        },
        Sub::Snbp {
            network,
            max_m,
            horizon,
        } => Command::Snbp {
            network,
            max_m,
            horizon,
        },
    };
    Ok(RunConfig {
        bits: cli.bits,
        out: cli.out,
        command,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = config(cli).map_err(CliError::Input).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(outcome) => {
            // a closed pipe on stdout is not a failure of the run
            let _ = writeln!(
                std::io::stdout().lock(),
                "{}",
                serde_json::to_string_pretty(&outcome.report).expect("json")
            );
            ExitCode::from(if outcome.nonconvergent { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("branchcut: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
