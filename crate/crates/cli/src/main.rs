//! `knotmorph`: validate, refine, sweep, rule and morph stick knots from the
//! command line, and serve sessions over HTTP.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::CliError;

#[derive(Debug, Parser)]
#[command(name = "knotmorph", version, about = "Ruled surfaces between morphed Bezier knots")]
struct Cli {
    /// Print a versioned JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Write meshes and polygons into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Mesh export format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Obj)]
    format: Format,

    /// Seed for projection-direction jitter and search; KNOTMORPH_SEED overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Obj,
    Ply,
}

#[derive(Debug, Args)]
struct Resolution {
    /// Samples per boundary curve (default: 8 per polygon segment, at least 64).
    #[arg(long)]
    samples: Option<usize>,
    /// Triangle rows between the boundary curves.
    #[arg(long = "vsteps", default_value_t = 16)]
    v_steps: usize,
    /// Witnesses shorter than this are reported as grazing.
    #[arg(long, default_value_t = knotmorph_core::intersect::DEFAULT_EPS)]
    eps: f64,
}

#[derive(Debug, Args)]
struct Scan {
    #[arg(long, default_value_t = knotmorph_core::morph::DEFAULT_GRID)]
    grid: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Shift of the moving curves, `x,y,z` or `auto` (half the largest safe sweep length
    /// of the fixed curve over a seeded set of directions).
    #[arg(long, default_value = "auto")]
    lift: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a knot file against the input-polygon rules.
    Validate { knot: PathBuf },
    /// Refine by midpoint insertion and tabulate polygon-to-curve distances.
    Refine {
        knot: PathBuf,
        #[arg(long, default_value_t = 5)]
        iters: usize,
        /// Samples for the distance estimate.
        #[arg(long, default_value_t = 2048)]
        samples: usize,
    },
    /// Sweep a knot along a direction and test the surface.
    Sweep {
        knot: PathBuf,
        #[arg(long, default_value = "0,0,1")]
        dir: String,
        /// A positive length, or `auto` for 0.99 of the safe sweep length.
        #[arg(long, default_value = "auto")]
        length: String,
        #[command(flatten)]
        resolution: Resolution,
    },
    /// Rule the surface between two knots and certify it.
    Rule {
        knot_a: PathBuf,
        knot_b: PathBuf,
        #[command(flatten)]
        resolution: Resolution,
    },
    /// Locate the first self-intersection while morphing knot A into knot B.
    Morph {
        knot_a: PathBuf,
        knot_b: PathBuf,
        #[command(flatten)]
        resolution: Resolution,
        #[command(flatten)]
        scan: Scan,
    },
    /// Morph between the Bezier curves of refinement iterates J and J+1.
    IterateMorph {
        knot: PathBuf,
        #[arg(long = "from")]
        from: usize,
        #[command(flatten)]
        resolution: Resolution,
        #[command(flatten)]
        scan: Scan,
    },
    /// Recompute a service mesh (or transition) from a saved session document.
    Replay {
        session: PathBuf,
        #[arg(long)]
        morph: String,
        /// Morph parameter; omit to run the transition search instead.
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long = "vsteps")]
        v_steps: Option<usize>,
    },
    /// Serve the session API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(CliError::Failed { output }) => {
            print!("{output}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("knotmorph: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
