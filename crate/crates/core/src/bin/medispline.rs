use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use medispline::error::Error;
use medispline::io::{emit_outputs, read_points, MatFile, OutputPaths};
use medispline::optimizer::OptimizationConfig;
use medispline::pipeline::{run_pipeline_best_effort, PipelineConfig};

/// Compute an error-bounded cubic B-spline medial axis transform from
/// ordered boundary samples.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// Boundary points, JSON ({"points": [[x, y], ...]}) or two-column CSV.
    #[arg(long)]
    input: PathBuf,

    /// Error threshold as a fraction of the bounding-box diagonal.
    #[arg(long, default_value_t = 0.004)]
    epsilon: f64,

    /// MAT JSON destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Directory for SVG renderings.
    #[arg(long)]
    svg_dir: Option<PathBuf>,

    #[arg(long, default_value_t = OptimizationConfig::default().samples_per_span)]
    samples_per_span: usize,

    /// Control point insertion rounds before giving up.
    #[arg(long, default_value_t = OptimizationConfig::default().max_outer_rounds)]
    max_outer_rounds: usize,

    /// Reject under-sampled boundaries instead of warning.
    #[arg(long)]
    strict_sampling: bool,

    /// Also render the boundary, initial, pruned and fitted stages.
    #[arg(long)]
    emit_stages: bool,

    /// Run report JSON destination.
    #[arg(long)]
    report: Option<PathBuf>,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MEDISPLINE_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e.root() {
                Error::InvalidInput(_) | Error::DuplicatePoint(_) | Error::AllCollinear => EXIT_INPUT,
                _ => EXIT_FAILURE,
            };
            ExitCode::from(code)
        }
    }
}

fn run(args: &Args) -> Result<u8, Error> {
    let points = read_points(&args.input)?;
    let cfg = PipelineConfig {
        eps_hat: args.epsilon,
        optimization: OptimizationConfig {
            samples_per_span: args.samples_per_span,
            max_outer_rounds: args.max_outer_rounds,
            ..Default::default()
        },
        strict_sampling: args.strict_sampling,
    };
    let out = run_pipeline_best_effort(&points, &cfg)?;
    let paths = OutputPaths {
        mat: args.output.clone(),
        report: args.report.clone(),
        svg_dir: args.svg_dir.clone(),
        emit_stages: args.emit_stages,
    };
    emit_outputs(&out, &paths, args.samples_per_span)?;
    if args.output.is_none() {
        let file = MatFile {
            mat: out.mat.clone(),
            epsilon: out.report.epsilon,
            normalization: out.normalization,
        };
        std::io::stdout().write_all(file.to_json().as_bytes())?;
    }
    let r = &out.report;
    eprintln!(
        "{} boundary points, {} pruned medial vertices -> {} control points on {} curves; error {:.4}% (threshold {:.4}%)",
        r.boundary_points,
        r.pruned_vertices,
        r.control_points,
        r.curves,
        100.0 * r.epsilon,
        100.0 * r.eps_hat
    );
    if r.converged {
        Ok(0)
    } else {
        eprintln!("error: threshold not reached; the best MAT found was written");
        Ok(EXIT_NONCONVERGENCE)
    }
}
