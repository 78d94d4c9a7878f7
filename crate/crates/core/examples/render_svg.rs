//! SVG renderings of every pipeline stage plus the MAT and report JSON.
//! Pass an output directory, or a temporary one is used.

use std::path::PathBuf;

use medispline::io::{emit_outputs, MatFile, OutputPaths};
use medispline::pipeline::{run_pipeline, PipelineConfig};
use medispline::reconstruction::mat_error;
use medispline::shapes;

fn main() -> medispline::error::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("medispline-render"));
    let boundary = shapes::star(600, 3, 0.35, 1.0);
    let cfg = PipelineConfig::default();
    let out = run_pipeline(boundary.vertices(), &cfg)?;

    let paths = OutputPaths {
        mat: Some(dir.join("mat.json")),
        report: Some(dir.join("report.json")),
        svg_dir: Some(dir.join("svg")),
        emit_stages: true,
    };
    for p in emit_outputs(&out, &paths, cfg.optimization.samples_per_span)? {
        println!("wrote {}", p.display());
    }

    // The emitted MAT reproduces the reported error.
    let file = MatFile::from_json(&std::fs::read_to_string(dir.join("mat.json"))?)?;
    let eps = mat_error(out.stages.boundary.vertices(), &file.mat, cfg.optimization.samples_per_span)?;
    println!("reported error {:.6}, recomputed from JSON {:.6}", out.report.epsilon, eps);
    Ok(())
}
