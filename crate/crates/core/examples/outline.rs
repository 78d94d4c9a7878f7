//! Polygonal outline of the shape reconstructed from a spline MAT.

use medispline::geometry::polygon_bbox_diagonal;
use medispline::pipeline::{run_pipeline, PipelineConfig};
use medispline::reconstruction::envelope_outline;
use medispline::shapes;

fn main() -> medispline::error::Result<()> {
    let boundary = shapes::fourier_blob(500, 1.0, &[(2, 0.2, 0.0), (3, 0.08, 0.5)]);
    let out = run_pipeline(boundary.vertices(), &PipelineConfig::default())?;
    let outlines = envelope_outline(&out.mat, 16, 400)?;
    let original = &out.stages.boundary;
    println!("{} outline loop(s)", outlines.len());
    for (i, poly) in outlines.iter().enumerate() {
        println!(
            "  loop {i}: {} vertices, area {:.5} (input {:.5}), bbox diagonal {:.4}",
            poly.len(),
            poly.signed_area(),
            original.signed_area(),
            polygon_bbox_diagonal(poly)
        );
    }
    Ok(())
}
