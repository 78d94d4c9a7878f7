//! The whole pipeline over the procedural fixture suite, summarized as a
//! table.

use medispline::pipeline::{run_pipeline, PipelineConfig};
use medispline::shapes;

fn main() -> medispline::error::Result<()> {
    let eps_hat: f64 = std::env::args().nth(1).map_or(0.005, |s| s.parse().expect("threshold"));
    let cfg = PipelineConfig {
        eps_hat,
        ..Default::default()
    };
    println!(
        "{:<11} {:>5} {:>5} {:>4} {:>8} {:>8} {:>8} {:>7} {:>6}",
        "fixture", "|B|", "|Ms|", "|M|", "eps(Ms)", "fitted", "eps", "compact", "time"
    );
    for f in shapes::suite(1000) {
        let out = run_pipeline(f.polygon.vertices(), &cfg)?;
        let r = &out.report;
        println!(
            "{:<11} {:>5} {:>5} {:>4} {:>7.3}% {:>7.3}% {:>7.3}% {:>6.1}% {:>5.2}s",
            f.name,
            r.boundary_points,
            r.pruned_vertices,
            r.control_points,
            100.0 * r.pruned_epsilon,
            100.0 * r.fitted_epsilon,
            100.0 * r.epsilon,
            100.0 * r.compactness,
            r.simplification_seconds
        );
    }
    Ok(())
}
