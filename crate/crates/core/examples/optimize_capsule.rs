//! Quasi-Newton minimization of the squared boundary distance, starting
//! from a distorted capsule MAT.

use medispline::bspline::CubicBSpline3;
use medispline::geometry::MedialPoint;
use medispline::optimizer::{minimize, OptimizationConfig};
use medispline::reconstruction::mat_error;
use medispline::shapes;
use medispline::spline_mat::SplineMat;

fn main() -> medispline::error::Result<()> {
    let boundary = shapes::capsule(400, 1.0, 0.3);
    let pts = boundary.vertices();
    let start = SplineMat::new(
        vec![CubicBSpline3::new(vec![
            MedialPoint::new(-0.9, 0.05, 0.25),
            MedialPoint::new(-0.3, -0.1, 0.4),
            MedialPoint::new(0.3, 0.1, 0.2),
            MedialPoint::new(0.95, -0.05, 0.33),
        ])],
        vec![],
    )?;
    let cfg = OptimizationConfig::default();
    println!("start error {:.5}", mat_error(pts, &start, cfg.samples_per_span)?);

    let (mat, report) = minimize(&start, pts, &cfg)?;
    println!(
        "{} iterations, {} evaluations, stopped by {:?}: energy {:.3e}, error {:.3e}",
        report.iterations, report.evaluations, report.termination, report.energy, report.epsilon
    );
    for p in mat.curves()[0].control_points() {
        println!("  ({:+.4}, {:+.4})  r {:.4}", p.u.x, p.u.y, p.r);
    }
    Ok(())
}
