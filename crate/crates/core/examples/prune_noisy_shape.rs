//! Error-bounded pruning of the noisy branches that boundary noise grows
//! on a Voronoi medial axis.

use medispline::delaunay::delaunay;
use medispline::geometry::{Normalization, Point2, Polygon};
use medispline::pruning::{boundary_error, prune};
use medispline::shapes;
use medispline::skeleton::extract_initial_mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> medispline::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let clean = shapes::ellipse(800, 1.0, 0.6);
    let noisy = shapes::smooth_radial_noise(&clean, Point2::new(0.0, 0.0), 0.02, 24, &mut rng);
    let norm = Normalization::unit_diagonal(noisy.vertices())?;
    let boundary = Polygon::new_unchecked(noisy.vertices().iter().map(|&p| norm.apply(p)).collect());
    let pts = boundary.vertices();

    let initial = extract_initial_mat(&delaunay(pts)?, &boundary)?;
    println!(
        "initial axis: {} vertices, {} end-points",
        initial.len(),
        initial.end_points().count()
    );
    println!("initial error {:.4}%", 100.0 * boundary_error(pts, &initial)?);
    println!("{:>8} {:>9} {:>10} {:>10}", "eps_hat", "vertices", "end-points", "error");
    for eps_hat in [0.001, 0.005, 0.01, 0.02] {
        let pruned = prune(&initial, pts, eps_hat)?;
        let err = boundary_error(pts, &pruned)?;
        assert!(err <= eps_hat);
        println!(
            "{:>7.1}% {:>9} {:>10} {:>9.3}%",
            100.0 * eps_hat,
            pruned.len(),
            pruned.end_points().count(),
            100.0 * err
        );
    }
    Ok(())
}
