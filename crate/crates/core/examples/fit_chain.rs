//! Least-squares cubic B-spline fitting of a medial chain with the
//! fewest control points meeting a tolerance.

use medispline::bspline::{fit_chain, fit_minimal};
use medispline::geometry::MedialPoint;

fn main() -> medispline::error::Result<()> {
    // A wavy branch whose radius swells in the middle.
    let chain: Vec<MedialPoint> = (0..120)
        .map(|i| {
            let s = i as f64 / 119.0;
            MedialPoint::new(s, 0.08 * (3.0 * std::f64::consts::PI * s).sin(), 0.05 + 0.04 * (std::f64::consts::PI * s).sin())
        })
        .collect();

    println!("{:>8} {:>12}", "controls", "fit error");
    for n in [4, 5, 6, 8, 12] {
        let fit = fit_chain(&chain, n)?;
        println!("{n:>8} {:>12.3e}", fit.fit_error);
    }

    for eps_hat in [1e-2, 1e-3, 1e-4] {
        let best = fit_minimal(&chain, eps_hat)?;
        println!(
            "eps_hat {eps_hat:.0e}: {} control points, fit error {:.3e}, reliable {}",
            best.curve.n_ctrl(),
            best.fit_error,
            best.reliable
        );
        let mid = best.curve.point_at(0.5);
        println!("  curve(0.5) = ({:.4}, {:.4}, r {:.4})", mid.u.x, mid.u.y, mid.r);
    }
    Ok(())
}
