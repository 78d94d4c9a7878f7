//! Delaunay triangulation of an L-shaped boundary and the interior
//! Voronoi medial axis it induces.

use medispline::delaunay::delaunay;
use medispline::shapes;
use medispline::skeleton::{extract_chains, extract_initial_mat, VertexKind};

fn main() -> medispline::error::Result<()> {
    let boundary = shapes::l_shape(240, 1.0, 0.3);
    let tri = delaunay(boundary.vertices())?;
    println!(
        "{} samples -> {} triangles, {} empty-circle violations",
        boundary.len(),
        tri.triangles().len(),
        tri.empty_circle_violations().len()
    );

    let mat = extract_initial_mat(&tri, &boundary)?;
    let count = |k: VertexKind| (0..mat.len()).filter(|&v| mat.kind(v) == k).count();
    println!(
        "medial axis: {} vertices ({} end-points, {} regular, {} joints), {} edges, {} component(s)",
        mat.len(),
        count(VertexKind::EndPoint),
        count(VertexKind::Regular),
        count(VertexKind::Joint),
        mat.edges().len(),
        mat.component_count()
    );

    let chains = extract_chains(&mat);
    let longest = chains.iter().max_by_key(|c| c.edge_count()).expect("non-empty axis");
    println!("{} chains; the longest has {} edges:", chains.len(), longest.edge_count());
    for p in longest.points(&mat).iter().step_by(longest.vertices.len().div_ceil(8)) {
        println!("  center ({:+.4}, {:+.4})  radius {:.4}", p.u.x, p.u.y, p.r);
    }
    Ok(())
}
