//! Pattern-level reproductions on procedural stand-ins for the classic
//! animal, insect and vehicle outlines.

use medispline::bspline::{fit_minimal, CubicBSpline3};
use medispline::delaunay::delaunay;
use medispline::geometry::{MedialPoint, Normalization, Polygon};
use medispline::pipeline::{run_pipeline, PipelineConfig, PipelineOutput};
use medispline::pruning::{boundary_error, prune};
use medispline::reconstruction::{mat_error, sample_curve};
use medispline::shapes;
use medispline::skeleton::{extract_chains, extract_initial_mat, MatGraph, VertexKind};

fn normalized(poly: &Polygon) -> Polygon {
    let n = Normalization::unit_diagonal(poly.vertices()).unwrap();
    Polygon::new_unchecked(poly.vertices().iter().map(|&p| n.apply(p)).collect())
}

fn pruned_error(poly: &Polygon, eps_hat: f64) -> f64 {
    let b = normalized(poly);
    let g = extract_initial_mat(&delaunay(b.vertices()).unwrap(), &b).unwrap();
    boundary_error(b.vertices(), &prune(&g, b.vertices(), eps_hat).unwrap()).unwrap()
}

fn fixture(name: &str) -> Polygon {
    shapes::suite(1000).into_iter().find(|f| f.name == name).unwrap().polygon
}

fn run(poly: &Polygon, eps_hat: f64) -> PipelineOutput {
    let cfg = PipelineConfig {
        eps_hat,
        ..Default::default()
    };
    run_pipeline(poly.vertices(), &cfg).unwrap()
}

#[test]
fn butterfly_pruning_uses_the_whole_budget() {
    let eps = pruned_error(&shapes::butterfly(1000), 0.001);
    assert!(eps <= 0.001, "{eps}");
    assert!((100.0 * eps * 100.0).round() / 100.0 == 0.10, "{eps}");
}

#[test]
fn seahorse_pruning_stays_under_threshold() {
    let eps = pruned_error(&shapes::seahorse(1000), 0.001);
    assert!(eps <= 0.001, "{eps}");
}

#[test]
fn swan_spline_beats_the_pruned_axis() {
    let out = run(&fixture("swan-like"), 0.004);
    let r = &out.report;
    assert!(r.pruned_epsilon <= 0.004 && r.pruned_epsilon > 0.003, "{}", r.pruned_epsilon);
    assert!(r.epsilon < r.pruned_epsilon);
    assert!(r.epsilon < r.fitted_epsilon);
    assert!(10 * r.control_points < r.pruned_vertices);
}

#[test]
fn car_meets_threshold_compactly() {
    let out = run(&fixture("car-like"), 0.004);
    assert!(out.report.epsilon <= 0.004);
    assert!(out.report.compactness >= 0.70 && out.report.compactness <= 0.99);
    assert!(out.report.violations.is_empty());
}

#[test]
fn capsule_needs_at_most_five_controls() {
    let out = run(&shapes::capsule(400, 1.0, 0.3), 0.005);
    assert!(out.report.control_points <= 5);
    let chains = extract_chains(&out.stages.pruned);
    assert_eq!(chains.len(), 1);
    let fit = fit_minimal(&chains[0].points(&out.stages.pruned), 0.005).unwrap();
    assert!(fit.curve.n_ctrl() <= 5);
}

#[test]
fn l_shape_has_a_joint() {
    let b = shapes::l_shape(300, 1.0, 0.3);
    let g = extract_initial_mat(&delaunay(b.vertices()).unwrap(), &b).unwrap();
    assert!((0..g.len()).any(|v| g.kind(v) == VertexKind::Joint));
}

/// Discrete MAT made of dense circle samples of every curve.
fn dense_circles(curves: &[CubicBSpline3], per_span: usize) -> MatGraph {
    let mut vertices: Vec<MedialPoint> = Vec::new();
    let mut edges = Vec::new();
    for c in curves {
        let first = vertices.len();
        vertices.extend(sample_curve(c, per_span).iter().map(|s| s.point));
        edges.extend((first + 1..vertices.len()).map(|k| (k - 1, k)));
    }
    MatGraph::new(vertices, edges)
}

#[test]
fn spline_error_tracks_its_dense_circle_sampling() {
    for name in ["ellipse", "tri-star", "blob"] {
        let out = run(&fixture(name), 0.005);
        let pts = out.stages.boundary.vertices();
        let spline = mat_error(pts, &out.mat, 16).unwrap();
        let discrete = boundary_error(pts, &dense_circles(out.mat.curves(), 64)).unwrap();
        let longest_span = out
            .mat
            .curves()
            .iter()
            .flat_map(|c| {
                (0..c.span_count()).map(move |s| {
                    let (a, b) = c.span_range(s);
                    (0..64)
                        .map(|k| {
                            let t = |j: f64| a + (b - a) * j / 64.0;
                            c.point_at(t(k as f64)).u.dist(c.point_at(t(k as f64 + 1.0)).u)
                        })
                        .sum::<f64>()
                })
            })
            .fold(0.0, f64::max);
        assert!(spline <= discrete + 2.0 / 16.0 * longest_span, "{name}: {spline} vs {discrete}");
    }
}
