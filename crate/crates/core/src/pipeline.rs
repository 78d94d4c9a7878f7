//! End-to-end computation of an error-bounded spline MAT from ordered
//! boundary samples.

use std::time::Instant;

use serde::Serialize;

use crate::bspline::fit_minimal;
use crate::delaunay::delaunay;
use crate::error::{Error, Result};
use crate::geometry::{closest_on_segment, Normalization, Point2, Polygon};
use crate::optimizer::{minimize, simplify, validate_mat, OptimizationConfig, Violation};
use crate::pruning::{boundary_error, prune};
use crate::reconstruction::mat_error;
use crate::skeleton::{extract_chains, extract_initial_mat, MatGraph};
use crate::spline_mat::SplineMat;

/// Largest admissible ratio of sample spacing to local feature size.
pub const SAMPLING_RATIO: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Error threshold as a fraction of the bounding-box diagonal.
    pub eps_hat: f64,
    pub optimization: OptimizationConfig,
    /// Fail instead of warning when the samples are too sparse.
    pub strict_sampling: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            eps_hat: 0.004,
            optimization: OptimizationConfig::default(),
            strict_sampling: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingCheck {
    pub ok: bool,
    /// Largest spacing-to-feature-size ratio over all samples.
    pub worst_ratio: f64,
}

/// Checks that neighboring samples are closer than [`SAMPLING_RATIO`]
/// times the local feature size, the distance to the initial medial
/// axis (vertices and edges). An empty axis fails.
pub fn check_sampling(points: &[Point2], mat0: &MatGraph) -> SamplingCheck {
    if mat0.is_empty() || points.len() < 2 {
        return SamplingCheck {
            ok: false,
            worst_ratio: f64::INFINITY,
        };
    }
    let v = mat0.vertices();
    let n = points.len();
    let mut worst: f64 = 0.0;
    for (i, &p) in points.iter().enumerate() {
        let mut lfs = v.iter().map(|m| p.dist(m.u)).fold(f64::INFINITY, f64::min);
        for &(a, b) in mat0.edges() {
            lfs = lfs.min(closest_on_segment(p, v[a].u, v[b].u).1.sqrt());
        }
        let spacing = p.dist(points[(i + 1) % n]).max(p.dist(points[(i + n - 1) % n]));
        let ratio = if lfs > 0.0 { spacing / lfs } else { f64::INFINITY };
        worst = worst.max(ratio);
    }
    SamplingCheck {
        ok: worst <= SAMPLING_RATIO,
        worst_ratio: worst,
    }
}

/// Table-style summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub boundary_points: usize,
    /// Vertices of the initial Voronoi medial axis.
    pub initial_vertices: usize,
    /// Vertices after pruning.
    pub pruned_vertices: usize,
    /// Distinct control points of the spline MAT.
    pub control_points: usize,
    pub curves: usize,
    pub eps_hat: f64,
    /// Error of the pruned discrete MAT.
    pub pruned_epsilon: f64,
    /// Error of the fitted, unoptimized spline MAT.
    pub fitted_epsilon: f64,
    pub epsilon: f64,
    /// `1 - control_points / pruned_vertices`.
    pub compactness: f64,
    pub insertions: usize,
    /// Whether `epsilon <= eps_hat` was reached.
    pub converged: bool,
    pub sampling: SamplingCheck,
    pub violations: Vec<Violation>,
    /// Curve fitting and optimization time.
    pub simplification_seconds: f64,
}

/// Intermediate results, all in normalized coordinates.
#[derive(Debug, Clone)]
pub struct Stages {
    pub boundary: Polygon,
    pub initial: MatGraph,
    pub pruned: MatGraph,
    pub fitted: SplineMat,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Final MAT in normalized coordinates.
    pub mat: SplineMat,
    pub normalization: Normalization,
    pub report: RunReport,
    pub stages: Stages,
}

/// Boundary polygon in counterclockwise order.
pub fn prepare_boundary(points: &[Point2]) -> Result<Polygon> {
    let poly = Polygon::new(points.to_vec())?;
    if poly.signed_area() < 0.0 {
        let mut pts = points.to_vec();
        pts.reverse();
        return Ok(Polygon::new_unchecked(pts));
    }
    Ok(poly)
}

/// Normalizes the boundary, builds and prunes the Voronoi medial axis,
/// fits each chain with the fewest reliable control points, then
/// optimizes and refines until the error is at most `eps_hat`.
///
/// On failure to reach the threshold the error carries the best MAT
/// found, in normalized coordinates.
pub fn run_pipeline(points: &[Point2], cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let out = run_pipeline_best_effort(points, cfg)?;
    if out.report.converged {
        Ok(out)
    } else {
        Err(Error::NonConvergence {
            best: Box::new(out.mat),
            achieved: out.report.epsilon,
            target: cfg.eps_hat,
        })
    }
}

/// Like [`run_pipeline`], but a run that misses the threshold still
/// returns its best MAT, with `report.converged` unset.
pub fn run_pipeline_best_effort(points: &[Point2], cfg: &PipelineConfig) -> Result<PipelineOutput> {
    if !(cfg.eps_hat > 0.0 && cfg.eps_hat < 1.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon must lie in (0, 1), got {}",
            cfg.eps_hat
        )));
    }
    cfg.optimization.validate()?;
    let raw = prepare_boundary(points).map_err(|e| e.in_stage("input"))?;
    let normalization = Normalization::unit_diagonal(raw.vertices()).map_err(|e| e.in_stage("input"))?;
    let boundary = Polygon::new_unchecked(raw.vertices().iter().map(|&p| normalization.apply(p)).collect());
    let pts = boundary.vertices();

    let tri = delaunay(pts).map_err(|e| e.in_stage("delaunay"))?;
    let initial = extract_initial_mat(&tri, &boundary).map_err(|e| e.in_stage("medial axis"))?;
    let sampling = check_sampling(pts, &initial);
    if !sampling.ok {
        if cfg.strict_sampling {
            return Err(Error::InvalidInput(format!(
                "boundary is under-sampled: spacing/lfs reaches {:.3} > {SAMPLING_RATIO}",
                sampling.worst_ratio
            ))
            .in_stage("sampling"));
        }
        log::warn!(
            "boundary is under-sampled: spacing/lfs reaches {:.3} > {SAMPLING_RATIO}",
            sampling.worst_ratio
        );
    }

    let pruned = prune(&initial, pts, cfg.eps_hat).map_err(|e| e.in_stage("pruning"))?;
    let pruned_epsilon = boundary_error(pts, &pruned).map_err(|e| e.in_stage("pruning"))?;
    log::info!(
        "medial axis: {} vertices, {} after pruning (error {:.5})",
        initial.len(),
        pruned.len(),
        pruned_epsilon
    );

    let start = Instant::now();
    let chains = extract_chains(&pruned);
    let mut curves = Vec::with_capacity(chains.len());
    let mut caps = Vec::with_capacity(chains.len());
    for chain in &chains {
        let cp = chain.points(&pruned);
        let fit = fit_minimal(&cp, cfg.eps_hat).map_err(|e| e.in_stage("fitting"))?;
        if !fit.reliable {
            log::debug!("chain of {} points fitted unreliably", cp.len());
        }
        caps.push(cp.len().max(4));
        curves.push(fit.curve);
    }
    let fitted = SplineMat::from_chains(&pruned, &chains, curves).map_err(|e| e.in_stage("fitting"))?;
    let sps = cfg.optimization.samples_per_span;
    let fitted_epsilon = mat_error(pts, &fitted, sps).map_err(|e| e.in_stage("fitting"))?;

    let (optimized, energy) = minimize(&fitted, pts, &cfg.optimization).map_err(|e| e.in_stage("optimization"))?;
    let (start_mat, start_eps) = if energy.epsilon <= fitted_epsilon || fitted_epsilon > cfg.eps_hat {
        (optimized, energy.epsilon)
    } else {
        (fitted.clone(), fitted_epsilon)
    };
    let (mat, epsilon, insertions, converged) = if start_eps <= cfg.eps_hat {
        (start_mat, start_eps, 0, true)
    } else {
        match simplify(&start_mat, pts, cfg.eps_hat, &caps, &cfg.optimization) {
            Ok(s) => (s.mat, s.epsilon, s.insertions, true),
            Err(Error::NonConvergence { best, achieved, .. }) => {
                log::warn!("threshold {} not reached; best error {achieved:.3e}", cfg.eps_hat);
                // Every insertion adds one distinct control point.
                let insertions = best.control_point_count() - start_mat.control_point_count();
                (*best, achieved, insertions, false)
            }
            Err(e) => return Err(e.in_stage("simplification")),
        }
    };
    let simplification_seconds = start.elapsed().as_secs_f64();

    let violations = validate_mat(&mat, sps);
    if !violations.is_empty() {
        log::warn!("{} validity violations in the output", violations.len());
    }
    let control_points = mat.control_point_count();
    let report = RunReport {
        boundary_points: pts.len(),
        initial_vertices: initial.len(),
        pruned_vertices: pruned.len(),
        control_points,
        curves: mat.curves().len(),
        eps_hat: cfg.eps_hat,
        pruned_epsilon,
        fitted_epsilon,
        epsilon,
        compactness: 1.0 - control_points as f64 / pruned.len() as f64,
        insertions,
        converged,
        sampling,
        violations,
        simplification_seconds,
    };
    Ok(PipelineOutput {
        mat,
        normalization,
        report,
        stages: Stages {
            boundary,
            initial,
            pruned,
            fitted,
        },
    })
}
