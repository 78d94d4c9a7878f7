//! Least-squares fitting of the reconstruction to the boundary samples:
//! energy and gradient over all control points, quasi-Newton descent, and
//! the insert-and-reoptimize loop.

use std::time::Instant;

use serde::Serialize;

use crate::bspline::{fit_chain, CubicBSpline3, DEGREE};
use crate::error::{Error, Result};
use crate::geometry::{MedialPoint, Point2};
use crate::lbfgs::{self, Memory, WolfeParams};
use crate::reconstruction::{
    error_report_sampled, sample_curve, segment_between, Footpoint, FootpointCache, FootpointRecord,
    SampledMat, Sample,
};
use crate::spline_mat::{SplineMat, VariableLayout};

/// Gradient norm treated as zero regardless of the relative tolerance.
const GRADIENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationConfig {
    /// Curvature pairs kept by the quasi-Newton method.
    pub memory: usize,
    /// Stop when the gradient norm falls below this fraction of its
    /// initial value.
    pub gradient_tol: f64,
    pub max_inner_iterations: usize,
    pub max_outer_rounds: usize,
    pub samples_per_span: usize,
    /// Same-curve neighborhood, in segments, of local footpoint checks.
    pub local_window: usize,
    /// Every this many iterations footpoints are recomputed globally.
    pub recalibration_period: usize,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        Self {
            memory: 8,
            gradient_tol: 1e-8,
            max_inner_iterations: 500,
            max_outer_rounds: 50,
            samples_per_span: crate::reconstruction::DEFAULT_SAMPLES_PER_SPAN,
            local_window: 2,
            recalibration_period: 10,
        }
    }
}

impl OptimizationConfig {
    pub fn validate(&self) -> Result<()> {
        let all_positive = self.memory > 0
            && self.gradient_tol > 0.0
            && self.max_inner_iterations > 0
            && self.max_outer_rounds > 0
            && self.samples_per_span > 0
            && self.local_window > 0
            && self.recalibration_period > 0;
        if all_positive {
            Ok(())
        } else {
            Err(Error::InvalidInput("optimization settings must be positive".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradientTolerance,
    IterationCap,
    /// No decrease between two global footpoint passes.
    Stalled,
    LineSearchFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub energy: f64,
    pub gradient_norm: f64,
    pub records: Vec<FootpointRecord>,
    /// Error of the returned MAT from a full global footpoint pass.
    pub epsilon: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
    pub fallbacks: usize,
}

/// Which envelope segment a boundary point is measured against.
#[derive(Debug, Clone, Copy)]
struct Assignment {
    curve: usize,
    a: Sample,
    b: Sample,
}

/// Energy evaluation for fixed footpoint assignments.
struct Problem<'a> {
    points: &'a [Point2],
    layout: VariableLayout,
    assignments: Vec<Assignment>,
}

impl Problem<'_> {
    fn sample_at(&self, x: &[f64], c: usize, s: &Sample) -> MedialPoint {
        let mut p = [0.0; 3];
        for (j, w) in s.weights.iter().enumerate() {
            let id = self.layout.id(c, s.span - DEGREE + j);
            for k in 0..3 {
                p[k] += w * x[3 * id + k];
            }
        }
        MedialPoint::from_array(p)
    }

    fn scatter(&self, grad: &mut [f64], c: usize, s: &Sample, g: &[f64]) {
        for (j, w) in s.weights.iter().enumerate() {
            let id = self.layout.id(c, s.span - DEGREE + j);
            for k in 0..3 {
                grad[3 * id + k] += w * g[k];
            }
        }
    }

    fn energy(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut e = 0.0;
        let mut grad = vec![0.0; x.len()];
        for (p, asg) in self.points.iter().zip(&self.assignments) {
            let a = self.sample_at(x, asg.curve, &asg.a);
            let b = self.sample_at(x, asg.curve, &asg.b);
            let seg = segment_between(a, b);
            e += seg.sqdist(*p);
            let g = seg.gradient(*p).value;
            self.scatter(&mut grad, asg.curve, &asg.a, &g[..3]);
            self.scatter(&mut grad, asg.curve, &asg.b, &g[3..]);
        }
        (e, grad)
    }
}

/// Footpoint assignment state across iterations.
struct Tracker {
    caches: Vec<FootpointCache>,
    records: Vec<FootpointRecord>,
}

fn assign(
    mat: &SplineMat,
    points: &[Point2],
    cfg: &OptimizationConfig,
    tracker: &mut Option<Tracker>,
    global: bool,
) -> Result<Vec<Assignment>> {
    let sampled = SampledMat::new(mat, cfg.samples_per_span)?;
    let mut caches = Vec::with_capacity(points.len());
    let mut records = Vec::with_capacity(points.len());
    let mut out = Vec::with_capacity(points.len());
    for (i, &p) in points.iter().enumerate() {
        let f: Footpoint = match tracker {
            Some(t) if !global => {
                let f = sampled.footpoint_local(p, &t.caches[i], cfg.local_window);
                let mut cache = t.caches[i].clone();
                cache.segment = f.segment;
                caches.push(cache);
                f
            }
            _ => {
                let (f, cache) = sampled.footpoint_global(p);
                caches.push(cache);
                f
            }
        };
        records.push(sampled.record(i, &f));
        let seg = sampled.segments()[f.segment];
        let samples = sampled.samples(seg.curve);
        out.push(Assignment {
            curve: seg.curve,
            a: samples[seg.index],
            b: samples[seg.index + 1],
        });
    }
    *tracker = Some(Tracker { caches, records });
    Ok(out)
}

/// Full energy with footpoints from a fresh global pass.
pub fn energy_and_gradient(mat: &SplineMat, points: &[Point2], samples_per_span: usize) -> Result<(f64, Vec<f64>)> {
    let cfg = OptimizationConfig {
        samples_per_span,
        ..Default::default()
    };
    let mut tracker = None;
    let assignments = assign(mat, points, &cfg, &mut tracker, true)?;
    let layout = mat.layout();
    let x = mat.variables(&layout);
    let problem = Problem {
        points,
        layout,
        assignments,
    };
    Ok(problem.energy(&x))
}

/// Energy and gradient with footpoint assignments frozen at a MAT, as
/// seen by the line search.
pub struct FrozenEnergy<'a> {
    problem: Problem<'a>,
    x0: Vec<f64>,
}

impl<'a> FrozenEnergy<'a> {
    pub fn new(mat: &SplineMat, points: &'a [Point2], samples_per_span: usize) -> Result<Self> {
        let cfg = OptimizationConfig {
            samples_per_span,
            ..Default::default()
        };
        let layout = mat.layout();
        let x0 = mat.variables(&layout);
        let assignments = assign(mat, points, &cfg, &mut None, true)?;
        Ok(Self {
            problem: Problem {
                points,
                layout,
                assignments,
            },
            x0,
        })
    }

    /// Variables of the MAT the assignments were taken from.
    pub fn variables(&self) -> &[f64] {
        &self.x0
    }

    pub fn evaluate(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.problem.energy(x)
    }
}

/// Quasi-Newton descent on the sum of squared boundary distances.
/// Accepted energies never increase; the best iterate is returned.
pub fn minimize(mat: &SplineMat, points: &[Point2], cfg: &OptimizationConfig) -> Result<(SplineMat, EnergyReport)> {
    cfg.validate()?;
    let layout = mat.layout();
    let mut current = mat.clone();
    let mut x = current.variables(&layout);
    let mut tracker = None;
    let mut problem = Problem {
        points,
        layout: layout.clone(),
        assignments: assign(&current, points, cfg, &mut tracker, true)?,
    };
    let (mut e, mut g) = problem.energy(&x);
    let mut evaluations = 1;
    let tol = (cfg.gradient_tol * lbfgs::norm(&g)).max(GRADIENT_FLOOR);
    let mut memory = Memory::new(cfg.memory);
    let mut last_global_e = e;
    let mut verified = (x.clone(), e);
    let mut infeasible = infeasibility(&current, cfg.samples_per_span);
    let mut iterations = 0;
    let termination = loop {
        if lbfgs::norm(&g) <= tol || e == 0.0 {
            break Termination::GradientTolerance;
        }
        if iterations >= cfg.max_inner_iterations {
            break Termination::IterationCap;
        }
        let mut d = memory.direction(&g);
        if lbfgs::dot(&d, &g) >= 0.0 {
            memory.clear();
            d = g.iter().map(|v| -v).collect();
        }
        let d0 = lbfgs::dot(&d, &g);
        let alpha0 = if memory.is_empty() {
            (1.0 / lbfgs::norm(&g)).min(1.0)
        } else {
            1.0
        };
        let step = lbfgs::strong_wolfe(
            |a| {
                let xa: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + a * di).collect();
                problem.energy(&xa)
            },
            &d,
            e,
            d0,
            alpha0,
            WolfeParams::default(),
        );
        let Some(step) = step else {
            if !memory.is_empty() {
                memory.clear();
                continue;
            }
            break Termination::LineSearchFailure;
        };
        evaluations += step.evals;
        iterations += 1;
        let global = iterations % cfg.recalibration_period == 0;

        // Refresh footpoints at the new point; if the reassignment raises
        // the energy or the step breaks slope validity, shrink the step.
        let mut alpha = step.alpha;
        let mut accepted = None;
        for _ in 0..12 {
            let x_new: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            current.set_variables(&layout, &x_new);
            let trial_infeasible = infeasibility(&current, cfg.samples_per_span);
            if trial_infeasible > infeasible {
                alpha *= 0.5;
                continue;
            }
            let assignments = assign(&current, points, cfg, &mut tracker, global)?;
            let trial = Problem {
                points,
                layout: layout.clone(),
                assignments,
            };
            let (e_new, g_new) = trial.energy(&x_new);
            evaluations += 1;
            if e_new <= e {
                infeasible = trial_infeasible;
                accepted = Some((x_new, e_new, g_new, trial));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, e_new, g_new, trial)) = accepted else {
            current.set_variables(&layout, &x);
            break Termination::LineSearchFailure;
        };
        if alpha == step.alpha {
            let s: Vec<f64> = d.iter().map(|v| v * alpha).collect();
            let y: Vec<f64> = step.gradient.iter().zip(&g).map(|(a, b)| a - b).collect();
            memory.push(s, y);
        } else {
            memory.clear();
        }
        x = x_new;
        e = e_new;
        g = g_new;
        problem = trial;
        if global {
            if e < verified.1 {
                verified = (x.clone(), e);
            }
            if e >= last_global_e * (1.0 - 1e-12) {
                break Termination::Stalled;
            }
            last_global_e = e;
        }
    };
    // Local refreshes can drift from the true energy; never return an
    // iterate worse than the last globally evaluated one.
    current.set_variables(&layout, &x);
    let mut final_problem = Problem {
        points,
        layout: layout.clone(),
        assignments: assign(&current, points, cfg, &mut tracker, true)?,
    };
    (e, g) = final_problem.energy(&x);
    if e > verified.1 {
        x = verified.0;
        current.set_variables(&layout, &x);
        final_problem.assignments = assign(&current, points, cfg, &mut tracker, true)?;
        (e, g) = final_problem.energy(&x);
    }
    evaluations += 1;

    let sampled = SampledMat::new(&current, cfg.samples_per_span)?;
    let report = error_report_sampled(points, &sampled);
    let records = tracker.map(|t| t.records).unwrap_or_default();
    Ok((
        current,
        EnergyReport {
            energy: e,
            gradient_norm: lbfgs::norm(&g),
            records,
            epsilon: report.epsilon,
            iterations,
            evaluations,
            termination,
            fallbacks: report.fallbacks,
        },
    ))
}

/// Result of [`simplify`].
#[derive(Debug, Clone)]
pub struct Simplified {
    pub mat: SplineMat,
    pub epsilon: f64,
    pub insertions: usize,
    pub rounds: usize,
    pub seconds: f64,
}

/// Alternates minimization and single-curve control point insertion
/// until the reconstruction error is at most `eps_hat`. `caps[c]` bounds
/// the control points of curve `c`.
pub fn simplify(
    mat: &SplineMat,
    points: &[Point2],
    eps_hat: f64,
    caps: &[usize],
    cfg: &OptimizationConfig,
) -> Result<Simplified> {
    cfg.validate()?;
    assert_eq!(caps.len(), mat.curves().len());
    let start = Instant::now();
    let initial = crate::reconstruction::error_report(points, mat, cfg.samples_per_span)?;
    if initial.epsilon <= eps_hat {
        return Ok(Simplified {
            mat: mat.clone(),
            epsilon: initial.epsilon,
            insertions: 0,
            rounds: 0,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    let mut best = (mat.clone(), initial.epsilon);
    let mut current = mat.clone();
    let mut insertions = 0;
    let mut capped = vec![false; caps.len()];
    for round in 1..=cfg.max_outer_rounds {
        let (optimized, report) = minimize(&current, points, cfg)?;
        log::debug!(
            "round {round}: epsilon {:.6} after {} iterations ({:?})",
            report.epsilon,
            report.iterations,
            report.termination
        );
        if report.epsilon < best.1 {
            best = (optimized.clone(), report.epsilon);
        }
        if report.epsilon <= eps_hat {
            return Ok(Simplified {
                mat: optimized,
                epsilon: report.epsilon,
                insertions,
                rounds: round,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
        current = optimized;
        if round == cfg.max_outer_rounds {
            break;
        }
        let sampled = SampledMat::new(&current, cfg.samples_per_span)?;
        let full = error_report_sampled(points, &sampled);
        let mut order: Vec<&FootpointRecord> = full.records.iter().collect();
        order.sort_by(|a, b| b.sqdist.total_cmp(&a.sqdist).then(a.point.cmp(&b.point)));
        let mut inserted = false;
        for r in order {
            let curve = &current.curves()[r.curve];
            if capped[r.curve] || curve.n_ctrl() >= caps[r.curve].max(4) {
                continue;
            }
            match refine(curve) {
                Ok(refit) => {
                    current.replace_curve(r.curve, refit);
                    inserted = true;
                    break;
                }
                Err(Error::RankDeficient { .. }) => capped[r.curve] = true,
                Err(e) => return Err(e),
            }
        }
        if !inserted {
            log::debug!("every curve is at its control point cap");
            break;
        }
        insertions += 1;
    }
    Err(Error::NonConvergence {
        best: Box::new(best.0),
        achieved: best.1,
        target: eps_hat,
    })
}

/// Refits `curve` with one more control point from dense samples of
/// itself, sampling denser when the sparse fit is rank deficient.
fn refine(curve: &CubicBSpline3) -> Result<CubicBSpline3> {
    let mut last = None;
    for per_span in [8, 32] {
        let dense: Vec<MedialPoint> = sample_curve(curve, per_span).iter().map(|s| s.point).collect();
        match fit_chain(&dense, curve.n_ctrl() + 1) {
            Ok(fit) => return Ok(fit.curve),
            Err(e @ Error::RankDeficient { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `|Δr|` exceeds the planar distance between consecutive samples.
    Slope { curve: usize, sample: usize, tan_alpha: f64 },
    NegativeRadius { curve: usize, sample: usize, radius: f64 },
}

/// Slope and radius sign checks on consecutive samples of every curve.
pub fn validate_mat(mat: &SplineMat, samples_per_span: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    for (c, curve) in mat.curves().iter().enumerate() {
        let samples = sample_curve(curve, samples_per_span);
        for (k, s) in samples.iter().enumerate() {
            if s.point.r < 0.0 {
                out.push(Violation::NegativeRadius {
                    curve: c,
                    sample: k,
                    radius: s.point.r,
                });
            }
        }
        out.extend(slope_violations(samples.iter().map(|s| s.point), c));
    }
    out
}

/// Total amount by which sampled slopes exceed one and radii fall below
/// zero.
fn infeasibility(mat: &SplineMat, samples_per_span: usize) -> f64 {
    let mut total = 0.0;
    for curve in mat.curves() {
        let samples = sample_curve(curve, samples_per_span);
        for w in samples.windows(2) {
            let (a, b) = (w[0].point, w[1].point);
            total += ((b.r - a.r).abs() - a.u.dist(b.u)).max(0.0);
        }
        total += samples.iter().map(|s| (-s.point.r).max(0.0)).sum::<f64>();
    }
    total
}

fn slope_violations(points: impl Iterator<Item = MedialPoint>, curve: usize) -> Vec<Violation> {
    let pts: Vec<MedialPoint> = points.collect();
    pts.windows(2)
        .enumerate()
        .filter_map(|(k, w)| {
            let dr = (w[1].r - w[0].r).abs();
            let dist = w[0].u.dist(w[1].u);
            (dr > dist).then(|| Violation::Slope {
                curve,
                sample: k,
                tan_alpha: if dist > 0.0 { dr / dist } else { f64::INFINITY },
            })
        })
        .collect()
}
