//! Clamped cubic B-splines in (x, y, r) space and least-squares fitting
//! of medial chains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::MedialPoint;

pub const DEGREE: usize = 3;

/// Uniform parameter samples used to seed footpoint projection.
const PROJECTION_SEEDS: usize = 64;
const PROJECTION_ITERS: usize = 20;
const PROJECTION_TOL: f64 = 1e-12;

/// Relative pivot size below which the normal equations are treated as
/// singular.
const PIVOT_TOL: f64 = 1e-10;

type V3 = [f64; 3];

#[inline]
fn v3(p: MedialPoint) -> V3 {
    p.to_array()
}

#[inline]
fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Clamped cubic B-spline with an open-uniform knot vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicBSpline3 {
    knots: Vec<f64>,
    control_points: Vec<MedialPoint>,
}

/// Open-uniform knot vector on `[0, 1]` for `n` control points:
/// end knots of multiplicity four, uniform interior knots.
pub fn open_uniform_knots(n: usize) -> Vec<f64> {
    assert!(n > DEGREE, "a cubic needs at least 4 control points");
    let spans = n - DEGREE;
    let mut knots = vec![0.0; DEGREE + 1];
    knots.extend((1..spans).map(|i| i as f64 / spans as f64));
    knots.extend([1.0; DEGREE + 1]);
    knots
}

impl CubicBSpline3 {
    /// Curve with open-uniform knots over the given control points.
    pub fn new(control_points: Vec<MedialPoint>) -> Self {
        let knots = open_uniform_knots(control_points.len());
        Self {
            knots,
            control_points,
        }
    }

    /// Curve with explicit knots. Knots must be non-decreasing, clamped
    /// with multiplicity four and number `control points + 4`.
    pub fn with_knots(knots: Vec<f64>, control_points: Vec<MedialPoint>) -> Result<Self> {
        let n = control_points.len();
        if n <= DEGREE || knots.len() != n + DEGREE + 1 {
            return Err(Error::InvalidInput(format!(
                "{} knots for {} control points",
                knots.len(),
                n
            )));
        }
        if knots.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidInput("knots must be non-decreasing".into()));
        }
        let (a, b) = (knots[0], knots[knots.len() - 1]);
        if knots[..=DEGREE].iter().any(|&k| k != a)
            || knots[n..].iter().any(|&k| k != b)
            || a != 0.0
            || b != 1.0
        {
            return Err(Error::InvalidInput(
                "knots must be clamped on [0, 1] with end multiplicity 4".into(),
            ));
        }
        Ok(Self {
            knots,
            control_points,
        })
    }

    /// Collinear controls at thirds of the segment `a → b`.
    pub fn straight(a: MedialPoint, b: MedialPoint) -> Self {
        Self::new((0..4).map(|i| a.lerp(b, i as f64 / 3.0)).collect())
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn control_points(&self) -> &[MedialPoint] {
        &self.control_points
    }

    pub fn control_points_mut(&mut self) -> &mut [MedialPoint] {
        &mut self.control_points
    }

    pub fn n_ctrl(&self) -> usize {
        self.control_points.len()
    }

    /// Number of non-empty knot spans.
    pub fn span_count(&self) -> usize {
        self.n_ctrl() - DEGREE
    }

    /// Parameter range `[start, end]` of non-empty span `s`.
    pub fn span_range(&self, s: usize) -> (f64, f64) {
        (self.knots[DEGREE + s], self.knots[DEGREE + s + 1])
    }

    /// Index `i` with `knots[i] <= t < knots[i + 1]`, clamped so `t = 1`
    /// falls in the last span.
    pub fn find_span(&self, t: f64) -> usize {
        let n = self.n_ctrl();
        if t >= self.knots[n] {
            return n - 1;
        }
        if t <= self.knots[DEGREE] {
            return DEGREE;
        }
        // upper_bound over the interior part of the knot vector.
        let slice = &self.knots[DEGREE..=n];
        DEGREE + slice.partition_point(|&k| k <= t) - 1
    }

    /// Non-zero basis functions `N_{span-3..=span}` at `t`.
    pub fn basis(&self, span: usize, t: f64) -> [f64; 4] {
        let k = &self.knots;
        let mut n = [0.0; 4];
        let mut left = [0.0; 4];
        let mut right = [0.0; 4];
        n[0] = 1.0;
        for j in 1..=DEGREE {
            left[j] = t - k[span + 1 - j];
            right[j] = k[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = n[r] / (right[r + 1] + left[j - r]);
                n[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            n[j] = saved;
        }
        n
    }

    /// Basis functions and their first two derivatives at `t`.
    fn basis_derivatives(&self, span: usize, t: f64) -> [[f64; 4]; 3] {
        let k = &self.knots;
        let mut ndu = [[0.0; 4]; 4];
        let mut left = [0.0; 4];
        let mut right = [0.0; 4];
        ndu[0][0] = 1.0;
        for j in 1..=DEGREE {
            left[j] = t - k[span + 1 - j];
            right[j] = k[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }
        let mut ders = [[0.0; 4]; 3];
        for j in 0..=DEGREE {
            ders[0][j] = ndu[j][DEGREE];
        }
        let p = DEGREE as isize;
        for r in 0..=p {
            let mut a = [[0.0; 4]; 2];
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for kk in 1..=2isize {
                let mut d = 0.0;
                let rk = r - kk;
                let pk = p - kk;
                if r >= kk {
                    a[s2][0] = a[s1][0] / ndu[(pk + 1) as usize][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk as usize];
                }
                let j1 = if rk >= -1 { 1 } else { -rk };
                let j2 = if r - 1 <= pk { kk - 1 } else { p - r };
                for j in j1..=j2 {
                    a[s2][j as usize] = (a[s1][j as usize] - a[s1][(j - 1) as usize])
                        / ndu[(pk + 1) as usize][(rk + j) as usize];
                    d += a[s2][j as usize] * ndu[(rk + j) as usize][pk as usize];
                }
                if r <= pk {
                    a[s2][kk as usize] = -a[s1][(kk - 1) as usize] / ndu[(pk + 1) as usize][r as usize];
                    d += a[s2][kk as usize] * ndu[r as usize][pk as usize];
                }
                ders[kk as usize][r as usize] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for row in ders.iter_mut().skip(1) {
            for v in row.iter_mut() {
                *v *= factor;
            }
            factor *= (p - 1) as f64;
        }
        ders
    }

    /// Point on the curve; `t` must lie in `[0, 1]`.
    pub fn evaluate(&self, t: f64) -> Result<MedialPoint> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(t));
        }
        Ok(self.point_at(t))
    }

    /// De Boor evaluation without the domain check; `t` is clamped.
    pub fn point_at(&self, t: f64) -> MedialPoint {
        let t = t.clamp(0.0, 1.0);
        let n = self.n_ctrl();
        if t == 0.0 {
            return self.control_points[0];
        }
        if t == 1.0 {
            return self.control_points[n - 1];
        }
        let span = self.find_span(t);
        let k = &self.knots;
        let mut d: [V3; 4] = std::array::from_fn(|j| v3(self.control_points[span - DEGREE + j]));
        for r in 1..=DEGREE {
            for j in (r..=DEGREE).rev() {
                let i = span - DEGREE + j;
                let denom = k[i + DEGREE + 1 - r] - k[i];
                let alpha = if denom > 0.0 { (t - k[i]) / denom } else { 0.0 };
                for c in 0..3 {
                    d[j][c] = (1.0 - alpha) * d[j - 1][c] + alpha * d[j][c];
                }
            }
        }
        MedialPoint::from_array(d[DEGREE])
    }

    /// `(C(t), C'(t), C''(t))`.
    pub fn derivatives(&self, t: f64) -> [V3; 3] {
        let t = t.clamp(0.0, 1.0);
        let span = self.find_span(t);
        let ders = self.basis_derivatives(span, t);
        let mut out = [[0.0; 3]; 3];
        for (k, row) in ders.iter().enumerate() {
            for j in 0..=DEGREE {
                let p = v3(self.control_points[span - DEGREE + j]);
                for c in 0..3 {
                    out[k][c] += row[j] * p[c];
                }
            }
        }
        out
    }

    /// Footpoint of `q` on the curve in R³ by Newton iteration on the
    /// squared distance, started from each seed. Returns `(t, distance)`.
    pub fn project(&self, q: MedialPoint, seeds: &[f64]) -> (f64, f64) {
        let q = v3(q);
        let mut best = (0.0, f64::INFINITY);
        for &seed in seeds {
            let mut t = seed.clamp(0.0, 1.0);
            for _ in 0..PROJECTION_ITERS {
                let [c, d1, d2] = self.derivatives(t);
                let diff = sub(c, q);
                let g = dot(d1, diff);
                let h = dot(d1, d1) + dot(d2, diff);
                let step = if h > 0.0 { g / h } else { g.signum() * 1e-3 };
                let next = (t - step).clamp(0.0, 1.0);
                let moved = (next - t).abs();
                t = next;
                if moved <= PROJECTION_TOL {
                    break;
                }
            }
            let d = self.point_at(t).dist3(MedialPoint::from_array(q));
            if d < best.1 {
                best = (t, d);
            }
        }
        best
    }

    /// Distance from `q` to the curve, seeded at `t_hint` and at the
    /// nearest of the uniform samples in `table`.
    fn distance_with_table(&self, q: MedialPoint, t_hint: f64, table: &[(f64, MedialPoint)]) -> f64 {
        let nearest = table
            .iter()
            .min_by(|a, b| a.1.dist3(q).total_cmp(&b.1.dist3(q)))
            .map_or(t_hint, |s| s.0);
        self.project(q, &[t_hint, nearest]).1
    }

    fn seed_table(&self) -> Vec<(f64, MedialPoint)> {
        (0..=PROJECTION_SEEDS)
            .map(|i| {
                let t = i as f64 / PROJECTION_SEEDS as f64;
                (t, self.point_at(t))
            })
            .collect()
    }

    /// Largest R³ distance from `points` (with parameter hints) to the curve.
    pub fn max_distance(&self, points: &[MedialPoint], params: &[f64]) -> f64 {
        let table = self.seed_table();
        points
            .iter()
            .zip(params)
            .map(|(&q, &t)| self.distance_with_table(q, t, &table))
            .fold(0.0, f64::max)
    }
}

/// A fitted curve and its maximal R³ distance to the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub curve: CubicBSpline3,
    pub fit_error: f64,
}

/// Outcome of the minimal reliable fit search.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub curve: CubicBSpline3,
    pub fit_error: f64,
    /// `fit_error <= eps_hat / √2`.
    pub reliable: bool,
}

/// Chord-length parameters of `points` in R³, normalized to `[0, 1]`.
pub fn chord_parameters(points: &[MedialPoint]) -> Vec<f64> {
    let m = points.len();
    if m == 1 {
        return vec![0.0];
    }
    let mut cum = vec![0.0; m];
    for k in 1..m {
        cum[k] = cum[k - 1] + points[k].dist3(points[k - 1]);
    }
    let total = cum[m - 1];
    if total > 0.0 {
        cum.iter().map(|c| c / total).collect()
    } else {
        (0..m).map(|k| k as f64 / (m - 1) as f64).collect()
    }
}

/// Least-squares cubic with `n_ctrl` control points through the first and
/// last of `points`. Chains of fewer than four points get a straight
/// segment through their end points.
pub fn fit_chain(points: &[MedialPoint], n_ctrl: usize) -> Result<Fit> {
    if points.is_empty() {
        return Err(Error::InvalidInput("cannot fit an empty chain".into()));
    }
    if n_ctrl < 4 {
        return Err(Error::InvalidInput(format!(
            "need at least 4 control points, got {n_ctrl}"
        )));
    }
    let params = chord_parameters(points);
    let first = points[0];
    let last = points[points.len() - 1];
    let curve = if points.len() < 4 {
        CubicBSpline3::straight(first, last)
    } else {
        let span = 1.0 / (n_ctrl - DEGREE) as f64;
        let (dense, dense_params, weights) = densify(points, &params, span);
        least_squares(&dense, &dense_params, &weights, n_ctrl)?
    };
    let fit_error = curve.max_distance(points, &params);
    Ok(Fit { curve, fit_error })
}

/// Fills parameter gaps longer than a knot span with lightly weighted
/// points along the chain polyline, three per span, so no span is left
/// without data while the real samples still dominate the fit.
fn densify(points: &[MedialPoint], params: &[f64], span: f64) -> (Vec<MedialPoint>, Vec<f64>, Vec<f64>) {
    let mut out = vec![points[0]];
    let mut out_params = vec![params[0]];
    let mut weights = vec![1.0];
    for k in 1..points.len() {
        let gap = params[k] - params[k - 1];
        let steps = if gap > span { (3.0 * gap / span).ceil() as usize } else { 1 };
        for j in 1..steps {
            let t = j as f64 / steps as f64;
            out.push(points[k - 1].lerp(points[k], t));
            out_params.push(params[k - 1] + t * (params[k] - params[k - 1]));
            weights.push(FILL_WEIGHT);
        }
        out.push(points[k]);
        out_params.push(params[k]);
        weights.push(1.0);
    }
    (out, out_params, weights)
}

/// Least-squares weight of points inserted by [`densify`].
const FILL_WEIGHT: f64 = 1e-2;

fn least_squares(points: &[MedialPoint], params: &[f64], weights: &[f64], n: usize) -> Result<CubicBSpline3> {
    let m = points.len();
    let first = points[0];
    let last = points[m - 1];
    let mut curve = CubicBSpline3::new(vec![first; n]);
    curve.control_points[n - 1] = last;
    if n == 2 {
        return Ok(curve);
    }
    // Unknowns are control points 1..n-1; the normal matrix is banded
    // with half-bandwidth 3.
    let unknowns = n - 2;
    let mut band = vec![[0.0f64; 4]; unknowns];
    let mut rhs = vec![[0.0f64; 3]; unknowns];
    let (p0, pn) = (v3(first), v3(last));
    for ((q, &t), &weight) in points.iter().zip(params).zip(weights) {
        let span = curve.find_span(t);
        let b = curve.basis(span, t);
        let mut residual = v3(*q);
        for (j, &w) in b.iter().enumerate() {
            let i = span - DEGREE + j;
            if i == 0 {
                for c in 0..3 {
                    residual[c] -= w * p0[c];
                }
            } else if i == n - 1 {
                for c in 0..3 {
                    residual[c] -= w * pn[c];
                }
            }
        }
        for (j, &wj) in b.iter().enumerate() {
            let i = span - DEGREE + j;
            if i == 0 || i == n - 1 {
                continue;
            }
            let row = i - 1;
            for c in 0..3 {
                rhs[row][c] += weight * wj * residual[c];
            }
            for (k, &wk) in b.iter().enumerate().take(j + 1) {
                let col_i = span - DEGREE + k;
                if col_i == 0 || col_i == n - 1 {
                    continue;
                }
                band[row][j - k] += weight * wj * wk;
            }
        }
    }
    let solution = banded_cholesky_solve(&mut band, &mut rhs).ok_or(Error::RankDeficient {
        n_ctrl: n,
        n_points: m,
    })?;
    for (i, x) in solution.into_iter().enumerate() {
        curve.control_points[i + 1] = MedialPoint::from_array(x);
    }
    Ok(curve)
}

/// Solves `A x = b` for symmetric positive definite `A` stored as lower
/// bands (`band[i][d] = A[i][i - d]`). `None` when a pivot collapses.
fn banded_cholesky_solve(band: &mut [[f64; 4]], rhs: &mut [[f64; 3]]) -> Option<Vec<[f64; 3]>> {
    let m = band.len();
    let max_diag = band.iter().map(|b| b[0]).fold(0.0, f64::max);
    if !(max_diag > 0.0) {
        return None;
    }
    // In-place factorization: band becomes L.
    for j in 0..m {
        let diag = band[j][0];
        let mut s = diag;
        for d in 1..=3.min(j) {
            s -= band[j][d] * band[j][d];
        }
        if !(s > PIVOT_TOL * diag) || diag <= 1e-14 * max_diag {
            return None;
        }
        let ljj = s.sqrt();
        band[j][0] = ljj;
        for i in j + 1..(j + 4).min(m) {
            let dij = i - j;
            let mut v = band[i][dij];
            for k in (i.saturating_sub(3))..j {
                v -= band[i][i - k] * band[j][j - k];
            }
            band[i][dij] = v / ljj;
        }
    }
    // Forward substitution.
    let mut y = rhs.to_vec();
    for i in 0..m {
        for k in i.saturating_sub(3)..i {
            for c in 0..3 {
                y[i][c] -= band[i][i - k] * y[k][c];
            }
        }
        for c in 0..3 {
            y[i][c] /= band[i][0];
        }
    }
    // Back substitution with L^T.
    for i in (0..m).rev() {
        for k in i + 1..(i + 4).min(m) {
            for c in 0..3 {
                y[i][c] -= band[k][k - i] * y[k][c];
            }
        }
        for c in 0..3 {
            y[i][c] /= band[i][0];
        }
    }
    Some(y)
}

/// Searches for the reliable fit (`fit_error <= eps_hat / √2`) with the
/// fewest control points: 4, 8, 16, ... until reliable, then bisection
/// between the last two sizes. If nothing up to `|points|` control points
/// is reliable, the lowest-error attempt is returned flagged unreliable.
pub fn fit_minimal(points: &[MedialPoint], eps_hat: f64) -> Result<FitResult> {
    let tol = eps_hat / std::f64::consts::SQRT_2;
    let mark = |fit: Fit| FitResult {
        reliable: fit.fit_error <= tol,
        curve: fit.curve,
        fit_error: fit.fit_error,
    };
    if points.len() < 4 {
        return Ok(mark(fit_chain(points, 4)?));
    }
    let mut cap = points.len();
    let mut best_effort: Option<Fit> = None;
    let keep_best = |fit: &Fit, best: &mut Option<Fit>| {
        if best.as_ref().is_none_or(|b| fit.fit_error < b.fit_error) {
            *best = Some(fit.clone());
        }
    };

    let mut lo = 3; // largest size known to be unreliable
    let mut n = 4;
    let hi_fit = loop {
        match fit_chain(points, n) {
            Ok(fit) if fit.fit_error <= tol => break Some((n, fit)),
            Ok(fit) => {
                keep_best(&fit, &mut best_effort);
                lo = n;
                if n >= cap {
                    break None;
                }
                n = (2 * n).min(cap);
            }
            Err(Error::RankDeficient { .. }) => {
                cap = n - 1;
                if cap <= lo {
                    break None;
                }
                n = cap;
            }
            Err(e) => return Err(e),
        }
    };
    let Some((mut hi, mut hi_fit)) = hi_fit else {
        let fit = best_effort.expect("at least the 4-point fit succeeds or errors out");
        return Ok(mark(fit));
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match fit_chain(points, mid) {
            Ok(fit) if fit.fit_error <= tol => {
                hi = mid;
                hi_fit = fit;
            }
            Ok(_) | Err(Error::RankDeficient { .. }) => lo = mid,
            Err(e) => return Err(e),
        }
    }
    Ok(mark(hi_fit))
}

/// Refits `chain_points` with one more control point than `curve`,
/// clamped to the number of chain points.
pub fn insert_control_point(curve: &CubicBSpline3, chain_points: &[MedialPoint]) -> Result<CubicBSpline3> {
    let n = (curve.n_ctrl() + 1).min(chain_points.len().max(4));
    Ok(fit_chain(chain_points, n)?.curve)
}
