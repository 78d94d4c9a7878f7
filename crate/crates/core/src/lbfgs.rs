//! Limited-memory BFGS building blocks: the two-loop recursion and a
//! strong-Wolfe line search.

use std::collections::VecDeque;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Curvature pairs `(s, y)` of the most recent accepted steps.
#[derive(Debug, Clone)]
pub struct Memory {
    capacity: usize,
    pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)>,
}

impl Memory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self {
            capacity,
            pairs: VecDeque::with_capacity(capacity),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn clear(&mut self) {
        self.pairs.clear();
    }

    /// Stores a pair when it has positive curvature; returns whether it
    /// was kept.
    pub fn push(&mut self, s: Vec<f64>, y: Vec<f64>) -> bool {
        let sy = dot(&s, &y);
        if !(sy > 1e-12 * norm(&s) * norm(&y)) {
            return false;
        }
        if self.pairs.len() == self.capacity {
            self.pairs.pop_front();
        }
        self.pairs.push_back((s, y, 1.0 / sy));
        true
    }

    /// Search direction `-H g` with the scaled-identity initial Hessian.
    pub fn direction(&self, g: &[f64]) -> Vec<f64> {
        let mut q = g.to_vec();
        let mut alpha = Vec::with_capacity(self.pairs.len());
        for (s, y, rho) in self.pairs.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alpha.push(a);
        }
        if let Some((s, y, _)) = self.pairs.back() {
            let gamma = dot(s, y) / dot(y, y);
            for qi in &mut q {
                *qi *= gamma;
            }
        }
        for ((s, y, rho), a) in self.pairs.iter().zip(alpha.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        q.iter_mut().for_each(|v| *v = -*v);
        q
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolfeParams {
    pub c1: f64,
    pub c2: f64,
    pub max_evals: usize,
}

impl Default for WolfeParams {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            c2: 0.9,
            max_evals: 30,
        }
    }
}

/// Accepted step of a line search.
#[derive(Debug, Clone)]
pub struct Step {
    pub alpha: f64,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub evals: usize,
}

/// Strong-Wolfe line search along `d` from a point with value `f0` and
/// directional derivative `d0 < 0`. `eval(alpha)` returns the value and
/// gradient at `x + alpha d`. `None` when no acceptable step was found
/// within the evaluation budget; the best sufficient-decrease step seen is
/// still returned if there is one.
pub fn strong_wolfe<F>(mut eval: F, d: &[f64], f0: f64, d0: f64, alpha0: f64, params: WolfeParams) -> Option<Step>
where
    F: FnMut(f64) -> (f64, Vec<f64>),
{
    debug_assert!(d0 < 0.0);
    let WolfeParams { c1, c2, max_evals } = params;
    let mut evals = 0;
    let mut fallback: Option<Step> = None;
    let consider = |step: &Step, fallback: &mut Option<Step>| {
        if step.value <= f0 + c1 * step.alpha * d0 && fallback.as_ref().is_none_or(|b| step.value < b.value) {
            *fallback = Some(step.clone());
        }
    };

    let (mut a_prev, mut f_prev, mut g_prev_dir) = (0.0, f0, d0);
    let mut alpha = alpha0;
    loop {
        if evals >= max_evals {
            return fallback;
        }
        let (f, g) = eval(alpha);
        evals += 1;
        if !f.is_finite() {
            alpha = 0.5 * (a_prev + alpha);
            continue;
        }
        let dg = dot(&g, d);
        let step = Step {
            alpha,
            value: f,
            gradient: g,
            evals,
        };
        consider(&step, &mut fallback);
        if f > f0 + c1 * alpha * d0 || (evals > 1 && f >= f_prev) {
            return zoom(&mut eval, d, f0, d0, (a_prev, f_prev, g_prev_dir), (alpha, f, dg), params, evals, fallback);
        }
        if dg.abs() <= -c2 * d0 {
            return Some(step);
        }
        if dg >= 0.0 {
            return zoom(&mut eval, d, f0, d0, (alpha, f, dg), (a_prev, f_prev, g_prev_dir), params, evals, fallback);
        }
        a_prev = alpha;
        f_prev = f;
        g_prev_dir = dg;
        alpha *= 2.0;
    }
}

#[allow(clippy::too_many_arguments)]
fn zoom<F>(
    eval: &mut F,
    d: &[f64],
    f0: f64,
    d0: f64,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
    params: WolfeParams,
    mut evals: usize,
    mut fallback: Option<Step>,
) -> Option<Step>
where
    F: FnMut(f64) -> (f64, Vec<f64>),
{
    let WolfeParams { c1, c2, max_evals } = params;
    while evals < max_evals {
        let alpha = interpolate(lo, hi);
        let (f, g) = eval(alpha);
        evals += 1;
        let dg = dot(&g, d);
        let step = Step {
            alpha,
            value: f,
            gradient: g,
            evals,
        };
        if f.is_finite()
            && f <= f0 + c1 * alpha * d0
            && fallback.as_ref().is_none_or(|b| f < b.value)
        {
            fallback = Some(step.clone());
        }
        if !f.is_finite() || f > f0 + c1 * alpha * d0 || f >= lo.1 {
            hi = (alpha, f, dg);
        } else {
            if dg.abs() <= -c2 * d0 {
                return Some(step);
            }
            if dg * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (alpha, f, dg);
        }
        if (hi.0 - lo.0).abs() <= 1e-16 * lo.0.abs().max(1e-300) {
            break;
        }
    }
    fallback
}

/// Minimizer of the cubic through both ends, safeguarded into the inner
/// part of the bracket.
fn interpolate(lo: (f64, f64, f64), hi: (f64, f64, f64)) -> f64 {
    let (a, fa, ga) = lo;
    let (b, fb, gb) = hi;
    let mid = 0.5 * (a + b);
    if !(fb.is_finite()) {
        return mid;
    }
    let d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - ga * gb;
    if disc < 0.0 {
        return mid;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2);
    let (left, right) = (a.min(b), a.max(b));
    let margin = 0.1 * (right - left);
    if t.is_finite() && t > left + margin && t < right - margin {
        t
    } else {
        mid
    }
}
