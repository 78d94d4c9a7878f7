//! Procedural boundary fixtures and noise injectors.
//!
//! Every generator returns a counterclockwise simple polygon sampled
//! approximately uniformly by arc length.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::geometry::{Point2, Polygon};

const DENSE: usize = 8192;

/// Resamples a closed polyline to `n` points spaced evenly by arc length.
pub fn resample_closed(dense: &[Point2], n: usize) -> Vec<Point2> {
    let m = dense.len();
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for i in 0..m {
        let d = dense[i].dist(dense[(i + 1) % m]);
        cum.push(cum[i] + d);
    }
    let total = cum[m];
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for k in 0..n {
        let s = total * k as f64 / n as f64;
        while cum[seg + 1] < s {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 { (s - cum[seg]) / len } else { 0.0 };
        out.push(dense[seg].lerp(dense[(seg + 1) % m], t));
    }
    out
}

fn polygon(points: Vec<Point2>) -> Polygon {
    Polygon::new(points).expect("fixture generators produce simple polygons")
}

/// Closed curve `r(θ)` around the origin.
pub fn polar(n: usize, radius: impl Fn(f64) -> f64) -> Polygon {
    let dense: Vec<Point2> = (0..DENSE)
        .map(|i| {
            let a = TAU * i as f64 / DENSE as f64;
            let r = radius(a);
            Point2::new(r * a.cos(), r * a.sin())
        })
        .collect();
    polygon(resample_closed(&dense, n))
}

pub fn circle(n: usize, radius: f64) -> Polygon {
    polygon(
        (0..n)
            .map(|i| {
                let a = TAU * i as f64 / n as f64;
                Point2::new(radius * a.cos(), radius * a.sin())
            })
            .collect(),
    )
}

pub fn ellipse(n: usize, a: f64, b: f64) -> Polygon {
    let dense: Vec<Point2> = (0..DENSE)
        .map(|i| {
            let t = TAU * i as f64 / DENSE as f64;
            Point2::new(a * t.cos(), b * t.sin())
        })
        .collect();
    polygon(resample_closed(&dense, n))
}

/// Stadium: the set of points within `radius` of the segment
/// `[(-half_length, 0), (half_length, 0)]`.
pub fn capsule(n: usize, half_length: f64, radius: f64) -> Polygon {
    let straight = 2.0 * half_length;
    let arc = PI * radius;
    let total = 2.0 * (straight + arc);
    let at = |s: f64| -> Point2 {
        let s = s.rem_euclid(total);
        if s < straight {
            Point2::new(-half_length + s, -radius)
        } else if s < straight + arc {
            let a = -PI / 2.0 + (s - straight) / radius;
            Point2::new(half_length + radius * a.cos(), radius * a.sin())
        } else if s < 2.0 * straight + arc {
            Point2::new(half_length - (s - straight - arc), radius)
        } else {
            let a = PI / 2.0 + (s - 2.0 * straight - arc) / radius;
            Point2::new(-half_length + radius * a.cos(), radius * a.sin())
        }
    };
    polygon((0..n).map(|i| at(total * i as f64 / n as f64)).collect())
}

/// Smooth star with `arms` lobes between radii `inner` and `outer`.
pub fn star(n: usize, arms: u32, inner: f64, outer: f64) -> Polygon {
    let mid = 0.5 * (inner + outer);
    let amp = 0.5 * (outer - inner);
    polar(n, |a| mid + amp * (arms as f64 * a).cos())
}

/// L-shaped polygon with legs of length `size` and thickness `width`,
/// corner at the origin. Every corner is a sample.
pub fn l_shape(n: usize, size: f64, width: f64) -> Polygon {
    let corners = [
        Point2::new(0.0, 0.0),
        Point2::new(size, 0.0),
        Point2::new(size, width),
        Point2::new(width, width),
        Point2::new(width, size),
        Point2::new(0.0, size),
    ];
    polygon(sample_polyline(&corners, n))
}

/// Samples a closed polyline keeping its vertices, distributing the
/// remaining samples per edge in proportion to length.
pub fn sample_polyline(corners: &[Point2], n: usize) -> Vec<Point2> {
    let m = corners.len();
    let lengths: Vec<f64> = (0..m).map(|i| corners[i].dist(corners[(i + 1) % m])).collect();
    let total: f64 = lengths.iter().sum();
    let mut out = Vec::with_capacity(n);
    let mut assigned = 0usize;
    let mut acc = 0.0;
    for i in 0..m {
        acc += lengths[i];
        let target = ((acc / total) * n as f64).round() as usize;
        let k = (target - assigned).max(1);
        for j in 0..k {
            out.push(corners[i].lerp(corners[(i + 1) % m], j as f64 / k as f64));
        }
        assigned += k;
    }
    out
}

/// Tube of varying half-width around a circular-arc spine, with round
/// caps. `width(s)` gives the half-width at normalized arc parameter
/// `s ∈ [0, 1]`.
pub fn bent_tube(
    n: usize,
    spine_radius: f64,
    sweep: f64,
    width: impl Fn(f64) -> f64,
) -> Polygon {
    let k = DENSE / 4;
    let spine = |s: f64| {
        let a = -PI / 2.0 + sweep * s;
        (
            Point2::new(spine_radius * a.cos(), spine_radius * a.sin()),
            // Left normal of a counterclockwise arc points to the center.
            Point2::new(-a.cos(), -a.sin()),
        )
    };
    let mut dense = Vec::with_capacity(4 * k);
    // Outer side, start to end.
    for i in 0..k {
        let s = i as f64 / k as f64;
        let (c, nrm) = spine(s);
        dense.push(c - nrm * width(s));
    }
    // End cap.
    let (c_end, n_end) = spine(1.0);
    for i in 0..k {
        let a = PI * i as f64 / k as f64;
        let tangent = (-n_end).perp();
        let d = (-n_end) * a.cos() + tangent * a.sin();
        dense.push(c_end + d * width(1.0));
    }
    // Inner side, end to start.
    for i in 0..k {
        let s = 1.0 - i as f64 / k as f64;
        let (c, nrm) = spine(s);
        dense.push(c + nrm * width(s));
    }
    // Start cap.
    let (c0, n0) = spine(0.0);
    for i in 0..k {
        let a = PI * i as f64 / k as f64;
        let tangent = (-n0).perp();
        let d = n0 * a.cos() - tangent * a.sin();
        dense.push(c0 + d * width(0.0));
    }
    polygon(resample_closed(&dense, n))
}

/// Star-shaped blob `r(θ) = base · (1 + Σ a_k cos(kθ + φ_k))`.
pub fn fourier_blob(n: usize, base: f64, harmonics: &[(u32, f64, f64)]) -> Polygon {
    polar(n, |a| {
        base * (1.0
            + harmonics
                .iter()
                .map(|&(k, amp, phase)| amp * (k as f64 * a + phase).cos())
                .sum::<f64>())
    })
}

/// Moves every vertex along the ray from `center` by a uniform random
/// offset in `[-amplitude, amplitude]` (absolute units). Keeps the
/// polygon simple when it is star-shaped around `center`.
pub fn radial_noise<R: Rng>(poly: &Polygon, center: Point2, amplitude: f64, rng: &mut R) -> Polygon {
    let pts = poly
        .vertices()
        .iter()
        .map(|&p| {
            let d = p - center;
            let len = d.norm();
            let shift = if amplitude > 0.0 {
                rng.random_range(-amplitude..=amplitude)
            } else {
                0.0
            };
            let new_len = (len + shift).max(0.05 * len);
            center + d * (new_len / len)
        })
        .collect();
    Polygon::new_unchecked(pts)
}

/// Four-winged outline with a narrow waist along the y axis.
pub fn butterfly(n: usize) -> Polygon {
    fourier_blob(n, 1.0, &[(2, 0.3, 0.0), (4, 0.22, PI), (6, 0.04, 0.0)])
}

/// Curled tube that thins toward its tail.
pub fn seahorse(n: usize) -> Polygon {
    bent_tube(n, 1.0, 1.5 * PI, |s| 0.06 + 0.2 * (1.0 - s).powf(1.5))
}

/// Scales every vertex about `center` by `1 + amplitude · f(θ)`, where
/// `f` is a random trigonometric series of frequencies `1..=max_frequency`
/// with `1/k` amplitude decay, normalized to peak `|f| = 1` over the
/// vertices. Unlike [`radial_noise`] the perturbation is band-limited, so
/// a densely sampled boundary stays densely sampled.
pub fn smooth_radial_noise<R: Rng>(
    poly: &Polygon,
    center: Point2,
    amplitude: f64,
    max_frequency: u32,
    rng: &mut R,
) -> Polygon {
    let coeffs: Vec<(f64, f64)> = (1..=max_frequency)
        .map(|k| {
            let k = k as f64;
            (rng.random_range(-1.0..=1.0) / k, rng.random_range(-1.0..=1.0) / k)
        })
        .collect();
    let f = |a: f64| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, &(c, s))| {
                let k = (i + 1) as f64;
                c * (k * a).cos() + s * (k * a).sin()
            })
            .sum()
    };
    let values: Vec<f64> = poly
        .vertices()
        .iter()
        .map(|&p| {
            let d = p - center;
            f(d.y.atan2(d.x))
        })
        .collect();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let norm = if peak > 0.0 { amplitude / peak } else { 0.0 };
    let pts = poly
        .vertices()
        .iter()
        .zip(&values)
        .map(|(&p, v)| center + (p - center) * (1.0 + norm * v))
        .collect();
    Polygon::new_unchecked(pts)
}

/// A named boundary fixture.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub polygon: Polygon,
}

/// Smooth fixtures of roughly `n` boundary points, standing in for the
/// hand-drawn animal and vehicle outlines commonly used to evaluate
/// skeletonization.
pub fn suite(n: usize) -> Vec<Fixture> {
    vec![
        Fixture {
            name: "capsule",
            polygon: capsule(n, 1.0, 0.35),
        },
        Fixture {
            name: "ellipse",
            polygon: ellipse(n, 1.0, 0.55),
        },
        Fixture {
            name: "tri-star",
            polygon: star(n, 3, 0.3, 1.0),
        },
        Fixture {
            name: "penta-star",
            polygon: star(n, 5, 0.45, 1.0),
        },
        Fixture {
            name: "peanut",
            polygon: polar(n, |a| 0.7 + 0.3 * (2.0 * a).cos()),
        },
        Fixture {
            name: "swan-like",
            polygon: bent_tube(n, 1.0, 1.4 * PI, |s| 0.12 + 0.18 * (PI * s).sin().powi(2)),
        },
        Fixture {
            name: "car-like",
            polygon: fourier_blob(n, 1.0, &[(2, 0.25, 0.0), (3, 0.06, 0.4), (4, 0.05, 1.1)]),
        },
        Fixture {
            name: "blob",
            polygon: fourier_blob(n, 1.0, &[(2, 0.12, 0.3), (3, 0.09, 1.0), (5, 0.05, 2.0)]),
        },
        Fixture {
            name: "worm",
            polygon: bent_tube(n, 1.0, 0.8 * PI, |_| 0.18),
        },
    ]
}
