//! Envelope of two medial circles: the convex hull of the two discs,
//! bounded by two outer arcs and two external tangent lines.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{orient2d, MedialPoint, Point2};

/// Margin below which a query point counts as sitting on a case boundary.
pub const CASE_BOUNDARY_TOL: f64 = 1e-10;

/// Which piece of the envelope boundary realizes the distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseTag {
    Arc1,
    Arc2,
    Line12,
    Line34,
    DegenerateCircle,
}

/// Tangent line `n · x = c` with the envelope on the side `n · x < c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentLine {
    pub normal: Point2,
    pub offset: f64,
}

impl TangentLine {
    fn signed(self, p: Point2) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Tangents {
    /// Unit direction `u1 → u2`.
    e: Point2,
    dist: f64,
    cos_a1: f64,
    sin_a1: f64,
    l12: TangentLine,
    l34: TangentLine,
    /// `q1, q2` on L12 at circles 1 and 2; `q3, q4` on L34 at circles 2 and 1.
    q: [Point2; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSegment {
    v1: MedialPoint,
    v2: MedialPoint,
    tangents: Option<Tangents>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeDistance {
    pub sqdist: f64,
    /// Negative inside the envelope.
    pub signed: f64,
    pub case: CaseTag,
    pub footpoint: Point2,
}

/// Gradient of the squared distance with respect to
/// `(u1.x, u1.y, r1, u2.x, u2.y, r2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentGradient {
    pub value: [f64; 6],
    pub case: CaseTag,
    /// Two branches of the case formula meet within
    /// [`CASE_BOUNDARY_TOL`] of the query point.
    pub near_case_boundary: bool,
}

impl EnvelopeSegment {
    /// Errors only for identical centers with identical radii. When one
    /// circle contains the other the segment is degenerate and behaves as
    /// the larger circle.
    pub fn new(v1: MedialPoint, v2: MedialPoint) -> Result<Self> {
        let delta = v2.u - v1.u;
        let dist = delta.norm();
        if dist == 0.0 && v1.r == v2.r {
            return Err(Error::CoincidentCircles);
        }
        let cos_a1 = (v1.r - v2.r) / dist;
        if !(cos_a1.abs() < 1.0) {
            return Ok(Self {
                v1,
                v2,
                tangents: None,
            });
        }
        let sin_a1 = (1.0 - cos_a1 * cos_a1).sqrt();
        let e = delta * (1.0 / dist);
        let side = e.perp();
        let n12 = e * cos_a1 + side * sin_a1;
        let n34 = e * cos_a1 - side * sin_a1;
        let l12 = TangentLine {
            normal: n12,
            offset: n12.dot(v1.u) + v1.r,
        };
        let l34 = TangentLine {
            normal: n34,
            offset: n34.dot(v1.u) + v1.r,
        };
        let q = [
            v1.u + n12 * v1.r,
            v2.u + n12 * v2.r,
            v2.u + n34 * v2.r,
            v1.u + n34 * v1.r,
        ];
        Ok(Self {
            v1,
            v2,
            tangents: Some(Tangents {
                e,
                dist,
                cos_a1,
                sin_a1,
                l12,
                l34,
                q,
            }),
        })
    }

    /// A single circle seen as a segment of zero length.
    pub fn circle(v: MedialPoint) -> Self {
        Self {
            v1: v,
            v2: v,
            tangents: None,
        }
    }

    pub fn v1(&self) -> MedialPoint {
        self.v1
    }

    pub fn v2(&self) -> MedialPoint {
        self.v2
    }

    /// Only one circle shows on the boundary: `|r1 - r2| >= |u1 - u2|`.
    pub fn is_degenerate(&self) -> bool {
        self.tangents.is_none()
    }

    /// `(α1, α2)` with `cos α1 = (r1 - r2) / |u1 - u2|` and `α1 + α2 = π`.
    pub fn angles(&self) -> Option<(f64, f64)> {
        self.tangents.map(|t| {
            let a1 = t.sin_a1.atan2(t.cos_a1);
            (a1, std::f64::consts::PI - a1)
        })
    }

    /// `(L12, L34)`; L12 lies on the counterclockwise side of `u1 → u2`.
    pub fn tangent_lines(&self) -> Option<(TangentLine, TangentLine)> {
        self.tangents.map(|t| (t.l12, t.l34))
    }

    /// `[q1, q2, q3, q4]`: `q1, q2` on L12 at circles 1 and 2, `q3, q4` on
    /// L34 at circles 2 and 1. The order runs clockwise.
    pub fn tangent_points(&self) -> Option<[Point2; 4]> {
        self.tangents.map(|t| t.q)
    }

    fn larger(&self) -> MedialPoint {
        if self.v1.r >= self.v2.r {
            self.v1
        } else {
            self.v2
        }
    }

    /// Axis-aligned bounding box of the envelope.
    pub fn bbox(&self) -> (Point2, Point2) {
        let lo = Point2::new(
            (self.v1.u.x - self.v1.r).min(self.v2.u.x - self.v2.r),
            (self.v1.u.y - self.v1.r).min(self.v2.u.y - self.v2.r),
        );
        let hi = Point2::new(
            (self.v1.u.x + self.v1.r).max(self.v2.u.x + self.v2.r),
            (self.v1.u.y + self.v1.r).max(self.v2.u.y + self.v2.r),
        );
        (lo, hi)
    }

    /// Distance from `p` to the envelope boundary, its case and footpoint.
    pub fn distance(&self, p: Point2) -> EnvelopeDistance {
        let Some(t) = self.tangents else {
            let (signed, footpoint) = circle_distance(self.larger(), p, Point2::new(1.0, 0.0));
            return EnvelopeDistance {
                sqdist: signed * signed,
                signed,
                case: CaseTag::DegenerateCircle,
                footpoint,
            };
        };
        let (case, signed, footpoint) = match self.classify(&t, p) {
            CaseTag::Arc1 => {
                let (s, f) = circle_distance(self.v1, p, -t.e);
                (CaseTag::Arc1, s, f)
            }
            CaseTag::Arc2 => {
                let (s, f) = circle_distance(self.v2, p, t.e);
                (CaseTag::Arc2, s, f)
            }
            case => {
                let line = if case == CaseTag::Line12 { t.l12 } else { t.l34 };
                let g = line.signed(p);
                (case, g, p - line.normal * g)
            }
        };
        EnvelopeDistance {
            sqdist: signed * signed,
            signed,
            case,
            footpoint,
        }
    }

    fn classify(&self, t: &Tangents, p: Point2) -> CaseTag {
        let w1 = p - self.v1.u;
        if w1.dot(t.e) <= w1.norm() * t.cos_a1 {
            return CaseTag::Arc1;
        }
        let w2 = p - self.v2.u;
        if -w2.dot(t.e) <= -w2.norm() * t.cos_a1 {
            return CaseTag::Arc2;
        }
        if orient2d(p, self.v1.u, self.v2.u) < 0 {
            CaseTag::Line34
        } else {
            CaseTag::Line12
        }
    }

    pub fn sqdist(&self, p: Point2) -> f64 {
        self.distance(p).sqdist
    }

    /// Signed distance to the envelope boundary, negative inside.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.distance(p).signed
    }

    /// `p` lies inside the envelope by more than `tol`.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        // Cheap rejection against the bounding box.
        let (lo, hi) = self.bbox();
        if p.x <= lo.x + tol || p.y <= lo.y + tol || p.x >= hi.x - tol || p.y >= hi.y - tol {
            return false;
        }
        self.signed_distance(p) < -tol
    }

    /// Boundary pieces: arc 1, L12, arc 2, L34, or the larger circle when
    /// degenerate.
    pub fn pieces(&self) -> Vec<Piece> {
        let Some(t) = self.tangents else {
            let v = self.larger();
            return vec![Piece::Arc {
                center: v.u,
                r: v.r,
                mid: 0.0,
                half: std::f64::consts::PI,
            }];
        };
        let (a1, _) = self.angles().expect("tangents exist");
        let forward = t.e.y.atan2(t.e.x);
        vec![
            Piece::Arc {
                center: self.v1.u,
                r: self.v1.r,
                mid: forward + std::f64::consts::PI,
                half: std::f64::consts::PI - a1,
            },
            Piece::Line { a: t.q[0], b: t.q[1] },
            Piece::Arc {
                center: self.v2.u,
                r: self.v2.r,
                mid: forward,
                half: a1,
            },
            Piece::Line { a: t.q[2], b: t.q[3] },
        ]
    }

    /// Gradient of [`Self::sqdist`] for the case active at `p`.
    pub fn gradient(&self, p: Point2) -> SegmentGradient {
        let Some(t) = self.tangents else {
            let big_first = self.v1.r >= self.v2.r;
            let (gu, gr) = arc_gradient(self.larger(), p);
            let mut value = [0.0; 6];
            let at = if big_first { 0 } else { 3 };
            value[at] = gu.x;
            value[at + 1] = gu.y;
            value[at + 2] = gr;
            let margin = (self.v1.r - self.v2.r).abs() - self.v1.u.dist(self.v2.u);
            return SegmentGradient {
                value,
                case: CaseTag::DegenerateCircle,
                near_case_boundary: margin.abs() < CASE_BOUNDARY_TOL || self.v1.r == self.v2.r,
            };
        };
        let w1 = p - self.v1.u;
        let w2 = p - self.v2.u;
        let m1 = w1.norm() * t.cos_a1 - w1.dot(t.e);
        let m2 = w2.dot(t.e) - w2.norm() * t.cos_a1;
        let case = self.classify(&t, p);
        let mut near = m1.abs() < CASE_BOUNDARY_TOL || m2.abs() < CASE_BOUNDARY_TOL;
        let mut value = [0.0; 6];
        match case {
            CaseTag::Arc1 => {
                let (gu, gr) = arc_gradient(self.v1, p);
                value[..3].copy_from_slice(&[gu.x, gu.y, gr]);
            }
            CaseTag::Arc2 => {
                let (gu, gr) = arc_gradient(self.v2, p);
                value[3..].copy_from_slice(&[gu.x, gu.y, gr]);
            }
            CaseTag::Line12 | CaseTag::Line34 => {
                near |= t.e.cross(w1).abs() < CASE_BOUNDARY_TOL;
                let line = if case == CaseTag::Line12 { t.l12 } else { t.l34 };
                let g = line.signed(p);
                // Moving circle k outward by δ shifts the line at p by λ_k δ,
                // where λ is the barycentric position of p's projection
                // between the tangent points.
                let dir = line.normal.perp();
                let l2 = w1.dot(dir) / (t.e * t.dist).dot(dir);
                let l1 = 1.0 - l2;
                let n = line.normal;
                value = [
                    -2.0 * g * l1 * n.x,
                    -2.0 * g * l1 * n.y,
                    -2.0 * g * l1,
                    -2.0 * g * l2 * n.x,
                    -2.0 * g * l2 * n.y,
                    -2.0 * g * l2,
                ];
            }
            CaseTag::DegenerateCircle => unreachable!(),
        }
        SegmentGradient {
            value,
            case,
            near_case_boundary: near,
        }
    }
}

/// Parameter slack that keeps crossings at piece joints.
const PARAM_SLACK: f64 = 1e-9;

/// A smooth piece of an envelope boundary, parametrized over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    /// Points `center + r (cos θ, sin θ)` for `θ` in `mid ± half`.
    Arc { center: Point2, r: f64, mid: f64, half: f64 },
    Line { a: Point2, b: Point2 },
}

impl Piece {
    pub fn point_at(&self, s: f64) -> Point2 {
        match *self {
            Piece::Arc { center, r, mid, half } => {
                let t = mid + half * (2.0 * s - 1.0);
                center + Point2::new(t.cos(), t.sin()) * r
            }
            Piece::Line { a, b } => a.lerp(b, s),
        }
    }

    /// Parameter of the point of the piece's carrier nearest to `q`,
    /// or `None` when it falls outside the piece.
    fn param_of(&self, q: Point2) -> Option<f64> {
        let s = match *self {
            Piece::Arc { center, mid, half, .. } => {
                if half == 0.0 {
                    return None;
                }
                let w = q - center;
                let off = (w.y.atan2(w.x) - mid + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
                    - std::f64::consts::PI;
                (off / half + 1.0) / 2.0
            }
            Piece::Line { a, b } => {
                let d = b - a;
                let l2 = d.dot(d);
                if l2 == 0.0 {
                    return None;
                }
                (q - a).dot(d) / l2
            }
        };
        (-PARAM_SLACK..=1.0 + PARAM_SLACK).contains(&s).then_some(s.clamp(0.0, 1.0))
    }

    /// Parameters on `self` where it crosses `other`.
    pub fn crossings(&self, other: &Piece) -> Vec<f64> {
        let points = match (*self, *other) {
            (Piece::Arc { center: c1, r: r1, .. }, Piece::Arc { center: c2, r: r2, .. }) => {
                circle_circle(c1, r1, c2, r2)
            }
            (Piece::Arc { center, r, .. }, Piece::Line { a, b })
            | (Piece::Line { a, b }, Piece::Arc { center, r, .. }) => circle_line(center, r, a, b),
            (Piece::Line { a, b }, Piece::Line { a: c, b: d }) => line_line(a, b, c, d).into_iter().collect(),
        };
        points
            .into_iter()
            .filter(|&q| other.param_of(q).is_some())
            .filter_map(|q| self.param_of(q))
            .collect()
    }

    /// Point of the sub-piece over `[s0, s1]` nearest to `p`.
    pub fn nearest(&self, p: Point2, s0: f64, s1: f64) -> Point2 {
        let ends = [self.point_at(s0), self.point_at(s1)];
        let end = if p.dist(ends[0]) <= p.dist(ends[1]) { ends[0] } else { ends[1] };
        let inner = match *self {
            Piece::Arc { center, r, .. } => {
                let w = p - center;
                let len = w.norm();
                (len > 0.0).then(|| center + w * (r / len))
            }
            Piece::Line { a, b } => {
                let d = b - a;
                let l2 = d.dot(d);
                (l2 > 0.0).then(|| a.lerp(b, (p - a).dot(d) / l2))
            }
        };
        match inner.and_then(|q| self.param_of(q).map(|s| (q, s))) {
            Some((q, s)) if s >= s0 && s <= s1 && p.dist(q) < p.dist(end) => q,
            _ => end,
        }
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        match *self {
            Piece::Arc { center, r, .. } => (center - Point2::new(r, r), center + Point2::new(r, r)),
            Piece::Line { a, b } => (
                Point2::new(a.x.min(b.x), a.y.min(b.y)),
                Point2::new(a.x.max(b.x), a.y.max(b.y)),
            ),
        }
    }
}

fn circle_circle(c1: Point2, r1: f64, c2: Point2, r2: f64) -> Vec<Point2> {
    let d = c1.dist(c2);
    if d == 0.0 || d > r1 + r2 || d < (r1 - r2).abs() {
        return Vec::new();
    }
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let e = (c2 - c1) * (1.0 / d);
    let m = c1 + e * a;
    vec![m + e.perp() * h, m - e.perp() * h]
}

fn circle_line(c: Point2, r: f64, a: Point2, b: Point2) -> Vec<Point2> {
    let d = b - a;
    let l = d.norm();
    if l == 0.0 {
        return Vec::new();
    }
    let e = d * (1.0 / l);
    let t = (c - a).dot(e);
    let foot = a + e * t;
    let h2 = r * r - foot.dist(c).powi(2);
    if h2 < 0.0 {
        return Vec::new();
    }
    let h = h2.sqrt();
    vec![foot - e * h, foot + e * h]
}

fn line_line(a: Point2, b: Point2, c: Point2, d: Point2) -> Option<Point2> {
    let (r, s) = (b - a, d - c);
    let den = r.cross(s);
    if den == 0.0 {
        return None;
    }
    Some(a + r * ((c - a).cross(s) / den))
}

/// Signed distance to a circle and the nearest circle point; `fallback`
/// is the direction used when `p` is the center.
fn circle_distance(v: MedialPoint, p: Point2, fallback: Point2) -> (f64, Point2) {
    let w = p - v.u;
    let len = w.norm();
    let dir = if len > 0.0 { w * (1.0 / len) } else { fallback };
    (len - v.r, v.u + dir * v.r)
}

fn arc_gradient(v: MedialPoint, p: Point2) -> (Point2, f64) {
    let w = p - v.u;
    let len = w.norm();
    let d = len - v.r;
    let gu = if len > 0.0 { w * (-2.0 * d / len) } else { Point2::default() };
    (gu, -2.0 * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn mp(x: f64, y: f64, r: f64) -> MedialPoint {
        MedialPoint::new(x, y, r)
    }

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn capsule() -> EnvelopeSegment {
        EnvelopeSegment::new(mp(0., 0., 1.), mp(4., 0., 1.)).unwrap()
    }

    fn random_segment(rng: &mut ChaCha8Rng) -> EnvelopeSegment {
        loop {
            let v1 = mp(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.05..0.8));
            let v2 = mp(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.05..0.8));
            let s = EnvelopeSegment::new(v1, v2).unwrap();
            if !s.is_degenerate() {
                return s;
            }
        }
    }

    #[test]
    fn tangent_geometry() {
        let s = capsule();
        let (a1, a2) = s.angles().unwrap();
        assert!((a1 - PI / 2.0).abs() < 1e-15 && (a2 - PI / 2.0).abs() < 1e-15);
        let (l12, l34) = s.tangent_lines().unwrap();
        assert!(l12.normal.dist(p(0., 1.)) < 1e-15 && (l12.offset - 1.0).abs() < 1e-15);
        assert!(l34.normal.dist(p(0., -1.)) < 1e-15 && (l34.offset - 1.0).abs() < 1e-15);

        let s = EnvelopeSegment::new(mp(0., 0., 2.), mp(5., 0., 1.)).unwrap();
        let (a1, _) = s.angles().unwrap();
        assert!((a1.cos() - 0.2).abs() < 1e-15);
        let (l12, l34) = s.tangent_lines().unwrap();
        for l in [l12, l34] {
            assert!(((l.normal.dot(p(0., 0.)) - l.offset).abs() - 2.0).abs() < 1e-12);
            assert!(((l.normal.dot(p(5., 0.)) - l.offset).abs() - 1.0).abs() < 1e-12);
        }

        let s = EnvelopeSegment::new(mp(0., 0., 0.), mp(3., 4., 5.)).unwrap();
        assert!(s.is_degenerate());
        assert!(matches!(
            EnvelopeSegment::new(mp(1., 1., 1.), mp(1., 1., 1.)),
            Err(Error::CoincidentCircles)
        ));
        assert!(EnvelopeSegment::new(mp(1., 1., 1.), mp(1., 1., 2.)).unwrap().is_degenerate());
    }

    #[test]
    fn random_tangents_touch_both_circles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let s = random_segment(&mut rng);
            let (a1, a2) = s.angles().unwrap();
            assert!((a1 + a2 - PI).abs() <= 1e-12);
            let (l12, l34) = s.tangent_lines().unwrap();
            for l in [l12, l34] {
                assert!(((l.offset - l.normal.dot(s.v1.u)) - s.v1.r).abs() < 1e-9);
                assert!(((l.offset - l.normal.dot(s.v2.u)) - s.v2.r).abs() < 1e-9);
            }
            // L12 on the left of u1 → u2.
            let q = s.tangent_points().unwrap();
            assert!((s.v2.u - s.v1.u).cross(q[0] - s.v1.u) >= 0.0);
        }
    }

    #[test]
    fn capsule_cases() {
        let s = capsule();
        let d = s.distance(p(2., 3.));
        assert_eq!(d.case, CaseTag::Line12);
        assert!((d.sqdist - 4.0).abs() < 1e-14);
        assert!(d.footpoint.dist(p(2., 1.)) < 1e-14);

        let d = s.distance(p(2., -3.));
        assert_eq!(d.case, CaseTag::Line34);
        assert!(d.footpoint.dist(p(2., -1.)) < 1e-14);

        let d = s.distance(p(-3., 0.));
        assert_eq!(d.case, CaseTag::Arc1);
        assert!((d.sqdist - 4.0).abs() < 1e-14);
        assert!((s.gradient(p(-3., 0.)).value[2] + 4.0).abs() < 1e-14);

        assert_eq!(s.distance(p(7., 0.)).case, CaseTag::Arc2);
        assert!(s.sqdist(p(1.3, 1.0)) < 1e-28);
        assert!(s.gradient(p(1.3, 1.0)).value.iter().all(|g| g.abs() < 1e-14));
        assert!(s.contains(p(2., 0.5), 1e-9));
        assert!(!s.contains(p(2., 1.5), 1e-9));
        assert!(s.contains(p(-0.5, 0.5), 1e-9));
    }

    /// Minimum over a fine sampling of the two arcs and two tangent
    /// segments, built from angles rather than the segment's own vectors.
    fn sampled_sqdist(v1: MedialPoint, v2: MedialPoint, q: Point2, n: usize) -> f64 {
        let dx = v2.u - v1.u;
        let phi = dx.y.atan2(dx.x);
        let alpha = ((v1.r - v2.r) / dx.norm()).acos();
        let dir = |a: f64| p(a.cos(), a.sin());
        let t1 = v1.u + dir(phi + alpha) * v1.r;
        let t2 = v2.u + dir(phi + alpha) * v2.r;
        let t3 = v2.u + dir(phi - alpha) * v2.r;
        let t4 = v1.u + dir(phi - alpha) * v1.r;
        let mut best = f64::INFINITY;
        let k = n / 4;
        for i in 0..=k {
            let s = i as f64 / k as f64;
            let a1 = phi + alpha + s * (2.0 * PI - 2.0 * alpha);
            let a2 = phi - alpha + s * 2.0 * alpha;
            for q2 in [
                v1.u + dir(a1) * v1.r,
                v2.u + dir(a2) * v2.r,
                t1.lerp(t2, s),
                t4.lerp(t3, s),
            ] {
                best = best.min((q2 - q).norm_sq());
            }
        }
        best
    }

    #[test]
    fn matches_sampled_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let s = random_segment(&mut rng);
            let q = p(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let exact = s.sqdist(q);
            let sampled = sampled_sqdist(s.v1, s.v2, q, 40_000);
            assert!(exact <= sampled + 1e-12);
            assert!(sampled.sqrt() - exact.sqrt() < 1e-3);
        }
    }

    #[test]
    fn continuous_across_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let s = random_segment(&mut rng);
            let a = p(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let b = p(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let steps = 20_000;
            let mut prev = s.sqdist(a);
            for i in 1..=steps {
                let d = s.sqdist(a.lerp(b, i as f64 / steps as f64));
                let bound = 3.0 * a.dist(b) / steps as f64 * 8.0;
                assert!((d - prev).abs() <= bound, "jump {}", (d - prev).abs());
                prev = d;
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = 1e-6;
        let mut checked = 0;
        while checked < 1000 {
            let s = random_segment(&mut rng);
            let q = p(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let g = s.gradient(q);
            if g.near_case_boundary {
                continue;
            }
            let base = [s.v1.u.x, s.v1.u.y, s.v1.r, s.v2.u.x, s.v2.u.y, s.v2.r];
            let eval = |x: [f64; 6]| {
                EnvelopeSegment::new(mp(x[0], x[1], x[2]), mp(x[3], x[4], x[5]))
                    .unwrap()
                    .sqdist(q)
            };
            let mut fd = [0.0; 6];
            for k in 0..6 {
                let (mut xp, mut xm) = (base, base);
                xp[k] += h;
                xm[k] -= h;
                fd[k] = (eval(xp) - eval(xm)) / (2.0 * h);
            }
            let num: f64 = fd.iter().zip(&g.value).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let den: f64 = fd.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-8);
            // Skip configurations where a finite-difference step crosses cases.
            let crosses = (0..6).any(|k| {
                let (mut xp, mut xm) = (base, base);
                xp[k] += h;
                xm[k] -= h;
                let case = |x: [f64; 6]| {
                    EnvelopeSegment::new(mp(x[0], x[1], x[2]), mp(x[3], x[4], x[5]))
                        .unwrap()
                        .distance(q)
                        .case
                };
                case(xp) != g.case || case(xm) != g.case
            });
            if crosses {
                continue;
            }
            assert!(num / den <= 1e-4, "relative error {}", num / den);
            checked += 1;
        }
    }

    #[test]
    fn zero_length_circle() {
        let s = EnvelopeSegment::circle(mp(1., 1., 0.5));
        assert!((s.sqdist(p(3., 1.)) - 2.25).abs() < 1e-15);
        assert_eq!(s.distance(p(3., 1.)).case, CaseTag::DegenerateCircle);
    }
}
