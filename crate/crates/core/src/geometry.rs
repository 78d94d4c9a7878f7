//! Planar primitives shared by every stage: points, medial circles,
//! orientation and incircle predicates, circumcircles and polygon
//! containment.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise rotation by a quarter turn.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn lerp(self, other: Self, t: f64) -> Self {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn robust(self) -> robust::Coord<f64> {
        robust::Coord { x: self.x, y: self.y }
    }
}

impl Add for Point2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// A medial circle: center `u` and radius `r`, viewed as a point of R³.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MedialPoint {
    pub u: Point2,
    pub r: f64,
}

impl MedialPoint {
    pub const fn new(x: f64, y: f64, r: f64) -> Self {
        Self {
            u: Point2::new(x, y),
            r,
        }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.u.x, self.u.y, self.r]
    }

    /// Euclidean distance in (x, y, r) space.
    pub fn dist3(self, other: Self) -> f64 {
        let d = self.u - other.u;
        (d.norm_sq() + (self.r - other.r).powi(2)).sqrt()
    }

    pub fn lerp(self, other: Self, t: f64) -> Self {
        Self {
            u: self.u.lerp(other.u, t),
            r: self.r + (other.r - self.r) * t,
        }
    }

    /// Signed distance from `p` to this circle: negative inside.
    pub fn signed_dist(self, p: Point2) -> f64 {
        p.dist(self.u) - self.r
    }
}

/// A closed polygon given by its vertices in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    /// Builds a polygon after checking vertex count, finiteness and
    /// simplicity.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let poly = Self::new_unchecked(vertices);
        poly.validate()?;
        Ok(poly)
    }

    /// Builds a polygon without validation. Used for outlines produced
    /// internally, which are not guaranteed simple.
    pub fn new_unchecked(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterator over `(a, b)` edges, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area, positive for counterclockwise order.
    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn contains(&self, p: Point2) -> bool {
        point_in_polygon(p, self)
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(Error::InvalidInput(format!(
                "polygon needs at least 3 vertices, got {n}"
            )));
        }
        if let Some(i) = self.vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("vertex {i} is not finite")));
        }
        if let Some((i, j)) = first_self_intersection(&self.vertices) {
            return Err(Error::InvalidInput(format!(
                "polygon is not simple: edges {i} and {j} intersect"
            )));
        }
        Ok(())
    }
}

/// Orientation of the triangle `abc`: `+1` counterclockwise, `-1`
/// clockwise, `0` collinear. Uses adaptive-precision arithmetic so the
/// sign is exact for finite inputs.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> i8 {
    let det = robust::orient2d(a.robust(), b.robust(), c.robust());
    sign(det)
}

/// `+1` if `d` lies strictly inside the circumcircle of the
/// counterclockwise triangle `abc`, `-1` outside, `0` on it.
pub fn incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> i8 {
    let det = robust::incircle(a.robust(), b.robust(), c.robust(), d.robust());
    sign(det)
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Triangles with `|b × c|` below this fraction of `|b| |c|` count as
/// degenerate.
const NEAR_COLLINEAR: f64 = 1e-14;

/// Circumscribed circle of a non-degenerate triangle.
pub fn circumcircle(a: Point2, b: Point2, c: Point2) -> Result<MedialPoint> {
    if orient2d(a, b, c) == 0 {
        return Err(Error::DegenerateTriangle);
    }
    // Translate to `a` to limit cancellation.
    let b = b - a;
    let c = c - a;
    let d = 2.0 * b.cross(c);
    let bb = b.norm_sq();
    let cc = c.norm_sq();
    // Nearly collinear triples have circumcenters far beyond any
    // meaningful scale.
    if d.abs() <= 2.0 * NEAR_COLLINEAR * (bb * cc).sqrt() {
        return Err(Error::DegenerateTriangle);
    }
    let center = Point2::new((c.y * bb - b.y * cc) / d, (b.x * cc - c.x * bb) / d);
    if !center.is_finite() {
        return Err(Error::DegenerateTriangle);
    }
    let r = center.norm();
    Ok(MedialPoint { u: center + a, r })
}

/// Winding-number containment. Points on the boundary count as inside.
pub fn point_in_polygon(p: Point2, poly: &Polygon) -> bool {
    let mut winding = 0i32;
    for (a, b) in poly.edges() {
        if on_segment(p, a, b) {
            return true;
        }
        if a.y <= p.y {
            if b.y > p.y && orient2d(a, b, p) > 0 {
                winding += 1;
            }
        } else if b.y <= p.y && orient2d(a, b, p) < 0 {
            winding -= 1;
        }
    }
    winding != 0
}

fn on_segment(p: Point2, a: Point2, b: Point2) -> bool {
    orient2d(a, b, p) == 0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

/// `(min, max)` corners of the axis-aligned bounding box.
pub fn bbox(points: &[Point2]) -> Option<(Point2, Point2)> {
    let first = *points.first()?;
    Some(points.iter().fold((first, first), |(lo, hi), p| {
        (
            Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
            Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    }))
}

/// Length of the bounding-box diagonal; `0` for an empty polygon.
pub fn polygon_bbox_diagonal(poly: &Polygon) -> f64 {
    bbox(poly.vertices()).map_or(0.0, |(lo, hi)| lo.dist(hi))
}

/// Affine map into normalized units: `p_norm = (p + offset) * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub offset: Point2,
    pub scale: f64,
}

impl Normalization {
    pub const IDENTITY: Self = Self {
        offset: Point2::new(0.0, 0.0),
        scale: 1.0,
    };

    /// Map sending the bounding-box minimum to the origin and the
    /// bounding-box diagonal to length 1.
    pub fn unit_diagonal(points: &[Point2]) -> Result<Self> {
        let (lo, hi) = bbox(points).ok_or(Error::InvalidInput("no points".into()))?;
        let diag = lo.dist(hi);
        if !(diag > 0.0 && diag.is_finite()) {
            return Err(Error::InvalidInput(
                "bounding box diagonal must be positive".into(),
            ));
        }
        Ok(Self {
            offset: -lo,
            scale: 1.0 / diag,
        })
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        (p + self.offset) * self.scale
    }

    pub fn invert(&self, p: Point2) -> Point2 {
        p * (1.0 / self.scale) - self.offset
    }

    pub fn invert_medial(&self, v: MedialPoint) -> MedialPoint {
        MedialPoint {
            u: self.invert(v.u),
            r: v.r / self.scale,
        }
    }
}

/// Closest point to `p` on segment `ab` and the squared distance to it.
pub fn closest_on_segment(p: Point2, a: Point2, b: Point2) -> (Point2, f64) {
    let ab = b - a;
    let len2 = ab.norm_sq();
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = a + ab * t;
    (q, (p - q).norm_sq())
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(c, a, b))
        || (o2 == 0 && on_segment(d, a, b))
        || (o3 == 0 && on_segment(a, c, d))
        || (o4 == 0 && on_segment(b, c, d))
}

/// Returns the first pair of non-adjacent intersecting edges, if any.
/// Coincident consecutive vertices also count as a violation.
fn first_self_intersection(v: &[Point2]) -> Option<(usize, usize)> {
    let n = v.len();
    for i in 0..n {
        if v[i] == v[(i + 1) % n] {
            return Some((i, (i + 1) % n));
        }
    }
    // Sweep over edges sorted by min-x to prune pairs.
    let mut order: Vec<usize> = (0..n).collect();
    let lo_x = |i: usize| v[i].x.min(v[(i + 1) % n].x);
    let hi_x = |i: usize| v[i].x.max(v[(i + 1) % n].x);
    order.sort_by(|&a, &b| lo_x(a).total_cmp(&lo_x(b)));
    for (k, &i) in order.iter().enumerate() {
        let (a, b) = (v[i], v[(i + 1) % n]);
        let (ylo, yhi) = (a.y.min(b.y), a.y.max(b.y));
        for &j in &order[k + 1..] {
            if lo_x(j) > hi_x(i) {
                break;
            }
            let adjacent = j == (i + 1) % n || i == (j + 1) % n;
            if adjacent {
                // Adjacent edges share a vertex; they may only overlap
                // if they fold back onto each other.
                let (shared, p, q) = if j == (i + 1) % n {
                    (b, a, v[(j + 1) % n])
                } else {
                    (a, b, v[j])
                };
                if orient2d(p, shared, q) == 0 && (p - shared).dot(q - shared) > 0.0 {
                    return Some((i.min(j), i.max(j)));
                }
                continue;
            }
            let (c, d) = (v[j], v[(j + 1) % n]);
            if c.y.max(d.y) < ylo || c.y.min(d.y) > yhi {
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}
