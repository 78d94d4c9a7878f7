//! SVG renderings of boundaries, discrete medial axes and spline MATs.
//!
//! The reconstructed union is always a single nonzero-filled `<path>`
//! whose subpaths (disks and tangent trapezoids) share one orientation.

use std::fmt::Write;

use crate::geometry::{bbox, MedialPoint, Point2, Polygon};
use crate::reconstruction::{sample_curve, segment_between};
use crate::skeleton::MatGraph;
use crate::spline_mat::SplineMat;

const WIDTH: f64 = 800.0;
const UNION_FILL: &str = "#9ecae1";
const AXIS_STROKE: &str = "#d62728";
const CONTROL_FILL: &str = "#2ca02c";

/// Maps plane coordinates to pixels with the y axis pointing up.
struct Canvas {
    lo: Point2,
    hi: Point2,
    scale: f64,
    body: String,
}

impl Canvas {
    fn new(points: &[Point2]) -> Self {
        let (mut lo, mut hi) = bbox(points).unwrap_or_default();
        let pad = 0.05 * lo.dist(hi).max(1e-9);
        lo = lo - Point2::new(pad, pad);
        hi = hi + Point2::new(pad, pad);
        let scale = WIDTH / (hi.x - lo.x).max(hi.y - lo.y);
        Self {
            lo,
            hi,
            scale,
            body: String::new(),
        }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        ((p.x - self.lo.x) * self.scale, (self.hi.y - p.y) * self.scale)
    }

    fn polyline(&mut self, tag: &str, points: &[Point2], attrs: &str) {
        let coords: Vec<String> = points
            .iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(self.body, r#"<{tag} points="{}" {attrs}/>"#, coords.join(" "));
    }

    fn dot(&mut self, p: Point2, radius: f64, fill: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(self.body, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{radius}" fill="{fill}"/>"#);
    }

    fn boundary(&mut self, poly: &Polygon) {
        self.polyline("polygon", poly.vertices(), r#"fill="none" stroke="black" stroke-width="1.5""#);
    }

    /// One filled path for the union of disks and tangent trapezoids.
    fn union(&mut self, disks: &[MedialPoint], trapezoids: &[[Point2; 4]]) {
        let mut d = String::new();
        for v in disks.iter().filter(|v| v.r > 0.0) {
            let (cx, cy) = self.map(v.u);
            let r = v.r * self.scale;
            // Sweep flag 0 runs counterclockwise on screen.
            let _ = write!(
                d,
                "M{:.3},{cy:.3}A{r:.3},{r:.3} 0 1 0 {:.3},{cy:.3}A{r:.3},{r:.3} 0 1 0 {:.3},{cy:.3}Z",
                cx + r,
                cx - r,
                cx + r
            );
        }
        for quad in trapezoids {
            let mut px: Vec<(f64, f64)> = quad.iter().map(|&p| self.map(p)).collect();
            let area: f64 = (0..4)
                .map(|i| {
                    let (a, b) = (px[i], px[(i + 1) % 4]);
                    a.0 * b.1 - b.0 * a.1
                })
                .sum();
            // Positive screen area is clockwise on screen.
            if area > 0.0 {
                px.reverse();
            }
            let _ = write!(d, "M{:.3},{:.3}", px[0].0, px[0].1);
            for p in &px[1..] {
                let _ = write!(d, "L{:.3},{:.3}", p.0, p.1);
            }
            d.push('Z');
        }
        if !d.is_empty() {
            let _ = writeln!(
                self.body,
                r#"<path d="{d}" fill="{UNION_FILL}" fill-opacity="0.8" fill-rule="nonzero" stroke="none"/>"#
            );
        }
    }

    fn finish(self) -> String {
        let w = (self.hi.x - self.lo.x) * self.scale;
        let h = (self.hi.y - self.lo.y) * self.scale;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

pub fn render_boundary(boundary: &Polygon) -> String {
    let mut c = Canvas::new(boundary.vertices());
    c.boundary(boundary);
    c.finish()
}

/// Boundary, union of the vertex circles and the axis edges of a discrete
/// medial axis.
pub fn render_graph(boundary: &Polygon, graph: &MatGraph) -> String {
    let mut c = Canvas::new(boundary.vertices());
    c.union(graph.vertices(), &[]);
    c.boundary(boundary);
    let v = graph.vertices();
    for &(a, b) in graph.edges() {
        c.polyline("polyline", &[v[a].u, v[b].u], &format!(r#"fill="none" stroke="{AXIS_STROKE}" stroke-width="1""#));
    }
    c.finish()
}

/// Boundary, reconstructed union, medial curves and control points of a
/// spline MAT.
pub fn render_mat(boundary: &Polygon, mat: &SplineMat, samples_per_span: usize) -> String {
    let mut c = Canvas::new(boundary.vertices());
    let mut disks = Vec::new();
    let mut trapezoids = Vec::new();
    let mut axes = Vec::new();
    for curve in mat.curves() {
        let samples: Vec<MedialPoint> = sample_curve(curve, samples_per_span).iter().map(|s| s.point).collect();
        for w in samples.windows(2) {
            if let Some(q) = segment_between(w[0], w[1]).tangent_points() {
                trapezoids.push(q);
            }
        }
        axes.push(samples.iter().map(|s| s.u).collect::<Vec<_>>());
        disks.extend(samples);
    }
    c.union(&disks, &trapezoids);
    c.boundary(boundary);
    for axis in &axes {
        c.polyline("polyline", axis, &format!(r#"fill="none" stroke="{AXIS_STROKE}" stroke-width="2""#));
    }
    for curve in mat.curves() {
        let ctrl: Vec<Point2> = curve.control_points().iter().map(|p| p.u).collect();
        c.polyline("polyline", &ctrl, r#"fill="none" stroke="gray" stroke-width="0.75" stroke-dasharray="4 3""#);
        for &p in &ctrl {
            c.dot(p, 3.5, CONTROL_FILL);
        }
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspline::CubicBSpline3;
    use crate::shapes;

    #[test]
    fn single_union_path() {
        let boundary = shapes::capsule(200, 1.0, 0.5);
        let curve = CubicBSpline3::straight(MedialPoint::new(-1.0, 0.0, 0.5), MedialPoint::new(1.0, 0.0, 0.5));
        let mat = SplineMat::new(vec![curve], vec![]).unwrap();
        let doc = render_mat(&boundary, &mat, 8);
        assert_eq!(doc.matches("<path").count(), 1);
        assert!(doc.contains("fill-rule=\"nonzero\""));
        assert_eq!(doc.matches("<polygon").count(), 1);
        assert_eq!(doc.matches("<circle").count(), 4);
    }

    #[test]
    fn trapezoids_share_disk_orientation() {
        let boundary = shapes::circle(32, 2.0);
        let mut c = Canvas::new(boundary.vertices());
        let seg = segment_between(MedialPoint::new(0.0, 0.0, 0.5), MedialPoint::new(1.0, 0.3, 0.2));
        let q = seg.tangent_points().unwrap();
        c.union(&[], &[q, [q[3], q[2], q[1], q[0]]]);
        let d = c.body.split("d=\"").nth(1).unwrap().split('"').next().unwrap();
        // Both windings normalize to the same counterclockwise-on-screen order.
        let subpaths: Vec<&str> = d.split('M').skip(1).collect();
        let area = |s: &str| {
            let pts: Vec<(f64, f64)> = s
                .trim_end_matches('Z')
                .split('L')
                .map(|p| {
                    let (x, y) = p.split_once(',').unwrap();
                    (x.parse().unwrap(), y.parse().unwrap())
                })
                .collect();
            (0..pts.len())
                .map(|i| {
                    let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
                    a.0 * b.1 - b.0 * a.1
                })
                .sum::<f64>()
        };
        assert_eq!(subpaths.len(), 2);
        assert!(subpaths.iter().all(|s| area(s) < 0.0));
    }
}
