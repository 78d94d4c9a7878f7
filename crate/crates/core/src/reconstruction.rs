//! Polygonized reconstruction of a spline MAT: envelope segments between
//! densely sampled medial circles, footpoint search with validity checks,
//! the one-sided Hausdorff error and the union outline.

use serde::Serialize;

use crate::bspline::{CubicBSpline3, DEGREE};
use crate::envelope::{CaseTag, EnvelopeDistance, EnvelopeSegment, Piece};
use crate::error::{Error, Result};
use crate::geometry::{MedialPoint, Point2, Polygon};
use crate::spline_mat::SplineMat;

pub const DEFAULT_SAMPLES_PER_SPAN: usize = 16;

/// Depth below which a footpoint counts as interior to another envelope.
pub const INTERIOR_TOL: f64 = 1e-9;

/// Gap between the error bounds of an interior point below which the
/// valid-footpoint distance is kept.
const REFINE_GAP: f64 = 1e-7;

/// Depth steps tried when leaving the union along a normal.
const EXIT_STEPS: usize = 64;

/// Cap on cached candidates per boundary point for local refreshes.
const CACHE_CANDIDATES: usize = 24;

/// A sample of a curve as a linear combination of four control points
/// `span - 3 ..= span`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub point: MedialPoint,
    pub span: usize,
    pub weights: [f64; 4],
}

/// Samples `curve` at `samples_per_span` uniform parameters per knot span
/// plus the end parameter.
pub fn sample_curve(curve: &CubicBSpline3, samples_per_span: usize) -> Vec<Sample> {
    let n = curve.n_ctrl();
    let spans = curve.span_count();
    let mut out = Vec::with_capacity(spans * samples_per_span + 1);
    for s in 0..spans {
        let (a, b) = curve.span_range(s);
        for k in 0..samples_per_span {
            let t = a + (b - a) * k as f64 / samples_per_span as f64;
            let span = s + DEGREE;
            out.push(combine(curve, span, curve.basis(span, t)));
        }
    }
    out.push(combine(curve, n - 1, [0.0, 0.0, 0.0, 1.0]));
    out
}

fn combine(curve: &CubicBSpline3, span: usize, weights: [f64; 4]) -> Sample {
    let ctrl = curve.control_points();
    let mut p = [0.0; 3];
    for (j, w) in weights.iter().enumerate() {
        let c = ctrl[span - DEGREE + j].to_array();
        for k in 0..3 {
            p[k] += w * c[k];
        }
    }
    Sample {
        point: MedialPoint::from_array(p),
        span,
        weights,
    }
}

/// Envelope of two consecutive samples; coincident samples give a circle.
pub fn segment_between(a: MedialPoint, b: MedialPoint) -> EnvelopeSegment {
    EnvelopeSegment::new(a, b).unwrap_or_else(|_| EnvelopeSegment::circle(a))
}

#[derive(Debug, Clone, Copy)]
pub struct SegmentRef {
    pub curve: usize,
    /// Index within the curve: between samples `index` and `index + 1`.
    pub index: usize,
    pub envelope: EnvelopeSegment,
}

/// Uniform grid over segment bounding boxes.
#[derive(Debug, Clone)]
struct Grid {
    origin: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl Grid {
    fn build(boxes: &[(Point2, Point2)]) -> Self {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut mean = 0.0;
        for (a, b) in boxes {
            lo = Point2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Point2::new(hi.x.max(b.x), hi.y.max(b.y));
            mean += (b.x - a.x).max(b.y - a.y);
        }
        mean /= boxes.len().max(1) as f64;
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        let cell = mean.max(extent / 256.0).max(1e-12);
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).min(512);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).min(512);
        let cell = cell.max((hi.x - lo.x) / nx as f64).max((hi.y - lo.y) / ny as f64);
        let mut grid = Self {
            origin: lo,
            cell,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
        };
        for (id, (a, b)) in boxes.iter().enumerate() {
            let (x0, y0) = grid.cell_of(*a);
            let (x1, y1) = grid.cell_of(*b);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    grid.cells[y * nx + x].push(id as u32);
                }
            }
        }
        grid
    }

    fn cell_of(&self, p: Point2) -> (usize, usize) {
        let fx = ((p.x - self.origin.x) / self.cell).floor();
        let fy = ((p.y - self.origin.y) / self.cell).floor();
        (
            (fx.max(0.0) as usize).min(self.nx - 1),
            (fy.max(0.0) as usize).min(self.ny - 1),
        )
    }

    fn diagonal(&self) -> f64 {
        self.cell * ((self.nx * self.nx + self.ny * self.ny) as f64).sqrt()
    }

    /// Ids in cells overlapping the square of half-width `r` around `p`.
    fn near(&self, p: Point2, r: f64, out: &mut Vec<u32>) {
        out.clear();
        let (x0, y0) = self.cell_of(Point2::new(p.x - r, p.y - r));
        let (x1, y1) = self.cell_of(Point2::new(p.x + r, p.y + r));
        for y in y0..=y1 {
            for x in x0..=x1 {
                out.extend_from_slice(&self.cells[y * self.nx + x]);
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    fn at(&self, p: Point2) -> &[u32] {
        let outside = p.x < self.origin.x
            || p.y < self.origin.y
            || p.x > self.origin.x + self.cell * self.nx as f64
            || p.y > self.origin.y + self.cell * self.ny as f64;
        if outside {
            return &[];
        }
        let (x, y) = self.cell_of(p);
        &self.cells[y * self.nx + x]
    }
}

fn bbox_distance(p: Point2, (lo, hi): (Point2, Point2)) -> f64 {
    let dx = (lo.x - p.x).max(0.0).max(p.x - hi.x);
    let dy = (lo.y - p.y).max(0.0).max(p.y - hi.y);
    dx.hypot(dy)
}

/// A boundary point's closest valid envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FootpointRecord {
    pub point: usize,
    pub curve: usize,
    pub segment: usize,
    pub case: CaseTag,
    pub sqdist: f64,
    /// False when no valid footpoint was found and the nearest envelope
    /// was used regardless.
    pub valid: bool,
}

/// Global-pass state reused by local refreshes.
#[derive(Debug, Clone, Default)]
pub struct FootpointCache {
    pub segment: usize,
    candidates: Vec<u32>,
    blockers: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
pub struct Footpoint {
    /// Flat segment id.
    pub segment: usize,
    /// Distance to the boundary of that segment's envelope.
    pub distance: EnvelopeDistance,
    pub valid: bool,
    /// Distance to the boundary of the union.
    pub error: f64,
}

impl Footpoint {
    fn plain(segment: usize, distance: EnvelopeDistance, valid: bool) -> Self {
        Self {
            segment,
            distance,
            valid,
            error: distance.signed.abs(),
        }
    }
}

/// Envelope segments of every curve of a MAT, with a spatial index.
#[derive(Debug, Clone)]
pub struct SampledMat {
    samples: Vec<Vec<Sample>>,
    segments: Vec<SegmentRef>,
    boxes: Vec<(Point2, Point2)>,
    grid: Grid,
}

impl SampledMat {
    pub fn new(mat: &SplineMat, samples_per_span: usize) -> Result<Self> {
        if mat.is_empty() {
            return Err(Error::EmptyMat);
        }
        assert!(samples_per_span > 0);
        let samples: Vec<Vec<Sample>> = mat
            .curves()
            .iter()
            .map(|c| sample_curve(c, samples_per_span))
            .collect();
        let mut segments = Vec::new();
        for (c, s) in samples.iter().enumerate() {
            for (k, w) in s.windows(2).enumerate() {
                segments.push(SegmentRef {
                    curve: c,
                    index: k,
                    envelope: segment_between(w[0].point, w[1].point),
                });
            }
        }
        let boxes: Vec<_> = segments.iter().map(|s| s.envelope.bbox()).collect();
        let grid = Grid::build(&boxes);
        Ok(Self {
            samples,
            segments,
            boxes,
            grid,
        })
    }

    pub fn samples(&self, curve: usize) -> &[Sample] {
        &self.samples[curve]
    }

    pub fn segments(&self) -> &[SegmentRef] {
        &self.segments
    }

    /// Flat ids of segments whose envelope contains `q` by more than the
    /// interior tolerance, excluding `owner`.
    fn blocked_by(&self, q: Point2, owner: usize, ids: impl IntoIterator<Item = u32>) -> bool {
        ids.into_iter().any(|id| {
            let id = id as usize;
            id != owner
                && bbox_distance(q, self.boxes[id]) <= INTERIOR_TOL
                && self.segments[id].envelope.contains(q, INTERIOR_TOL)
        })
    }

    /// Whether the footpoint on segment `seg` is interior to any other
    /// envelope, testing every segment through the spatial grid.
    pub fn is_valid_global(&self, seg: usize, footpoint: Point2) -> bool {
        !self.blocked_by(footpoint, seg, self.grid.at(footpoint).iter().copied())
    }

    /// Closest valid footpoint over all segments. Falls back to the
    /// nearest envelope when every candidate is blocked. Inside the union,
    /// where per-segment footpoints can all be covered near a crease, the
    /// exact nearest exposed boundary point is used instead.
    pub fn footpoint_global(&self, p: Point2) -> (Footpoint, FootpointCache) {
        let (f, mut cache) = self.footpoint_candidates(p);
        let f = self.refine_inside(p, f);
        cache.segment = f.segment;
        (f, cache)
    }

    fn footpoint_candidates(&self, p: Point2) -> (Footpoint, FootpointCache) {
        let mut r = self.grid.cell;
        let mut near = Vec::new();
        let limit = 4.0 * self.grid.diagonal() + 4.0 * bbox_distance(p, self.extent());
        loop {
            self.grid.near(p, r, &mut near);
            let mut cands: Vec<(f64, u32, EnvelopeDistance)> = near
                .iter()
                .filter(|&&id| bbox_distance(p, self.boxes[id as usize]) <= r)
                .map(|&id| {
                    let d = self.segments[id as usize].envelope.distance(p);
                    (d.signed.abs(), id, d)
                })
                .collect();
            cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let exhausted = r >= limit;
            for &(dist, id, d) in &cands {
                if dist > r && !exhausted {
                    break;
                }
                let blockers = self.grid.at(d.footpoint);
                if !self.blocked_by(d.footpoint, id as usize, blockers.iter().copied()) {
                    let cache = FootpointCache {
                        segment: id as usize,
                        candidates: cands.iter().take(CACHE_CANDIDATES).map(|c| c.1).collect(),
                        blockers: blockers.to_vec(),
                    };
                    return (
                        Footpoint::plain(id as usize, d, true),
                        cache,
                    );
                }
            }
            if exhausted {
                let &(_, id, d) = cands.first().expect("grid covers every segment");
                let cache = FootpointCache {
                    segment: id as usize,
                    candidates: cands.iter().take(CACHE_CANDIDATES).map(|c| c.1).collect(),
                    blockers: Vec::new(),
                };
                return (
                    Footpoint::plain(id as usize, d, false),
                    cache,
                );
            }
            r *= 2.0;
        }
    }

    fn extent(&self) -> (Point2, Point2) {
        let g = &self.grid;
        (
            g.origin,
            g.origin + Point2::new(g.cell * g.nx as f64, g.cell * g.ny as f64),
        )
    }

    /// Closest valid footpoint among the cached candidates and the
    /// segments of the same curve within `window` of the cached one,
    /// with validity tested only against those segments and the cached
    /// blockers.
    pub fn footpoint_local(&self, p: Point2, cache: &FootpointCache, window: usize) -> Footpoint {
        let f = self.footpoint_local_candidates(p, cache, window);
        self.refine_inside(p, f)
    }

    fn footpoint_local_candidates(&self, p: Point2, cache: &FootpointCache, window: usize) -> Footpoint {
        let owner = self.segments[cache.segment];
        let first = cache.segment - owner.index;
        let count = self.samples[owner.curve].len() - 1;
        let lo = owner.index.saturating_sub(window);
        let hi = (owner.index + window).min(count - 1);
        let local: Vec<u32> = (lo..=hi).map(|k| (first + k) as u32).collect();
        let mut cands: Vec<u32> = cache.candidates.iter().chain(&local).copied().collect();
        cands.sort_unstable();
        cands.dedup();
        let mut scored: Vec<(f64, u32, EnvelopeDistance)> = cands
            .iter()
            .map(|&id| {
                let d = self.segments[id as usize].envelope.distance(p);
                (d.signed.abs(), id, d)
            })
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let checks: Vec<u32> = local.iter().chain(&cache.blockers).copied().collect();
        for &(_, id, d) in &scored {
            if !self.blocked_by(d.footpoint, id as usize, checks.iter().copied()) {
                return Footpoint::plain(id as usize, d, true);
            }
        }
        let (_, id, d) = scored[0];
        Footpoint::plain(id as usize, d, false)
    }

    /// Replaces `f` by the nearest exposed boundary point when `p` lies
    /// inside the union and `f` is not provably nearest.
    fn refine_inside(&self, p: Point2, f: Footpoint) -> Footpoint {
        let (depth, deepest) = self.depth(p);
        // Outside, the nearest envelope point is exposed; inside, every
        // exposed point is at least `depth` away, and a fallback footpoint
        // bounds nothing.
        if depth <= INTERIOR_TOL || (f.valid && f.error <= depth + REFINE_GAP) {
            return f;
        }
        let upper = if f.valid { f.error } else { f64::INFINITY };
        let guess = self
            .exit_distance(p, deepest)
            .map_or(upper, |d| upper.min(d * (1.0 + 1e-6) + INTERIOR_TOL));
        let found = self
            .exposed_nearest(p, guess)
            .or_else(|| if guess < upper { self.exposed_nearest(p, upper) } else { None });
        match found {
            Some((error, segment)) => Footpoint {
                segment,
                distance: self.segments[segment].envelope.distance(p),
                valid: true,
                error,
            },
            None => f,
        }
    }

    /// Largest inside distance of `p` over the envelopes containing it,
    /// with the deepest one.
    fn depth(&self, p: Point2) -> (f64, Option<usize>) {
        self.grid
            .at(p)
            .iter()
            .filter(|&&id| bbox_distance(p, self.boxes[id as usize]) == 0.0)
            .map(|&id| (-self.segments[id as usize].envelope.signed_distance(p), Some(id as usize)))
            .fold((0.0, None), |a, b| if b.0 > a.0 { b } else { a })
    }

    /// Length of a path from `p` out of the union along the outward
    /// normal of envelope `from`, found by stepping by the local depth.
    fn exit_distance(&self, p: Point2, from: Option<usize>) -> Option<f64> {
        let foot = self.segments[from?].envelope.distance(p).footpoint;
        let len = p.dist(foot);
        if len == 0.0 {
            return None;
        }
        let n = (foot - p) * (1.0 / len);
        let mut q = p;
        for _ in 0..EXIT_STEPS {
            let (d, _) = self.depth(q);
            if d <= INTERIOR_TOL {
                return Some(p.dist(q));
            }
            q = q + n * d;
        }
        None
    }

    /// Nearest point to `p` on the union boundary closer than `upper`,
    /// with its segment. Pieces of every envelope reaching the disk of
    /// that radius are cut where they cross the disk's rim or another
    /// such envelope, and uncovered sub-pieces inside the disk are
    /// measured.
    fn exposed_nearest(&self, p: Point2, upper: f64) -> Option<(f64, usize)> {
        let mut near = Vec::new();
        self.grid.near(p, upper, &mut near);
        let mut reach: Vec<(f64, u32)> = near
            .iter()
            .filter(|&&id| bbox_distance(p, self.boxes[id as usize]) < upper)
            .map(|&id| (self.segments[id as usize].envelope.signed_distance(p), id))
            .filter(|&(signed, _)| signed < upper)
            .collect();
        reach.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(a.1.cmp(&b.1)));
        let mut best = (upper, None);
        let mut blockers = Vec::new();
        for &(signed, id) in &reach {
            if signed.abs() >= best.0 {
                break;
            }
            for piece in self.segments[id as usize].envelope.pieces() {
                let radius = best.0;
                if bbox_distance(p, piece.bbox()) >= radius {
                    continue;
                }
                // Anything covering a point of the disk reaches within
                // `radius` of its center.
                blockers.clear();
                blockers.extend(reach.iter().filter(|&&(s, j)| s < radius && j != id).map(|&(_, j)| j));
                let mut cuts = vec![0.0, 1.0];
                if radius.is_finite() {
                    cuts.extend(piece.crossings(&Piece::Arc {
                        center: p,
                        r: radius,
                        mid: 0.0,
                        half: std::f64::consts::PI,
                    }));
                }
                for &j in &blockers {
                    for other in self.segments[j as usize].envelope.pieces() {
                        cuts.extend(piece.crossings(&other));
                    }
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                for w in cuts.windows(2) {
                    let mid = piece.point_at(0.5 * (w[0] + w[1]));
                    if p.dist(mid) >= radius || self.blocked_by(mid, id as usize, blockers.iter().copied()) {
                        continue;
                    }
                    let d = p.dist(piece.nearest(p, w[0], w[1]));
                    if d < best.0 {
                        best = (d, Some(id as usize));
                    }
                }
            }
        }
        best.1.map(|id| (best.0, id))
    }

    /// Closest envelope ignoring validity.
    pub fn nearest_any(&self, p: Point2) -> Footpoint {
        let (id, d) = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.envelope.distance(p)))
            .min_by(|a, b| a.1.signed.abs().total_cmp(&b.1.signed.abs()))
            .expect("non-empty");
        Footpoint::plain(id, d, false)
    }

    pub fn record(&self, point: usize, f: &Footpoint) -> FootpointRecord {
        let s = self.segments[f.segment];
        FootpointRecord {
            point,
            curve: s.curve,
            segment: s.index,
            case: f.distance.case,
            sqdist: f.error * f.error,
            valid: f.valid,
        }
    }

    /// Union membership of `p` up to the interior tolerance.
    pub fn contains(&self, p: Point2) -> bool {
        self.grid
            .at(p)
            .iter()
            .any(|&id| self.segments[id as usize].envelope.contains(p, INTERIOR_TOL))
    }

    /// Signed distance proxy of the union: exact outside within `reach`,
    /// negative inside, `reach` when no envelope is that close.
    fn union_field(&self, p: Point2, reach: f64, near: &mut Vec<u32>) -> f64 {
        self.grid.near(p, reach, near);
        near.iter()
            .filter(|&&id| bbox_distance(p, self.boxes[id as usize]) <= reach)
            .map(|&id| self.segments[id as usize].envelope.signed_distance(p))
            .fold(reach, f64::min)
    }
}

/// Outcome of a full global error evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    /// Largest distance from a boundary point to the reconstruction.
    pub epsilon: f64,
    pub worst_point: usize,
    pub records: Vec<FootpointRecord>,
    /// Points without any valid footpoint.
    pub fallbacks: usize,
}

/// One-sided Hausdorff distance from `points` to the reconstructed
/// boundary, with a full global footpoint pass.
pub fn error_report(points: &[Point2], mat: &SplineMat, samples_per_span: usize) -> Result<ErrorReport> {
    let sampled = SampledMat::new(mat, samples_per_span)?;
    Ok(error_report_sampled(points, &sampled))
}

pub fn error_report_sampled(points: &[Point2], sampled: &SampledMat) -> ErrorReport {
    let mut records = Vec::with_capacity(points.len());
    let (mut epsilon, mut worst_point, mut fallbacks) = (0.0, 0, 0);
    for (i, &p) in points.iter().enumerate() {
        let (f, _) = sampled.footpoint_global(p);
        if !f.valid {
            fallbacks += 1;
        }
        let d = f.error;
        if d > epsilon {
            epsilon = d;
            worst_point = i;
        }
        records.push(sampled.record(i, &f));
    }
    if fallbacks > 0 {
        log::debug!("{fallbacks} boundary points have no valid footpoint");
    }
    ErrorReport {
        epsilon,
        worst_point,
        records,
        fallbacks,
    }
}

pub fn mat_error(points: &[Point2], mat: &SplineMat, samples_per_span: usize) -> Result<f64> {
    Ok(error_report(points, mat, samples_per_span)?.epsilon)
}

/// Closed polylines tracing the boundary of the union of all envelopes,
/// by marching squares over the union's signed distance at
/// `resolution` cells across the larger side of its bounding box.
pub fn envelope_outline(mat: &SplineMat, samples_per_span: usize, resolution: usize) -> Result<Vec<Polygon>> {
    let sampled = SampledMat::new(mat, samples_per_span)?;
    Ok(outline_sampled(&sampled, resolution))
}

fn outline_sampled(sampled: &SampledMat, resolution: usize) -> Vec<Polygon> {
    let (lo, hi) = sampled.extent();
    let size = (hi.x - lo.x).max(hi.y - lo.y);
    let h = size / resolution.max(4) as f64;
    // One padding cell on each side keeps the border outside.
    let origin = lo - Point2::new(2.0 * h, 2.0 * h);
    let nx = ((hi.x - lo.x) / h).ceil() as usize + 5;
    let ny = ((hi.y - lo.y) / h).ceil() as usize + 5;
    let reach = 2.0 * h;
    let node = |i: usize, j: usize| origin + Point2::new(i as f64 * h, j as f64 * h);
    let mut near = Vec::new();
    let mut f = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let v = sampled.union_field(node(i, j), reach, &mut near);
            // Nudge exact zeros so every node has a definite side.
            f[j * nx + i] = if v == 0.0 { 1e-300 } else { v };
        }
    }
    let val = |i: usize, j: usize| f[j * nx + i];

    // Crossing ids: horizontal edge (i,j)-(i+1,j) → 2(j·nx+i),
    // vertical edge (i,j)-(i,j+1) → 2(j·nx+i)+1.
    let crossing = |id: usize| -> Point2 {
        let base = id / 2;
        let (i, j) = (base % nx, base / nx);
        let (a, b) = if id.is_multiple_of(2) { ((i, j), (i + 1, j)) } else { ((i, j), (i, j + 1)) };
        let (fa, fb) = (val(a.0, a.1), val(b.0, b.1));
        let t = fa / (fa - fb);
        node(a.0, a.1).lerp(node(b.0, b.1), t)
    };
    let mut next: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            // Corners and the edges leaving them, counterclockwise.
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let edges = [
                2 * (j * nx + i),
                2 * (j * nx + i + 1) + 1,
                2 * ((j + 1) * nx + i),
                2 * (j * nx + i) + 1,
            ];
            let inside: Vec<bool> = corners.iter().map(|&(a, b)| val(a, b) < 0.0).collect();
            let mut exits = Vec::new();
            let mut enters = Vec::new();
            for k in 0..4 {
                let (a, b) = (inside[k], inside[(k + 1) % 4]);
                if a && !b {
                    exits.push(k);
                } else if !a && b {
                    enters.push(k);
                }
            }
            if exits.is_empty() {
                continue;
            }
            let center_inside = corners.iter().map(|&(a, b)| val(a, b)).sum::<f64>() < 0.0;
            for &x in &exits {
                // Pair with the next enter counterclockwise, or the previous
                // one when the saddle's center is outside.
                let step = |k: usize| if center_inside { (x + k) % 4 } else { (x + 4 - k) % 4 };
                let e = (1..=4).map(step).find(|k| enters.contains(k)).unwrap();
                next.insert(edges[x], edges[e]);
            }
        }
    }

    let mut loops = Vec::new();
    let mut starts: Vec<usize> = next.keys().copied().collect();
    starts.sort_unstable();
    let mut used = std::collections::HashSet::new();
    for s in starts {
        if used.contains(&s) {
            continue;
        }
        let mut ring = Vec::new();
        let mut cur = s;
        while used.insert(cur) {
            ring.push(crossing(cur));
            match next.get(&cur) {
                Some(&n) => cur = n,
                None => break,
            }
        }
        if ring.len() >= 3 {
            loops.push(Polygon::new_unchecked(ring));
        }
    }
    loops
}
