//! Incremental Bowyer–Watson Delaunay triangulation.
//!
//! Points are inserted in input order into a large enclosing triangle.
//! Each insertion walks to the containing triangle, grows the cavity of
//! triangles whose circumcircle strictly contains the new point, and
//! re-triangulates the cavity as a fan. Cocircular ties are resolved by
//! the strict test, so the earlier-inserted configuration is kept and
//! the output is deterministic for a given point order.

use crate::error::{Error, Result};
use crate::geometry::{bbox, incircle, orient2d, Point2};

const NONE: usize = usize::MAX;

/// Scale of the enclosing triangle relative to the input bounding box.
const SUPER_SCALE: f64 = 1.0e3;

#[derive(Debug, Clone)]
pub struct Triangulation {
    points: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    /// `neighbors[t][i]` is the triangle across the edge opposite
    /// `triangles[t][i]`.
    neighbors: Vec<[Option<usize>; 3]>,
}

impl Triangulation {
    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// Counterclockwise vertex index triples.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn neighbors(&self) -> &[[Option<usize>; 3]] {
        &self.neighbors
    }

    pub fn triangle_points(&self, t: usize) -> [Point2; 3] {
        self.triangles[t].map(|i| self.points[i])
    }

    /// Indices of triangles whose circumcircle strictly contains some
    /// input point. Empty for a valid Delaunay triangulation.
    pub fn empty_circle_violations(&self) -> Vec<usize> {
        (0..self.triangles.len())
            .filter(|&t| {
                let [a, b, c] = self.triangle_points(t);
                self.points.iter().any(|&p| incircle(a, b, c, p) > 0)
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
struct Tri {
    v: [usize; 3],
    nb: [usize; 3],
    alive: bool,
}

struct Builder {
    pts: Vec<Point2>,
    tris: Vec<Tri>,
    last: usize,
    mark: Vec<u32>,
    stamp: u32,
}

/// Delaunay triangulation of `points`. Requires at least three
/// non-collinear, pairwise distinct points.
pub fn delaunay(points: &[Point2]) -> Result<Triangulation> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "triangulation needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidInput(format!("point {i} is not finite")));
    }
    let a = points[0];
    let Some(b) = points.iter().copied().find(|&p| p != a) else {
        return Err(Error::DuplicatePoint(1));
    };
    if points.iter().all(|&c| orient2d(a, b, c) == 0) {
        return Err(Error::AllCollinear);
    }

    let n = points.len();
    let (lo, hi) = bbox(points).expect("non-empty");
    let center = (lo + hi) * 0.5;
    let size = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE) * SUPER_SCALE;
    let mut pts = points.to_vec();
    pts.push(center + Point2::new(-2.0 * size, -size));
    pts.push(center + Point2::new(2.0 * size, -size));
    pts.push(center + Point2::new(0.0, 2.0 * size));

    let mut builder = Builder {
        pts,
        tris: vec![Tri {
            v: [n, n + 1, n + 2],
            nb: [NONE; 3],
            alive: true,
        }],
        last: 0,
        mark: vec![0],
        stamp: 0,
    };
    for i in 0..n {
        builder.insert(i)?;
    }
    Ok(builder.finish(n))
}

impl Builder {
    fn locate(&self, p: Point2) -> usize {
        let mut t = self.last;
        let mut steps = 0usize;
        'walk: loop {
            steps += 1;
            if steps > 4 * self.tris.len() + 16 {
                break;
            }
            let tri = &self.tris[t];
            // Rotate the starting edge to avoid cycling on degenerate walks.
            for k in 0..3 {
                let i = (k + steps) % 3;
                let a = self.pts[tri.v[(i + 1) % 3]];
                let b = self.pts[tri.v[(i + 2) % 3]];
                if orient2d(a, b, p) < 0 {
                    t = tri.nb[i];
                    debug_assert_ne!(t, NONE, "walked outside the enclosing triangle");
                    continue 'walk;
                }
            }
            return t;
        }
        // Fallback: linear scan.
        self.tris
            .iter()
            .position(|tri| {
                tri.alive
                    && (0..3).all(|i| {
                        let a = self.pts[tri.v[(i + 1) % 3]];
                        let b = self.pts[tri.v[(i + 2) % 3]];
                        orient2d(a, b, p) >= 0
                    })
            })
            .expect("point lies inside the enclosing triangle")
    }

    fn in_circumcircle(&self, t: usize, p: Point2) -> bool {
        let [a, b, c] = self.tris[t].v.map(|i| self.pts[i]);
        incircle(a, b, c, p) > 0
    }

    fn insert(&mut self, pi: usize) -> Result<()> {
        let p = self.pts[pi];
        let start = self.locate(p);
        if self.tris[start].v.iter().any(|&v| self.pts[v] == p) {
            return Err(Error::DuplicatePoint(pi));
        }

        self.stamp += 1;
        let stamp = self.stamp;
        let mut cavity = vec![start];
        self.mark[start] = stamp;
        let mut k = 0;
        while k < cavity.len() {
            let t = cavity[k];
            k += 1;
            for &nb in &self.tris[t].nb {
                if nb != NONE && self.mark[nb] != stamp && self.in_circumcircle(nb, p) {
                    self.mark[nb] = stamp;
                    cavity.push(nb);
                }
            }
        }

        // Boundary edges of the cavity, as (a, b, outer neighbor).
        let mut boundary = Vec::with_capacity(cavity.len() + 2);
        for &t in &cavity {
            let tri = self.tris[t];
            for i in 0..3 {
                let nb = tri.nb[i];
                if nb == NONE || self.mark[nb] != stamp {
                    boundary.push((tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], nb, t));
                }
            }
        }
        for &t in &cavity {
            self.tris[t].alive = false;
        }

        let first_new = self.tris.len();
        for &(a, b, outer, old) in &boundary {
            let idx = self.tris.len();
            self.tris.push(Tri {
                v: [a, b, pi],
                nb: [NONE, NONE, outer],
                alive: true,
            });
            self.mark.push(0);
            if outer != NONE {
                let o = &mut self.tris[outer];
                for slot in o.nb.iter_mut() {
                    if *slot == old {
                        *slot = idx;
                    }
                }
            }
        }
        // Link the fan: triangle (a, b, p) meets the one starting at b
        // across edge (b, p) and the one ending at a across edge (p, a).
        let count = boundary.len();
        for j in 0..count {
            let (a, b, _, _) = boundary[j];
            let next = (0..count)
                .find(|&m| boundary[m].0 == b)
                .expect("cavity boundary is a closed loop");
            let prev = (0..count)
                .find(|&m| boundary[m].1 == a)
                .expect("cavity boundary is a closed loop");
            self.tris[first_new + j].nb[0] = first_new + next;
            self.tris[first_new + j].nb[1] = first_new + prev;
        }
        self.last = first_new;
        Ok(())
    }

    fn finish(self, n: usize) -> Triangulation {
        let mut remap = vec![NONE; self.tris.len()];
        let mut triangles = Vec::new();
        for (t, tri) in self.tris.iter().enumerate() {
            if tri.alive && tri.v.iter().all(|&v| v < n) {
                remap[t] = triangles.len();
                triangles.push(t);
            }
        }
        let neighbors = triangles
            .iter()
            .map(|&t| {
                self.tris[t].nb.map(|nb| {
                    if nb == NONE || remap[nb] == NONE {
                        None
                    } else {
                        Some(remap[nb])
                    }
                })
            })
            .collect();
        Triangulation {
            points: self.pts[..n].to_vec(),
            triangles: triangles.iter().map(|&t| self.tris[t].v).collect(),
            neighbors,
        }
    }
}
