//! Error-driven pruning of end-point branches.
//!
//! The reconstruction of a discrete medial axis is the union of its
//! circles. Because every circle comes from the Voronoi diagram of the
//! samples, no sample lies strictly inside a circle, so the distance from
//! a sample to the reconstructed boundary is the smallest gap
//! `|p - u| - r` over the circles. Pruning repeatedly deletes end-points
//! whose removal keeps the maximal gap below the threshold.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use ordered_float::OrderedFloat;

use crate::error::{Error, Result};
use crate::geometry::{MedialPoint, Point2};
use crate::skeleton::MatGraph;

#[inline]
fn gap(p: Point2, v: MedialPoint) -> f64 {
    p.dist(v.u) - v.r
}

/// `max_i min_j (|p_i - u_j| - r_j)`: the one-sided Hausdorff distance from
/// the samples to the boundary of the union of medial circles.
pub fn boundary_error(points: &[Point2], mat: &MatGraph) -> Result<f64> {
    if mat.is_empty() {
        return Err(Error::EmptyMat);
    }
    Ok(points
        .iter()
        .map(|&p| {
            mat.vertices()
                .iter()
                .map(|&v| gap(p, v))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Mutable pruning state over a fixed vertex set.
#[derive(Debug, Clone)]
pub struct PruningState<'a> {
    points: &'a [Point2],
    vertices: Vec<MedialPoint>,
    adjacency: Vec<Vec<usize>>,
    alive: Vec<bool>,
    live: Vec<usize>,
    /// Nearest live circle per sample, lowest index on ties.
    assigned: Vec<usize>,
    distance: Vec<f64>,
    owned: Vec<Vec<usize>>,
    /// All `(distance, sample)` pairs, for the running maximum.
    ranked: BTreeSet<(OrderedFloat<f64>, usize)>,
    /// Per sample, nearby circles by increasing `(gap, index)`; entries
    /// before `cursor` are dead.
    candidates: Vec<Vec<u32>>,
    cursor: Vec<usize>,
    removals: u64,
}

/// Circles kept per sample in its candidate list.
const CANDIDATES: usize = 48;

impl<'a> PruningState<'a> {
    pub fn new(mat: &MatGraph, points: &'a [Point2]) -> Result<Self> {
        if mat.is_empty() {
            return Err(Error::EmptyMat);
        }
        let vertices = mat.vertices().to_vec();
        let adjacency = (0..mat.len()).map(|v| mat.neighbors(v).to_vec()).collect();
        let live: Vec<usize> = (0..mat.len()).collect();
        let mut state = Self {
            points,
            vertices,
            adjacency,
            alive: vec![true; mat.len()],
            live,
            assigned: vec![0; points.len()],
            distance: vec![0.0; points.len()],
            owned: vec![Vec::new(); mat.len()],
            ranked: BTreeSet::new(),
            candidates: vec![Vec::new(); points.len()],
            cursor: vec![0; points.len()],
            removals: 0,
        };
        for i in 0..points.len() {
            state.rebuild_candidates(i);
            let j = state.candidates[i][0] as usize;
            state.set(i, j, gap(points[i], state.vertices[j]));
        }
        Ok(state)
    }

    fn rebuild_candidates(&mut self, i: usize) {
        let p = self.points[i];
        let mut all: Vec<(f64, u32)> = self
            .live
            .iter()
            .map(|&j| (gap(p, self.vertices[j]), j as u32))
            .collect();
        let order = |a: &(f64, u32), b: &(f64, u32)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if all.len() > CANDIDATES {
            all.select_nth_unstable_by(CANDIDATES - 1, order);
            all.truncate(CANDIDATES);
        }
        all.sort_unstable_by(order);
        self.candidates[i] = all.into_iter().map(|(_, j)| j).collect();
        self.cursor[i] = 0;
    }

    /// Nearest live circle to sample `i` other than `skip`, from the
    /// candidate list when it still holds one.
    fn nearest_of(&self, i: usize, skip: usize) -> (usize, f64) {
        let list = &self.candidates[i];
        // The list is complete when it was built from every live circle.
        let complete = list.len() < CANDIDATES;
        for &j in &list[self.cursor[i]..] {
            let j = j as usize;
            if self.alive[j] && j != skip {
                return (j, gap(self.points[i], self.vertices[j]));
            }
        }
        if complete {
            return (usize::MAX, f64::INFINITY);
        }
        self.nearest(self.points[i], skip)
    }

    fn set(&mut self, i: usize, j: usize, d: f64) {
        self.assigned[i] = j;
        self.distance[i] = d;
        self.owned[j].push(i);
        self.ranked.insert((OrderedFloat(d), i));
    }

    /// Nearest live circle other than `skip`: `(index, gap)`.
    fn nearest(&self, p: Point2, skip: usize) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for &j in &self.live {
            if j == skip {
                continue;
            }
            let d = gap(p, self.vertices[j]);
            if d < best.1 || (d == best.1 && j < best.0) {
                best = (j, d);
            }
        }
        best
    }

    /// Current error of the live circles.
    pub fn epsilon(&self) -> f64 {
        self.ranked
            .iter()
            .next_back()
            .map_or(f64::NEG_INFINITY, |(d, _)| d.0)
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn live_count(&self) -> usize {
        self.live.len()
    }

    pub fn assignment(&self, i: usize) -> (usize, f64) {
        (self.assigned[i], self.distance[i])
    }

    /// Error after hypothetically removing `v` alone. Only samples
    /// currently assigned to `v` are re-minimized.
    pub fn removal_delta(&self, v: usize) -> f64 {
        if self.live.len() <= 1 {
            return f64::INFINITY;
        }
        let owned = &self.owned[v];
        let rest = self
            .ranked
            .iter()
            .rev()
            .find(|(_, i)| self.assigned[*i] != v)
            .map_or(f64::NEG_INFINITY, |(d, _)| d.0);
        owned
            .iter()
            .map(|&i| self.nearest_of(i, v).1)
            .fold(rest, f64::max)
    }

    /// Deletes end-point `v` and its incident edge. Returns the neighbor.
    pub fn remove(&mut self, v: usize) -> Option<usize> {
        assert!(self.alive[v], "vertex {v} already removed");
        assert!(self.degree(v) <= 1, "only end-points can be removed");
        self.alive[v] = false;
        let pos = self.live.iter().position(|&j| j == v).unwrap();
        self.live.remove(pos);
        let neighbor = self.adjacency[v].pop();
        if let Some(w) = neighbor {
            self.adjacency[w].retain(|&x| x != v);
        }
        for i in std::mem::take(&mut self.owned[v]) {
            self.ranked.remove(&(OrderedFloat(self.distance[i]), i));
            let list = &self.candidates[i];
            let mut c = self.cursor[i];
            while c < list.len() && !self.alive[list[c] as usize] {
                c += 1;
            }
            self.cursor[i] = c;
            if c == list.len() {
                self.rebuild_candidates(i);
            }
            let j = self.candidates[i][self.cursor[i]] as usize;
            self.set(i, j, gap(self.points[i], self.vertices[j]));
        }
        self.removals += 1;
        neighbor
    }

    /// Compacts the live vertices into a new graph, keeping their order.
    pub fn into_graph(self) -> MatGraph {
        let mut index = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::with_capacity(self.live.len());
        for v in 0..self.vertices.len() {
            if self.alive[v] {
                index[v] = vertices.len();
                vertices.push(self.vertices[v]);
            }
        }
        let mut edges = Vec::new();
        for v in 0..self.vertices.len() {
            for &w in &self.adjacency[v] {
                if v < w {
                    edges.push((index[v], index[w]));
                }
            }
        }
        MatGraph::new(vertices, edges)
    }
}

/// Prunes end-points whose removal keeps the error strictly below
/// `eps_hat`. Candidates are processed smallest induced error first,
/// ties by vertex index; stale priorities are refreshed when popped.
pub fn prune(mat: &MatGraph, points: &[Point2], eps_hat: f64) -> Result<MatGraph> {
    Ok(prune_state(mat, points, eps_hat)?.into_graph())
}

/// Like [`prune`], returning the final state.
pub fn prune_state<'a>(
    mat: &MatGraph,
    points: &'a [Point2],
    eps_hat: f64,
) -> Result<PruningState<'a>> {
    let mut state = PruningState::new(mat, points)?;
    let mut queue = BinaryHeap::new();
    for v in mat.end_points() {
        queue.push(Reverse((OrderedFloat(state.removal_delta(v)), v, 0u64)));
    }
    while let Some(Reverse((delta, v, version))) = queue.pop() {
        if !state.alive[v] || state.degree(v) != 1 {
            continue;
        }
        let mut delta = delta.0;
        if version != state.removals {
            // Errors only grow as circles disappear, so the refreshed
            // priority is never smaller than the popped one; it is still
            // the minimum if it does not pass the next entry.
            let fresh = state.removal_delta(v);
            let still_first = queue
                .peek()
                .is_none_or(|Reverse((d, w, _))| (OrderedFloat(fresh), v) < (*d, *w));
            if !still_first {
                queue.push(Reverse((OrderedFloat(fresh), v, state.removals)));
                continue;
            }
            delta = fresh;
        }
        if delta < eps_hat {
            if let Some(w) = state.remove(v) {
                if state.degree(w) == 1 {
                    let d = state.removal_delta(w);
                    queue.push(Reverse((OrderedFloat(d), w, state.removals)));
                }
            }
        }
        // A kept end-point can never become removable later.
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::delaunay;
    use crate::shapes;
    use crate::skeleton::extract_initial_mat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_error(points: &[Point2], vertices: &[MedialPoint]) -> f64 {
        points
            .iter()
            .map(|&p| vertices.iter().map(|&v| gap(p, v)).fold(f64::INFINITY, f64::min))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn initial(poly: &crate::geometry::Polygon) -> MatGraph {
        let tri = delaunay(poly.vertices()).unwrap();
        extract_initial_mat(&tri, poly).unwrap()
    }

    #[test]
    fn simple_error_examples() {
        let g = MatGraph::new(vec![MedialPoint::new(0., 0., 1.)], []);
        assert_eq!(boundary_error(&[Point2::new(1., 0.)], &g).unwrap(), 0.0);
        assert_eq!(boundary_error(&[Point2::new(2., 0.)], &g).unwrap(), 1.0);
        let empty = MatGraph::new(vec![], []);
        assert!(boundary_error(&[Point2::new(2., 0.)], &empty).is_err());
    }

    #[test]
    fn removal_delta_two_circles() {
        let g = MatGraph::new(
            vec![MedialPoint::new(0., 0., 1.), MedialPoint::new(10., 0., 1.)],
            [(0, 1)],
        );
        let pts = [Point2::new(11., 0.)];
        let state = PruningState::new(&g, &pts).unwrap();
        assert_eq!(state.assignment(0).0, 1);
        assert_eq!(state.removal_delta(1), 10.0);
        // Vertex 0 owns nothing: the error is unchanged.
        assert_eq!(state.removal_delta(0), 0.0);
    }

    #[test]
    fn unpruned_error_is_zero() {
        let poly = shapes::capsule(400, 1.0, 0.35);
        let g = initial(&poly);
        assert!(boundary_error(poly.vertices(), &g).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn zero_threshold_keeps_everything() {
        let poly = shapes::star(300, 4, 0.4, 1.0);
        let g = initial(&poly);
        let pruned = prune(&g, poly.vertices(), 0.0).unwrap();
        assert_eq!(pruned.len(), g.len());
    }

    #[test]
    fn incremental_delta_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let base = shapes::star(300, 3, 0.5, 1.0);
        let noisy = shapes::radial_noise(&base, Point2::default(), 0.02, &mut rng);
        let pts = noisy.vertices().to_vec();
        let g = initial(&noisy);
        let mut state = PruningState::new(&g, &pts).unwrap();
        let mut checked = 0;
        while checked < 1000 {
            let ends: Vec<usize> = (0..g.len())
                .filter(|&v| state.is_alive(v) && state.degree(v) == 1)
                .collect();
            if ends.is_empty() || state.live_count() <= 2 {
                break;
            }
            for &v in ends.iter().take(10) {
                let remaining: Vec<MedialPoint> = (0..g.len())
                    .filter(|&j| j != v && state.is_alive(j))
                    .map(|j| g.vertices()[j])
                    .collect();
                assert_eq!(state.removal_delta(v), brute_error(&pts, &remaining));
                checked += 1;
            }
            let v = ends[rng.random_range(0..ends.len())];
            state.remove(v);
            let live: Vec<MedialPoint> = (0..g.len())
                .filter(|&j| state.is_alive(j))
                .map(|j| g.vertices()[j])
                .collect();
            assert_eq!(state.epsilon(), brute_error(&pts, &live));
        }
        assert!(checked >= 1000);
    }

    #[test]
    fn noisy_circle_collapses() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = shapes::circle(64, 0.5);
        let noisy = shapes::radial_noise(&base, Point2::default(), 0.01 * 0.5, &mut rng);
        let poly = crate::geometry::Polygon::new(noisy.vertices().to_vec()).unwrap();
        let pts = poly.vertices();
        let diag = crate::geometry::polygon_bbox_diagonal(&poly);
        let g = initial(&poly);
        let eps = 0.02 * diag;
        let pruned = prune(&g, pts, eps).unwrap();
        assert!(pruned.len() <= 3, "{} vertices left", pruned.len());
        assert!(boundary_error(pts, &pruned).unwrap() <= eps);
        assert_eq!(pruned.component_count(), g.component_count());
    }

    #[test]
    fn pruning_preserves_joints_and_components() {
        let poly = shapes::star(600, 5, 0.4, 1.0);
        let g = initial(&poly);
        let pts = poly.vertices();
        let pruned = prune(&g, pts, 0.01).unwrap();
        assert!(pruned.len() < g.len());
        assert!(boundary_error(pts, &pruned).unwrap() <= 0.01);
        assert_eq!(pruned.component_count(), g.component_count());
        assert!(pruned.joints().count() >= 1);
    }
}
