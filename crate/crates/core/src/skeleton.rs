//! Discrete medial axis from the interior part of the Voronoi diagram,
//! and its decomposition into joint-free chains.

use std::collections::{HashMap, HashSet};

use crate::delaunay::Triangulation;
use crate::error::{Error, Result};
use crate::geometry::{circumcircle, MedialPoint, Polygon};

/// Circumcenters closer than this are merged into one vertex.
pub const MERGE_DISTANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Isolated,
    EndPoint,
    Regular,
    Joint,
}

/// Undirected graph of medial points.
#[derive(Debug, Clone, PartialEq)]
pub struct MatGraph {
    vertices: Vec<MedialPoint>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl MatGraph {
    /// Builds a graph, dropping self-loops and duplicate edges.
    pub fn new(vertices: Vec<MedialPoint>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut seen = HashSet::new();
        let mut adjacency = vec![Vec::new(); vertices.len()];
        let mut kept = Vec::new();
        for (a, b) in edges {
            assert!(a < vertices.len() && b < vertices.len(), "edge index out of range");
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                continue;
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
            kept.push((a.min(b), a.max(b)));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            vertices,
            edges: kept,
            adjacency,
        }
    }

    pub fn vertices(&self) -> &[MedialPoint] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        match self.degree(v) {
            0 => VertexKind::Isolated,
            1 => VertexKind::EndPoint,
            2 => VertexKind::Regular,
            _ => VertexKind::Joint,
        }
    }

    pub fn joints(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| self.degree(v) >= 3)
    }

    pub fn end_points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| self.degree(v) == 1)
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }
}

/// What terminates a chain at one of its ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainEnd {
    Joint,
    EndPoint,
    /// Split vertex of an isolated cycle.
    Cycle,
}

/// Maximal ordered run of medial points with no joint in its interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub vertices: Vec<usize>,
    pub start: ChainEnd,
    pub end: ChainEnd,
}

impl Chain {
    pub fn is_closed(&self) -> bool {
        self.vertices.len() > 1 && self.vertices.first() == self.vertices.last()
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn points(&self, g: &MatGraph) -> Vec<MedialPoint> {
        self.vertices.iter().map(|&v| g.vertices()[v]).collect()
    }
}

/// Interior Voronoi vertices and edges of the boundary samples.
///
/// A triangle contributes its circumcircle if the circumcenter lies in
/// `boundary`. A Voronoi edge is kept if both of its circumcenters and its
/// midpoint lie in `boundary`.
pub fn extract_initial_mat(tri: &Triangulation, boundary: &Polygon) -> Result<MatGraph> {
    let n_tri = tri.triangles().len();
    let mut circle = Vec::with_capacity(n_tri);
    let mut interior = Vec::with_capacity(n_tri);
    for t in 0..n_tri {
        let [a, b, c] = tri.triangle_points(t);
        // Slivers on collinear runs carry no usable medial circle.
        let Ok(m) = circumcircle(a, b, c) else {
            interior.push(false);
            circle.push(MedialPoint::default());
            continue;
        };
        interior.push(boundary.contains(m.u));
        circle.push(m);
    }

    // Merge coincident circumcenters through a hash grid with cells of
    // the merge distance; merged vertices keep the first triangle's data.
    let mut vertex_of = vec![usize::MAX; n_tri];
    let mut vertices: Vec<MedialPoint> = Vec::new();
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let cell = |x: f64| (x / MERGE_DISTANCE).floor() as i64;
    for t in 0..n_tri {
        if !interior[t] {
            continue;
        }
        let c = circle[t].u;
        let (cx, cy) = (cell(c.x), cell(c.y));
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = grid.get(&(cx + dx, cy + dy)) {
                    for &v in list {
                        if vertices[v].u.dist(c) <= MERGE_DISTANCE {
                            found = Some(v);
                            break 'search;
                        }
                    }
                }
            }
        }
        let v = found.unwrap_or_else(|| {
            vertices.push(circle[t]);
            grid.entry((cx, cy)).or_default().push(vertices.len() - 1);
            vertices.len() - 1
        });
        vertex_of[t] = v;
    }
    if vertices.is_empty() {
        return Err(Error::EmptyMat);
    }

    let mut edges = Vec::new();
    for t in 0..n_tri {
        if !interior[t] {
            continue;
        }
        for s in tri.neighbors()[t].iter().flatten().copied() {
            if s <= t || !interior[s] {
                continue;
            }
            let mid = (circle[t].u + circle[s].u) * 0.5;
            if boundary.contains(mid) {
                edges.push((vertex_of[t], vertex_of[s]));
            }
        }
    }
    Ok(MatGraph::new(vertices, edges))
}

/// Splits the graph into chains. Every edge lands in exactly one chain;
/// isolated vertices become single-point chains and isolated cycles are
/// cut at their lowest-index vertex into one closed chain.
pub fn extract_chains(g: &MatGraph) -> Vec<Chain> {
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    let mut chains = Vec::new();
    let end_kind = |v: usize| {
        if g.degree(v) >= 3 {
            ChainEnd::Joint
        } else {
            ChainEnd::EndPoint
        }
    };

    for s in 0..g.len() {
        match g.degree(s) {
            0 => chains.push(Chain {
                vertices: vec![s],
                start: ChainEnd::EndPoint,
                end: ChainEnd::EndPoint,
            }),
            2 => {}
            _ => {
                for &first in g.neighbors(s) {
                    if used.contains(&key(s, first)) {
                        continue;
                    }
                    let mut path = vec![s];
                    let (mut prev, mut cur) = (s, first);
                    used.insert(key(prev, cur));
                    path.push(cur);
                    while g.degree(cur) == 2 {
                        let next = g.neighbors(cur).iter().copied().find(|&w| w != prev).unwrap();
                        if !used.insert(key(cur, next)) {
                            break;
                        }
                        prev = cur;
                        cur = next;
                        path.push(cur);
                    }
                    chains.push(Chain {
                        vertices: path,
                        start: end_kind(s),
                        end: end_kind(cur),
                    });
                }
            }
        }
    }

    // Whatever is left consists of cycles through degree-2 vertices only.
    for s in 0..g.len() {
        if g.degree(s) != 2 || g.neighbors(s).iter().all(|&w| used.contains(&key(s, w))) {
            continue;
        }
        let mut path = vec![s];
        let (mut prev, mut cur) = (s, g.neighbors(s)[0]);
        used.insert(key(prev, cur));
        path.push(cur);
        while cur != s {
            let next = g.neighbors(cur).iter().copied().find(|&w| w != prev).unwrap();
            used.insert(key(cur, next));
            prev = cur;
            cur = next;
            path.push(cur);
        }
        chains.push(Chain {
            vertices: path,
            start: ChainEnd::Cycle,
            end: ChainEnd::Cycle,
        });
    }
    chains
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::delaunay;
    use crate::geometry::Point2;
    use crate::shapes;

    fn path_graph(n: usize) -> MatGraph {
        let v = (0..n).map(|i| MedialPoint::new(i as f64, 0.0, 1.0)).collect();
        MatGraph::new(v, (0..n - 1).map(|i| (i, i + 1)))
    }

    #[test]
    fn graph_drops_loops_and_duplicates() {
        let v = vec![MedialPoint::default(); 3];
        let g = MatGraph::new(v, [(0, 1), (1, 0), (1, 1), (1, 2)]);
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.kind(1), VertexKind::Regular);
        assert_eq!(g.kind(0), VertexKind::EndPoint);
    }

    #[test]
    fn path_is_one_chain() {
        let chains = extract_chains(&path_graph(5));
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].vertices, vec![0, 1, 2, 3, 4]);
        assert_eq!(chains[0].start, ChainEnd::EndPoint);
    }

    #[test]
    fn y_graph_gives_three_chains() {
        // Joint 0 with arms 1-2, 3-4, 5-6.
        let v = vec![MedialPoint::default(); 7];
        let g = MatGraph::new(v, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]);
        let chains = extract_chains(&g);
        assert_eq!(chains.len(), 3);
        for c in &chains {
            assert_eq!(c.vertices[0], 0);
            assert_eq!(c.start, ChainEnd::Joint);
            assert_eq!(c.end, ChainEnd::EndPoint);
            assert_eq!(c.vertices.len(), 3);
        }
    }

    #[test]
    fn cycle_is_one_closed_chain() {
        let v = vec![MedialPoint::default(); 10];
        let g = MatGraph::new(v, (0..10).map(|i| (i, (i + 1) % 10)));
        let chains = extract_chains(&g);
        assert_eq!(chains.len(), 1);
        assert!(chains[0].is_closed());
        assert_eq!(chains[0].vertices.len(), 11);
        assert_eq!(chains[0].start, ChainEnd::Cycle);
    }

    #[test]
    fn chains_partition_edges() {
        let poly = shapes::star(600, 5, 0.2, 0.5);
        let tri = delaunay(poly.vertices()).unwrap();
        let g = extract_initial_mat(&tri, &poly).unwrap();
        let chains = extract_chains(&g);
        let total: usize = chains.iter().map(Chain::edge_count).sum();
        assert_eq!(total, g.edges().len());
        for c in &chains {
            for &v in &c.vertices[1..c.vertices.len() - 1] {
                assert_eq!(g.degree(v), 2);
            }
        }
    }

    #[test]
    fn circle_mat_collapses_to_center() {
        let poly = shapes::circle(64, 0.5);
        let tri = delaunay(poly.vertices()).unwrap();
        let g = extract_initial_mat(&tri, &poly).unwrap();
        for v in g.vertices() {
            assert!(v.u.norm() < 1e-9, "{v:?}");
            assert!((v.r - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn capsule_mat_lies_on_axis() {
        let (half, radius) = (1.0, 0.4);
        let poly = shapes::capsule(400, half, radius);
        let tri = delaunay(poly.vertices()).unwrap();
        let g = extract_initial_mat(&tri, &poly).unwrap();
        // Spacing of the samples bounds how far a Voronoi vertex can be
        // from the true axis.
        let spacing = poly.perimeter() / 400.0;
        for v in g.vertices() {
            assert!(v.u.y.abs() <= spacing, "{v:?}");
            assert!(v.u.x.abs() <= half + spacing);
        }
        assert_eq!(g.component_count(), 1);
    }

    #[test]
    fn radius_equals_nearest_sample_distance() {
        let poly = shapes::l_shape(500, 1.0, 0.4);
        let tri = delaunay(poly.vertices()).unwrap();
        let g = extract_initial_mat(&tri, &poly).unwrap();
        for v in g.vertices() {
            let nearest = poly
                .vertices()
                .iter()
                .map(|p| p.dist(v.u))
                .fold(f64::INFINITY, f64::min);
            assert!((nearest - v.r).abs() <= 1e-9);
        }
        assert!(g.joints().count() >= 1);
        assert_eq!(g.component_count(), 1);
    }

    #[test]
    fn sparse_sampling_yields_error() {
        // A thin sliver: no circumcenter falls inside.
        let poly = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 0.1),
        ])
        .unwrap();
        let tri = delaunay(poly.vertices()).unwrap();
        assert!(matches!(extract_initial_mat(&tri, &poly), Err(Error::EmptyMat)));
    }
}
