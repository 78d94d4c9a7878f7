//! Spline medial axis transforms: cubic curves in (x, y, r) connected at
//! shared joint control points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bspline::CubicBSpline3;
use crate::error::{Error, Result};
use crate::geometry::MedialPoint;
use crate::skeleton::{Chain, ChainEnd, MatGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveEnd {
    First,
    Last,
}

/// A medial point shared by several curve ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub position: MedialPoint,
    pub curve_ends: Vec<(usize, CurveEnd)>,
}

/// Assignment of control points to optimization variables. Control
/// points tied at a joint share one variable triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableLayout {
    ids: Vec<Vec<usize>>,
    count: usize,
}

impl VariableLayout {
    /// Variable triple index of control point `i` of curve `c`.
    pub fn id(&self, c: usize, i: usize) -> usize {
        self.ids[c][i]
    }

    /// Number of distinct control points.
    pub fn point_count(&self) -> usize {
        self.count
    }

    /// Length of the flat variable vector.
    pub fn len(&self) -> usize {
        3 * self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineMat {
    curves: Vec<CubicBSpline3>,
    joints: Vec<Joint>,
}

impl SplineMat {
    /// Validates joint references and snaps every tied curve end onto its
    /// joint position. Ends must already agree within `1e-9`.
    pub fn new(mut curves: Vec<CubicBSpline3>, joints: Vec<Joint>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for j in &joints {
            if j.curve_ends.is_empty() {
                return Err(Error::InvalidInput("joint without curve ends".into()));
            }
            for &(c, end) in &j.curve_ends {
                let curve = curves.get_mut(c).ok_or_else(|| {
                    Error::InvalidInput(format!("joint references missing curve {c}"))
                })?;
                if !seen.insert((c, end)) {
                    return Err(Error::InvalidInput(format!(
                        "curve {c} end {end:?} belongs to two joints"
                    )));
                }
                let idx = end_index(curve, end);
                let p = &mut curve.control_points_mut()[idx];
                if p.dist3(j.position) > 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "curve {c} end {end:?} is not at its joint"
                    )));
                }
                *p = j.position;
            }
        }
        Ok(Self { curves, joints })
    }

    /// Curves fitted to `chains` of `graph`, tied wherever chains meet at
    /// a joint vertex. A closed chain's two ends are tied to each other.
    pub fn from_chains(graph: &MatGraph, chains: &[Chain], curves: Vec<CubicBSpline3>) -> Result<Self> {
        assert_eq!(chains.len(), curves.len());
        let mut by_vertex: BTreeMap<usize, Vec<(usize, CurveEnd)>> = BTreeMap::new();
        for (c, chain) in chains.iter().enumerate() {
            let first = chain.vertices[0];
            let last = *chain.vertices.last().unwrap();
            if matches!(chain.start, ChainEnd::Joint | ChainEnd::Cycle) {
                by_vertex.entry(first).or_default().push((c, CurveEnd::First));
            }
            if matches!(chain.end, ChainEnd::Joint | ChainEnd::Cycle) {
                by_vertex.entry(last).or_default().push((c, CurveEnd::Last));
            }
        }
        let joints = by_vertex
            .into_iter()
            .filter(|(_, ends)| ends.len() >= 2)
            .map(|(v, curve_ends)| Joint {
                position: graph.vertices()[v],
                curve_ends,
            })
            .collect();
        Self::new(curves, joints)
    }

    pub fn curves(&self) -> &[CubicBSpline3] {
        &self.curves
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Number of distinct control points, counting each joint once.
    pub fn control_point_count(&self) -> usize {
        self.layout().point_count()
    }

    /// Joint holding the given curve end, if any.
    pub fn joint_of(&self, c: usize, end: CurveEnd) -> Option<usize> {
        self.joints
            .iter()
            .position(|j| j.curve_ends.contains(&(c, end)))
    }

    pub fn layout(&self) -> VariableLayout {
        let mut ids: Vec<Vec<usize>> = self
            .curves
            .iter()
            .map(|c| vec![usize::MAX; c.n_ctrl()])
            .collect();
        let mut count = 0;
        for j in &self.joints {
            for &(c, end) in &j.curve_ends {
                let i = end_index(&self.curves[c], end);
                ids[c][i] = count;
            }
            count += 1;
        }
        for row in &mut ids {
            for id in row.iter_mut().filter(|id| **id == usize::MAX) {
                *id = count;
                count += 1;
            }
        }
        VariableLayout { ids, count }
    }

    /// Flat `[x, y, r, x, y, r, ...]` vector of distinct control points.
    pub fn variables(&self, layout: &VariableLayout) -> Vec<f64> {
        let mut x = vec![0.0; layout.len()];
        for (c, curve) in self.curves.iter().enumerate() {
            for (i, p) in curve.control_points().iter().enumerate() {
                let id = layout.id(c, i);
                x[3 * id..3 * id + 3].copy_from_slice(&p.to_array());
            }
        }
        x
    }

    pub fn set_variables(&mut self, layout: &VariableLayout, x: &[f64]) {
        assert_eq!(x.len(), layout.len());
        let at = |id: usize| MedialPoint::new(x[3 * id], x[3 * id + 1], x[3 * id + 2]);
        for (c, curve) in self.curves.iter_mut().enumerate() {
            for (i, p) in curve.control_points_mut().iter_mut().enumerate() {
                *p = at(layout.id(c, i));
            }
        }
        for j in &mut self.joints {
            let (c, end) = j.curve_ends[0];
            j.position = at(layout.id(c, end_index(&self.curves[c], end)));
        }
    }

    /// Replaces curve `c`, snapping its tied ends back onto their joints.
    pub fn replace_curve(&mut self, c: usize, mut curve: CubicBSpline3) {
        for j in &self.joints {
            for &(cc, end) in &j.curve_ends {
                if cc == c {
                    let i = end_index(&curve, end);
                    curve.control_points_mut()[i] = j.position;
                }
            }
        }
        self.curves[c] = curve;
    }

    /// All curve ends tied at a joint hold bitwise identical values.
    pub fn is_connected(&self) -> bool {
        self.joints.iter().all(|j| {
            j.curve_ends.iter().all(|&(c, end)| {
                let p = self.curves[c].control_points()[end_index(&self.curves[c], end)];
                p.to_array().map(f64::to_bits) == j.position.to_array().map(f64::to_bits)
            })
        })
    }
}

pub(crate) fn end_index(curve: &CubicBSpline3, end: CurveEnd) -> usize {
    match end {
        CurveEnd::First => 0,
        CurveEnd::Last => curve.n_ctrl() - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(x: f64, y: f64, r: f64) -> MedialPoint {
        MedialPoint::new(x, y, r)
    }

    fn y_mat() -> SplineMat {
        let o = mp(0.0, 0.0, 0.3);
        let tips = [mp(1.0, 0.0, 0.1), mp(-0.5, 0.8, 0.1), mp(-0.5, -0.8, 0.1)];
        let curves = tips.iter().map(|&t| CubicBSpline3::straight(o, t)).collect();
        let joint = Joint {
            position: o,
            curve_ends: vec![(0, CurveEnd::First), (1, CurveEnd::First), (2, CurveEnd::First)],
        };
        SplineMat::new(curves, vec![joint]).unwrap()
    }

    #[test]
    fn joints_are_counted_once() {
        let m = y_mat();
        assert_eq!(m.control_point_count(), 10);
        let layout = m.layout();
        assert_eq!(layout.id(0, 0), layout.id(2, 0));
        assert_eq!(m.joint_of(1, CurveEnd::First), Some(0));
        assert_eq!(m.joint_of(1, CurveEnd::Last), None);
    }

    #[test]
    fn variables_round_trip_and_keep_joints_tied() {
        let mut m = y_mat();
        let layout = m.layout();
        let mut x = m.variables(&layout);
        for (k, v) in x.iter_mut().enumerate() {
            *v += 1e-3 * (k as f64).sin();
        }
        m.set_variables(&layout, &x);
        assert!(m.is_connected());
        assert_eq!(m.variables(&layout), x);
    }

    #[test]
    fn rejects_misplaced_ends() {
        let curves = vec![
            CubicBSpline3::straight(mp(0., 0., 0.1), mp(1., 0., 0.1)),
            CubicBSpline3::straight(mp(0.5, 0., 0.1), mp(1., 1., 0.1)),
        ];
        let joint = Joint {
            position: mp(0., 0., 0.1),
            curve_ends: vec![(0, CurveEnd::First), (1, CurveEnd::First)],
        };
        assert!(SplineMat::new(curves, vec![joint]).is_err());
    }
}
