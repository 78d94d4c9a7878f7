//! Boundary input, MAT and report JSON, and output emission.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bspline::{CubicBSpline3, DEGREE};
use crate::error::{Error, Result};
use crate::geometry::{MedialPoint, Normalization, Point2};
use crate::pipeline::{PipelineOutput, RunReport};
use crate::spline_mat::{CurveEnd, Joint, SplineMat};
use crate::svg;

#[derive(Deserialize)]
struct PointsDoc {
    points: Vec<[f64; 2]>,
}

/// Parses `{"points": [[x, y], ...]}`.
pub fn parse_points_json(text: &str) -> Result<Vec<Point2>> {
    let doc: PointsDoc = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("points JSON: {e}")))?;
    finite_points(doc.points.into_iter().map(|[x, y]| Point2::new(x, y)).collect())
}

/// Parses two-column CSV with an optional header line. Commas or
/// whitespace separate the columns.
pub fn parse_points_csv(text: &str) -> Result<Vec<Point2>> {
    let normalized: String = text
        .lines()
        .map(|l| l.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect::<Vec<_>>().join(","))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(normalized.as_bytes());
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::InvalidInput(format!("CSV: {e}")))?;
        if record.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "CSV line {}: expected 2 columns, found {}",
                line + 1,
                record.len()
            )));
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push(Point2::new(x, y)),
            _ if line == 0 => continue,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "CSV line {}: not a number pair",
                    line + 1
                )))
            }
        }
    }
    finite_points(points)
}

fn finite_points(points: Vec<Point2>) -> Result<Vec<Point2>> {
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidInput(format!("point {i} is not finite")));
    }
    Ok(points)
}

/// Reads boundary points, choosing the format from the extension and
/// falling back to sniffing the content.
pub fn read_points(path: &Path) -> Result<Vec<Point2>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("json") => parse_points_json(&text),
        Some("csv") | Some("txt") => parse_points_csv(&text),
        _ if text.trim_start().starts_with('{') => parse_points_json(&text),
        _ => parse_points_csv(&text),
    }
}

#[derive(Serialize, Deserialize)]
struct CurveDoc {
    degree: usize,
    knots: Vec<f64>,
    control_points: Vec<[f64; 3]>,
}

#[derive(Serialize, Deserialize)]
struct JointDoc {
    position: [f64; 3],
    curve_ends: Vec<(usize, CurveEnd)>,
}

#[derive(Serialize, Deserialize)]
struct NormalizationDoc {
    offset: [f64; 2],
    scale: f64,
}

#[derive(Serialize, Deserialize)]
struct MatDoc {
    curves: Vec<CurveDoc>,
    joints: Vec<JointDoc>,
    epsilon: f64,
    normalization: NormalizationDoc,
}

/// A MAT document: the spline MAT in normalized units, its error and the
/// map from input units.
#[derive(Debug, Clone, PartialEq)]
pub struct MatFile {
    pub mat: SplineMat,
    pub epsilon: f64,
    pub normalization: Normalization,
}

impl MatFile {
    pub fn to_json(&self) -> String {
        let doc = MatDoc {
            curves: self
                .mat
                .curves()
                .iter()
                .map(|c| CurveDoc {
                    degree: DEGREE,
                    knots: c.knots().to_vec(),
                    control_points: c.control_points().iter().map(|p| p.to_array()).collect(),
                })
                .collect(),
            joints: self
                .mat
                .joints()
                .iter()
                .map(|j| JointDoc {
                    position: j.position.to_array(),
                    curve_ends: j.curve_ends.clone(),
                })
                .collect(),
            epsilon: self.epsilon,
            normalization: NormalizationDoc {
                offset: [self.normalization.offset.x, self.normalization.offset.y],
                scale: self.normalization.scale,
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("finite values serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MatDoc = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("MAT JSON: {e}")))?;
        let mut curves = Vec::with_capacity(doc.curves.len());
        for (i, c) in doc.curves.into_iter().enumerate() {
            if c.degree != DEGREE {
                return Err(Error::InvalidInput(format!(
                    "curve {i}: degree {} is not supported",
                    c.degree
                )));
            }
            let ctrl = c.control_points.into_iter().map(MedialPoint::from_array).collect();
            curves.push(CubicBSpline3::with_knots(c.knots, ctrl)?);
        }
        let joints = doc
            .joints
            .into_iter()
            .map(|j| Joint {
                position: MedialPoint::from_array(j.position),
                curve_ends: j.curve_ends,
            })
            .collect();
        Ok(Self {
            mat: SplineMat::new(curves, joints)?,
            epsilon: doc.epsilon,
            normalization: Normalization {
                offset: Point2::new(doc.normalization.offset[0], doc.normalization.offset[1]),
                scale: doc.normalization.scale,
            },
        })
    }
}

pub fn report_to_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Destinations for [`emit_outputs`]; `None` skips that output.
#[derive(Debug, Clone, Default)]
pub struct OutputPaths {
    pub mat: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub svg_dir: Option<PathBuf>,
    /// Also render the boundary, initial, pruned and fitted stages.
    pub emit_stages: bool,
}

/// Writes the MAT JSON, the report JSON and the SVG renderings.
/// Returns the paths written.
pub fn emit_outputs(out: &PipelineOutput, paths: &OutputPaths, samples_per_span: usize) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if let Some(p) = &paths.mat {
        let file = MatFile {
            mat: out.mat.clone(),
            epsilon: out.report.epsilon,
            normalization: out.normalization,
        };
        write(p, &file.to_json(), &mut written)?;
    }
    if let Some(p) = &paths.report {
        write(p, &report_to_json(&out.report), &mut written)?;
    }
    if let Some(dir) = &paths.svg_dir {
        fs::create_dir_all(dir)?;
        let boundary = &out.stages.boundary;
        if paths.emit_stages {
            let stages = [
                ("boundary", svg::render_boundary(boundary)),
                ("initial", svg::render_graph(boundary, &out.stages.initial)),
                ("pruned", svg::render_graph(boundary, &out.stages.pruned)),
                ("fitted", svg::render_mat(boundary, &out.stages.fitted, samples_per_span)),
            ];
            for (name, doc) in stages {
                write(&dir.join(format!("{name}.svg")), &doc, &mut written)?;
            }
        }
        let doc = svg::render_mat(boundary, &out.mat, samples_per_span);
        write(&dir.join("final.svg"), &doc, &mut written)?;
    }
    Ok(written)
}

fn write(path: &Path, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    written.push(path.to_path_buf());
    Ok(())
}
