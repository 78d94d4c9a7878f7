#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bspline;
pub mod delaunay;
pub mod envelope;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lbfgs;
pub mod optimizer;
pub mod pipeline;
pub mod pruning;
pub mod reconstruction;
pub mod shapes;
pub mod skeleton;
pub mod spline_mat;
pub mod svg;
