use thiserror::Error;

use crate::surface::EdgeRef;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("chord does not run through the polygon interior")]
    ChordNotInterior,
    #[error("invalid depth {0}: parametric families need depth >= 1")]
    InvalidDepth(u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("trace may not start at a polygon corner")]
    StartAtCorner,
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("point ({0}) is not inside polygon {1}")]
    PointOutsidePolygon(String, usize),
    #[error("no such vertex class: {0}")]
    UnknownClass(usize),
    #[error("development exceeded the chart cap of {0}")]
    BudgetExceeded(usize),
    #[error("endpoint class {class} has no rotational component longer than a half turn")]
    NarrowRotationalComponent { class: usize },
    #[error("saddle connections {0} and {1} meet away from the singularity")]
    SetIntersects(usize, usize),
    #[error("genus is not an integer (chi = {chi}, boundary cycles = {boundary})")]
    NonIntegerGenus { chi: i64, boundary: usize },
    #[error("edge {0:?} is referenced by more than one gluing")]
    DuplicateEdge(EdgeRef),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
