//! Exact-arithmetic toolkit for translation surfaces built from polygons with
//! translation gluings.

pub mod analysis;
pub mod builders;
pub mod developing;
pub mod saddle;
pub mod error;
pub mod geometry;
pub mod surface;
pub mod svg;
pub mod topology;

pub use analysis::Surface;
pub use error::{Error, Result};
pub use geometry::{Point2, Scalar, Segment, Vec2};
pub use surface::{ConeData, ConeKind, CornerRef, EdgeRef, GluedPair, Genus, SurfaceComplex, SurfacePolygon, VertexClass};
