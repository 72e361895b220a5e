//! Control polygons, Bézier knots, ruled surfaces between them and
//! detection of surface self-intersections.
//!
//! Everything geometric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`, with `F32` variants for the rest.

pub mod bezier;
pub mod corpus;
pub mod curve;
pub mod distance;
pub mod error;
pub mod intersect;
pub mod io;
pub mod morph;
pub mod point;
pub mod polygon;
pub mod scalar;
pub mod surface;

pub use error::{Error, Result};
pub use polygon::{Violation, ValidationVerdict};
pub use scalar::Scalar;

pub type Point3 = point::Point3<f64>;
pub type ControlPolygon = polygon::ControlPolygon<f64>;
pub type BezierCurve = bezier::BezierCurve<f64>;
pub type SampledCurve = curve::SampledCurve<f64>;
pub type RuledSurface = surface::RuledSurface<f64>;
pub type TriangleMesh = surface::TriangleMesh<f64>;
pub type IntersectionReport = intersect::IntersectionReport<f64>;
pub type MorphFamily = morph::MorphFamily<f64>;

pub type Point3F32 = point::Point3<f32>;
pub type ControlPolygonF32 = polygon::ControlPolygon<f32>;
pub type BezierCurveF32 = bezier::BezierCurve<f32>;
pub type SampledCurveF32 = curve::SampledCurve<f32>;
pub type TriangleMeshF32 = surface::TriangleMesh<f32>;
