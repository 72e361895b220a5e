//! Sampled Hausdorff distances between PL images and curves.
//!
//! Both directions measure point-to-segment distances, so the result is an
//! estimate of the continuous Hausdorff distance that converges as the
//! sample count grows. The curve-to-polygon half only visits sample points
//! and therefore approaches its true value from below.

use crate::bezier::BezierCurve;
use crate::error::{Error, Result};
use crate::point::{point_segment_distance, Point3};
use crate::polygon::ControlPolygon;
use crate::scalar::Scalar;

pub const MIN_DISTANCE_SAMPLES: usize = 64;

/// Largest distance from any vertex of `from` to the polyline `to`.
fn directed<T: Scalar>(from: &[Point3<T>], to: &[Point3<T>]) -> T {
    from.iter()
        .map(|&p| {
            if to.len() == 1 {
                return p.distance(to[0]);
            }
            to.windows(2)
                .map(|w| point_segment_distance(p, w[0], w[1]))
                .fold(T::infinity(), T::min)
        })
        .fold(T::zero(), T::max)
}

/// Vertex-based Hausdorff distance between two polylines (closed polylines
/// must repeat their first vertex). Exact when each vertex set covers the
/// corners of the other image, e.g. for a polygon and its refinement.
pub fn polyline_hausdorff<T: Scalar>(a: &[Point3<T>], b: &[Point3<T>]) -> T {
    directed(a, b).max(directed(b, a))
}

fn closed_vertices<T: Scalar>(p: &ControlPolygon<T>) -> Vec<Point3<T>> {
    let mut v = p.points().to_vec();
    if p.is_closed() {
        v.push(p.points()[0]);
    }
    v
}

/// Hausdorff distance between the images of two polygons.
pub fn polygon_hausdorff<T: Scalar>(a: &ControlPolygon<T>, b: &ControlPolygon<T>) -> T {
    polyline_hausdorff(&closed_vertices(a), &closed_vertices(b))
}

/// Symmetric sampled distance between the image of `p` and curve `c`,
/// using `m + 1` curve samples and `m + 1` vertex-inclusive polygon samples.
pub fn polygon_curve_distance<T: Scalar>(
    p: &ControlPolygon<T>,
    c: &BezierCurve<T>,
    m: usize,
) -> Result<T> {
    if m < MIN_DISTANCE_SAMPLES {
        return Err(Error::domain(format!(
            "distance estimate needs at least {MIN_DISTANCE_SAMPLES} samples, got {m}"
        )));
    }
    let curve = c.sample(m)?;
    let poly_img = closed_vertices(p);
    let poly_samples = p.sample_vertices_inclusive(m.max(p.segment_count()))?;
    let to_polygon = directed(curve.samples(), &poly_img);
    let to_curve = directed(&poly_samples, curve.samples());
    Ok(to_polygon.max(to_curve))
}
