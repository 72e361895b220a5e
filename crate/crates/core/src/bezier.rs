//! Bézier curves over control polygons, evaluated by de Casteljau.

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::point::Point3;
use crate::polygon::ControlPolygon;
use crate::scalar::Scalar;

/// Smallest sample count accepted by [`BezierCurve::sample`].
pub const MIN_SAMPLES: usize = 8;

/// Degree-`n` Bézier curve. For a closed polygon the first control point
/// is appended, so `alpha(0) = alpha(1) = P_0` and the curve is closed with
/// a seam at `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BezierCurve<T> {
    control: Vec<Point3<T>>,
    closed: bool,
}

impl<T: Scalar> BezierCurve<T> {
    pub fn from_polygon(p: &ControlPolygon<T>) -> Self {
        let mut control = p.points().to_vec();
        if p.is_closed() {
            control.push(p.points()[0]);
        }
        Self {
            control,
            closed: p.is_closed(),
        }
    }

    /// Control points as used for evaluation (closure point included).
    pub fn control_points(&self) -> &[Point3<T>] {
        &self.control
    }

    pub fn degree(&self) -> usize {
        self.control.len() - 1
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn eval(&self, t: T) -> Result<Point3<T>> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::domain(format!("curve parameter {t} outside [0, 1]")));
        }
        let mut scratch = self.control.clone();
        Ok(de_casteljau(&mut scratch, t))
    }

    /// `m + 1` samples at `t = k/m`. Closed curves get `sample[m] == sample[0]` exactly.
    pub fn sample(&self, m: usize) -> Result<SampledCurve<T>> {
        if m < MIN_SAMPLES {
            return Err(Error::domain(format!(
                "sample count {m} below minimum {MIN_SAMPLES}"
            )));
        }
        let mut scratch = Vec::with_capacity(self.control.len());
        let mut samples: Vec<Point3<T>> = (0..=m)
            .map(|k| {
                scratch.clear();
                scratch.extend_from_slice(&self.control);
                de_casteljau(&mut scratch, T::lit(k as f64 / m as f64))
            })
            .collect();
        if self.closed {
            samples[m] = samples[0];
        }
        SampledCurve::new(samples, self.closed)
    }
}

/// Repeated pairwise convex combination; consumes `pts` as workspace.
fn de_casteljau<T: Scalar>(pts: &mut [Point3<T>], t: T) -> Point3<T> {
    let n = pts.len();
    for level in 1..n {
        for i in 0..n - level {
            pts[i] = pts[i].lerp(pts[i + 1], t);
        }
    }
    pts[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point3<f64>;

    fn open(points: Vec<P>) -> BezierCurve<f64> {
        BezierCurve::from_polygon(&ControlPolygon::open(points).unwrap())
    }

    #[test]
    fn linear_and_quadratic() {
        let c = open(vec![P::zero(), P::new(2.0, 0.0, 0.0)]);
        assert_eq!(c.eval(0.5).unwrap(), P::new(1.0, 0.0, 0.0));
        let q = open(vec![P::zero(), P::new(1.0, 1.0, 0.0), P::new(2.0, 0.0, 0.0)]);
        // (P0 + 2 P1 + P2) / 4
        assert_eq!(q.eval(0.5).unwrap(), P::new(1.0, 0.5, 0.0));
        assert_eq!(q.degree(), 2);
    }

    #[test]
    fn endpoints_interpolate() {
        let q = open(vec![
            P::new(0.3, 0.0, 1.0),
            P::new(1.0, 1.0, 0.0),
            P::new(2.0, 0.0, 0.0),
            P::new(-1.0, 4.0, 2.0),
        ]);
        assert_eq!(q.eval(0.0).unwrap(), P::new(0.3, 0.0, 1.0));
        assert_eq!(q.eval(1.0).unwrap(), P::new(-1.0, 4.0, 2.0));
    }

    #[test]
    fn closed_curve_returns_to_start() {
        let p = ControlPolygon::closed(vec![
            P::new(1.0, 0.0, 0.0),
            P::new(0.0, 1.0, 0.0),
            P::new(-1.0, 0.0, 0.0),
            P::new(0.0, -1.0, 0.0),
        ])
        .unwrap();
        let c = BezierCurve::from_polygon(&p);
        assert_eq!(c.degree(), 4);
        assert_eq!(c.eval(1.0).unwrap(), P::new(1.0, 0.0, 0.0));
        let s = c.sample(16).unwrap();
        assert_eq!(s.samples()[0], s.samples()[16]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let c = open(vec![P::zero(), P::new(2.0, 0.0, 0.0)]);
        assert!(c.eval(-0.1).is_err());
        assert!(c.eval(1.5).is_err());
        assert!(c.eval(f64::NAN).is_err());
        assert!(c.sample(7).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let c = BezierCurve::from_polygon(
            &ControlPolygon::<f32>::open(vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 0.0),
                Point3::new(2.0, 0.0, 0.0),
            ])
            .unwrap(),
        );
        assert_eq!(c.eval(0.5).unwrap(), Point3::new(1.0f32, 0.5, 0.0));
    }
}
