use crate::error::{Error, Result};
use crate::point::Point3;
use crate::polygon::ControlPolygon;
use crate::scalar::Scalar;

/// Tolerance for the closing sample of a closed curve.
pub const SEAM_TOLERANCE: f64 = 1e-12;

/// A curve discretized at uniform parameters `u_k = k/m`, `k = 0..=m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve<T> {
    samples: Vec<Point3<T>>,
    closed: bool,
}

impl<T: Scalar> SampledCurve<T> {
    /// For closed curves the last sample must match the first within
    /// [`SEAM_TOLERANCE`]; it is then overwritten with an exact copy.
    pub fn new(mut samples: Vec<Point3<T>>, closed: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::domain("a sampled curve needs at least two samples"));
        }
        if let Some(i) = samples.iter().position(|p| !p.is_finite()) {
            return Err(Error::domain(format!("sample {i} is not finite")));
        }
        if closed {
            let m = samples.len() - 1;
            if samples[0].distance(samples[m]) > T::lit(SEAM_TOLERANCE) {
                return Err(Error::domain(
                    "closed curve: first and last samples differ",
                ));
            }
            samples[m] = samples[0];
        }
        Ok(Self { samples, closed })
    }

    /// Samples the PL image of `p` so that every vertex is a sample point.
    pub fn from_polygon(p: &ControlPolygon<T>, m: usize) -> Result<Self> {
        Self::new(p.sample_vertices_inclusive(m)?, p.is_closed())
    }

    pub fn samples(&self) -> &[Point3<T>] {
        &self.samples
    }

    /// Number of parameter intervals `m`.
    pub fn intervals(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn compatible_with(&self, other: &Self) -> bool {
        self.samples.len() == other.samples.len() && self.closed == other.closed
    }

    pub fn translated(&self, offset: Point3<T>) -> Self {
        Self {
            samples: self.samples.iter().map(|&p| p + offset).collect(),
            closed: self.closed,
        }
    }

    /// The curve traversed backwards: `c'(u) = c(1 - u)`.
    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self {
            samples,
            closed: self.closed,
        }
    }

    /// Pointwise `(1 - s) self + s other` at equal parameters.
    pub fn blend(&self, other: &Self, s: T) -> Result<Self> {
        if !self.compatible_with(other) {
            return Err(Error::domain("blended curves must share sampling"));
        }
        let mut samples: Vec<_> = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| a.lerp(b, s))
            .collect();
        if self.closed {
            let m = samples.len() - 1;
            samples[m] = samples[0];
        }
        Ok(Self {
            samples,
            closed: self.closed,
        })
    }

    /// The chord polyline through the samples as a control polygon.
    pub fn chord_polygon(&self) -> ControlPolygon<T> {
        let n = if self.closed {
            self.samples.len() - 1
        } else {
            self.samples.len()
        };
        ControlPolygon::new(self.samples[..n].to_vec(), self.closed)
            .expect("samples are finite and nonempty")
    }

    /// Minimum distance between nonadjacent chord segments; `None` when
    /// there are no such pairs. Zero means the chord polyline touches itself.
    pub fn self_proximity(&self) -> Option<T> {
        let m = self.intervals();
        let mut best: Option<T> = None;
        for i in 0..m {
            for j in i + 2..m {
                if self.closed && i == 0 && j == m - 1 {
                    continue;
                }
                let d = crate::point::segment_segment_distance(
                    self.samples[i],
                    self.samples[i + 1],
                    self.samples[j],
                    self.samples[j + 1],
                );
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point3<f64>;

    #[test]
    fn closed_seam_is_enforced() {
        let ok = SampledCurve::new(
            vec![P::zero(), P::new(1.0, 0.0, 0.0), P::new(1e-13, 0.0, 0.0)],
            true,
        )
        .unwrap();
        assert_eq!(ok.samples()[2], P::zero());
        assert!(SampledCurve::new(vec![P::zero(), P::new(1.0, 0.0, 0.0)], true).is_err());
    }

    #[test]
    fn blend_endpoints_are_exact() {
        let a = SampledCurve::new(vec![P::new(0.1, 0.2, 0.3), P::new(1.0, 2.0, 3.0)], false).unwrap();
        let b = a.translated(P::new(0.7, -0.3, 1e-3));
        assert_eq!(a.blend(&b, 0.0).unwrap(), a);
        assert_eq!(a.blend(&b, 1.0).unwrap(), b);
    }

    #[test]
    fn self_proximity_of_crossing_polyline() {
        let c = SampledCurve::new(
            vec![
                P::new(-1.0, 0.0, 0.0),
                P::new(1.0, 0.0, 0.0),
                P::new(0.0, -1.0, 1.0),
                P::new(0.0, 1.0, 1.0),
            ],
            false,
        )
        .unwrap();
        assert!((c.self_proximity().unwrap() - 1.0).abs() < 1e-15);
    }
}
