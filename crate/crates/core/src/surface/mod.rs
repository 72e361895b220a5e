//! Ruled surfaces `Psi(u, v) = (1 - v) c1(u) + v c2(u)` between sampled
//! boundary curves, plus sweeps, skins and their triangulations.

mod crossing;
mod mesh;

pub use crossing::{
    crossing_preimages, find_generic_direction, safe_sweep_length, widest_sweep_direction,
    CrossingPreimage, GENERICITY_TOLERANCE,
};
pub use mesh::{triangulate, triangulate_skin, TriangleMesh, DEGENERATE_AREA};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::point::Point3;
use crate::scalar::Scalar;

/// How far a sweep direction may deviate from unit length.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Rulings shorter than this everywhere make a surface degenerate.
pub const DEGENERATE_RULING: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct RuledSurface<T> {
    c1: SampledCurve<T>,
    c2: SampledCurve<T>,
}

impl<T: Scalar> RuledSurface<T> {
    pub fn c1(&self) -> &SampledCurve<T> {
        &self.c1
    }

    pub fn c2(&self) -> &SampledCurve<T> {
        &self.c2
    }

    pub fn intervals(&self) -> usize {
        self.c1.intervals()
    }

    pub fn is_closed(&self) -> bool {
        self.c1.is_closed()
    }

    /// `Psi(u_k, v)`; rows `v = 0` and `v = 1` reproduce the boundary samples exactly.
    pub fn point(&self, k: usize, v: T) -> Point3<T> {
        self.c1.samples()[k].lerp(self.c2.samples()[k], v)
    }
}

/// Ruled surface pairing equal parameters of `c1` and `c2`.
pub fn rule<T: Scalar>(c1: &SampledCurve<T>, c2: &SampledCurve<T>) -> Result<RuledSurface<T>> {
    if c1.intervals() != c2.intervals() {
        return Err(Error::domain(format!(
            "boundary curves have {} and {} intervals",
            c1.intervals(),
            c2.intervals()
        )));
    }
    if c1.is_closed() != c2.is_closed() {
        return Err(Error::domain("one boundary curve is closed and the other open"));
    }
    let tiny = T::lit(DEGENERATE_RULING);
    if c1
        .samples()
        .iter()
        .zip(c2.samples())
        .all(|(&a, &b)| a.distance(b) <= tiny)
    {
        return Err(Error::domain(
            "boundary curves coincide; the ruled surface is degenerate",
        ));
    }
    Ok(RuledSurface {
        c1: c1.clone(),
        c2: c2.clone(),
    })
}

/// Ruled surface between `c` and its translate by `length * direction`.
pub fn sweep<T: Scalar>(
    c: &SampledCurve<T>,
    direction: Point3<T>,
    length: T,
) -> Result<RuledSurface<T>> {
    let n = direction.norm();
    if !(n > T::zero()) {
        return Err(Error::domain("sweep direction is zero"));
    }
    if (n - T::one()).abs() > T::lit(UNIT_TOLERANCE) {
        return Err(Error::domain(format!(
            "sweep direction has length {n}, expected a unit vector"
        )));
    }
    if !(length > T::zero() && length.is_finite()) {
        return Err(Error::domain(format!("sweep length {length} must be positive and finite")));
    }
    rule(c, &c.translated(direction * length))
}

/// Consecutive ruled patches `c_i -> c_{i+1}`.
pub fn skin<T: Scalar>(curves: &[SampledCurve<T>]) -> Result<Vec<RuledSurface<T>>> {
    if curves.len() < 2 {
        return Err(Error::domain("skinning needs at least two curves"));
    }
    curves.windows(2).map(|w| rule(&w[0], &w[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point3<f64>;

    pub(crate) fn circle(m: usize, radius: f64, z: f64) -> SampledCurve<f64> {
        let samples = (0..=m)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / m as f64;
                P::new(radius * a.cos(), radius * a.sin(), z)
            })
            .collect();
        SampledCurve::new(samples, true).unwrap()
    }

    #[test]
    fn sweep_reproduces_boundaries() {
        let c = circle(64, 1.0, 0.0);
        let s = sweep(&c, P::new(0.0, 0.0, 1.0), 0.5).unwrap();
        for k in 0..=64 {
            assert_eq!(s.point(k, 0.0), c.samples()[k]);
            assert_eq!(s.point(k, 1.0), c.samples()[k] + P::new(0.0, 0.0, 0.5));
            let mid = c.samples()[k].midpoint(s.c2().samples()[k]);
            assert!(s.point(k, 0.5).distance(mid) <= 1e-15);
        }
    }

    #[test]
    fn sweep_rejects_bad_direction_and_length() {
        let c = circle(16, 1.0, 0.0);
        assert!(sweep(&c, P::zero(), 1.0).is_err());
        assert!(sweep(&c, P::new(0.0, 0.0, 2.0), 1.0).is_err());
        assert!(sweep(&c, P::new(0.0, 0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn rule_rejects_mismatch_and_coincidence() {
        let a = circle(16, 1.0, 0.0);
        assert!(rule(&a, &circle(32, 1.0, 1.0)).is_err());
        assert!(rule(&a, &a).is_err());
        let open = SampledCurve::new(a.samples().to_vec(), false).unwrap();
        assert!(rule(&a, &open.translated(P::new(0.0, 0.0, 1.0))).is_err());
    }

    #[test]
    fn skin_chains_patches() {
        let curves: Vec<_> = (0..4).map(|i| circle(16, 1.0, i as f64)).collect();
        let patches = skin(&curves).unwrap();
        assert_eq!(patches.len(), 3);
        assert_eq!(patches[1].c1(), &curves[1]);
        assert!(skin(&curves[..1]).is_err());
    }
}
