use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point::Point3;
use crate::polygon::ControlPolygon;
use crate::scalar::Scalar;

/// Length scale (model units) for projection genericity checks.
pub const GENERICITY_TOLERANCE: f64 = 1e-9;

/// Two points of a polygon that share a projection.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingPreimage<T> {
    pub segment_a: usize,
    pub segment_b: usize,
    /// Lies on `segment_a`, the lower segment index.
    pub point_a: Point3<T>,
    pub point_b: Point3<T>,
    pub gap: T,
}

struct Projection<T> {
    e1: Point3<T>,
    e2: Point3<T>,
}

impl<T: Scalar> Projection<T> {
    fn along(direction: Point3<T>) -> Result<(Point3<T>, Self)> {
        let d = direction
            .normalized()
            .ok_or_else(|| Error::domain("projection direction is zero"))?;
        let helper = if d.x.abs() < T::lit(0.9) {
            Point3::new(T::one(), T::zero(), T::zero())
        } else {
            Point3::new(T::zero(), T::one(), T::zero())
        };
        let e1 = d.cross(helper).normalized().expect("helper not parallel");
        let e2 = d.cross(e1);
        Ok((d, Self { e1, e2 }))
    }

    fn apply(&self, p: Point3<T>) -> [T; 2] {
        [p.dot(self.e1), p.dot(self.e2)]
    }
}

fn sub2<T: Scalar>(a: [T; 2], b: [T; 2]) -> [T; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross2<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[1] - a[1] * b[0]
}

fn dot2<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}

fn len2<T: Scalar>(a: [T; 2]) -> T {
    dot2(a, a).sqrt()
}

fn degenerate(first: usize, second: usize, reason: &str) -> Error {
    Error::DegenerateProjection {
        first,
        second,
        reason: reason.to_string(),
    }
}

/// Every transversal crossing of nonadjacent segments in the projection of
/// `k` along `projection_direction`. Non-generic projections (a segment
/// parallel to the direction, overlapping or endpoint-touching projected
/// segments, triple points) are reported as errors so the caller can retry
/// with a perturbed direction.
pub fn crossing_preimages<T: Scalar>(
    k: &ControlPolygon<T>,
    projection_direction: Point3<T>,
) -> Result<Vec<CrossingPreimage<T>>> {
    let (_, proj) = Projection::along(projection_direction)?;
    let tol = T::lit(GENERICITY_TOLERANCE);
    let segs: Vec<([T; 2], [T; 2])> = k
        .segments()
        .map(|(a, b)| (proj.apply(a), proj.apply(b)))
        .collect();

    for (i, (a, b)) in segs.iter().enumerate() {
        if len2(sub2(*b, *a)) <= tol {
            return Err(degenerate(i, i, "segment is parallel to the projection direction"));
        }
    }

    let n = segs.len();
    let mut found: Vec<(CrossingPreimage<T>, [T; 2])> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = segs[i];
            let (c, e) = segs[j];
            let r = sub2(b, a);
            let s = sub2(e, c);
            let den = cross2(r, s);
            let rl = len2(r);
            let sl = len2(s);

            if k.segments_adjacent(i, j) {
                // folding back onto the neighbour hides part of the curve
                if den.abs() <= T::lit(1e-12) * rl * sl && dot2(r, s) < T::zero() && i + 1 == j {
                    return Err(degenerate(i, j, "adjacent segments fold onto each other"));
                }
                continue;
            }

            let q = sub2(c, a);
            if den.abs() <= T::lit(1e-12) * rl * sl {
                // parallel: only a problem when the projections overlap
                let off_line = cross2(r, q).abs() / rl;
                if off_line <= tol {
                    let t0 = dot2(q, r) / (rl * rl);
                    let t1 = dot2(sub2(e, a), r) / (rl * rl);
                    let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
                    let slack = tol / rl;
                    if hi >= -slack && lo <= T::one() + slack {
                        return Err(degenerate(i, j, "projected segments overlap"));
                    }
                }
                continue;
            }

            let t = cross2(q, s) / den;
            let u = cross2(q, r) / den;
            let dt = tol / rl;
            let du = tol / sl;
            let inside = t >= -dt && t <= T::one() + dt && u >= -du && u <= T::one() + du;
            if !inside {
                continue;
            }
            if t <= dt || t >= T::one() - dt || u <= du || u >= T::one() - du {
                return Err(degenerate(i, j, "projected segments touch at an endpoint"));
            }
            let (pa, pb) = k.segment(i);
            let (qa, qb) = k.segment(j);
            let point_a = pa.lerp(pb, t);
            let point_b = qa.lerp(qb, u);
            let at = [a[0] + r[0] * t, a[1] + r[1] * t];
            found.push((
                CrossingPreimage {
                    segment_a: i,
                    segment_b: j,
                    point_a,
                    point_b,
                    gap: point_a.distance(point_b),
                },
                at,
            ));
        }
    }

    for x in 0..found.len() {
        for y in x + 1..found.len() {
            if len2(sub2(found[x].1, found[y].1)) <= tol {
                return Err(degenerate(
                    found[x].0.segment_a,
                    found[y].0.segment_b,
                    "triple point in projection",
                ));
            }
        }
    }
    Ok(found.into_iter().map(|(c, _)| c).collect())
}

/// Half the smallest preimage gap over all crossings, or `+inf` when the
/// projection has no crossings.
pub fn safe_sweep_length<T: Scalar>(
    k: &ControlPolygon<T>,
    projection_direction: Point3<T>,
) -> Result<T> {
    let crossings = crossing_preimages(k, projection_direction)?;
    Ok(crossings
        .iter()
        .map(|c| c.gap)
        .fold(T::infinity(), T::min)
        * T::lit(0.5))
}

/// Retries [`crossing_preimages`] with seeded random perturbations of
/// `direction` (up to `attempts` of them, each component jittered by at most
/// `1e-3` before renormalizing) until the projection is generic. Returns the
/// direction actually used.
pub fn find_generic_direction<T: Scalar>(
    k: &ControlPolygon<T>,
    direction: Point3<T>,
    seed: u64,
    attempts: usize,
) -> Result<(Point3<T>, Vec<CrossingPreimage<T>>)> {
    let d = direction
        .normalized()
        .ok_or_else(|| Error::domain("projection direction is zero"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidate = d;
    let mut last_err = None;
    for _ in 0..=attempts {
        match crossing_preimages(k, candidate) {
            Ok(c) => return Ok((candidate, c)),
            Err(e @ Error::DegenerateProjection { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        let jitter = Point3::new(
            T::lit(rng.gen_range(-1e-3..1e-3)),
            T::lit(rng.gen_range(-1e-3..1e-3)),
            T::lit(rng.gen_range(-1e-3..1e-3)),
        );
        candidate = (d + jitter).normalized().unwrap_or(d);
    }
    Err(last_err.expect("at least one attempt was made"))
}

/// The direction with the largest [`safe_sweep_length`] among the three
/// axes and `candidates` seeded random unit vectors. Non-generic candidates
/// are skipped. A direction with no crossings wins outright.
pub fn widest_sweep_direction<T: Scalar>(
    k: &ControlPolygon<T>,
    seed: u64,
    candidates: usize,
) -> Result<(Point3<T>, T)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axes = [
        Point3::new(T::zero(), T::zero(), T::one()),
        Point3::new(T::one(), T::zero(), T::zero()),
        Point3::new(T::zero(), T::one(), T::zero()),
    ];
    let random = std::iter::repeat_with(move || {
        Point3::new(
            T::lit(rng.gen_range(-1.0..1.0)),
            T::lit(rng.gen_range(-1.0..1.0)),
            T::lit(rng.gen_range(-1.0..1.0)),
        )
    })
    .filter_map(|d| d.normalized())
    .take(candidates);
    let mut best: Option<(Point3<T>, T)> = None;
    let mut last_err = None;
    for d in axes.into_iter().chain(random) {
        match safe_sweep_length(k, d) {
            Ok(len) => {
                if best.is_none_or(|(_, b)| len > b) {
                    best = Some((d, len));
                }
                if len.is_infinite() {
                    break;
                }
            }
            Err(e @ Error::DegenerateProjection { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| last_err.expect("at least one direction was tried"))
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point3<f64>;

    fn two_segment_test() -> ControlPolygon<f64> {
        ControlPolygon::open(vec![
            P::new(-1.0, 0.0, 0.0),
            P::new(1.0, 0.0, 0.0),
            P::new(0.0, -1.0, 1.0),
            P::new(0.0, 1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn planar_square_has_no_crossings() {
        let sq = ControlPolygon::closed(vec![
            P::new(1.0, 0.0, 0.0),
            P::new(0.0, 1.0, 0.0),
            P::new(-1.0, 0.0, 0.0),
            P::new(0.0, -1.0, 0.0),
        ])
        .unwrap();
        let up = P::new(0.0, 0.0, 1.0);
        assert!(crossing_preimages(&sq, up).unwrap().is_empty());
        assert_eq!(safe_sweep_length(&sq, up).unwrap(), f64::INFINITY);
    }

    #[test]
    fn single_crossing() {
        let c = crossing_preimages(&two_segment_test(), P::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].segment_a, c[0].segment_b), (0, 2));
        assert!(c[0].point_a.distance(P::zero()) < 1e-15);
        assert!(c[0].point_b.distance(P::new(0.0, 0.0, 1.0)) < 1e-15);
        assert!((c[0].gap - 1.0).abs() < 1e-15);
        assert!((safe_sweep_length(&two_segment_test(), P::new(0.0, 0.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn vertical_segment_is_degenerate() {
        let p = ControlPolygon::open(vec![
            P::new(0.0, 0.0, 0.0),
            P::new(0.0, 0.0, 1.0),
            P::new(1.0, 0.0, 1.0),
        ])
        .unwrap();
        let err = crossing_preimages(&p, P::new(0.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateProjection { first: 0, second: 0, .. }));
    }

    #[test]
    fn endpoint_touch_is_degenerate_and_jitter_recovers() {
        // segment 2 ends right above segment 0's interior
        let p = ControlPolygon::open(vec![
            P::new(-1.0, 0.0, 0.0),
            P::new(1.0, 0.0, 0.0),
            P::new(0.5, -1.0, 1.0),
            P::new(0.0, 0.0, 1.0),
            P::new(-0.5, 1.0, 2.0),
        ])
        .unwrap();
        let up = P::new(0.0, 0.0, 1.0);
        assert!(matches!(
            crossing_preimages(&p, up),
            Err(Error::DegenerateProjection { .. })
        ));
        let (d, c) = find_generic_direction(&p, up, 7, 16).unwrap();
        assert!(d.distance(up) < 1e-2);
        assert_eq!(c.len(), 1);
        // deterministic for a fixed seed
        assert_eq!(find_generic_direction(&p, up, 7, 16).unwrap().0, d);
    }

    #[test]
    fn overlapping_parallel_projections_are_degenerate() {
        // segment 3 projects onto a line covering segment 0
        let p = ControlPolygon::open(vec![
            P::new(-1.0, 0.0, 0.0),
            P::new(1.0, 0.0, 0.0),
            P::new(2.5, 1.0, 0.5),
            P::new(2.0, 0.0, 1.0),
            P::new(-2.0, 0.0, 1.0),
        ])
        .unwrap();
        match crossing_preimages(&p, P::new(0.0, 0.0, 1.0)) {
            Err(Error::DegenerateProjection { first: 0, second: 3, reason }) => {
                assert!(reason.contains("overlap"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn widest_direction_beats_every_axis() {
        let (d, len) = widest_sweep_direction(&two_segment_test(), 3, 32).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-12);
        for axis in [P::new(1.0, 0.0, 0.0), P::new(0.0, 1.0, 0.0), P::new(0.0, 0.0, 1.0)] {
            if let Ok(l) = safe_sweep_length(&two_segment_test(), axis) {
                assert!(len >= l);
            }
        }
        assert_eq!(safe_sweep_length(&two_segment_test(), d).unwrap(), len);
    }
}
