//! One-parameter families of boundary curves and the search for the first
//! morph parameter at which the ruled surface self-intersects.
//!
//! The predicate "surface at `s` self-intersects" is not assumed monotone in
//! `s`. A uniform grid scan finds the first grid cell where it turns true and
//! bisection narrows that cell; later transitions are not examined.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::bezier::BezierCurve;
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::intersect::{self_intersections, IntersectionReport};
use crate::point::Point3;
use crate::polygon::{ControlPolygon, RefinementSequence};
use crate::scalar::Scalar;
use crate::surface::{rule, triangulate};

pub const MIN_GRID: usize = 16;
pub const DEFAULT_GRID: usize = 64;
const MAX_BISECTIONS: usize = 200;

/// Fixed boundary `c1` and the moving boundary
/// `c2(s) = (1 - s) start + s end`.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphFamily<T> {
    fixed: SampledCurve<T>,
    start: SampledCurve<T>,
    end: SampledCurve<T>,
}

impl<T: Scalar> MorphFamily<T> {
    pub fn new(fixed: SampledCurve<T>, start: SampledCurve<T>, end: SampledCurve<T>) -> Result<Self> {
        if !fixed.compatible_with(&start) || !fixed.compatible_with(&end) {
            return Err(Error::domain(
                "morph curves must share sample count and closedness",
            ));
        }
        Ok(Self { fixed, start, end })
    }

    pub fn fixed(&self) -> &SampledCurve<T> {
        &self.fixed
    }

    pub fn start(&self) -> &SampledCurve<T> {
        &self.start
    }

    pub fn end(&self) -> &SampledCurve<T> {
        &self.end
    }

    pub fn curve_at(&self, s: T) -> Result<SampledCurve<T>> {
        if !(s >= T::zero() && s <= T::one()) {
            return Err(Error::domain(format!("morph parameter {s} outside [0, 1]")));
        }
        self.start.blend(&self.end, s)
    }
}

#[derive(Clone, Debug)]
pub struct MorphProbe<T> {
    pub s: T,
    pub intersecting: bool,
    pub report: IntersectionReport<T>,
    /// Closest approach of nonadjacent chords of the moving curve. Intermediate
    /// curves need not be knots; zero means the curve itself self-intersects.
    pub curve_self_proximity: Option<T>,
}

pub fn intersects_at<T: Scalar>(
    f: &MorphFamily<T>,
    s: T,
    v_steps: usize,
    eps: T,
) -> Result<MorphProbe<T>> {
    let moving = f.curve_at(s)?;
    let mesh = triangulate(&rule(&f.fixed, &moving)?, v_steps)?;
    let report = self_intersections(&mesh, eps)?;
    Ok(MorphProbe {
        s,
        intersecting: !report.is_empty(),
        report,
        curve_self_proximity: moving.self_proximity(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSettings<T> {
    pub grid: usize,
    pub tol: T,
    pub v_steps: usize,
    pub eps: T,
}

/// Cancellation flag and progress counter shared with a running scan.
#[derive(Debug, Default)]
pub struct ScanControl {
    cancel: AtomicBool,
    evaluations: AtomicUsize,
}

impl ScanControl {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.cancel.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.cancel.load(Ordering::SeqCst)
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::SeqCst)
    }
}

#[derive(Clone, Debug)]
pub struct TransitionResult<T> {
    /// Predicate false here (unless `already_intersecting`).
    pub s_lo: T,
    /// Predicate true here.
    pub s_hi: T,
    /// The surface self-intersects at `s = 0`; the bracket is `(0, 0)`.
    pub already_intersecting: bool,
    pub witnesses: IntersectionReport<T>,
    pub curve_self_proximity: Option<T>,
    pub grid: usize,
    pub samples: usize,
    pub v_steps: usize,
    pub eps: T,
    pub evaluations: usize,
}

pub fn first_intersection_parameter<T: Scalar>(
    f: &MorphFamily<T>,
    settings: ScanSettings<T>,
) -> Result<Option<TransitionResult<T>>> {
    first_intersection_parameter_with(f, settings, &ScanControl::new())
}

/// As [`first_intersection_parameter`], polling `control` for cancellation
/// between predicate evaluations.
pub fn first_intersection_parameter_with<T: Scalar>(
    f: &MorphFamily<T>,
    settings: ScanSettings<T>,
    control: &ScanControl,
) -> Result<Option<TransitionResult<T>>> {
    let ScanSettings {
        grid,
        tol,
        v_steps,
        eps,
    } = settings;
    if grid < MIN_GRID {
        return Err(Error::domain(format!("scan grid {grid} below minimum {MIN_GRID}")));
    }
    if !(tol > T::zero()) {
        return Err(Error::domain(format!("bisection tolerance {tol} must be positive")));
    }
    let probe = |s: T| -> Result<MorphProbe<T>> {
        if control.is_cancelled() {
            return Err(Error::Cancelled);
        }
        let p = intersects_at(f, s, v_steps, eps);
        control.evaluations.fetch_add(1, Ordering::SeqCst);
        p
    };
    let grid_param = |i: usize| T::lit(i as f64 / grid as f64);

    let scan: Vec<MorphProbe<T>> = (0..=grid)
        .into_par_iter()
        .map(|i| probe(grid_param(i)))
        .collect::<Result<_>>()?;
    let Some(first) = scan.iter().position(|p| p.intersecting) else {
        return Ok(None);
    };
    let mut evaluations = grid + 1;
    let finish = |s_lo: T, hit: MorphProbe<T>, already: bool, evaluations: usize| TransitionResult {
        s_lo,
        s_hi: hit.s,
        already_intersecting: already,
        witnesses: hit.report,
        curve_self_proximity: hit.curve_self_proximity,
        grid,
        samples: f.fixed.intervals(),
        v_steps,
        eps,
        evaluations,
    };
    if first == 0 {
        let hit = scan.into_iter().next().expect("grid is nonempty");
        return Ok(Some(finish(T::zero(), hit, true, evaluations)));
    }

    let mut lo = grid_param(first - 1);
    let mut hit = scan.into_iter().nth(first).expect("index in range");
    for _ in 0..MAX_BISECTIONS {
        if hit.s - lo <= tol {
            break;
        }
        let mid = lo + (hit.s - lo) * T::lit(0.5);
        if mid <= lo || mid >= hit.s {
            break;
        }
        let p = probe(mid)?;
        evaluations += 1;
        if p.intersecting {
            hit = p;
        } else {
            lo = mid;
        }
    }
    Ok(Some(finish(lo, hit, false, evaluations)))
}

/// Morph between the Bézier curves of refinement iterates `j_from` and
/// `j_to = j_from + 1` of `base`. The fixed boundary is the sampled curve of
/// iterate `j_from`; both moving endpoints are shifted by `lift`, so `s = 0`
/// is the sweep of the fixed curve along `lift`.
pub fn bezier_iterate_family<T: Scalar>(
    base: &ControlPolygon<T>,
    j_from: usize,
    j_to: usize,
    m: usize,
    lift: Point3<T>,
) -> Result<MorphFamily<T>> {
    if j_to != j_from + 1 {
        return Err(Error::domain(format!(
            "iterate family needs consecutive iterates, got {j_from} and {j_to}"
        )));
    }
    let seq = RefinementSequence::new(base.clone(), j_to);
    let sample = |j: usize| BezierCurve::from_polygon(seq.iterate(j).expect("iterate built")).sample(m);
    let fixed = sample(j_from)?;
    let end = sample(j_to)?.translated(lift);
    let start = fixed.translated(lift);
    MorphFamily::new(fixed, start, end)
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point3<f64>;

    fn circle(m: usize, z: f64) -> SampledCurve<f64> {
        let samples = (0..=m)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / m as f64;
                P::new(a.cos(), a.sin(), z)
            })
            .collect();
        SampledCurve::new(samples, true).unwrap()
    }

    #[test]
    fn curve_at_blends_pointwise() {
        let a = circle(16, 1.0);
        let b = a.reversed();
        let f = MorphFamily::new(circle(16, 0.0), a.clone(), b.clone()).unwrap();
        assert_eq!(f.curve_at(0.0).unwrap(), a);
        assert_eq!(f.curve_at(1.0).unwrap(), b);
        let mid = f.curve_at(0.5).unwrap();
        for k in 0..=16 {
            let expect = a.samples()[k].midpoint(b.samples()[k]);
            assert!(mid.samples()[k].distance(expect) <= 1e-15);
        }
        assert!(f.curve_at(1.5).is_err());
        let same = MorphFamily::new(circle(16, 0.0), a.clone(), a.clone()).unwrap();
        let still = same.curve_at(0.37).unwrap();
        for (p, q) in still.samples().iter().zip(a.samples()) {
            assert!(p.distance(*q) <= 1e-15);
        }
    }

    #[test]
    fn mismatched_family_is_rejected() {
        assert!(MorphFamily::new(circle(16, 0.0), circle(16, 1.0), circle(32, 1.0)).is_err());
    }

    #[test]
    fn constant_safe_family_has_no_transition() {
        let c = circle(24, 1.0);
        let f = MorphFamily::new(circle(24, 0.0), c.clone(), c).unwrap();
        let r = first_intersection_parameter(
            &f,
            ScanSettings {
                grid: 16,
                tol: 1e-3,
                v_steps: 4,
                eps: 1e-9,
            },
        )
        .unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn scan_settings_are_validated() {
        let c = circle(16, 1.0);
        let f = MorphFamily::new(circle(16, 0.0), c.clone(), c).unwrap();
        let bad_grid = ScanSettings { grid: 8, tol: 1e-3, v_steps: 2, eps: 1e-9 };
        assert!(first_intersection_parameter(&f, bad_grid).is_err());
        let bad_tol = ScanSettings { grid: 16, tol: 0.0, v_steps: 2, eps: 1e-9 };
        assert!(first_intersection_parameter(&f, bad_tol).is_err());
    }

    #[test]
    fn already_intersecting_at_zero() {
        let fixed = circle(24, 0.0);
        let rev = circle(24, 1.0).reversed();
        let f = MorphFamily::new(fixed, rev.clone(), rev).unwrap();
        // odd v_steps: with an even count the self-intersection lies on a mesh
        // row whose vertices coincide pairwise, and adjacency hides it
        let r = first_intersection_parameter(
            &f,
            ScanSettings { grid: 16, tol: 1e-3, v_steps: 5, eps: 1e-9 },
        )
        .unwrap()
        .unwrap();
        assert!(r.already_intersecting);
        assert_eq!((r.s_lo, r.s_hi), (0.0, 0.0));
    }

    #[test]
    fn cancelled_scan_reports_cancellation() {
        let c = circle(16, 1.0);
        let f = MorphFamily::new(circle(16, 0.0), c.clone(), c).unwrap();
        let control = ScanControl::new();
        control.cancel();
        let r = first_intersection_parameter_with(
            &f,
            ScanSettings { grid: 16, tol: 1e-3, v_steps: 2, eps: 1e-9 },
            &control,
        );
        assert!(matches!(r, Err(Error::Cancelled)));
    }

    #[test]
    fn iterate_family_needs_consecutive_iterates() {
        let base = ControlPolygon::closed(vec![
            P::new(1.0, 0.0, 0.0),
            P::new(0.0, 1.0, 0.3),
            P::new(-1.0, 0.2, 0.0),
            P::new(0.1, -1.0, -0.4),
            P::new(0.0, 0.0, 1.0),
        ])
        .unwrap();
        let lift = P::new(0.0, 0.0, 0.1);
        assert!(bezier_iterate_family(&base, 1, 3, 32, lift).is_err());
        let f = bezier_iterate_family(&base, 1, 2, 32, lift).unwrap();
        assert_eq!(f.start(), &f.fixed().translated(lift));
        assert_eq!(f.fixed().intervals(), 32);
    }
}
