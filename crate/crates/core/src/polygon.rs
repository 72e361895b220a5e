//! Control polygons: PL knots that double as Bézier control data.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point3;
use crate::scalar::Scalar;

/// Minimum point count for user-supplied polygons (degree index `n >= 4`).
pub const MIN_INITIAL_POINTS: usize = 5;

/// Relative sine threshold below which three consecutive points count as collinear.
pub const COLLINEAR_SINE: f64 = 1e-9;

/// Points closer than this are treated as duplicates.
pub const DUPLICATE_DISTANCE: f64 = 1e-12;

/// Ordered control points `P_0..P_n`. For closed knots the closing edge
/// `P_n -> P_0` is implied and `P_0` is not repeated.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlPolygon<T> {
    points: Vec<Point3<T>>,
    closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    NonFinite { index: usize },
    TooFewPoints { count: usize, required: usize },
    DuplicatePoints { first: usize, second: usize },
    /// Points `start`, `start + 1`, `start + 2` (cyclically for closed polygons).
    CollinearTriple { start: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "polygon has no points"),
            Violation::NonFinite { index } => write!(f, "point {index} is not finite"),
            Violation::TooFewPoints { count, required } => {
                write!(f, "fewer than {required} points ({count} given)")
            }
            Violation::DuplicatePoints { first, second } => {
                write!(f, "points {first} and {second} coincide")
            }
            Violation::CollinearTriple { start } => {
                write!(f, "collinear triple starting at point {start}")
            }
        }
    }
}

/// Every assumption a polygon breaks. Empty means the polygon passed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationVerdict {
    pub violations: Vec<Violation>,
}

impl ValidationVerdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl<T: Scalar> ControlPolygon<T> {
    /// Builds a polygon, rejecting empty or non-finite input. Call
    /// [`ControlPolygon::validate`] for the stricter input assumptions.
    pub fn new(points: Vec<Point3<T>>, closed: bool) -> Result<Self> {
        let p = Self { points, closed };
        let verdict = p.validate(false);
        if verdict.passed() {
            Ok(p)
        } else {
            Err(Error::Validation(verdict))
        }
    }

    pub fn closed(points: Vec<Point3<T>>) -> Result<Self> {
        Self::new(points, true)
    }

    pub fn open(points: Vec<Point3<T>>) -> Result<Self> {
        Self::new(points, false)
    }

    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        match (self.closed, self.points.len()) {
            (_, 0) | (_, 1) => 0,
            (true, n) => n,
            (false, n) => n - 1,
        }
    }

    /// Endpoints of segment `i`; the closing segment is `n - 1` for closed polygons.
    pub fn segment(&self, i: usize) -> (Point3<T>, Point3<T>) {
        let n = self.points.len();
        (self.points[i], self.points[(i + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point3<T>, Point3<T>)> + '_ {
        (0..self.segment_count()).map(move |i| self.segment(i))
    }

    /// Whether segments `i` and `j` share an endpoint.
    pub fn segments_adjacent(&self, i: usize, j: usize) -> bool {
        let m = self.segment_count();
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        b - a <= 1 || (self.closed && a == 0 && b == m - 1)
    }

    pub fn translated(&self, offset: Point3<T>) -> Self {
        Self {
            points: self.points.iter().map(|&p| p + offset).collect(),
            closed: self.closed,
        }
    }

    pub fn bounding_box(&self) -> (Point3<T>, Point3<T>) {
        let first = self.points[0];
        self.points
            .iter()
            .fold((first, first), |(lo, hi), &p| (lo.component_min(p), hi.component_max(p)))
    }

    /// Checks the input assumptions. With `initial == false` only emptiness
    /// and finiteness are checked, since refinement creates collinear triples.
    pub fn validate(&self, initial: bool) -> ValidationVerdict {
        let mut violations = Vec::new();
        if self.points.is_empty() {
            violations.push(Violation::Empty);
            return ValidationVerdict { violations };
        }
        for (index, p) in self.points.iter().enumerate() {
            if !p.is_finite() {
                violations.push(Violation::NonFinite { index });
            }
        }
        if !initial || !violations.is_empty() {
            return ValidationVerdict { violations };
        }

        let n = self.points.len();
        if n < MIN_INITIAL_POINTS {
            violations.push(Violation::TooFewPoints {
                count: n,
                required: MIN_INITIAL_POINTS,
            });
        }
        let dup = T::lit(DUPLICATE_DISTANCE);
        for i in 0..n {
            for j in i + 1..n {
                if self.points[i].distance(self.points[j]) <= dup {
                    violations.push(Violation::DuplicatePoints { first: i, second: j });
                }
            }
        }
        let triples = match (self.closed, n) {
            (_, n) if n < 3 => 0,
            (true, n) => n,
            (false, n) => n - 2,
        };
        for start in 0..triples {
            let a = self.points[start];
            let b = self.points[(start + 1) % n];
            let c = self.points[(start + 2) % n];
            if collinear(a, b, c) {
                violations.push(Violation::CollinearTriple { start });
            }
        }
        ValidationVerdict { violations }
    }

    /// Inserts the midpoint of every segment (closing segment included).
    pub fn refine_midpoints(&self) -> Self {
        let mut points = Vec::with_capacity(self.points.len() * 2);
        for (a, b) in self.segments() {
            points.push(a);
            points.push(a.midpoint(b));
        }
        if !self.closed {
            points.push(*self.points.last().expect("nonempty polygon"));
        }
        Self {
            points,
            closed: self.closed,
        }
    }

    /// Inserts one point at `(1 - fraction) P_i + fraction P_{i+1}` on segment `i`.
    pub fn insert_collinear(&self, segment_index: usize, fraction: T) -> Result<Self> {
        if segment_index >= self.segment_count() {
            return Err(Error::domain(format!(
                "segment index {segment_index} out of range (polygon has {} segments)",
                self.segment_count()
            )));
        }
        if !(fraction > T::zero() && fraction < T::one()) {
            return Err(Error::domain(format!(
                "insertion fraction {fraction} not in the open interval (0, 1)"
            )));
        }
        let (a, b) = self.segment(segment_index);
        let mut points = self.points.clone();
        points.insert(segment_index + 1, a.lerp(b, fraction));
        Ok(Self {
            points,
            closed: self.closed,
        })
    }

    /// The polygon image sampled at `m + 1` points with every vertex among
    /// the samples. Segment `i` receives `floor((i+1)m/N) - floor(im/N)`
    /// uniform subdivisions, so the chord polyline of the samples has the
    /// same image as the polygon.
    pub fn sample_vertices_inclusive(&self, m: usize) -> Result<Vec<Point3<T>>> {
        let segs = self.segment_count();
        if segs == 0 {
            return Err(Error::domain("polygon has no segments to sample"));
        }
        if m < segs {
            return Err(Error::domain(format!(
                "{m} samples cannot include all {segs} segment endpoints"
            )));
        }
        let mut out = Vec::with_capacity(m + 1);
        for i in 0..segs {
            let (a, b) = self.segment(i);
            let k = (i + 1) * m / segs - i * m / segs;
            for s in 0..k {
                out.push(a.lerp(b, T::lit(s as f64 / k as f64)));
            }
        }
        out.push(if self.closed {
            self.points[0]
        } else {
            *self.points.last().expect("nonempty polygon")
        });
        Ok(out)
    }
}

fn collinear<T: Scalar>(a: Point3<T>, b: Point3<T>, c: Point3<T>) -> bool {
    let u = b - a;
    let v = c - b;
    let scale = u.norm() * v.norm();
    if scale == T::zero() {
        return true;
    }
    u.cross(v).norm() <= T::lit(COLLINEAR_SINE) * scale
}

/// The sequence `P^(0), P^(1), ...` of midpoint refinements.
#[derive(Clone, Debug)]
pub struct RefinementSequence<T> {
    iterates: Vec<ControlPolygon<T>>,
}

impl<T: Scalar> RefinementSequence<T> {
    /// Iterates `0..=levels`.
    pub fn new(base: ControlPolygon<T>, levels: usize) -> Self {
        let mut iterates = Vec::with_capacity(levels + 1);
        iterates.push(base);
        for _ in 0..levels {
            let next = iterates.last().expect("base present").refine_midpoints();
            iterates.push(next);
        }
        Self { iterates }
    }

    pub fn base(&self) -> &ControlPolygon<T> {
        &self.iterates[0]
    }

    pub fn iterate(&self, j: usize) -> Option<&ControlPolygon<T>> {
        self.iterates.get(j)
    }

    pub fn iterates(&self) -> &[ControlPolygon<T>] {
        &self.iterates
    }

    pub fn levels(&self) -> usize {
        self.iterates.len() - 1
    }
}
