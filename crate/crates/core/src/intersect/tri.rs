//! Triangle-triangle intersection with an explicit witness.
//!
//! Non-coplanar pairs use the interval-overlap method: each triangle is cut
//! by the other's support plane and the two cuts are compared along the
//! planes' common line. Coplanar pairs are clipped against each other in 2D.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::point::{point_triangle_closest, segment_segment_closest, Point3};
use crate::scalar::Scalar;
use crate::surface::DEGENERATE_AREA;

pub type Triangle<T> = [Point3<T>; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Crossing,
    Coplanar,
}

/// A segment (possibly a single point) contained in both triangles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness<T> {
    pub start: Point3<T>,
    pub end: Point3<T>,
    pub kind: WitnessKind,
}

impl<T: Scalar> Witness<T> {
    pub fn extent(&self) -> T {
        self.start.distance(self.end)
    }
}

fn check_nondegenerate<T: Scalar>(t: &Triangle<T>, which: &str) -> Result<Point3<T>> {
    let n = (t[1] - t[0]).cross(t[2] - t[0]);
    if !(n.norm() * T::lit(0.5) > T::lit(DEGENERATE_AREA)) {
        return Err(Error::domain(format!("{which} triangle is degenerate")));
    }
    Ok(n.normalized().expect("nonzero normal"))
}

fn classify<T: Scalar>(d: T, eps: T) -> i8 {
    if d > eps {
        1
    } else if d < -eps {
        -1
    } else {
        0
    }
}

/// Points where triangle `t` meets the plane it was measured against.
fn plane_cut<T: Scalar>(t: &Triangle<T>, d: [T; 3], s: [i8; 3]) -> Vec<Point3<T>> {
    let mut pts = Vec::with_capacity(3);
    for i in 0..3 {
        if s[i] == 0 {
            pts.push(t[i]);
        }
        let j = (i + 1) % 3;
        if s[i] * s[j] < 0 {
            let w = d[i] / (d[i] - d[j]);
            pts.push(t[i].lerp(t[j], w));
        }
    }
    pts
}

/// Intersects two closed triangles. `eps` is the model-space distance below
/// which a vertex counts as lying on the other triangle's plane.
pub fn tri_tri_intersect<T: Scalar>(
    t1: &Triangle<T>,
    t2: &Triangle<T>,
    eps: T,
) -> Result<Option<Witness<T>>> {
    let n1 = check_nondegenerate(t1, "first")?;
    let n2 = check_nondegenerate(t2, "second")?;

    let d1: [T; 3] = std::array::from_fn(|i| n2.dot(t1[i] - t2[0]));
    let d2: [T; 3] = std::array::from_fn(|i| n1.dot(t2[i] - t1[0]));
    let s1 = d1.map(|d| classify(d, eps));
    let s2 = d2.map(|d| classify(d, eps));

    if (s1[0] != 0 && s1[0] == s1[1] && s1[1] == s1[2])
        || (s2[0] != 0 && s2[0] == s2[1] && s2[1] == s2[2])
    {
        return Ok(None);
    }

    let line = n1.cross(n2);
    if s1 == [0; 3] || s2 == [0; 3] || line.norm() <= T::lit(1e-12) {
        return Ok(coplanar(t1, t2, n1, n2, eps));
    }
    let line = line.normalized().expect("nonparallel planes");

    // The cuts use exact signs: a vertex within eps of the other plane can
    // still be far from the planes' common line when they are nearly
    // parallel. Contacts thinner than that are left to `near_contact`.
    let e1 = d1.map(|d| classify(d, T::zero()));
    let e2 = d2.map(|d| classify(d, T::zero()));
    let straddles = |e: [i8; 3]| !(e[0] != 0 && e[0] == e[1] && e[1] == e[2]);
    if !straddles(e1) || !straddles(e2) {
        return Ok(near_contact(t1, t2, eps));
    }
    let cut1 = plane_cut(t1, d1, e1);
    let cut2 = plane_cut(t2, d2, e2);
    let span = |pts: &[Point3<T>]| {
        let mut lo = (T::infinity(), pts[0]);
        let mut hi = (T::neg_infinity(), pts[0]);
        for &p in pts {
            let x = p.dot(line);
            if x < lo.0 {
                lo = (x, p);
            }
            if x > hi.0 {
                hi = (x, p);
            }
        }
        (lo, hi)
    };
    let (lo1, hi1) = span(&cut1);
    let (lo2, hi2) = span(&cut2);
    let lo = if lo1.0 >= lo2.0 { lo1 } else { lo2 };
    let hi = if hi1.0 <= hi2.0 { hi1 } else { hi2 };
    if lo.0 > hi.0 {
        return Ok(near_contact(t1, t2, eps));
    }
    Ok(Some(Witness {
        start: lo.1,
        end: hi.1,
        kind: WitnessKind::Crossing,
    }))
}

/// A point witness midway between the closest points of two disjoint
/// triangles, when they come within `eps` of each other.
fn near_contact<T: Scalar>(t1: &Triangle<T>, t2: &Triangle<T>, eps: T) -> Option<Witness<T>> {
    let mut best: Option<(T, Point3<T>, Point3<T>)> = None;
    let mut offer = |a: Point3<T>, b: Point3<T>| {
        let d = a.distance(b);
        if best.is_none_or(|(bd, _, _)| d < bd) {
            best = Some((d, a, b));
        }
    };
    for &p in t1 {
        offer(p, point_triangle_closest(p, *t2));
    }
    for &q in t2 {
        offer(point_triangle_closest(q, *t1), q);
    }
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = segment_segment_closest(t1[i], t1[(i + 1) % 3], t2[j], t2[(j + 1) % 3]);
            offer(a, b);
        }
    }
    let (d, a, b) = best.expect("candidates offered");
    (d <= eps).then(|| {
        let m = a.midpoint(b);
        Witness {
            start: m,
            end: m,
            kind: WitnessKind::Crossing,
        }
    })
}

fn lexicographic<T: Scalar>(a: &Triangle<T>, b: &Triangle<T>) -> Ordering {
    let fa = a.iter().flat_map(|p| p.to_array());
    let fb = b.iter().flat_map(|p| p.to_array());
    for (x, y) in fa.zip(fb) {
        match x.partial_cmp(&y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Overlap of coplanar triangles, clipped in the plane that drops the
/// dominant normal axis. Arguments are put in a canonical order first, so
/// the verdict does not depend on which triangle is passed first.
fn coplanar<T: Scalar>(
    t1: &Triangle<T>,
    t2: &Triangle<T>,
    n1: Point3<T>,
    n2: Point3<T>,
    eps: T,
) -> Option<Witness<T>> {
    let (subject, clip) = if lexicographic(t1, t2) == Ordering::Greater {
        (t2, t1)
    } else {
        (t1, t2)
    };
    let w = Point3::new(
        n1.x.abs() + n2.x.abs(),
        n1.y.abs() + n2.y.abs(),
        n1.z.abs() + n2.z.abs(),
    );
    let drop = if w.x >= w.y && w.x >= w.z {
        0
    } else if w.y >= w.z {
        1
    } else {
        2
    };
    let (ax, ay) = match drop {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let flat = |p: Point3<T>| [p.axis(ax), p.axis(ay)];
    // in-plane distances shrink by the normal's dominant component under the drop
    let scale = match drop {
        0 => w.x,
        1 => w.y,
        _ => w.z,
    } * T::lit(0.5);
    let tol = eps * scale.max(T::lit(1e-3));

    let mut c: Vec<[T; 2]> = clip.iter().map(|&p| flat(p)).collect();
    let orient = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[1][1] - c[0][1]) * (c[2][0] - c[0][0]);
    if orient < T::zero() {
        c.swap(1, 2);
    }

    let mut poly: Vec<Point3<T>> = subject.to_vec();
    for i in 0..3 {
        if poly.is_empty() {
            return None;
        }
        let a = c[i];
        let b = c[(i + 1) % 3];
        let ex = b[0] - a[0];
        let ey = b[1] - a[1];
        let len = (ex * ex + ey * ey).sqrt();
        let side = |p: Point3<T>| {
            let q = flat(p);
            (ex * (q[1] - a[1]) - ey * (q[0] - a[0])) / len
        };
        let mut next = Vec::with_capacity(poly.len() + 1);
        for k in 0..poly.len() {
            let p = poly[k];
            let q = poly[(k + 1) % poly.len()];
            let sp = side(p);
            let sq = side(q);
            let p_in = sp >= -tol;
            let q_in = sq >= -tol;
            if p_in {
                next.push(p);
            }
            if p_in != q_in {
                let w = sp / (sp - sq);
                next.push(p.lerp(q, w));
            }
        }
        poly = next;
    }
    if poly.is_empty() {
        return None;
    }
    let mut best = (poly[0], poly[0], T::zero());
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            let d = poly[i].distance(poly[j]);
            if d > best.2 {
                best = (poly[i], poly[j], d);
            }
        }
    }
    Some(Witness {
        start: best.0,
        end: best.1,
        kind: WitnessKind::Coplanar,
    })
}
