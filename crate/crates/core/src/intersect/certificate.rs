use serde::{Deserialize, Serialize};

use crate::curve::SampledCurve;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::surface::{rule, triangulate};

use super::{self_intersections, IntersectionReport};

pub const CERTIFICATE_CAVEAT: &str = "certified at mesh resolution only; rerun at doubled \
resolution to confirm. A self-intersecting surface proves nothing about knot type.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The triangulated ruled surface is free of self-intersections, so the
    /// boundary knots are ambient isotopic (at this resolution).
    Certified,
    /// The surface self-intersects; the knots may or may not be equivalent.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub samples: usize,
    pub v_steps: usize,
}

#[derive(Clone, Debug)]
pub struct IsotopyCertificate<T> {
    pub verdict: Verdict,
    pub evidence: IntersectionReport<T>,
    pub resolution: Resolution,
}

/// Tests the ruled surface between `c1` and `c2` (the straight-line blend of
/// the two curves is the candidate isotopy) for self-intersection.
pub fn certify_isotopy<T: Scalar>(
    c1: &SampledCurve<T>,
    c2: &SampledCurve<T>,
    v_steps: usize,
    eps: T,
) -> Result<IsotopyCertificate<T>> {
    let surface = rule(c1, c2)?;
    let mesh = triangulate(&surface, v_steps)?;
    let evidence = self_intersections(&mesh, eps)?;
    let verdict = if evidence.is_empty() {
        Verdict::Certified
    } else {
        Verdict::Unknown
    };
    Ok(IsotopyCertificate {
        verdict,
        evidence,
        resolution: Resolution {
            samples: c1.intervals(),
            v_steps,
        },
    })
}
