//! Response bodies computed from a session document alone. The CLI builds
//! the same payloads, so anything the service returns can be reproduced
//! from a downloaded document.

use serde::{Deserialize, Serialize};

use knotmorph_core::curve::SampledCurve;
use knotmorph_core::intersect::{self_intersections, IntersectionReport};
use knotmorph_core::io::session::TransitionSummary;
use knotmorph_core::io::SessionDocument;
use knotmorph_core::morph::{ScanSettings, TransitionResult};
use knotmorph_core::surface::{rule, triangulate, TriangleMesh};
use knotmorph_core::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePayload {
    pub morph: String,
    pub s: f64,
    pub samples: usize,
    pub closed: bool,
    /// `x y z` per sample, `samples + 1` samples.
    pub points: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPayload {
    /// Triangle index pairs, `first < second`.
    pub pairs: Vec<[usize; 2]>,
    /// Six coordinates per pair: segment start then end.
    pub segments: Vec<f64>,
    pub grazing: Vec<[usize; 2]>,
    pub grazing_segments: Vec<f64>,
    pub tested_pairs: usize,
    pub excluded_adjacent: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshPayload {
    pub morph: String,
    pub s: f64,
    pub samples: usize,
    pub v_steps: usize,
    pub eps: f64,
    pub intersecting: bool,
    pub positions: Vec<f64>,
    pub indices: Vec<usize>,
    /// Grid `(u, v)` per vertex.
    pub uv: Vec<f64>,
    pub witnesses: WitnessPayload,
    pub curve_self_proximity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionPayload {
    pub summary: TransitionSummary,
    pub evaluations: usize,
    pub curve_self_proximity: Option<f64>,
    /// Witnesses at `s_hi`.
    pub witnesses: Option<WitnessPayload>,
}

fn flat(points: impl IntoIterator<Item = knotmorph_core::Point3>) -> Vec<f64> {
    points.into_iter().flat_map(|p| [p.x, p.y, p.z]).collect()
}

pub fn witness_payload(report: &IntersectionReport<f64>) -> WitnessPayload {
    let pairs = |list: &[knotmorph_core::intersect::IntersectingPair<f64>]| {
        list.iter().map(|p| [p.first, p.second]).collect()
    };
    let segments = |list: &[knotmorph_core::intersect::IntersectingPair<f64>]| {
        flat(list.iter().flat_map(|p| [p.witness.start, p.witness.end]))
    };
    WitnessPayload {
        pairs: pairs(&report.pairs),
        segments: segments(&report.pairs),
        grazing: pairs(&report.grazing),
        grazing_segments: segments(&report.grazing),
        tested_pairs: report.tested_pairs,
        excluded_adjacent: report.excluded_adjacent,
    }
}

fn moving_curve(doc: &SessionDocument, morph: &str, s: f64, samples: usize) -> Result<(SampledCurve<f64>, SampledCurve<f64>)> {
    let def = doc
        .morph(morph)
        .ok_or_else(|| Error::Domain(format!("no morph named {morph:?}")))?;
    let family = def.family(doc, samples)?;
    Ok((family.fixed().clone(), family.curve_at(s)?))
}

pub fn curve_payload(doc: &SessionDocument, morph: &str, s: f64, samples: usize) -> Result<CurvePayload> {
    let (_, c) = moving_curve(doc, morph, s, samples)?;
    Ok(CurvePayload {
        morph: morph.to_string(),
        s,
        samples,
        closed: c.is_closed(),
        points: flat(c.samples().iter().copied()),
    })
}

/// The triangulated ruled surface between the fixed curve and the moving
/// curve at `s`, with its self-intersection witnesses.
pub fn mesh_payload(doc: &SessionDocument, morph: &str, s: f64, samples: usize, v_steps: usize) -> Result<MeshPayload> {
    let (fixed, moving) = moving_curve(doc, morph, s, samples)?;
    let mesh: TriangleMesh<f64> = triangulate(&rule(&fixed, &moving)?, v_steps)?;
    let eps = doc.tolerances.eps;
    let report = self_intersections(&mesh, eps)?;
    Ok(MeshPayload {
        morph: morph.to_string(),
        s,
        samples,
        v_steps,
        eps,
        intersecting: !report.is_empty(),
        positions: flat(mesh.vertices.iter().copied()),
        indices: mesh.triangles.iter().flatten().copied().collect(),
        uv: mesh.provenance.iter().flatten().flatten().copied().collect(),
        witnesses: witness_payload(&report),
        curve_self_proximity: moving.self_proximity(),
    })
}

pub fn transition_payload(
    morph: &str,
    settings: ScanSettings<f64>,
    samples: usize,
    result: Option<&TransitionResult<f64>>,
    evaluations: usize,
) -> TransitionPayload {
    TransitionPayload {
        summary: TransitionSummary::new(morph, result, settings, samples),
        evaluations,
        curve_self_proximity: result.and_then(|r| r.curve_self_proximity),
        witnesses: result.map(|r| witness_payload(&r.witnesses)),
    }
}
