//! The bundled stick-knot corpus.

use crate::bezier::BezierCurve;
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::io::knot_file::{parse_stick_knot, parse_stick_knot_unchecked, KnotRecord};
use crate::io::session::{CurveKind, CurveSource, KnotEntry, MorphDefinition, SessionDocument};
use crate::point::Point3;
use crate::polygon::RefinementSequence;
use crate::surface::widest_sweep_direction;

/// Knots that pass input validation, as `(file name, contents)`.
pub const KNOTS: &[(&str, &str)] = &[
    ("unknot64", include_str!("../../../corpus/unknot64.knot")),
    ("fig8", include_str!("../../../corpus/fig8.knot")),
    ("square_pyramid", include_str!("../../../corpus/square_pyramid.knot")),
    ("one_crossing", include_str!("../../../corpus/one_crossing.knot")),
];

/// Deliberately invalid inputs.
pub const NEGATIVE: &[(&str, &str)] = &[("bad_collinear", include_str!("../../../corpus/bad_collinear.knot"))];

pub fn records() -> Vec<KnotRecord> {
    KNOTS
        .iter()
        .map(|(name, text)| parse_stick_knot(text).unwrap_or_else(|e| panic!("bundled knot {name}: {e}")))
        .collect()
}

pub fn record(name: &str) -> Result<KnotRecord> {
    if let Some((_, text)) = NEGATIVE.iter().find(|(n, _)| *n == name) {
        return parse_stick_knot_unchecked(text);
    }
    KNOTS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_stick_knot(text))
        .unwrap_or_else(|| Err(Error::Domain(format!("no bundled knot named {name:?}"))))
}

pub fn names() -> impl Iterator<Item = &'static str> {
    KNOTS.iter().map(|(n, _)| *n)
}

/// Figure-eight Bézier iterates 0 to 5, stacked `spacing` apart along z.
pub fn figure_stack(spacing: f64, m: usize) -> Result<Vec<(String, SampledCurve<f64>)>> {
    let base = record("fig8")?.polygon;
    let seq = RefinementSequence::new(base, 5);
    seq.iterates()
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let c = BezierCurve::from_polygon(p).sample(m)?;
            Ok((format!("bezier iterate {j}"), c.translated(Point3::new(0.0, 0.0, spacing * j as f64))))
        })
        .collect()
}

/// Name of the bundled morph from the last unknotted figure-eight iterate
/// to the first knotted one.
pub const ITERATE_MORPH: &str = "unknot_to_4_1";
pub const ITERATE_MORPH_FROM: usize = 3;
/// Sample count the preset is built and certified at.
pub const ITERATE_MORPH_SAMPLES: usize = 64;

/// Lift of the moving curves in the iterate morph: half the safe sweep
/// length of the fixed curve's chord polygon, along the widest of a fixed
/// set of directions. The surface at `s = 0` is then a certified sweep.
pub fn iterate_morph_lift() -> Point3<f64> {
    let p = record("fig8").expect("bundled knot").polygon;
    let seq = RefinementSequence::new(p, ITERATE_MORPH_FROM);
    let fixed = BezierCurve::from_polygon(seq.iterate(ITERATE_MORPH_FROM).expect("iterate"))
        .sample(ITERATE_MORPH_SAMPLES)
        .expect("bezier samples");
    let (d, len) = widest_sweep_direction(&fixed.chord_polygon(), LIFT_SEED, LIFT_CANDIDATES)
        .expect("some direction is generic");
    d * (0.5 * len)
}

pub const LIFT_SEED: u64 = 41;
pub const LIFT_CANDIDATES: usize = 256;

/// Session with the bundled unknot and figure-eight and the iterate morph.
pub fn iterate_morph_session() -> SessionDocument {
    let mut doc = SessionDocument::default();
    for name in ["unknot64", "fig8"] {
        doc.knots.push(KnotEntry::from_record(&record(name).expect("bundled knot")));
    }
    let lift = iterate_morph_lift();
    let source = |iterate: usize, offset: Point3<f64>| CurveSource {
        knot: "fig8".into(),
        curve: CurveKind::Bezier { iterate },
        offset,
        reversed: false,
    };
    doc.set_morph(MorphDefinition {
        name: ITERATE_MORPH.into(),
        fixed: source(ITERATE_MORPH_FROM, Point3::zero()),
        start: source(ITERATE_MORPH_FROM, lift),
        end: source(ITERATE_MORPH_FROM + 1, lift),
        extra: Default::default(),
    });
    doc
}
