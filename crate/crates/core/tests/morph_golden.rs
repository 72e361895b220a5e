use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use knotmorph_core::corpus::{self, ITERATE_MORPH, ITERATE_MORPH_SAMPLES};
use knotmorph_core::intersect::{certify_isotopy, Verdict, DEFAULT_EPS};
use knotmorph_core::morph::{first_intersection_parameter, intersects_at, ScanSettings};
use knotmorph_core::surface::{find_generic_direction, safe_sweep_length};
use knotmorph_core::{Point3, SampledCurve};

// frozen after the first run at 64 samples x 16 v_steps, grid 64, tol 1e-6
const GOLDEN_BRACKET: [f64; 2] = [0.5418453216552734, 0.5418462753295898];

#[test]
fn unknot_to_figure_eight_transition_is_golden_and_first() {
    let doc = corpus::iterate_morph_session();
    let family = doc.morph(ITERATE_MORPH).unwrap().family(&doc, ITERATE_MORPH_SAMPLES).unwrap();
    let settings = ScanSettings {
        grid: 64,
        tol: 1e-6,
        v_steps: 16,
        eps: DEFAULT_EPS,
    };
    let t = first_intersection_parameter(&family, settings).unwrap().unwrap();
    assert!(!t.already_intersecting);
    assert_eq!([t.s_lo, t.s_hi], GOLDEN_BRACKET);

    // dense oracle: 10^4 uniform parameters; nothing true before the bracket,
    // and the first true point lands at or after it
    let n = 10_000;
    let start = Instant::now();
    let first_true = (0..=n)
        .into_par_iter()
        .map(|k| k as f64 / n as f64)
        .find_first(|&s| intersects_at(&family, s, settings.v_steps, settings.eps).unwrap().intersecting)
        .unwrap();
    assert!(first_true >= t.s_hi && first_true - t.s_hi < 1.0 / n as f64, "{first_true}");
    eprintln!("dense scan to {first_true} in {:?}", start.elapsed());
}

#[test]
fn certified_sweeps_stay_certified_for_smaller_eps() {
    let mut rng = ChaCha8Rng::seed_from_u64(288);
    for name in corpus::names() {
        let p = corpus::record(name).unwrap().polygon;
        let c = SampledCurve::from_polygon(&p, (8 * p.segment_count()).max(64)).unwrap();
        for _ in 0..5 {
            let dir = Point3::new(
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
            );
            let (d, _) = find_generic_direction(&p, dir, 1, 32).unwrap();
            let bound = safe_sweep_length(&p, d).unwrap();
            let moved = c.translated(d * if bound.is_finite() { 0.9 * bound } else { 1.0 });
            for eps in [1e-6, 1e-9, 1e-12, 0.0] {
                let cert = certify_isotopy(&c, &moved, 15, eps).unwrap();
                assert_eq!(cert.verdict, Verdict::Certified, "{name} at eps {eps}");
            }
        }
    }
}

#[test]
fn hundred_generic_sweeps_per_knot_are_empty_below_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    for name in corpus::names() {
        let p = corpus::record(name).unwrap().polygon;
        let c = SampledCurve::from_polygon(&p, (8 * p.segment_count()).max(64)).unwrap();
        for k in 0..100 {
            let dir = Point3::new(
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
            );
            let (d, _) = find_generic_direction(&p, dir, k, 32).unwrap();
            let bound = safe_sweep_length(&p, d).unwrap();
            let length = if bound.is_finite() { 0.9 * bound } else { 1.0 };
            let cert = certify_isotopy(&c, &c.translated(d * length), 15, DEFAULT_EPS).unwrap();
            assert!(cert.evidence.pairs.is_empty(), "{name}, direction {k}: {} pairs", cert.evidence.pairs.len());
        }
    }
}
