use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use knotmorph_core::distance::polygon_curve_distance;
use knotmorph_core::{BezierCurve, BezierCurveF32, ControlPolygon, ControlPolygonF32, Point3, Point3F32, SampledCurve};

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Direct Bernstein sum, independent of de Casteljau's recursion.
fn bernstein(control: &[Point3], t: f64) -> Point3 {
    let n = control.len() - 1;
    control.iter().enumerate().fold(Point3::zero(), |acc, (i, &p)| {
        acc + p * (binomial(n, i) * t.powi(i as i32) * (1.0 - t).powi((n - i) as i32))
    })
}

#[test]
fn de_casteljau_matches_bernstein_sum_up_to_degree_20() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for degree in 1..=20 {
        let control: Vec<Point3> = (0..=degree)
            .map(|_| Point3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
            .collect();
        let curve = BezierCurve::from_polygon(&ControlPolygon::open(control.clone()).unwrap());
        for _ in 0..50 {
            let t: f64 = rng.gen_range(0.0..=1.0);
            let a = curve.eval(t).unwrap();
            let b = bernstein(&control, t);
            assert!(a.distance(b) <= 1e-9 * b.norm().max(1.0), "degree {degree}, t {t}");
        }
    }
}

#[test]
fn closed_curves_use_the_closure_point() {
    let square = vec![
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(-1.0, 0.0, 0.0),
        Point3::new(0.0, -1.0, 0.5),
    ];
    let curve = BezierCurve::from_polygon(&ControlPolygon::closed(square.clone()).unwrap());
    assert_eq!(curve.degree(), 4);
    let mut with_closure = square.clone();
    with_closure.push(square[0]);
    for k in 0..=16 {
        let t = k as f64 / 16.0;
        assert!(curve.eval(t).unwrap().distance(bernstein(&with_closure, t)) < 1e-12);
    }
    assert!(curve.eval(1.5).is_err());
}

#[test]
fn f32_core_agrees_with_f64() {
    let pts = [[0.0, 0.0, 0.0], [1.0, 2.0, 0.5], [2.0, -1.0, 1.0], [3.0, 0.5, 0.0]];
    let c64 = BezierCurve::from_polygon(&ControlPolygon::open(pts.iter().map(|&p| Point3::from_array(p)).collect()).unwrap());
    let c32 = BezierCurveF32::from_polygon(
        &ControlPolygonF32::open(pts.iter().map(|p| Point3F32::new(p[0] as f32, p[1] as f32, p[2] as f32)).collect())
            .unwrap(),
    );
    for k in 0..=10 {
        let t = k as f64 / 10.0;
        let a = c64.eval(t).unwrap();
        let b = c32.eval(t as f32).unwrap().cast::<f64>();
        assert!(a.distance(b) < 1e-5);
    }
}

#[test]
fn parabola_distance_is_one_half() {
    // the apex (1, 1) is 1/2 from the curve point (1, 1/2); nothing is farther
    let p = ControlPolygon::open(vec![Point3::zero(), Point3::new(1.0, 1.0, 0.0), Point3::new(2.0, 0.0, 0.0)]).unwrap();
    let c = BezierCurve::from_polygon(&p);
    for m in [256, 1024, 4096] {
        let d = polygon_curve_distance(&p, &c, m).unwrap();
        assert!((d - 0.5).abs() < 1e-3, "m = {m}: {d}");
    }
    // the sampled estimate never exceeds the true distance
    assert!(polygon_curve_distance(&p, &c, 300).unwrap() <= 0.5 + 1e-12);
}

#[test]
fn polygon_samples_contain_every_vertex() {
    let p = ControlPolygon::closed(vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(3.0, 0.0, 0.0),
        Point3::new(3.0, 0.1, 0.0),
        Point3::new(0.0, 1.0, 1.0),
        Point3::new(-1.0, 0.5, 0.0),
    ])
    .unwrap();
    for m in [5, 7, 13, 64] {
        let c = SampledCurve::from_polygon(&p, m).unwrap();
        assert_eq!(c.samples().len(), m + 1);
        for v in p.points() {
            assert!(c.samples().contains(v), "m = {m} misses {v:?}");
        }
        // samples move along the polygon monotonically, never backwards
        let mut seen = 0;
        for s in c.samples() {
            if let Some(i) = p.points().iter().position(|v| v == s) {
                assert!(i >= seen || (i == 0 && s == c.samples().last().unwrap()));
                seen = seen.max(i);
            }
        }
    }
    assert!(SampledCurve::from_polygon(&p, 4).is_err());
}
