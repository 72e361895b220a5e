use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use knotmorph_core::distance::{polygon_curve_distance, MIN_DISTANCE_SAMPLES};
use knotmorph_core::intersect::{certify_isotopy, self_intersections, Verdict};
use knotmorph_core::io::{export_mesh, load_session, parse_stick_knot, parse_stick_knot_unchecked, serialize_stick_knot};
use knotmorph_core::io::session::{
    sample_source, CurveKind, CurveSource, KnotEntry, MorphDefinition, ResolutionSettings, ResultEntry, Tolerances,
};
use knotmorph_core::io::{save_session, KnotRecord, MeshFormat, SessionDocument};
use knotmorph_core::morph::{first_intersection_parameter, ScanSettings};
use knotmorph_core::polygon::RefinementSequence;
use knotmorph_core::surface::{find_generic_direction, rule, safe_sweep_length, triangulate, widest_sweep_direction};
use knotmorph_core::{BezierCurve, ControlPolygon, IntersectionReport, Point3, SampledCurve, TriangleMesh};
use knotmorph_service::payload::{mesh_payload, transition_payload};

use crate::report::{CliError, Report};
use crate::{Cli, Command, Format, Resolution, Scan};

const DIRECTION_ATTEMPTS: usize = 64;
const LIFT_CANDIDATES: usize = knotmorph_core::corpus::LIFT_CANDIDATES;

struct Ctx {
    json: bool,
    out: Option<PathBuf>,
    format: MeshFormat,
    seed: u64,
}

pub fn run(cli: Cli) -> Result<String, CliError> {
    let seed = match std::env::var("KNOTMORPH_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("KNOTMORPH_SEED must be an unsigned integer, got {v:?}")))?,
        Err(_) => cli.seed,
    };
    let ctx = Ctx {
        json: cli.json,
        out: cli.out,
        format: match cli.format {
            Format::Obj => MeshFormat::Obj,
            Format::Ply => MeshFormat::Ply,
        },
        seed,
    };
    match cli.command {
        Command::Validate { knot } => validate(&ctx, &knot),
        Command::Refine { knot, iters, samples } => refine(&ctx, &knot, iters, samples),
        Command::Sweep { knot, dir, length, resolution } => sweep(&ctx, &knot, &dir, &length, &resolution),
        Command::Rule { knot_a, knot_b, resolution } => rule_cmd(&ctx, &knot_a, &knot_b, &resolution),
        Command::Morph { knot_a, knot_b, resolution, scan } => morph(&ctx, &knot_a, &knot_b, &resolution, &scan),
        Command::IterateMorph { knot, from, resolution, scan } => iterate_morph(&ctx, &knot, from, &resolution, &scan),
        Command::Replay { session, morph, s, samples, v_steps } => replay(&ctx, &session, &morph, s, samples, v_steps),
        Command::Serve { port, host } => serve(&host, port),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load(path: &Path) -> Result<KnotRecord, CliError> {
    Ok(parse_stick_knot(&read(path)?)?)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "knot".into())
}

fn parse_vec3(text: &str, what: &str) -> Result<Point3, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("{what} must be x,y,z, got {text:?}")))?;
    match parts[..] {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Point3::new(x, y, z)),
        _ => Err(CliError::Usage(format!("{what} must be three finite numbers x,y,z, got {text:?}"))),
    }
}

fn vec3(p: Point3) -> Value {
    json!([p.x, p.y, p.z])
}

fn check_resolution(r: &Resolution) -> Result<(), CliError> {
    if r.v_steps == 0 || r.v_steps > 4096 {
        return Err(CliError::Usage(format!("--vsteps must lie in 1..=4096, got {}", r.v_steps)));
    }
    if !(r.eps > 0.0 && r.eps.is_finite()) {
        return Err(CliError::Usage(format!("--eps must be positive, got {}", r.eps)));
    }
    if let Some(m) = r.samples {
        if !(8..=1 << 16).contains(&m) {
            return Err(CliError::Usage(format!("--samples must lie in 8..=65536, got {m}")));
        }
    }
    Ok(())
}

fn check_scan(s: &Scan) -> Result<(), CliError> {
    if s.grid < knotmorph_core::morph::MIN_GRID || s.grid > 1 << 16 {
        return Err(CliError::Usage(format!(
            "--grid must lie in {}..=65536, got {}",
            knotmorph_core::morph::MIN_GRID,
            s.grid
        )));
    }
    if !(s.tol > 0.0 && s.tol < 1.0) {
        return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {}", s.tol)));
    }
    Ok(())
}

fn default_samples(polys: &[&ControlPolygon]) -> usize {
    polys.iter().map(|p| 8 * p.segment_count()).max().unwrap_or(0).max(64)
}

fn diagonal(p: &ControlPolygon) -> f64 {
    let (lo, hi) = p.bounding_box();
    lo.distance(hi)
}

/// Generic direction near `dir` and the safe sweep length along it. A
/// projection without crossings bounds nothing, so the bounding-box
/// diagonal stands in for the infinite bound.
fn safe_direction(ctx: &Ctx, p: &ControlPolygon, dir: Point3) -> Result<(Point3, usize, f64, f64), CliError> {
    let (d, crossings) = find_generic_direction(p, dir, ctx.seed, DIRECTION_ATTEMPTS)?;
    let bound = safe_sweep_length(p, d)?;
    let usable = if bound.is_finite() { bound } else { diagonal(p) };
    Ok((d, crossings.len(), bound, usable))
}

fn export(ctx: &Ctx, name: &str, mesh: &TriangleMesh, report: &IntersectionReport) -> Result<Vec<String>, CliError> {
    let Some(dir) = &ctx.out else { return Ok(Vec::new()) };
    std::fs::create_dir_all(dir)?;
    let written = export_mesh(mesh, Some(report), ctx.format, &dir.join(name))?;
    Ok(written.iter().map(|p| p.display().to_string()).collect())
}

fn verdict_line(report: &IntersectionReport) -> String {
    if report.is_empty() {
        if report.grazing.is_empty() {
            "Certified".to_string()
        } else {
            format!("Certified ({} grazing pairs below eps)", report.grazing.len())
        }
    } else {
        format!("Unknown (self-intersecting): {} witness pairs", report.pairs.len())
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Certified => "certified",
        Verdict::Unknown => "unknown",
    }
}

fn validate(ctx: &Ctx, path: &Path) -> Result<String, CliError> {
    let record = parse_stick_knot_unchecked(&read(path)?)?;
    let verdict = record.polygon.validate(true);
    let mut r = Report::new(ctx.json, "validate");
    r.field("knot", record.display_name())
        .field("points", record.polygon.len())
        .field("closed", record.polygon.is_closed())
        .field("valid", verdict.passed())
        .field("violations", serde_json::to_value(&verdict.violations).expect("violations serialize"));
    r.line(format!(
        "knot: {} ({} points, {})",
        record.display_name(),
        record.polygon.len(),
        if record.polygon.is_closed() { "closed" } else { "open" }
    ));
    for v in &verdict.violations {
        r.line(format!("violation: {v}"));
    }
    if verdict.passed() {
        r.line("valid");
        Ok(r.render())
    } else {
        r.line(format!("invalid: {} violations", verdict.violations.len()));
        Err(CliError::Failed { output: r.render() })
    }
}

fn refine(ctx: &Ctx, path: &Path, iters: usize, samples: usize) -> Result<String, CliError> {
    if iters > 10 {
        return Err(CliError::Usage(format!("--iters must be at most 10, got {iters}")));
    }
    if !(MIN_DISTANCE_SAMPLES..=1 << 20).contains(&samples) {
        return Err(CliError::Usage(format!(
            "--samples must lie in {MIN_DISTANCE_SAMPLES}..=1048576, got {samples}"
        )));
    }
    let record = load(path)?;
    let base = &record.polygon;
    let seq = RefinementSequence::new(base.clone(), iters);
    let mut r = Report::new(ctx.json, "refine");
    r.line(format!("knot: {}", record.display_name()));
    r.line(format!("{:>2} {:>8} {:>8} {:>22}", "j", "points", "segments", "distance"));
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for (j, q) in seq.iterates().iter().enumerate() {
        let d = polygon_curve_distance(base, &BezierCurve::from_polygon(q), samples)?;
        r.line(format!("{j:>2} {:>8} {:>8} {d:>22.16e}", q.len(), q.segment_count()));
        rows.push(json!({"j": j, "points": q.len(), "segments": q.segment_count(), "distance": d}));
        if let Some(dir) = &ctx.out {
            std::fs::create_dir_all(dir)?;
            let file = dir.join(format!("{}.iter{j}.knot", stem(path)));
            let iterate = KnotRecord {
                name: Some(format!("{} iterate {j}", record.display_name())),
                claimed_type: record.claimed_type.clone(),
                polygon: q.clone(),
                derived: j > 0,
            };
            std::fs::write(&file, serialize_stick_knot(&iterate))?;
            files.push(file.display().to_string());
        }
    }
    r.field("knot", record.display_name())
        .field("samples", samples)
        .field("iterates", rows)
        .field("exports", files);
    Ok(r.render())
}

fn sweep(ctx: &Ctx, path: &Path, dir: &str, length: &str, res: &Resolution) -> Result<String, CliError> {
    check_resolution(res)?;
    let requested = parse_vec3(dir, "--dir")?;
    let fixed_length = match length {
        "auto" => None,
        text => match text.parse::<f64>() {
            Ok(l) if l > 0.0 && l.is_finite() => Some(l),
            _ => return Err(CliError::Usage(format!("--length must be positive or auto, got {text:?}"))),
        },
    };
    let record = load(path)?;
    let p = &record.polygon;
    let (d, crossings, bound, usable) = safe_direction(ctx, p, requested)?;
    let length = fixed_length.unwrap_or(0.99 * usable);
    let m = res.samples.unwrap_or_else(|| default_samples(&[p]));
    let c = SampledCurve::from_polygon(p, m)?;
    let moved = c.translated(d * length);
    let cert = certify_isotopy(&c, &moved, res.v_steps, res.eps)?;
    let mesh = triangulate(&rule(&c, &moved)?, res.v_steps)?;
    let files = export(ctx, &format!("{}_sweep", stem(path)), &mesh, &cert.evidence)?;

    let mut r = Report::new(ctx.json, "sweep");
    r.line(format!("knot: {}", record.display_name()))
        .line(format!("direction: {} {} {}", d.x, d.y, d.z))
        .line(format!("crossings: {crossings}"))
        .line(format!("safe sweep length: {bound}"))
        .line(format!("length: {length}"))
        .line(format!("mesh: {} samples x {} v_steps, {} triangles", m, res.v_steps, mesh.triangles.len()));
    for f in &files {
        r.line(format!("wrote {f}"));
    }
    r.line(verdict_line(&cert.evidence));
    r.field("knot", record.display_name())
        .field("direction", vec3(d))
        .field("crossings", crossings)
        .field("safe_sweep_length", if bound.is_finite() { json!(bound) } else { Value::Null })
        .field("length", length)
        .field("samples", m)
        .field("v_steps", res.v_steps)
        .field("eps", res.eps)
        .field("verdict", verdict_name(cert.verdict))
        .field("witness_pairs", cert.evidence.pairs.len())
        .field("grazing_pairs", cert.evidence.grazing.len())
        .field("exports", files);
    Ok(r.render())
}

fn rule_cmd(ctx: &Ctx, a: &Path, b: &Path, res: &Resolution) -> Result<String, CliError> {
    check_resolution(res)?;
    let (ra, rb) = (load(a)?, load(b)?);
    let m = res.samples.unwrap_or_else(|| default_samples(&[&ra.polygon, &rb.polygon]));
    let c1 = SampledCurve::from_polygon(&ra.polygon, m)?;
    let c2 = SampledCurve::from_polygon(&rb.polygon, m)?;
    let cert = certify_isotopy(&c1, &c2, res.v_steps, res.eps)?;
    let mesh = triangulate(&rule(&c1, &c2)?, res.v_steps)?;
    let files = export(ctx, &format!("{}_{}_rule", stem(a), stem(b)), &mesh, &cert.evidence)?;

    let mut r = Report::new(ctx.json, "rule");
    r.line(format!("knots: {} -> {}", ra.display_name(), rb.display_name()))
        .line(format!("mesh: {} samples x {} v_steps, {} triangles", m, res.v_steps, mesh.triangles.len()))
        .line(format!(
            "tested pairs: {}, adjacent excluded: {}, grazing: {}",
            cert.evidence.tested_pairs,
            cert.evidence.excluded_adjacent,
            cert.evidence.grazing.len()
        ));
    for f in &files {
        r.line(format!("wrote {f}"));
    }
    r.line(verdict_line(&cert.evidence));
    r.field("knots", json!([ra.display_name(), rb.display_name()]))
        .field("samples", m)
        .field("v_steps", res.v_steps)
        .field("eps", res.eps)
        .field("verdict", verdict_name(cert.verdict))
        .field("witness_pairs", cert.evidence.pair_indices().iter().map(|&(i, j)| json!([i, j])).collect::<Vec<_>>())
        .field("grazing_pairs", cert.evidence.grazing.len())
        .field("tested_pairs", cert.evidence.tested_pairs)
        .field("excluded_adjacent", cert.evidence.excluded_adjacent)
        .field("caveat", knotmorph_core::intersect::CERTIFICATE_CAVEAT)
        .field("exports", files);
    Ok(r.render())
}

/// Lift for a morph whose fixed curve has chord polygon `fixed`: half the
/// safe sweep length along the widest candidate direction.
fn lift(ctx: &Ctx, spec: &str, fixed: &ControlPolygon) -> Result<Point3, CliError> {
    if spec != "auto" {
        return parse_vec3(spec, "--lift");
    }
    let (d, bound) = widest_sweep_direction(fixed, ctx.seed, LIFT_CANDIDATES)?;
    let usable = if bound.is_finite() { bound } else { diagonal(fixed) };
    Ok(d * (0.5 * usable))
}

/// Session holding the morph `label` over `knots`, at the run's settings.
/// Sources are `(knot index, curve)` for the fixed, start and end curves.
fn morph_session(
    knots: &[&KnotRecord],
    label: &str,
    [fixed, start, end]: [(usize, CurveKind); 3],
    lift: Point3,
    samples: usize,
    res: &Resolution,
    scan: &Scan,
) -> SessionDocument {
    let mut doc = SessionDocument::default();
    for record in knots {
        let mut entry = KnotEntry::from_record(record);
        if doc.knot(&entry.name).is_some() {
            entry.name = format!("{}_b", entry.name);
        }
        doc.knots.push(entry);
    }
    let source = |(knot, curve): (usize, CurveKind), offset: Point3| CurveSource {
        knot: doc.knots[knot].name.clone(),
        curve,
        offset,
        reversed: false,
    };
    let def = MorphDefinition {
        name: label.to_string(),
        fixed: source(fixed, Point3::zero()),
        start: source(start, lift),
        end: source(end, lift),
        extra: Default::default(),
    };
    doc.set_morph(def);
    doc.resolution = ResolutionSettings {
        samples,
        v_steps: res.v_steps,
    };
    doc.tolerances = Tolerances {
        eps: res.eps,
        tol: scan.tol,
        grid: scan.grid,
    };
    doc
}

fn scan_report(ctx: &Ctx, command: &str, mut doc: SessionDocument, label: &str, lift: Point3) -> Result<String, CliError> {
    let m = doc.resolution.samples;
    let settings = doc.scan_settings();
    let family = doc
        .morph(label)
        .expect("morph was just defined")
        .family(&doc, m)?;
    let result = first_intersection_parameter(&family, settings)?;
    let mut r = Report::new(ctx.json, command);
    r.line(format!("morph: {label}"))
        .line(format!("lift: {} {} {}", lift.x, lift.y, lift.z))
        .line(format!(
            "mesh: {} samples x {} v_steps; grid {}, tol {}",
            m, settings.v_steps, settings.grid, settings.tol
        ));
    let mut files = Vec::new();
    match &result {
        None => {
            r.line("no self-intersection on the grid");
        }
        Some(t) if t.already_intersecting => {
            r.line(format!("self-intersecting at s = 0: {} witness pairs", t.witnesses.pairs.len()));
        }
        Some(t) => {
            r.line(format!("bracket: [{}, {}]", t.s_lo, t.s_hi));
            r.line(format!("s* ~ {}", 0.5 * (t.s_lo + t.s_hi)));
            r.line(format!("witness pairs at s_hi: {}", t.witnesses.pairs.len()));
            if let Some(prox) = t.curve_self_proximity {
                r.line(format!("moving curve self-proximity at s_hi: {prox}"));
            }
            for (tag, s) in [("s_lo", t.s_lo), ("s_hi", t.s_hi)] {
                if ctx.out.is_some() {
                    let moving = family.curve_at(s)?;
                    let mesh = triangulate(&rule(family.fixed(), &moving)?, settings.v_steps)?;
                    let report = self_intersections(&mesh, settings.eps)?;
                    files.extend(export(ctx, &format!("{label}_{tag}"), &mesh, &report)?);
                }
            }
        }
    }
    let evaluations = result.as_ref().map_or(settings.grid + 1, |t| t.evaluations);
    let payload = transition_payload(label, settings, m, result.as_ref(), evaluations);
    if let Some(dir) = &ctx.out {
        doc.results.push(ResultEntry::Transition(payload.summary.clone()));
        let path = dir.join(format!("{label}.session.json"));
        save_session(&doc, &path)?;
        files.push(path.display().to_string());
    }
    for f in &files {
        r.line(format!("wrote {f}"));
    }
    r.field("lift", vec3(lift))
        .field("transition", serde_json::to_value(&payload).expect("payload serializes"))
        .field("exports", files);
    Ok(r.render())
}

fn morph(ctx: &Ctx, a: &Path, b: &Path, res: &Resolution, scan: &Scan) -> Result<String, CliError> {
    check_resolution(res)?;
    check_scan(scan)?;
    let (ra, rb) = (load(a)?, load(b)?);
    let m = res.samples.unwrap_or_else(|| default_samples(&[&ra.polygon, &rb.polygon]));
    let l = lift(ctx, &scan.lift, &ra.polygon)?;
    let label = format!("{}_{}", stem(a), stem(b));
    let p = CurveKind::Polygon;
    let doc = morph_session(&[&ra, &rb], &label, [(0, p), (0, p), (1, p)], l, m, res, scan);
    scan_report(ctx, "morph", doc, &label, l)
}

fn iterate_morph(ctx: &Ctx, path: &Path, from: usize, res: &Resolution, scan: &Scan) -> Result<String, CliError> {
    check_resolution(res)?;
    check_scan(scan)?;
    if from > 8 {
        return Err(CliError::Usage(format!("--from must be at most 8, got {from}")));
    }
    let record = load(path)?;
    let m = res.samples.unwrap_or_else(|| default_samples(&[&record.polygon]));
    let j = CurveKind::Bezier { iterate: from };
    let fixed = sample_source(&record.polygon, j, m)?;
    let l = lift(ctx, &scan.lift, &fixed.chord_polygon())?;
    let label = format!("{}_iter{}-{}", stem(path), from, from + 1);
    let next = CurveKind::Bezier { iterate: from + 1 };
    let doc = morph_session(&[&record], &label, [(0, j), (0, j), (0, next)], l, m, res, scan);
    scan_report(ctx, "iterate-morph", doc, &label, l)
}

fn replay(
    ctx: &Ctx,
    path: &Path,
    morph: &str,
    s: Option<f64>,
    samples: Option<usize>,
    v_steps: Option<usize>,
) -> Result<String, CliError> {
    if let Some(s) = s {
        if !(0.0..=1.0).contains(&s) {
            return Err(CliError::Usage(format!("--s must lie in [0, 1], got {s}")));
        }
    }
    if samples.is_some_and(|m| !(8..=1 << 16).contains(&m)) || v_steps.is_some_and(|v| !(1..=4096).contains(&v)) {
        return Err(CliError::Usage("--samples must lie in 8..=65536 and --vsteps in 1..=4096".into()));
    }
    let doc = load_session(path)?;
    let m = samples.unwrap_or(doc.resolution.samples);
    let v = v_steps.unwrap_or(doc.resolution.v_steps);
    let mut r = Report::new(ctx.json, "replay");
    r.line(format!("morph: {morph} ({m} samples x {v} v_steps)"));
    match s {
        Some(s) => {
            let mesh = mesh_payload(&doc, morph, s, m, v)?;
            r.line(format!("s = {s}: {} triangles", mesh.indices.len() / 3));
            r.line(if mesh.intersecting {
                format!("Unknown (self-intersecting): {} witness pairs", mesh.witnesses.pairs.len())
            } else {
                "no self-intersection".to_string()
            });
            r.field("mesh", serde_json::to_value(&mesh).expect("payload serializes"));
        }
        None => {
            let def = doc
                .morph(morph)
                .ok_or_else(|| CliError::Usage(format!("no morph named {morph:?} in the session")))?;
            let family = def.family(&doc, m)?;
            let settings = ScanSettings { v_steps: v, ..doc.scan_settings() };
            let result = first_intersection_parameter(&family, settings)?;
            let evaluations = result.as_ref().map_or(settings.grid + 1, |t| t.evaluations);
            let payload = transition_payload(morph, settings, m, result.as_ref(), evaluations);
            match payload.summary.bracket {
                Some([lo, hi]) => r.line(format!("bracket: [{lo}, {hi}]")),
                None => r.line("no self-intersection on the grid"),
            };
            r.field("transition", serde_json::to_value(&payload).expect("payload serializes"));
        }
    }
    Ok(r.render())
}

fn serve(host: &str, port: u16) -> Result<String, CliError> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port)).await?;
        println!("listening on http://{}", listener.local_addr()?);
        knotmorph_service::serve(listener).await
    })?;
    Ok(String::new())
}
