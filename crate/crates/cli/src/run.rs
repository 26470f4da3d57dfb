use std::path::Path;

use foliate_core::decomposition::{enforce_condition5, validate as validate_scene, DecompositionComplex, GLOBAL};
use foliate_core::denjoy::{
    blowup_circle_map, blowup_scene, box_compatibility, rotation_trace, verify_blowup, wandering_audit, BlowupLocus,
    WeightRule,
};
use foliate_core::foliation::{c0_distance, uniform_ts};
use foliate_core::measure::{
    smooth_measured_scene, tischler_fibration, ClosedOneForm, Cumulative, MeasureKind, TransverseMeasure,
};
use foliate_core::smoothing::{globally_smooth, smooth_in_t};
use foliate_core::{tolerance, LeafFamily};
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{read, write, write_csv, write_json, Check, CliError, Run};
use crate::scene::{family_of, generate as build, load, SceneFile};
use crate::{BlowupArgs, CircleArgs, GenerateArgs, MeasureArgs, SmoothArgs, TischlerArgs, ValidateArgs};

/// Bound on the holonomy change across maximal faces during smoothing.
const FACE_DEFECT: f64 = 1e-6;
/// Bound on the residuals of the measure smoothing.
const MEASURE_RESIDUAL: f64 = 1e-9;
/// Bound on the distance between the rotation estimate and the rotation parameter.
const ROTATION_ERROR: f64 = 1e-3;
/// Iterates followed by the wandering-gap audit.
const AUDIT_ITERATIONS: usize = 10_000;

fn condition_checks(scene: &DecompositionComplex) -> (Vec<Check>, Value) {
    let report = validate_scene(scene);
    let checks = report
        .conditions
        .iter()
        .map(|c| Check::flag(format!("condition ({})", c.condition), c.passed))
        .collect();
    (checks, json!(report))
}

fn save_scene(out: &Path, name: &str, scene: &SceneFile, run: &mut Run) -> Result<(), CliError> {
    write(&out.join(name), &scene.to_json())?;
    run.artifacts.push(name.into());
    Ok(())
}

pub fn validate(a: &ValidateArgs, out: &Path) -> Result<Run, CliError> {
    let mut run = Run::default();
    match load(&a.scene)? {
        SceneFile::Torus(c) => {
            let (checks, report) = condition_checks(&c);
            let mut results = json!({ "kind": "torus", "boxes": c.boxes.len(), "report": report });
            if a.enforce {
                let (fixed, enforced) = enforce_condition5(&c)?;
                let (after, after_report) = condition_checks(&fixed);
                results["enforcement"] = json!({ "report": enforced, "after": after_report });
                results["boxes_after"] = json!(fixed.boxes.len());
                save_scene(out, "enforced.json", &SceneFile::Torus(fixed), &mut run)?;
                run.checks = after;
            } else {
                run.checks = checks;
            }
            if let Some(f) = c.global_family() {
                run.checks.push(Check::flag("global family", f.validate().is_ok()));
            }
            run.results = results;
        }
        SceneFile::Box(b) => {
            let valid = b.family.validate();
            run.results = json!({
                "kind": b.kind,
                "base": b.family.base(),
                "leaves": b.family.leaf_count(),
                "horizontal_deviation": b.family.horizontal_deviation(),
                "error": valid.as_ref().err().map(ToString::to_string),
            });
            run.checks.push(Check::flag("leaf family", valid.is_ok()));
        }
    }
    Ok(run)
}

#[derive(Serialize)]
struct SweepRow {
    epsilon: f64,
    achieved: f64,
    retries: usize,
}

pub fn smooth(a: &SmoothArgs, out: &Path) -> Result<Run, CliError> {
    let scene = load(&a.scene)?;
    let mut run = Run::default();
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for (k, &eps) in a.epsilon.iter().enumerate() {
        let (row, entry, smoothed) = match &scene {
            SceneFile::Torus(c) => {
                let s = globally_smooth(c, eps)?;
                run.checks.push(Check::at_most(format!("C0 distance at epsilon {eps}"), s.achieved, eps));
                run.checks.push(Check::at_most(
                    format!("face holonomy change at epsilon {eps}"),
                    s.face_defect(),
                    FACE_DEFECT,
                ));
                let entry = json!({
                    "epsilon": eps,
                    "achieved": s.achieved,
                    "internal_epsilon": s.internal_epsilon,
                    "retries": s.retries,
                    "box_distances": s.box_distances,
                    "face_defects": s.face_defects,
                    "stages": s.stages,
                });
                let row = SweepRow { epsilon: eps, achieved: s.achieved, retries: s.retries };
                (row, entry, SceneFile::Torus(s.scene))
            }
            SceneFile::Box(b) => {
                let s = smooth_in_t(&b.family, eps, &[])?;
                let residual = s.formula_residual(&b.family);
                run.checks.push(Check::at_most(format!("C0 distance at epsilon {eps}"), s.achieved, eps));
                run.checks.push(Check::at_most(
                    format!("interpolation formula at epsilon {eps}"),
                    residual,
                    tolerance::FORMULA,
                ));
                let entry = json!({
                    "epsilon": eps,
                    "achieved": s.achieved,
                    "retries": s.retries,
                    "partition": s.partition.cuts(),
                    "formula_residual": residual,
                });
                let row = SweepRow { epsilon: eps, achieved: s.achieved, retries: s.retries };
                let mut smoothed = b.clone();
                smoothed.family = s.family;
                (row, entry, SceneFile::Box(smoothed))
            }
        };
        save_scene(out, &format!("smoothed-{k}.json"), &smoothed, &mut run)?;
        rows.push(row);
        runs.push(entry);
    }
    write_csv(&out.join("smooth.csv"), &rows)?;
    run.artifacts.push("smooth.csv".into());
    run.results = json!({ "runs": runs });
    Ok(run)
}

#[derive(Serialize)]
struct BlowupRow {
    total_weight: f64,
    used_weight: f64,
    achieved: f64,
    retries: usize,
}

fn packet(base: foliate_core::BaseDomain, leaves: usize, shear: f64) -> Result<LeafFamily, CliError> {
    Ok(LeafFamily::from_fn(base, uniform_ts(leaves), [0, 0], move |s, x, _| {
        s + shear * s * (1.0 - s) * (std::f64::consts::TAU * x).sin()
    })?)
}

pub fn blowup(a: &BlowupArgs, out: &Path) -> Result<Run, CliError> {
    let scene = load(&a.scene)?.torus()?;
    let global = scene
        .global_family()
        .ok_or_else(|| CliError::Malformed("scene has no global family".into()))?;
    let base = *global.base();
    let horizontal = global.horizontal_deviation() <= tolerance::FORMULA;
    let mut points = a.point.clone();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let packets = points
        .iter()
        .map(|_| packet(base, a.packet_leaves, a.packet_shear))
        .collect::<Result<Vec<_>, _>>()?;
    let mut run = Run::default();
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for (k, &total) in a.weights.iter().enumerate() {
        let share = total / points.len() as f64;
        let locus = BlowupLocus::new(points.iter().map(|&z| (z, share)).collect())?;
        let blown = blowup_scene(&scene, &locus, &packets, a.epsilon)?;
        let report = verify_blowup(&scene, &blown.scene, &blown.data);
        // per-box blowups are defined for horizontal boxes only
        let compat = if horizontal { Some(box_compatibility(&scene, &blown, &packets)?) } else { None };
        for c in &report.checks {
            run.checks.push(Check {
                name: format!("property ({}) {} at weight {total}", c.property, c.name),
                passed: c.passed,
                value: Some(c.defect),
                bound: None,
            });
        }
        if let Some(compat) = &compat {
            let worst = compat.iter().map(|c| c.1).fold(0.0, f64::max);
            run.checks.push(Check::at_most(
                format!("per-box compatibility at weight {total}"),
                worst,
                tolerance::BOX_COMPATIBILITY,
            ));
        }
        run.checks.push(Check::at_most(format!("C0 distance at weight {total}"), blown.achieved, a.epsilon));
        let used = blown.locus.total_weight();
        rows.push(BlowupRow { total_weight: total, used_weight: used, achieved: blown.achieved, retries: blown.retries });
        runs.push(json!({
            "total_weight": total,
            "locus": blown.locus.schedule.entries(),
            "achieved": blown.achieved,
            "retries": blown.retries,
            "box_distances": blown.box_distances,
            "box_compatibility": compat,
            "stages": blown.stages,
            "collapse": blown.data.summary(),
            "verification": report,
        }));
        save_scene(out, &format!("blown-{k}.json"), &SceneFile::Torus(blown.scene), &mut run)?;
    }
    // distances must not grow as the total weight shrinks
    let mut by_weight: Vec<&BlowupRow> = rows.iter().collect();
    by_weight.sort_by(|x, y| y.total_weight.total_cmp(&x.total_weight));
    let growth = by_weight
        .windows(2)
        .map(|w| w[1].achieved - w[0].achieved)
        .fold(0.0, f64::max);
    run.checks.push(Check::at_most("distance monotone in total weight", growth, tolerance::FORMULA));
    write_csv(&out.join("blowup.csv"), &rows)?;
    run.artifacts.push("blowup.csv".into());
    run.results = json!({ "points": points, "runs": runs });
    Ok(run)
}

pub fn tischler(a: &TischlerArgs, _out: &Path) -> Result<Run, CliError> {
    let form = ClosedOneForm::new(a.coefficients.clone())?;
    let fib = tischler_fibration(&form, a.epsilon)?;
    Ok(Run {
        checks: vec![
            Check::at_most("kernel angle", fib.angle_defect, a.epsilon),
            Check::flag("closed leaves certified", fib.certificate.verified),
        ],
        results: json!(fib),
        artifacts: Vec::new(),
    })
}

fn default_stride(iterations: usize) -> usize {
    let mut s = (iterations / 1000).max(1);
    while !iterations.is_multiple_of(s) {
        s -= 1;
    }
    s
}

pub fn circle(a: &CircleArgs, out: &Path) -> Result<Run, CliError> {
    let stride = match a.stride {
        None => default_stride(a.iterations),
        Some(s) if s > 0 && a.iterations.is_multiple_of(s) => s,
        Some(s) => {
            return Err(CliError::Malformed(format!(
                "stride {s} does not divide {} iterations",
                a.iterations
            )))
        }
    };
    let lift = blowup_circle_map(a.alpha, a.orbit, WeightRule::InverseSquare { total: a.total_weight })?;
    let (estimate, samples) = rotation_trace(&lift, a.iterations, stride)?;
    let target = a.alpha.rem_euclid(1.0);
    let d = (estimate.value - target).abs();
    let error = d.min(1.0 - d);
    let gap = lift.gaps()[a.orbit];
    let audit = wandering_audit(&lift, gap, AUDIT_ITERATIONS.min(a.iterations));
    write_csv(&out.join("rotation.csv"), &samples)?;
    Ok(Run {
        checks: vec![
            Check::at_most("rotation estimate against alpha", error, ROTATION_ERROR),
            Check::flag("gap at the orbit point 0 wanders", audit.wandering()),
        ],
        results: json!({
            "stride": stride,
            "knots": lift.knots().len(),
            "estimate": estimate,
            "error": error,
            "wandering": audit,
        }),
        artifacts: vec!["rotation.csv".into()],
    })
}

#[derive(Serialize)]
struct TransversalRow {
    z: f64,
    input: f64,
    smoothed: f64,
}

pub fn measure(a: &MeasureArgs, out: &Path) -> Result<Run, CliError> {
    let scene = load(&a.scene)?.torus()?;
    let mu = match &a.measure {
        Some(path) => {
            let m: TransverseMeasure =
                serde_json::from_str(&read(path)?).map_err(|e| CliError::Malformed(e.to_string()))?;
            TransverseMeasure::new(m.kind, m.cumulative)?
        }
        None => TransverseMeasure::new(MeasureKind::Leafwise, Cumulative::identity())?,
    };
    let s = smooth_measured_scene(&scene, &mu, a.subsamples)?;
    let rows: Vec<TransversalRow> = (0..=100)
        .map(|k| {
            let z = k as f64 / 100.0;
            TransversalRow { z, input: s.transversal.h.eval(z), smoothed: s.transversal.g.eval(z) }
        })
        .collect();
    write_csv(&out.join("transversal.csv"), &rows)?;
    write_json(&out.join("measure.json"), &s.measure)?;
    Ok(Run {
        checks: vec![
            Check::at_most("invariance after smoothing", s.invariance_after, MEASURE_RESIDUAL),
            Check::at_most("spline on vertical edges", s.spline_residual, MEASURE_RESIDUAL),
            Check::at_most("face holonomy conjugacy", s.holonomy_defect, MEASURE_RESIDUAL),
            Check::at_most("extension into boxes", s.extension_residual, MEASURE_RESIDUAL),
            Check::flag("leaves unchanged", s.scene.families.get(GLOBAL) == scene.families.get(GLOBAL)),
        ],
        results: json!({
            "reference": s.reference,
            "invariance_before": s.invariance_before,
            "invariance_after": s.invariance_after,
            "spline_residual": s.spline_residual,
            "holonomy_defect": s.holonomy_defect,
            "extension_residual": s.extension_residual,
            "stages": s.stages,
        }),
        artifacts: vec!["transversal.csv".into(), "measure.json".into()],
    })
}

/// Writes the template scene and prints a JSON summary to stdout.
pub fn generate(a: &GenerateArgs) -> Result<u8, CliError> {
    let scene = build(a.template, a.resolution, a.leaves, a.shear)?;
    let family = family_of(&scene).expect("templates carry a family");
    let flat = LeafFamily::horizontal(*family.base(), family.leaf_count() - 1)?;
    let mut summary = json!({
        "template": a.template,
        "seed": a.seed,
        "c0_to_horizontal": c0_distance(family, &flat)?,
    });
    if let SceneFile::Torus(c) = &scene {
        summary["boxes"] = json!(c.boxes.len());
        summary["valid"] = json!(validate_scene(c).all_passed());
    }
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    }
    write(&a.out, &scene.to_json())?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(0)
}
