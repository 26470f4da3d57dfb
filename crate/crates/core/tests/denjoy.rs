mod common;

use common::{horizontal, rect, sheared};
use foliate_core::decomposition::{build_torus_scene, reference_family, DecompositionComplex, GLOBAL};
use foliate_core::denjoy::{
    blowup_box, blowup_circle_map, blowup_scene, box_compatibility, rotation_number, verify_blowup,
    verify_family_blowup, wandering_audit, BlowupLocus, CircleMapLift, CollapseData, WeightRule,
};
use foliate_core::foliation::{c0_distance, uniform_ts};
use foliate_core::kernel::{InsertionSchedule, Preimage};
use foliate_core::{BaseDomain, BaseShape, Error, LeafFamily};

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn schedule(entries: &[(f64, f64)]) -> InsertionSchedule {
    InsertionSchedule::new(entries.to_vec()).unwrap()
}

fn torus_scene() -> DecompositionComplex {
    build_torus_scene(2, 2, &[], Some(reference_family(32, 32, 0.0).unwrap())).unwrap()
}

fn torus_packet(base: BaseDomain, shear: f64) -> LeafFamily {
    LeafFamily::from_fn(base, uniform_ts(8), [0, 0], move |s, x, _| {
        s + shear * s * (1.0 - s) * (2.0 * std::f64::consts::PI * x).sin()
    })
    .unwrap()
}

#[test]
fn empty_schedule_is_identity() {
    let f = horizontal(rect(16), 16);
    let (out, data) = blowup_box(&f, &InsertionSchedule::empty(), &[], &[]).unwrap();
    assert_eq!(out, f);
    for k in 0..=20 {
        let z = k as f64 / 20.0;
        assert_eq!(data.apply(3, 5, z), z);
    }
    assert!(verify_family_blowup(&out, &data).all_passed());
}

#[test]
fn single_leaf_gap_is_filled_by_the_packet() {
    let base = rect(16);
    let f = horizontal(base, 16);
    let packet = horizontal(base, 4);
    let (out, data) = blowup_box(&f, &schedule(&[(0.5, 1.0)]), &[packet], &[]).unwrap();
    assert_eq!(data.packets()[0].gap, [0.25, 0.75]);
    // oracle: complement leaves t -> t / 2 and (t + 1) / 2, packet leaves 0.25 + s / 2
    let mut expected: Vec<f64> = uniform_ts(16)
        .into_iter()
        .filter(|&t| t != 0.5)
        .map(|t| if t < 0.5 { t / 2.0 } else { (t + 1.0) / 2.0 })
        .chain(uniform_ts(4).into_iter().map(|s| 0.25 + s / 2.0))
        .collect();
    expected.sort_by(f64::total_cmp);
    assert_eq!(out.leaf_count(), expected.len());
    for (k, &t) in expected.iter().enumerate() {
        assert!(out.leaf(k).iter().all(|v| (v - t).abs() < 1e-12));
    }
    for k in 0..=40 {
        let z = 0.25 + 0.5 * k as f64 / 40.0;
        assert!((data.apply(2, 2, z) - 0.5).abs() < 1e-12);
    }
    assert_eq!(data.preimage(1, 1, 0.5), Preimage::Interval(0.25, 0.75));
    assert!(verify_family_blowup(&out, &data).all_passed());
}

#[test]
fn sheared_packet_distance_is_bounded_by_scaled_gradient() {
    let base = rect(16);
    let f = horizontal(base, 16);
    let shear = 0.8;
    let (out, _) = blowup_box(&f, &schedule(&[(0.5, 1.0)]), &[sheared(base, 8, shear)], &[]).unwrap();
    let d = c0_distance(&f, &out).unwrap();
    let bound = (shear * 1.0 / 2.0f64).atan();
    assert!(d > 0.0 && d <= bound + 1e-12, "{d} vs {bound}");
}

#[test]
fn fixed_leaves_are_kept_and_schedule_points_avoid_them() {
    let f = horizontal(rect(16), 16);
    let p = horizontal(rect(16), 4);
    let (out, data) = blowup_box(&f, &schedule(&[(0.25, 0.5)]), &[p.clone()], &[0.5]).unwrap();
    for k in 0..=10 {
        let z = 0.5 + 0.05 * k as f64;
        assert!((data.apply(0, 0, z) - z).abs() < 1e-12);
    }
    assert!(out.ts().iter().any(|t| (t - 0.5).abs() < 1e-12));
    assert!(matches!(
        blowup_box(&f, &schedule(&[(0.5, 0.5)]), &[p], &[0.5]),
        Err(Error::InvalidSchedule(_))
    ));
}

#[test]
fn non_horizontal_input_and_packet_mismatch_are_rejected() {
    let base = rect(16);
    let p = horizontal(base, 4);
    assert!(matches!(
        blowup_box(&sheared(base, 16, 0.5), &schedule(&[(0.5, 1.0)]), &[p], &[]),
        Err(Error::NotHorizontal { .. })
    ));
    assert!(blowup_box(&horizontal(base, 16), &schedule(&[(0.5, 1.0)]), &[], &[]).is_err());
}

#[test]
fn collapse_is_fiberwise_the_kernel_map() {
    use foliate_core::kernel::build_collapse;
    let s = schedule(&[(0.3, 0.2), (0.7, 0.1)]);
    let f = horizontal(rect(16), 16);
    let packets = vec![horizontal(rect(16), 4); 2];
    let data = CollapseData::new(&f, &s, &packets, &[]).unwrap();
    let map = build_collapse(&s).unwrap();
    for k in 0..=200 {
        let z = k as f64 / 200.0;
        assert!((data.apply(4, 9, z) - map.apply(z)).abs() <= 1e-12);
    }
}

#[test]
fn empty_locus_leaves_the_scene_unchanged() {
    let c = torus_scene();
    let out = blowup_scene(&c, &BlowupLocus::empty(), &[], 0.1).unwrap();
    assert_eq!(out.scene.families[GLOBAL], c.families[GLOBAL]);
    assert_eq!(out.achieved, 0.0);
    assert!(verify_blowup(&c, &out.scene, &out.data).all_passed());
}

#[test]
fn scene_blowup_matches_per_box_blowups() {
    let c = torus_scene();
    let base = *c.families[GLOBAL].base();
    let packets = vec![LeafFamily::horizontal(base, 8).unwrap()];
    let locus = BlowupLocus::new(vec![(0.40625, 0.1)]).unwrap();
    let out = blowup_scene(&c, &locus, &packets, 0.1).unwrap();
    let report = verify_blowup(&c, &out.scene, &out.data);
    assert!(report.all_passed(), "{report:?}");
    for (id, d) in box_compatibility(&c, &out, &packets).unwrap() {
        assert!(d <= 1e-10, "box {id}: {d}");
    }
    assert!(out.stages.iter().any(|s| s.stage == "faces" && s.holonomy_defect.unwrap() <= 1e-9));
}

#[test]
fn halving_weights_strictly_reduces_distance() {
    let c = torus_scene();
    let base = *c.families[GLOBAL].base();
    let packets = vec![torus_packet(base, 0.5)];
    let a = blowup_scene(&c, &BlowupLocus::new(vec![(0.40625, 0.1)]).unwrap(), &packets, 1.0).unwrap();
    let b = blowup_scene(&c, &BlowupLocus::new(vec![(0.40625, 0.05)]).unwrap(), &packets, 1.0).unwrap();
    assert!(b.achieved < a.achieved, "{} vs {}", b.achieved, a.achieved);
    assert!(verify_blowup(&c, &a.scene, &a.data).all_passed());
}

#[test]
fn tight_budget_halves_weights() {
    let c = torus_scene();
    let base = *c.families[GLOBAL].base();
    let packets = vec![torus_packet(base, 0.5)];
    let loose = blowup_scene(&c, &BlowupLocus::new(vec![(0.40625, 0.1)]).unwrap(), &packets, 1.0).unwrap();
    let tight = blowup_scene(&c, &BlowupLocus::new(vec![(0.40625, 0.1)]).unwrap(), &packets, 0.5 * loose.achieved).unwrap();
    assert!(tight.retries >= 1 && tight.achieved <= 0.5 * loose.achieved);
    assert!(tight.locus.total_weight() < 0.1);
}

#[test]
fn locus_on_box_boundary_is_rejected() {
    let c = build_torus_scene(
        2,
        2,
        &[foliate_core::decomposition::HeightSplit { cell: [0, 0], cuts: vec![0.5] }],
        Some(reference_family(32, 32, 0.0).unwrap()),
    )
    .unwrap();
    let base = *c.families[GLOBAL].base();
    let packets = vec![LeafFamily::horizontal(base, 8).unwrap()];
    let err = blowup_scene(&c, &BlowupLocus::new(vec![(0.5, 0.1)]).unwrap(), &packets, 0.3).unwrap_err();
    assert!(matches!(err, Error::InvalidSchedule(_) | Error::Decomposition { .. }), "{err}");
}

#[test]
fn corrupted_collapse_fails_leaf_preservation() {
    let c = torus_scene();
    let base = *c.families[GLOBAL].base();
    let packets = vec![torus_packet(base, 0.5)];
    let out = blowup_scene(&c, &BlowupLocus::new(vec![(0.40625, 0.1)]).unwrap(), &packets, 1.0).unwrap();
    let bad = out.data.with_shifted_intervals(0.01);
    let report = verify_blowup(&c, &out.scene, &bad);
    assert!(!report.passed(6));
    assert!(report.check(6).unwrap().witness.is_some());

    // a horizontal packet stays on one leaf; the collapse of the packet fails instead
    let flat = vec![LeafFamily::horizontal(base, 8).unwrap()];
    let out = blowup_scene(&c, &BlowupLocus::new(vec![(0.40625, 0.1)]).unwrap(), &flat, 1.0).unwrap();
    let report = verify_blowup(&c, &out.scene, &out.data.with_shifted_intervals(0.01));
    assert!(report.passed(6));
    assert!(!report.passed(3) && !report.passed(5), "{:?}", report.failed());
}

#[test]
fn rotation_numbers() {
    let r = rotation_number(&CircleMapLift::rotation(1.0 / 3.0), 3000).unwrap();
    assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    let g = rotation_number(&CircleMapLift::rotation(GOLDEN), 100_000).unwrap();
    assert!((g.value - GOLDEN).abs() < 1e-6);
    assert!(rotation_number(&CircleMapLift::rotation(0.1), 10).is_err());
}

#[test]
fn rotation_number_is_conjugacy_invariant() {
    let phi = CircleMapLift::new(vec![(0.0, 0.0), (0.3, 0.5), (0.7, 0.8)]).unwrap();
    let h = CircleMapLift::new(vec![(0.0, 0.2), (0.5, 0.6), (0.9, 1.15)]).unwrap();
    let n = 20_000;
    let a = rotation_number(&h, n).unwrap().value;
    let b = rotation_number(&h.conjugate(&phi), n).unwrap().value;
    assert!((a - b).abs() <= 2.0 / n as f64, "{a} vs {b}");
    // the conjugate really is a different map
    assert!((h.eval(0.1) - h.conjugate(&phi).eval(0.1)).abs() > 1e-3);
}

#[test]
fn circle_blowup_keeps_rotation_and_wanders() {
    let n = 1000;
    let lift = blowup_circle_map(GOLDEN, n, WeightRule::InverseSquare { total: 0.5 }).unwrap();
    let r = rotation_number(&lift, 100_000).unwrap();
    assert!((r.value - GOLDEN).abs() < 1e-3, "{}", r.value);
    let gaps = lift.gaps();
    for k in 0..2 * n {
        let (a, b) = (lift.eval(gaps[k][0]), lift.eval(gaps[k][1]));
        let s = a.floor();
        assert!((a - s - gaps[k + 1][0]).abs() < 1e-12 && (b - s - gaps[k + 1][1]).abs() < 1e-12);
    }
    let audit = wandering_audit(&lift, gaps[n], 10_000);
    assert!(audit.wandering(), "{audit:?}");
}

#[test]
fn rational_rotation_is_rejected() {
    assert_eq!(
        blowup_circle_map(0.25, 100, WeightRule::InverseSquare { total: 0.5 }),
        Err(Error::RationalRotation(0.25))
    );
}

#[test]
fn torus_base_is_periodic() {
    let b = BaseDomain::unit(BaseShape::Torus, 32).unwrap();
    assert_eq!(b.periodic(), [true, true]);
}
