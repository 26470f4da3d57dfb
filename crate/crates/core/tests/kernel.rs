mod common;

use common::*;
use foliate_core::kernel::{
    build_collapse, choose_partition, choose_partition_fixed, collapse_preimage, make_damping,
    partition_spread, InsertionSchedule, Preimage,
};
use foliate_core::Error;
use proptest::prelude::*;

#[test]
fn horizontal_family_needs_one_cell() {
    let p = choose_partition(&horizontal(rect(9), 32), 0.01).unwrap();
    assert_eq!(p.cuts(), &[0.0, 1.0]);
}

#[test]
fn sheared_family_partitions() {
    let f = sheared(rect(17), 64, 0.5);
    let p = choose_partition(&f, 0.2).unwrap();
    assert_eq!(p.cuts(), &[0.0, 1.0]);
    assert!((partition_spread(&f, &p) - 0.125f64.atan()).abs() < 1e-3);

    let fine = choose_partition(&f, 0.05).unwrap();
    assert!(fine.cuts().len() >= 3, "{:?}", fine.cuts());
    assert!(partition_spread(&f, &fine) <= 0.05);
}

#[test]
fn fixed_cuts_are_respected() {
    let f = sheared(rect(9), 32, 0.5);
    let p = choose_partition_fixed(&f, 0.2, &[16]).unwrap();
    assert_eq!(p.cuts(), &[0.0, 0.5, 1.0]);
    let r = p.refine(&f).unwrap();
    assert_eq!(r.samples(), &[0, 8, 16, 24, 32]);
}

#[test]
fn coarse_sampling_is_reported() {
    let f = sheared(rect(9), 2, 0.9);
    match choose_partition(&f, 0.01) {
        Err(Error::PartitionTooCoarse { lower: 0, upper: 1, angle, .. }) => assert!(angle > 0.01),
        other => panic!("unexpected {other:?}"),
    }
    assert!(choose_partition(&f, 0.0).is_err());
}

#[test]
fn damping_flatness_at_spec_resolution() {
    let d = make_damping(3, 256).unwrap();
    assert_eq!(d.value(0.0), 0.0);
    assert_eq!(d.value(1.0), 1.0);
    assert!((d.value(0.5) - 0.5).abs() < 1e-15);
    assert!(d.endpoint_derivatives().iter().all(|v| v.abs() < 1e-9));
    assert!(matches!(make_damping(3, 8), Err(Error::ResolutionTooLow { .. })));
}

#[test]
fn collapse_preimages() {
    let m = build_collapse(&InsertionSchedule::new(vec![(0.5, 1.0)]).unwrap()).unwrap();
    assert_eq!(collapse_preimage(&m, 0.5), Preimage::Interval(0.25, 0.75));
    assert!((collapse_preimage(&m, 0.1).as_point().unwrap() - 0.05).abs() < 1e-15);
}

proptest! {
    #[test]
    fn partitions_meet_the_bound(shear in 0.05f64..0.9, eps in 0.02f64..0.3) {
        let f = sheared(rect(9), 48, shear);
        if let Ok(p) = choose_partition(&f, eps) {
            prop_assert!(partition_spread(&f, &p) <= eps);
        }
    }

    #[test]
    fn collapse_is_monotone_and_exact(raw in prop::collection::vec((0.01f64..0.99, 0.001f64..0.5), 0..20)) {
        let mut entries = raw;
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        entries.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-6);
        let s = InsertionSchedule::new(entries).unwrap();
        let m = build_collapse(&s).unwrap();
        let w = s.total_weight();
        let mut total = 0.0;
        for (iv, &(_, wi)) in m.intervals().iter().zip(s.entries()) {
            prop_assert!((iv.width() - wi / (1.0 + w)).abs() < 1e-12);
            total += iv.width();
        }
        prop_assert!((total - w / (1.0 + w)).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 0..=400 {
            let y = m.apply(k as f64 / 400.0);
            prop_assert!(y >= prev - 1e-15 && (0.0..=1.0).contains(&y));
            prev = y;
        }
    }
}
