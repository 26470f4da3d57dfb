mod common;

use common::*;
use foliate_core::foliation::{c0_distance, holonomy, uniform_ts, x_invariance_defect, BaseDomain, BaseShape};
use foliate_core::kernel::{exp_bump, make_damping};
use foliate_core::smoothing::*;
use foliate_core::{BasePath, Error, LeafFamily};

#[test]
fn smooth_in_t_keeps_horizontal_family() {
    let f = horizontal(rect(9), 16);
    let out = smooth_in_t(&f, 0.05, &[]).unwrap();
    assert_eq!(out.family, f);
    assert_eq!(out.achieved, 0.0);
}

#[test]
fn smooth_in_t_single_cell_formula() {
    let f = sheared(rect(17), 64, 0.5);
    let out = smooth_in_t(&f, 0.2, &[]).unwrap();
    assert_eq!(out.partition.cuts(), &[0.0, 1.0]);
    assert!(out.formula_residual(&f) <= 1e-12);
    // Direct check against (1 - l(t)) f_0 + l(t) f_1.
    for (k, &t) in out.params.iter().enumerate() {
        let l = exp_bump(t);
        for (p, &g) in out.family.leaf(k).iter().enumerate() {
            let expect = (1.0 - l) * f.leaf(0)[p] + l * f.leaf(64)[p];
            assert!((g - expect).abs() <= 1e-12);
        }
    }
    assert!(out.achieved <= 0.2);
}

#[test]
fn smooth_in_t_preserves_fixed_leaves() {
    let f = sheared(rect(17), 64, 0.5);
    let out = smooth_in_t(&f, 0.2, &[0.5]).unwrap();
    assert_eq!(out.partition.cuts(), &[0.0, 0.5, 1.0]);
    let a = f.leaf(32);
    let b = out.family.leaf(32);
    assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert!(smooth_in_t(&f, 0.2, &[0.123]).is_err());
}

fn square_region() -> RegionMask {
    RegionMask::Rect { lo: [0.35, 0.35], hi: [0.65, 0.65], margin: 0.2 }
}

#[test]
fn damped_replace_examples() {
    let base = rect(21);
    let f = horizontal(base, 40);
    let damping = make_damping(3, 256).unwrap();
    let same = local_damped_replace(&f, &f, &square_region(), &damping).unwrap();
    assert!(same.slices.iter().all(|s| *s == f));
    assert_eq!(same.report.max_distance, 0.0);

    let g = tilted(base, 40, 0.05);
    let trace = local_damped_replace(&f, &g, &square_region(), &damping).unwrap();
    assert_eq!(trace.slices[0], f);
    let last = trace.last();
    let region = square_region();
    for (i, j) in base.nodes() {
        let p = base.node(i, j);
        for k in 0..f.leaf_count() {
            let h = last.value(k, i, j);
            if region.in_core(&base, p) {
                assert!((h - g.value(k, i, j)).abs() <= 1e-12);
            } else if !region.in_support(&base, p) {
                assert!((h - f.value(k, i, j)).abs() <= 1e-12);
            }
        }
    }
    assert!(trace.report.max_distance <= trace.report.bound + 1e-12);
}

#[test]
fn straightening_examples() {
    let base = annulus(16);
    let f = horizontal(base, 32);
    let region = RegionMask::Rect { lo: [0.3, 0.0], hi: [0.7, 1.0], margin: 0.2 };
    let same = straightening_isotopy(&f, &f, &region, None).unwrap();
    assert!(same.slices.iter().all(|s| *s == f));

    // Same leaves up to a fiberwise reparametrization varying with x.
    let g = LeafFamily::from_fn(base, uniform_ts(32), [0, 0], |t, x, _| {
        t + 0.2 * t * (1.0 - t) * (std::f64::consts::PI * x).sin()
    })
    .unwrap();
    let trace = straightening_isotopy(&f, &g, &region, None).unwrap();
    for (i, j) in base.nodes() {
        if region.in_core(&base, base.node(i, j)) {
            for k in 0..g.leaf_count() {
                assert!((trace.last().value(k, i, j) - g.value(k, i, j)).abs() <= 1e-9);
            }
        }
    }

    let rb = rect(9);
    let shear = sheared(rb, 512, 0.5);
    let path = BasePath::segment_on(&rb, [0.0, 0.5], [1.0, 0.5]);
    let whole = RegionMask::Rect { lo: [0.0, 0.0], hi: [1.0, 1.0], margin: 0.1 };
    match straightening_isotopy(&shear, &horizontal(rb, 512), &whole, Some(&[path])) {
        Err(Error::HolonomyMismatch { path: 0, defect }) => {
            // Sup over the fiber: 0.125 at z = 0.625; at z = 0.5 it is 0.118.
            assert!((defect - 0.125).abs() < 1e-4, "defect {defect}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

fn bands() -> RegionMask {
    RegionMask::Bands { width: 0.1, ramp: 0.2 }
}

#[test]
fn constraint_keeps_horizontal() {
    let p = horizontal(rect(17), 32);
    let out = smooth_with_holonomy_constraint(&p, &bands(), 0.1, &[]).unwrap();
    assert_eq!(out.family, p);
}

#[test]
fn constraint_preserves_holonomy_and_bands() {
    let base = rect(33);
    let p = sheared(base, 64, 0.5);
    let out = smooth_with_holonomy_constraint(&p, &bands(), 0.2, &[]).unwrap();
    let alpha = core_path(&p);
    let rho_p = holonomy(&p, &alpha).unwrap();
    let rho_g = holonomy(&out.family, &alpha).unwrap();
    assert!(rho_p.sampled_distance(&rho_g, 100) <= 1e-9);
    for (i, j) in base.nodes() {
        if bands().node_weight(&base, i, j) == 0.0 {
            for k in 0..p.leaf_count() {
                assert_eq!(out.family.value(k, i, j).to_bits(), p.value(k, i, j).to_bits());
            }
        }
    }
    assert!(out.achieved <= 0.2);
    assert!(c0_distance(&p, &out.family).unwrap() <= 0.2);
}

#[test]
fn constraint_rejects_bad_bands() {
    let p = horizontal(rect(9), 8);
    assert!(smooth_with_holonomy_constraint(&p, &RegionMask::Bands { width: 0.4, ramp: 0.2 }, 0.1, &[]).is_err());
    assert!(smooth_with_holonomy_constraint(&p, &square_region(), 0.1, &[]).is_err());
}

fn disk(n: usize) -> BaseDomain {
    BaseDomain::unit(BaseShape::Disk, n).unwrap()
}

fn collar() -> RegionMask {
    RegionMask::Collar { width: 0.1, ramp: 0.15 }
}

#[test]
fn cone_of_restriction_is_interior_smoothing() {
    let base = disk(17);
    let d = sheared(base, 32, 0.3);
    let out = damped_cone(&d, &d, &collar(), 0.1, &[]).unwrap();
    for (i, j) in base.nodes() {
        let w = collar().node_weight(&base, i, j);
        for k in 0..d.leaf_count() {
            let v = out.family.value(k, i, j);
            if w == 1.0 {
                assert_eq!(v, d.value(k, i, j));
            } else if w == 0.0 {
                assert_eq!(v, out.interior.family.value(k, i, j));
            }
        }
    }
    let h = horizontal(base, 16);
    assert_eq!(damped_cone(&h, &h, &collar(), 0.1, &[]).unwrap().family, h);
}

#[test]
fn cone_of_tilted_collar_stays_close() {
    let base = disk(21);
    let inner = horizontal(base, 40);
    let eps = 0.05;
    let run = |slope: f64| damped_cone(&tilted(base, 40, slope), &inner, &collar(), eps, &[]).unwrap();
    let coarse = run(0.05);
    assert!(coarse.achieved >= 0.05f64.atan() - 1e-12);
    assert!(coarse.achieved <= coarse.trace.bound + 1e-12);
    // The damping term is linear in the tilt, so the distance shrinks with it.
    let fine = run(0.005);
    assert!(fine.achieved <= 0.11 * coarse.achieved, "{} vs {}", fine.achieved, coarse.achieved);
    assert!(fine.achieved <= 0.005f64.atan() + eps);
}

#[test]
fn x_normalization() {
    let base = annulus(16);
    let h = horizontal(base, 8);
    assert_eq!(x_invariant_normalize(&h).unwrap(), h);

    let yonly = LeafFamily::from_fn(base, uniform_ts(16), [0, 0], |t, _, y| {
        t + 0.1 * t * (1.0 - t) * (2.0 * std::f64::consts::PI * y).cos()
    });
    assert!(yonly.is_err(), "cos term moves the anchor");
    let yonly = LeafFamily::from_fn(base, uniform_ts(16), [0, 0], |t, _, y| {
        t + 0.1 * t * (1.0 - t) * (2.0 * std::f64::consts::PI * y).sin()
    })
    .unwrap();
    let out = x_invariant_normalize(&yonly).unwrap();
    assert!(out.values().iter().zip(yonly.values()).all(|(a, b)| (a - b).abs() <= 1e-12));

    let s = sheared(base, 32, 0.5);
    let out = x_invariant_normalize(&s).unwrap();
    assert!(x_invariance_defect(&out).unwrap() < 1e-10);
    let core = generating_loops(&base, s.anchor());
    let before = holonomy(&s, &core[0]).unwrap();
    let after = holonomy(&out, &core[0]).unwrap();
    assert!(before.sup_distance(&after) <= 1e-9);
}

