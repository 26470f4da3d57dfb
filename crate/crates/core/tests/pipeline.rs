use foliate_core::decomposition::{build_torus_scene, reference_family, DecompositionComplex, GLOBAL};
use foliate_core::smoothing::globally_smooth;

fn scene(shear: f64) -> DecompositionComplex {
    build_torus_scene(2, 2, &[], Some(reference_family(32, 32, shear).unwrap())).unwrap()
}

#[test]
fn horizontal_scene_is_unchanged() {
    let c = scene(0.0);
    let out = globally_smooth(&c, 0.3).unwrap();
    assert_eq!(out.scene.families[GLOBAL], c.families[GLOBAL]);
    assert_eq!(out.achieved, 0.0);
}

#[test]
fn sheared_scene_stays_within_budget_and_keeps_face_holonomy() {
    let c = scene(0.1);
    let out = globally_smooth(&c, 0.3).unwrap();
    for (id, d) in &out.box_distances {
        assert!(*d <= 0.3, "{id}: {d}");
    }
    assert!(out.face_defect() <= 1e-9, "{}", out.face_defect());
    for s in out.stages.iter().filter(|s| s.stage == "faces") {
        assert!(s.holonomy_defect.unwrap() <= 1e-9);
    }
    let regions: Vec<&str> = out.stages.iter().map(|s| s.stage.as_str()).collect();
    assert_eq!(regions.iter().filter(|s| **s == "edges").count(), 4);
    assert_eq!(regions.iter().filter(|s| **s == "faces").count(), 8);
    assert_eq!(regions.iter().filter(|s| **s == "interiors").count(), 4);
}

#[test]
fn shrinking_budgets_give_decreasing_distances() {
    let c = scene(0.1);
    let mut last = f64::INFINITY;
    for eps in [0.3, 0.15, 0.075] {
        let out = globally_smooth(&c, eps).unwrap();
        assert!(out.achieved <= eps);
        assert!(out.achieved < last, "{eps}: {} after {last}", out.achieved);
        assert!(out.face_defect() < 1e-6);
        last = out.achieved;
    }
}

#[test]
fn split_scene_keeps_leaf_levels() {
    use foliate_core::decomposition::{split_scene, SplitOrder};
    let c = split_scene(SplitOrder::NeighbourFirst, Some(reference_family(32, 32, 0.1).unwrap())).unwrap();
    let out = globally_smooth(&c, 0.3).unwrap();
    let g = &out.scene.families[GLOBAL];
    let f = &c.families[GLOBAL];
    // the leaf at height 1/2 bounds two boxes and is kept as a leaf
    assert_eq!(g.leaf(16), f.leaf(16));
    assert!(out.achieved <= 0.3);
}

#[test]
fn invalid_scene_is_rejected() {
    use foliate_core::decomposition::{split_scene, SplitOrder};
    use foliate_core::Error;
    let c = split_scene(SplitOrder::NeighbourLast, Some(reference_family(32, 32, 0.1).unwrap())).unwrap();
    assert!(matches!(globally_smooth(&c, 0.3), Err(Error::Decomposition { condition: 5, .. })));
}

#[test]
fn stage_reports_serialize() {
    let out = globally_smooth(&scene(0.1), 0.3).unwrap();
    let v = serde_json::to_value(&out.stages[0]).unwrap();
    for key in ["stage", "region", "achieved", "retries"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
