use foliate_core::decomposition::geometry::Cell;
use foliate_core::decomposition::{
    build_torus_scene, check_transitive, enforce_condition5, maximal_faces, reference_family,
    regular_neighborhood, split_scene, validate, DecompositionComplex, HeightSplit, NeighborhoodWidths,
    SplitOrder,
};
use foliate_core::Error;
use proptest::prelude::*;

fn grid(m: usize, n: usize) -> DecompositionComplex {
    build_torus_scene(m, n, &[], None).unwrap()
}

// Oracle: point membership on the circle by reduction modulo 1.
fn on_arc(x: f64, a: [f64; 2]) -> bool {
    a[1] - a[0] >= 1.0 || (x - a[0]).rem_euclid(1.0) <= a[1] - a[0] + 1e-12 || (a[0] - x).rem_euclid(1.0) <= 1e-12
}

fn in_cell(p: [f64; 3], c: &Cell) -> bool {
    (0..3).all(|a| on_arc(p[a], c.arcs[a]))
}

fn sample_points(c: &Cell, k: usize) -> Vec<[f64; 3]> {
    let pts = |a: [f64; 2]| -> Vec<f64> {
        (0..=k).map(|i| a[0] + (a[1] - a[0]) * i as f64 / k as f64).collect()
    };
    let mut out = Vec::new();
    for x in pts(c.arcs[0]) {
        for y in pts(c.arcs[1]) {
            for t in pts(c.arcs[2]) {
                out.push([x, y, t]);
            }
        }
    }
    out
}

#[test]
fn two_by_two_horizontal_scene_is_valid() {
    let f = reference_family(16, 16, 0.0).unwrap();
    let c = build_torus_scene(2, 2, &[], Some(f)).unwrap();
    assert_eq!(c.boxes.len(), 4);
    let r = validate(&c);
    assert!(r.all_passed(), "{r:?}");
    assert_eq!(validate(&c), r);
    assert!((c.volume() - 1.0).abs() < 1e-15);
}

#[test]
fn single_box_scene_self_identifies() {
    let c = grid(1, 1);
    assert!(validate(&c).all_passed());
    let p = maximal_faces(&c);
    // west/east and south/north coincide on the torus
    assert_eq!(p.faces.len(), 2);
    assert_eq!(p.maximal.len(), 2);
    assert!(p.faces.iter().all(|f| f.incidences.len() == 2));
    let n = regular_neighborhood(&c, NeighborhoodWidths::from_width(0.05)).unwrap();
    assert_eq!(n.edges.len(), 1);
    assert_eq!(n.edges[0].edge.point, [0.0, 0.0]);
}

#[test]
fn condition5_depends_on_listing_order() {
    let bad = split_scene(SplitOrder::NeighbourLast, None).unwrap();
    assert_eq!(bad.boxes.len(), 5);
    let r = validate(&bad);
    for k in 1..=4 {
        assert!(r.passed(k), "condition {k}");
    }
    assert!(!r.passed(5));
    let w = &r.witnesses(5)[0];
    assert_eq!(w.boxes[0], "b10");
    assert!(w.boxes[1].starts_with("b00."));
    // full-height face against a half-height face
    assert_eq!(w.faces[0].height, [0.0, 1.0]);
    assert!((w.faces[1].height[1] - w.faces[1].height[0] - 0.5).abs() < 1e-15);

    let good = split_scene(SplitOrder::NeighbourFirst, None).unwrap();
    assert!(validate(&good).all_passed());
}

#[test]
fn enforce_leaves_valid_complex_unchanged() {
    let c = grid(2, 2);
    let (out, rep) = enforce_condition5(&c).unwrap();
    assert_eq!(out, c);
    assert_eq!(rep.iterations, 0);
}

#[test]
fn enforce_splits_the_offending_box_at_one_half() {
    let bad = split_scene(SplitOrder::NeighbourLast, None).unwrap();
    let (out, rep) = enforce_condition5(&bad).unwrap();
    assert!(validate(&out).all_passed());
    assert_eq!(rep.splits, vec![("b10".to_string(), 2)]);
    let ids: Vec<&str> = out.boxes.iter().map(|b| b.id.as_str()).collect();
    assert_eq!(ids, ["b01", "b11", "b00.0", "b00.1", "b10.0", "b10.1"]);
    assert_eq!(out.boxes[4].height, [0.0, 0.5]);
    assert_eq!(out.boxes[5].height, [0.5, 1.0]);
    assert!((rep.volume_after - rep.volume_before).abs() < 1e-12);
}

#[test]
fn nested_splits_reach_a_fixed_point_quickly() {
    let c = build_torus_scene(
        2,
        2,
        &[
            HeightSplit { cell: [0, 0], cuts: vec![0.5] },
            HeightSplit { cell: [1, 0], cuts: vec![0.25] },
            HeightSplit { cell: [0, 1], cuts: vec![0.75] },
        ],
        None,
    )
    .unwrap();
    assert!(!validate(&c).passed(5));
    let (out, rep) = enforce_condition5(&c).unwrap();
    assert!(validate(&out).all_passed());
    let distinct_heights = 3;
    assert!(rep.iterations >= 1 && rep.iterations <= distinct_heights, "{rep:?}");
    assert!((out.volume() - 1.0).abs() < 1e-12);
}

#[test]
fn enforce_rejects_overlapping_boxes() {
    let mut c = grid(2, 1);
    c.boxes[1].lo[0] = 0.25;
    c.boxes[1].faces = foliate_core::decomposition::FlowBoxSpec::new("b10", [0.25, 0.0], [1.0, 1.0], [0.0, 1.0]).faces;
    assert!(matches!(
        enforce_condition5(&c),
        Err(Error::Decomposition { condition: 3, .. })
    ));
}

#[test]
fn transitivity_in_row_major_and_shuffled_orders() {
    let c = grid(2, 2);
    let r = check_transitive(&c);
    assert!(r.transitive);
    assert_eq!(r.start, 2);
    let shuffled = c.reordered(&["b00", "b11", "b10", "b01"]).unwrap();
    let r = check_transitive(&shuffled);
    assert!(!r.transitive);
    assert_eq!(r.first_failure, Some((2, "b11".to_string())));
}

#[test]
fn single_box_in_v_is_vacuously_transitive() {
    let mut c = grid(1, 1);
    c.v = vec!["b00".into()];
    let r = check_transitive(&c);
    assert!(r.transitive);
    assert!(r.first_failure.is_none());
}

#[test]
fn two_by_two_faces_identify_in_pairs() {
    let p = maximal_faces(&grid(2, 2));
    assert_eq!(p.faces.len(), 8);
    assert_eq!(p.maximal.len(), 8);
    assert!(p.faces.iter().all(|f| f.incidences.len() == 2));
    assert!(p.unique_maximal());
}

#[test]
fn half_height_faces_lie_below_full_height_faces_after_enforcing() {
    let bad = split_scene(SplitOrder::NeighbourLast, None).unwrap();
    let (out, _) = enforce_condition5(&bad).unwrap();
    let p = maximal_faces(&out);
    assert!(p.unique_maximal());
    for (i, f) in p.faces.iter().enumerate() {
        for m in p.maximal_above(i) {
            assert!(p.faces[m].cell.contains(&f.cell));
        }
    }
}

#[test]
fn poset_agrees_with_sampled_containment() {
    let scenes = [
        grid(2, 2),
        grid(1, 1),
        split_scene(SplitOrder::NeighbourFirst, None).unwrap(),
        enforce_condition5(&split_scene(SplitOrder::NeighbourLast, None).unwrap()).unwrap().0,
    ];
    for c in &scenes {
        let p = maximal_faces(c);
        for (i, a) in p.faces.iter().enumerate() {
            for (j, b) in p.faces.iter().enumerate() {
                if i == j {
                    continue;
                }
                let sampled = sample_points(&a.cell, 6).iter().all(|q| in_cell(*q, &b.cell));
                let strictly = sampled && !sample_points(&b.cell, 6).iter().all(|q| in_cell(*q, &a.cell));
                assert_eq!(p.below[i].contains(&j), strictly, "faces {i} {j}");
            }
        }
    }
}

#[test]
fn narrow_neighbourhoods_meet_only_inside_edge_squares() {
    let c = grid(2, 2);
    let n = regular_neighborhood(&c, NeighborhoodWidths::from_width(0.05)).unwrap();
    assert_eq!(n.edges.len(), 4);
    assert_eq!(n.faces.len(), 8);
    // oracle: sampled points in two face neighbourhoods lie in an edge square
    let e = n.widths.edge;
    for k in 0..=200 {
        for l in 0..=200 {
            let p = [k as f64 / 200.0, l as f64 / 200.0, 0.5];
            let hits = n.faces.iter().filter(|f| in_cell(p, &f.cell)).count();
            if hits >= 2 {
                let inside = n.edges.iter().any(|v| {
                    (0..2).all(|a| {
                        let d = (p[a] - v.edge.point[a]).rem_euclid(1.0);
                        d.min(1.0 - d) < e
                    })
                });
                assert!(inside, "{p:?}");
            }
        }
    }
    for f in &n.faces {
        let face = &n.poset.faces[f.face].cell;
        assert!(f.cell.contains(face) && !face.contains(&f.cell));
    }
}

#[test]
fn fat_neighbourhoods_are_rejected_with_a_pair() {
    let c = grid(2, 2);
    match regular_neighborhood(&c, NeighborhoodWidths::from_width(0.4)) {
        Err(Error::Neighborhood(msg)) => assert!(msg.contains("and"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn scene_json_round_trips() {
    let f = reference_family(16, 8, 0.1).unwrap();
    let c = build_torus_scene(2, 2, &[], Some(f)).unwrap();
    let back = DecompositionComplex::from_json(&c.to_json()).unwrap();
    assert_eq!(back, c);
    let mut v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    v["schema_version"] = 99.into();
    assert!(matches!(
        DecompositionComplex::from_json(&v.to_string()),
        Err(Error::Malformed(_))
    ));
}

#[test]
fn box_family_has_flat_boundary_leaves() {
    let f = reference_family(16, 16, 0.1).unwrap();
    let c = build_torus_scene(2, 2, &[HeightSplit { cell: [1, 1], cuts: vec![0.5] }], Some(f)).unwrap();
    for i in 0..c.boxes.len() {
        let g = c.box_family(i).unwrap();
        assert_eq!(g.base().resolution, [9, 9]);
        assert!(g.leaf(0).iter().all(|v| *v == 0.0));
        assert!(g.leaf(g.leaf_count() - 1).iter().all(|v| *v == 1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn enforcing_always_validates_and_conserves_volume(
        m in 1usize..4,
        n in 1usize..4,
        cuts in proptest::collection::vec((0usize..3, 0usize..3, 1usize..4), 0..4),
        seed in 0u64..1000,
    ) {
        let mut splits: Vec<HeightSplit> = Vec::new();
        for (ix, iy, q) in cuts {
            let cell = [ix % m, iy % n];
            if splits.iter().all(|s| s.cell != cell) {
                splits.push(HeightSplit { cell, cuts: vec![q as f64 / 4.0] });
            }
        }
        let c = build_torus_scene(m, n, &splits, None).unwrap();
        let mut ids: Vec<String> = c.boxes.iter().map(|b| b.id.clone()).collect();
        // deterministic shuffle
        let mut s = seed;
        for i in (1..ids.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ids.swap(i, (s >> 33) as usize % (i + 1));
        }
        let order: Vec<&str> = ids.iter().map(String::as_str).collect();
        let c = c.reordered(&order).unwrap();
        let r = validate(&c);
        prop_assert_eq!(&validate(&c), &r);
        let (out, rep) = enforce_condition5(&c).unwrap();
        prop_assert!(validate(&out).all_passed());
        prop_assert!((rep.volume_after - rep.volume_before).abs() < 1e-12);
        prop_assert!(maximal_faces(&out).unique_maximal());
    }
}
