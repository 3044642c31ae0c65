use proptest::prelude::*;

use infsup::patchgen::{
    build_patch, read_mesh, refine_edge_strip, triangulate, triangulate_pattern, validate_conformity, write_mesh,
    CellKind, Family, MeshError, PatchSpec, Region,
};

fn family() -> impl Strategy<Value = Family> {
    (0..Family::ALL.len()).prop_map(|i| Family::ALL[i])
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn every_family_is_conforming_across_the_table_sizes() {
    for family in Family::ALL {
        for h in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
            let mesh = build_patch(&PatchSpec::new(family, h)).unwrap();
            assert!(validate_conformity(&mesh).is_empty(), "{family} h={h}");
            assert_eq!(mesh.all_tris(), family.is_triangulated(), "{family}");
        }
    }
}

#[test]
fn thin_cells_have_the_requested_aspect_ratio() {
    let h = 1e-4;
    let mesh = build_patch(&PatchSpec::new(Family::EdgeD, h)).unwrap();
    let flat: Vec<usize> = (0..mesh.num_cells()).filter(|&c| mesh.cells[c].region == Region::Flat).collect();
    assert_eq!(flat.len(), 2);
    for c in flat {
        assert!(rel(mesh.cell_area(c), 0.5 * h) < 1e-12);
    }
}

#[test]
fn refinement_levels_grow_the_strip() {
    let base = build_patch(&PatchSpec::new(Family::RefinedEdge, 1e-3).with_refinement(1)).unwrap();
    let mut previous = base.num_cells();
    for r in 2..=4 {
        let mesh = build_patch(&PatchSpec::new(Family::RefinedEdge, 1e-3).with_refinement(r)).unwrap();
        assert!(mesh.num_cells() > previous);
        assert!(validate_conformity(&mesh).is_empty());
        assert!(rel(mesh.area(), base.area()) < 1e-12);
        previous = mesh.num_cells();
    }
    let edge = build_patch(&PatchSpec::new(Family::EdgeD, 1e-3)).unwrap();
    assert!(refine_edge_strip(&edge, 2).is_ok());
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(matches!(
        build_patch(&PatchSpec::new(Family::RefinedCorner, 1e-3).with_refinement(0)),
        Err(MeshError::InvalidRefinement { .. })
    ));
    assert!(build_patch(&PatchSpec::new(Family::EdgeD, 0.0)).is_err());
    assert!(build_patch(&PatchSpec::new(Family::EdgeD, 0.6)).is_err());
    assert!(build_patch(&PatchSpec::new(Family::TriEdge, 1e-2).with_triangulation(false)).is_err());
    assert!("EdgeZ".parse::<Family>().is_err());
    let tri = build_patch(&PatchSpec::new(Family::TriEdge, 1e-2)).unwrap();
    assert!(triangulate(&tri).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn meshes_are_conforming_for_any_h(family in family(), e in 1.0f64..5.0) {
        let h = 10f64.powf(-e);
        let mesh = build_patch(&PatchSpec::new(family, h)).unwrap();
        prop_assert!(validate_conformity(&mesh).is_empty());
        let total: f64 = (0..mesh.num_cells()).map(|c| mesh.cell_area(c)).sum();
        prop_assert!(rel(total, mesh.area()) < 1e-12);
        prop_assert!((0..mesh.num_cells()).all(|c| mesh.cell_area(c) > 0.0));
    }

    #[test]
    fn triangulation_splits_every_cell_in_two(family in family(), e in 1.0f64..5.0, seed in any::<u64>()) {
        prop_assume!(!family.is_triangulated());
        let h = 10f64.powf(-e);
        let mesh = build_patch(&PatchSpec::new(family, h)).unwrap();
        let anti: Vec<bool> = (0..mesh.num_cells()).map(|c| (seed >> (c % 64)) & 1 == 1).collect();
        for tri in [triangulate(&mesh).unwrap(), triangulate_pattern(&mesh, &anti).unwrap()] {
            prop_assert_eq!(tri.num_cells(), 2 * mesh.num_cells());
            prop_assert!(tri.cells.iter().all(|c| c.kind == CellKind::Tri));
            prop_assert!(validate_conformity(&tri).is_empty());
            for c in 0..mesh.num_cells() {
                let halves = tri.cell_area(2 * c) + tri.cell_area(2 * c + 1);
                prop_assert!(rel(halves, mesh.cell_area(c)) < 1e-12);
                prop_assert_eq!(tri.cells[2 * c].region, mesh.cells[c].region);
            }
        }
    }

    #[test]
    fn text_format_round_trips(family in family(), e in 1.0f64..5.0) {
        let mesh = build_patch(&PatchSpec::new(family, 10f64.powf(-e))).unwrap();
        let back = read_mesh(&write_mesh(&mesh)).unwrap();
        prop_assert_eq!(&back.vertices, &mesh.vertices);
        prop_assert_eq!(back.cells.len(), mesh.cells.len());
        for (a, b) in back.cells.iter().zip(&mesh.cells) {
            prop_assert_eq!(&a.vertices, &b.vertices);
            prop_assert_eq!(a.region, b.region);
        }
        prop_assert_eq!(&back.boundary_edges, &mesh.boundary_edges);
    }
}
