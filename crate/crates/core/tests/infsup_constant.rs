use approx::assert_relative_eq;
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

use infsup::assemble::{assemble_mesh, Saddle};
use infsup::patchgen::{build_patch, Family, Mesh, PatchSpec};
use infsup::spectra::{compute_infsup, infsup_on_subspaces, zero_mean_basis};

fn patch(family: Family, h: f64) -> Mesh {
    build_patch(&PatchSpec::new(family, h)).unwrap()
}

fn beta(mesh: &Mesh) -> f64 {
    let (_, saddle) = assemble_mesh(mesh).unwrap();
    compute_infsup(&saddle, 3).unwrap().beta
}

/// Second smallest eigenvalue of `S q = lambda Mp q` through nalgebra's
/// dense Cholesky and symmetric eigensolver; the smallest belongs to the
/// constant pressure.
fn dense_beta(saddle: &Saddle) -> f64 {
    let a = saddle.a.to_dense();
    let b = saddle.b.to_dense();
    let s = &b * a.cholesky().unwrap().solve(&b.transpose());
    let l = saddle.mp.to_dense().cholesky().unwrap().l();
    let l_inv = l.try_inverse().unwrap();
    let c = &l_inv * s * l_inv.transpose();
    let mut values: Vec<f64> = SymmetricEigen::new((&c + c.transpose()) * 0.5).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values[1].sqrt()
}

const CHEAP: [Family; 6] =
    [Family::EdgeA, Family::EdgeD, Family::EdgeF, Family::CornerC, Family::TriEdge, Family::TriEdgeBad];

#[test]
fn matches_dense_route() {
    for family in CHEAP {
        for h in [1e-1, 1e-3] {
            let (_, saddle) = assemble_mesh(&patch(family, h)).unwrap();
            let r = compute_infsup(&saddle, 3).unwrap();
            assert_relative_eq!(r.beta, dense_beta(&saddle), max_relative = 1e-8);
            assert!(r.residual < 1e-10, "{family} h={h}: residual {}", r.residual);
        }
    }
}

#[test]
fn saddle_structure() {
    for family in Family::ALL {
        let mesh = patch(family, 1e-2);
        let (dofs, saddle) = assemble_mesh(&mesh).unwrap();
        let bt1 = saddle.b.tr_mul_vec(&saddle.one_p);
        let scale = saddle.b.max_abs();
        assert!(bt1.iter().all(|v| v.abs() <= 1e-13 * scale.max(1.0)), "{family}");
        assert_relative_eq!(saddle.mp.inner(&saddle.one_p, &saddle.one_p), mesh.area(), max_relative = 1e-12);
        assert!(saddle.a.csr().asymmetry() <= 1e-14 * saddle.a.csr().max_abs());
        assert_eq!(saddle.n_v(), 2 * dofs.free_nodes.len());
        let r = compute_infsup(&saddle, 3).unwrap();
        // |div v| <= |grad v| pointwise in the L2 sense
        assert!(r.beta > 0.0 && r.beta <= 1.0, "{family}: {}", r.beta);
        assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn full_subspaces_reproduce_the_constant() {
    let (_, saddle) = assemble_mesh(&patch(Family::EdgeD, 1e-2)).unwrap();
    let all: Vec<usize> = (0..saddle.n_v()).collect();
    let sub = infsup_on_subspaces(&saddle, &all, &zero_mean_basis(&saddle)).unwrap();
    assert_relative_eq!(sub, compute_infsup(&saddle, 1).unwrap().beta, max_relative = 1e-10);
    let half: Vec<usize> = (0..saddle.n_v() / 2).collect();
    assert!(infsup_on_subspaces(&saddle, &half, &zero_mean_basis(&saddle)).unwrap() <= sub + 1e-12);
}

#[test]
fn independent_of_thread_count() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let (_, saddle) = assemble_mesh(&patch(Family::LShape, 1e-3)).unwrap();
                (saddle.a.csr().to_triplet_text(), compute_infsup(&saddle, 3).unwrap().beta)
            })
    };
    let (a1, b1) = run(1);
    let (a4, b4) = run(4);
    assert_eq!(a1, a4);
    assert_eq!(b1.to_bits(), b4.to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariant_under_similarity(
        i in 0..CHEAP.len(),
        e in 1.0f64..4.0,
        s in 0.05f64..20.0,
        dx in -3.0f64..3.0,
        dy in -3.0f64..3.0,
    ) {
        let mesh = patch(CHEAP[i], 10f64.powf(-e));
        // eigenvalues of order one carry absolute roundoff near 1e-16, so a
        // decaying beta is compared through beta^2
        let b0 = beta(&mesh);
        let close = |b: f64| (b * b - b0 * b0).abs() <= 1e-9 * b0 * b0 + 1e-13;
        let scaled = mesh.transformed(|p| [s * p[0] + dx, s * p[1] + dy]).unwrap();
        prop_assert!(close(beta(&scaled)));
        let rotated = mesh.transformed(|p| [-p[1], p[0]]).unwrap();
        prop_assert!(close(beta(&rotated)));
    }
}
