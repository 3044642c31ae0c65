use infsup::bench::{run_experiment, ExperimentConfig, TableId, DEFAULT_HS};
use infsup::patchgen::Family;

/// Hypothesis-satisfying families whose constant drops by more than 1.25
/// between h = 1e-1 and h = 1e-5 before levelling off; the reference
/// columns of EdgeD, TriEdge and TriOverlappedEdge show the same drop.
const LEVELLING: [Family; 5] =
    [Family::EdgeD, Family::EdgeE, Family::RefinedEdge, Family::TriEdge, Family::TriOverlappedEdge];

fn columns() -> Vec<(Family, Vec<f64>)> {
    let mut cfg = ExperimentConfig::for_table(TableId::Custom);
    cfg.families = Family::ALL.to_vec();
    cfg.hs = DEFAULT_HS.to_vec();
    let t = run_experiment(&cfg).unwrap();
    Family::ALL
        .into_iter()
        .map(|f| (f, t.rows.iter().filter(|r| r.family == f).map(|r| r.beta).collect()))
        .collect()
}

#[test]
fn column_shapes() {
    for (family, beta) in columns() {
        assert!(beta.iter().all(|b| b.is_finite() && *b > 0.0), "{family}");
        let hi = beta.iter().copied().fold(0.0, f64::max);
        let lo = beta.iter().copied().fold(f64::INFINITY, f64::min);
        if family.violates_hypothesis() {
            assert!(beta.windows(2).all(|w| w[1] < w[0]), "{family}: {beta:?}");
        } else if LEVELLING.contains(&family) {
            assert!(hi / lo > 1.25, "{family} no longer drops: {beta:?}");
            // no decay once the thin cells are thin
            assert!(beta[2] / beta[4] < 1.05, "{family}: {beta:?}");
        } else {
            assert!(hi / lo <= 1.25, "{family}: {beta:?}");
        }
    }
}
