use proptest::prelude::*;

use infsup::lemmalab::{
    check_dy_orthogonality, check_phi_gram, check_pairing_quad, check_triangle_pairings, check_vstar, FlatMacro,
    LemmaLine, Split,
};

fn failures(lines: &[LemmaLine]) -> Vec<String> {
    lines.iter().filter(|l| !l.passed()).map(|l| l.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn identities_hold_for_any_macro(
        big_h in 0.1f64..2.0,
        e in 1.0f64..6.0,
        q in prop::collection::vec(-2.0f64..2.0, 6),
        seed in any::<u64>(),
    ) {
        let h = big_h * 10f64.powf(-e);
        let m2 = FlatMacro::new(big_h, h, Split::Two);
        let m4 = FlatMacro::new(big_h, h, Split::Four);
        let mut lines = Vec::new();
        lines.extend(check_phi_gram(&m2).unwrap().lines);
        lines.extend(check_phi_gram(&m4).unwrap().lines);
        lines.extend(check_pairing_quad(&m2).unwrap().lines);
        lines.extend(check_vstar(&m2, &q[..3]).unwrap().lines());
        lines.extend(check_vstar(&m4, &q).unwrap().lines());
        lines.extend(check_dy_orthogonality(&m2, 5, seed).unwrap());
        lines.extend(check_triangle_pairings(&m2).unwrap().lines);
        let failed = failures(&lines);
        prop_assert!(failed.is_empty(), "{}", failed.join("\n"));
    }
}
