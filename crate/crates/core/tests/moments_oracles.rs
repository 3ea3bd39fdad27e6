use ehbal_core::moments::{
    closed_norm_gap2, closed_norm_min, log_closed_norm_even_gap, log_norm_squared, norm_squared,
    MonomialIndex,
};

#[test]
fn closed_forms_match_quadrature_up_to_fifty() {
    for m in 1..=50 {
        let q = norm_squared(MonomialIndex::new(m, 0, m).unwrap()).unwrap();
        let c = closed_norm_min(m).unwrap();
        assert!(((c - q) / c).abs() <= 1e-9, "min m={m}: {c} vs {q}");
        let q = norm_squared(MonomialIndex::new(m + 2, 0, m).unwrap()).unwrap();
        let c = closed_norm_gap2(m).unwrap();
        assert!(((c - q) / c).abs() <= 1e-9, "gap2 m={m}: {c} vs {q}");
    }
}

#[test]
fn closed_form_values_against_mpmath() {
    let cases = [
        (3, 0.085129740357396989, 0.11992605220023194),
        (10, 9.2382567263314074e-4, 3.7127610460096126e-4),
        (50, 1.7366410914549715e-10, 1.3894169316269630e-11),
    ];
    for (m, min, gap2) in cases {
        assert!((closed_norm_min(m).unwrap() / min - 1.0).abs() < 1e-12, "m={m}");
        assert!((closed_norm_gap2(m).unwrap() / gap2 - 1.0).abs() < 1e-11, "m={m}");
    }
    let n = norm_squared(MonomialIndex::new(2, 3, 2).unwrap()).unwrap();
    assert!((n / 0.13161258830378058 - 1.0).abs() < 1e-10);
}

#[test]
fn even_gap_matches_quadrature_on_small_grid() {
    for m in 1..=6u32 {
        for d in m..=12 {
            let gap = d - m;
            if gap % 2 != 0 || gap > 4 {
                continue;
            }
            for j in 0..=d {
                let idx = MonomialIndex::new(j, d - j, m).unwrap();
                let a = log_closed_norm_even_gap(idx).unwrap();
                let b = log_norm_squared(idx).unwrap();
                assert!((a - b).abs() <= 1e-9, "{idx:?}: {a} vs {b}");
            }
        }
    }
}
