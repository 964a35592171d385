use hypersaw_core::transfer::{
    asymptotic_check, asymptotic_row, builtin_system, characteristic_polynomial,
    check_h73_inequalities, is_primitive, iterate_sequences, param_system, perron_root,
    perron_root_poly, system_for, BUILTIN_NAMES,
};
use num_traits::ToPrimitive;

/// Largest real roots of the characteristic polynomials, computed
/// separately with a computer algebra system at 30 digits.
const ORACLE: [(&str, f64); 10] = [
    ("h73", 5.13911942725365),
    ("h45", 2.86619826250902),
    ("h37", 1.92546019871093),
    ("h38", 1.9655205039379),
    ("param(7)", 5.13911942725365),
    ("param(8)", 6.25505927332805),
    ("param(9)", 7.34215380635154),
    ("param(10)", 8.41025385527219),
    ("param(12)", 10.5103579754819),
    ("param(20)", 18.7061016064071),
];

#[test]
fn dominant_eigenvalues_match_the_printed_constants() {
    for (name, printed) in [
        ("h73", 5.13912),
        ("h45", 2.86619),
        ("h37", 1.92546),
        ("h38", 1.96552),
    ] {
        let r = perron_root(&builtin_system(name).unwrap()).unwrap();
        assert!((r.lambda - printed).abs() < 5e-4, "{name}: {}", r.lambda);
        // Rounded to five decimals.
        assert!((r.lambda - printed).abs() < 1e-5, "{name}: {}", r.lambda);
    }
}

#[test]
fn both_eigenvalue_methods_agree_with_the_oracle() {
    for (name, expected) in ORACLE {
        let sys = builtin_system(name).unwrap();
        let power = perron_root(&sys).unwrap();
        let poly = perron_root_poly(&sys).unwrap();
        assert!((power.lambda - expected).abs() < 1e-12, "{name} power");
        assert!((poly - expected).abs() < 1e-12, "{name} poly");
        assert!((power.lambda - poly).abs() < 1e-8);
        let scale = power.vector.iter().cloned().fold(0.0, f64::max);
        assert!(
            power.residual <= 1e-10 * scale,
            "{name} residual {}",
            power.residual
        );
    }
}

#[test]
fn builtin_systems_are_primitive_and_below_the_trivial_bound() {
    for (name, d) in [("h73", 7.0), ("h45", 4.0), ("h37", 3.0), ("h38", 3.0)] {
        let sys = builtin_system(name).unwrap();
        assert!(is_primitive(&sys.matrix), "{name}");
        assert!(perron_root(&sys).unwrap().lambda < d - 1.0);
    }
    assert_eq!(BUILTIN_NAMES.len(), 4);
}

#[test]
fn characteristic_polynomial_of_the_family() {
    // x^4 + (3-d)x^3 + (9-2d)x^2 + (3-d)x - 2
    for d in 7..40u32 {
        let poly = characteristic_polynomial(&param_system(d).unwrap().matrix);
        let di = d as i128;
        assert_eq!(poly, vec![1, 3 - di, 9 - 2 * di, 3 - di, -2]);
    }
}

#[test]
fn h37_and_h38_polynomials() {
    let h37 = characteristic_polynomial(&builtin_system("h37").unwrap().matrix);
    assert_eq!(h37, vec![1, 0, -2, -2, -1, -1, -2, -3, 0]);
    let h38 = characteristic_polynomial(&builtin_system("h38").unwrap().matrix);
    assert_eq!(h38, vec![1, 0, -2, -2, -2, -1, -1, -2, -2, -3, 0]);
}

#[test]
fn h73_sequence_inequalities_hold_to_two_hundred() {
    let seq = iterate_sequences(&builtin_system("h73").unwrap(), 200);
    assert_eq!(seq.len(), 200);
    let report = check_h73_inequalities(&seq);
    assert!(report.all_hold(), "{report:?}");
}

#[test]
fn sequence_ratios_converge_to_the_eigenvalue() {
    for name in BUILTIN_NAMES {
        let sys = builtin_system(name).unwrap();
        let lambda = perron_root(&sys).unwrap().lambda;
        let seq = iterate_sequences(&sys, 400);
        let ratio = seq[399][0].to_f64().unwrap() / seq[398][0].to_f64().unwrap();
        assert!((ratio - lambda).abs() < 1e-6, "{name}: {ratio} vs {lambda}");
    }
    let sys = builtin_system("h73").unwrap();
    let seq = iterate_sequences(&sys, 61);
    let ratio = seq[60][0].to_f64().unwrap() / seq[59][0].to_f64().unwrap();
    assert!((ratio - 5.13911942725365).abs() < 1e-6);
}

#[test]
fn systems_by_tessellation() {
    assert_eq!(system_for(7, 3).unwrap().name, "h73");
    assert_eq!(system_for(3, 8).unwrap().name, "h38");
    assert_eq!(system_for(9, 3).unwrap().name, "param(9)");
    assert_eq!(system_for(8, 5).unwrap().name, "param(8)");
    assert!(system_for(5, 4).is_none());
    assert!(system_for(3, 9).is_none());
}

#[test]
fn asymptotic_bracket_holds_across_the_sweep() {
    let start = std::time::Instant::now();
    let rows = asymptotic_check(7, 10_000).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!(rows.len(), 9_994);
    for row in &rows {
        assert!(
            row.bracket_ok && row.identity_ok && row.expansion_ok,
            "{row:?}"
        );
        assert_eq!(row.sign_lower, -1);
    }
    assert_eq!(asymptotic_row(7).g_upper, 226);
    assert_eq!(asymptotic_row(10).g_upper, 502);
    assert!(asymptotic_check(3, 10).is_err());
}

#[test]
fn roots_lie_inside_the_bracket() {
    for d in [7u32, 8, 9, 10, 12, 20, 100] {
        let lambda = perron_root(&param_system(d).unwrap()).unwrap().lambda;
        let df = d as f64;
        assert!(
            lambda > df - 1.0 - 7.0 / df && lambda < df - 1.0,
            "d = {d}: {lambda}"
        );
    }
}
