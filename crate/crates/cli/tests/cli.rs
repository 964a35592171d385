use std::process::Command;

use hypersaw_cli::{execute, Execution, EXIT_BUDGET, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn run(args: &str) -> Execution {
    execute(std::iter::once("hypersaw").chain(args.split_whitespace()))
}

fn json(args: &str) -> Value {
    let out = run(&format!("{args} --format json"));
    assert_eq!(out.code, EXIT_OK, "{args}: {}", out.stderr);
    serde_json::from_str(&out.stdout).expect("valid JSON")
}

fn approx(v: &Value, expected: f64, tol: f64) {
    let x = v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"));
    assert!((x - expected).abs() <= tol, "{x} vs {expected}");
}

#[test]
fn bounds_for_the_triangulation() {
    let v = json("bounds -d 7 -k 3");
    approx(&v["mu_p_upper_mixed"]["value"], 4.9575, 5e-4);
    approx(&v["mu_w_lower_eigen"], 5.13912, 5e-6);
    assert_eq!(v["mu_w_lower_eigen_system"], "h73");
    assert_eq!(v["verdicts"]["mu_p_lt_mu_w"], true);
    assert_eq!(v["verdicts"]["exponent_condition"], false);
    assert_eq!(v["meta"]["d"], 7);
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn bounds_for_the_cubic_octagonal_tiling() {
    let v = json("bounds -d 3 -k 8");
    approx(&v["mu_p_upper_deg3"], 1.75477, 5e-6);
    let out = run("bounds -d 3 -k 8");
    assert!(out.stdout.contains("1.75477"), "{}", out.stdout);
}

#[test]
fn euclidean_and_spherical_pairs_are_usage_errors() {
    for args in [
        "bounds -d 3 -k 3",
        "bounds -d 4 -k 4",
        "enumerate -d 3 -k 6 -n 4",
    ] {
        let out = run(args);
        assert_eq!(out.code, EXIT_USAGE, "{args}");
        assert!(out.stderr.contains("not hyperbolic"), "{}", out.stderr);
        assert!(out.stderr.contains("-d/-k"), "{}", out.stderr);
    }
}

#[test]
fn walk_counts() {
    let v = json("enumerate -d 7 -k 3 -n 6 --kind walks");
    let c = v["counts"].as_array().unwrap();
    assert_eq!(c.len(), 7);
    assert_eq!(c[1], 7);
    assert_eq!(c[2], 42);
    assert_eq!(
        v["submultiplicative_violations"].as_array().unwrap().len(),
        0
    );
    assert_eq!(v["root_test"]["violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["meta"]["radius"], 6);
}

#[test]
fn polygon_counts_start_at_the_faces() {
    let v = json("enumerate -d 3 -k 7 -n 10 --kind polygons");
    let p = v["counts"].as_array().unwrap();
    assert!(p[3..=6].iter().all(|x| x == 0));
    assert_eq!(p[7], 3);
    assert!(v["mixed_bound_ok"]
        .as_array()
        .unwrap()
        .iter()
        .all(|b| b == true));
    assert!(v["deg3_bound_ok"]
        .as_array()
        .unwrap()
        .iter()
        .all(|b| b == true));

    let csv = run("enumerate -d 3 -k 7 -n 10 --kind polygons --format csv").stdout;
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("n,p_n"));
    assert_eq!(lines.nth(7), Some("7,3"));
}

#[test]
fn oversized_requests_hit_the_budget() {
    let out = run("enumerate -d 7 -k 3 -n 40");
    assert_eq!(out.code, EXIT_BUDGET);
    assert!(out.stderr.contains("vertex budget"), "{}", out.stderr);
    assert!(
        out.stderr.contains("a budget of at least"),
        "{}",
        out.stderr
    );

    // Past the horizon but within the vertex budget.
    let out = run("enumerate -d 7 -k 3 -n 13 --kind polygons");
    assert_eq!(out.code, EXIT_BUDGET);
    assert!(out.stderr.contains("--force"), "{}", out.stderr);

    let out = run("dump-map -d 7 -k 3 --radius 30");
    assert_eq!(out.code, EXIT_BUDGET);
}

#[test]
fn geometry_surveys_hold() {
    for (args, min_margin) in [
        ("geometry -d 7 -k 3 -n 10", 0),
        ("geometry -d 4 -k 5 -n 12", 0),
        ("geometry -d 3 -k 7 -n 14", 0),
    ] {
        let v = json(args);
        assert_eq!(v["edges_enum_failures"], 0, "{args}");
        assert_eq!(v["no_chord_failures"], 0, "{args}");
        assert_eq!(v["min_margin"], min_margin, "{args}");
        assert_eq!(v["all_hold"], true, "{args}");
    }
    // The face polygons of H(3,7) are the tight ones.
    let v = json("geometry -d 3 -k 7 -n 14");
    let faces = &v["by_length"][0];
    assert_eq!(faces["length"], 7);
    assert_eq!(faces["count"], 3);
    assert_eq!(faces["tight"], 3);
}

#[test]
fn geometry_csv_has_one_row_per_polygon() {
    let csv = run("geometry -d 4 -k 5 -n 8 --format csv").stdout;
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows[0].starts_with("length,interior,chords"));
    let total = json("geometry -d 4 -k 5 -n 8")["polygons"]
        .as_u64()
        .unwrap();
    assert_eq!(rows.len() as u64 - 1, total);
}

#[test]
fn displacement_rows() {
    let v = json("displacement -d 7 -k 3 -n 1 --epsilon 0.5");
    approx(&v["rows"][1]["p_far"], 1.0, 0.0);

    let v = json("displacement -d 4 -k 5 -n 7");
    let c = json("enumerate -d 4 -k 5 -n 7");
    for (row, count) in v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .zip(c["counts"].as_array().unwrap())
    {
        let sum: u64 = row["histogram"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap())
            .sum();
        assert_eq!(Some(sum), count.as_u64());
        assert_eq!(&row["total"], count);
    }
}

#[test]
fn bad_epsilon_is_a_usage_error() {
    for eps in ["0", "-1", "1.5", "NaN"] {
        let out = run(&format!("displacement -d 7 -k 3 -n 3 --epsilon={eps}"));
        assert_eq!(out.code, EXIT_USAGE, "{eps}");
        assert!(out.stderr.contains("--epsilon"), "{}", out.stderr);
    }
}

#[test]
fn asymptotics_sweep() {
    let v = json("asymptotics --d-range 7:100");
    assert_eq!(v["all_bracket_ok"], true);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 94);
    assert_eq!(rows[3]["d"], 10);
    assert_eq!(rows[3]["g_upper"], 502);

    let out = run("asymptotics --d-range 3:10");
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("--d-range"), "{}", out.stderr);
    assert_eq!(run("asymptotics --d-range 10:7").code, EXIT_USAGE);
}

#[test]
fn eigen_systems() {
    let v = json("eigen");
    let systems = v["systems"].as_array().unwrap();
    let expected = [
        ("h73", 5.13912),
        ("h45", 2.86619),
        ("h37", 1.92546),
        ("h38", 1.96552),
    ];
    for (s, (name, lambda)) in systems.iter().zip(expected) {
        assert_eq!(s["system"], name);
        approx(&s["lambda"], lambda, 1e-5);
        approx(&s["lambda_poly"], lambda, 1e-5);
    }
    let v = json("eigen --system param(9)");
    approx(&v["systems"][0]["lambda"], 7.34215380635, 1e-10);
    assert_eq!(run("eigen --system h99").code, EXIT_USAGE);
    assert_eq!(run("eigen --system param(5)").code, EXIT_USAGE);
}

#[test]
fn map_dump() {
    let v = json("dump-map -d 4 -k 5 --radius 3");
    assert_eq!(v["validation"]["euler_defect"], 0);
    assert_eq!(v["vertices"][0]["rotation"].as_array().unwrap().len(), 4);
    let csv = run("dump-map -d 4 -k 5 --radius 2 --format csv").stdout;
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "vertex,layer,complete,rotation");
    assert_eq!(rows.len(), 1 + 33);
}

#[test]
fn output_is_byte_identical_across_runs_and_worker_counts() {
    for args in [
        "bounds -d 4 -k 5",
        "enumerate -d 3 -k 8 -n 12 --kind polygons",
        "geometry -d 5 -k 4 -n 9",
        "displacement -d 3 -k 7 -n 10",
    ] {
        let a = run(&format!("{args} --format json --workers 1"));
        let b = run(&format!("{args} --format json --workers 3"));
        let c = run(&format!("{args} --format json"));
        assert_eq!(a.code, EXIT_OK, "{args}");
        assert_eq!(a.stdout, b.stdout, "{args}");
        assert_eq!(a.stdout, c.stdout, "{args}");
    }
}

#[test]
fn config_hash_tracks_the_numbers_only() {
    let hash = |args: &str| {
        json(args)["meta"]["config_hash"]
            .as_str()
            .unwrap()
            .to_string()
    };
    let base = hash("enumerate -d 4 -k 5 -n 5");
    assert_eq!(base, hash("enumerate -d 4 -k 5 -n 5 --workers 2"));
    assert_ne!(base, hash("enumerate -d 4 -k 5 -n 6"));
    assert_ne!(base, hash("enumerate -d 4 -k 5 -n 5 --kind polygons"));
    assert_ne!(base, hash("enumerate -d 4 -k 5 -n 5 --radius 7"));
}

#[test]
fn floats_carry_twelve_significant_digits() {
    let out = run("bounds -d 7 -k 3 --format json").stdout;
    assert!(out.contains("\"value\": 4.95747479541"), "{out}");
    assert!(out.contains("5.13911942725"), "{out}");
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("hypersaw-{}.json", std::process::id()));
    let out = run(&format!(
        "bounds -d 4 -k 5 --format json --output {}",
        path.display()
    ));
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, run("bounds -d 4 -k 5 --format json").stdout);
}

#[test]
fn flag_errors_exit_two() {
    for args in [
        "bounds -d 7",
        "bounds -d 7 -k 3 --format yaml",
        "enumerate -d 7 -k 3 -n 3 --workers 0",
        "enumerate -d 7 -k 3",
        "frobnicate",
        "enumerate -d 4 -k 5 -n 6 --radius 3",
    ] {
        assert_eq!(run(args).code, EXIT_USAGE, "{args}");
    }
    assert_eq!(run("--help").code, EXIT_OK);
}

#[test]
fn the_binary_uses_the_same_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hypersaw");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["bounds", "-d", "7", "-k", "3", "--format", "json"]);
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(
        String::from_utf8(ok.stdout).unwrap(),
        run("bounds -d 7 -k 3 --format json").stdout
    );
    assert_eq!(
        status(&["bounds", "-d", "3", "-k", "3"]).status.code(),
        Some(EXIT_USAGE)
    );
    assert_eq!(
        status(&["enumerate", "-d", "7", "-k", "3", "-n", "40"])
            .status
            .code(),
        Some(EXIT_BUDGET)
    );
}
