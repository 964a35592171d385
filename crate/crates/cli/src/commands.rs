use hypersaw_core::bounds::{bounds_report, mu_p_upper_deg3, BoundsReport};
use hypersaw_core::enumeration::{
    count_saps, count_saws, displacement_table, sap_radius_needed, CountTable,
};
use hypersaw_core::geometry::survey;
use hypersaw_core::tessellation::{estimate_ball_size, validate_map};
use hypersaw_core::transfer::{
    asymptotic_check, builtin_system, characteristic_polynomial, perron_root, perron_root_poly,
    BUILTIN_NAMES,
};
use hypersaw_core::{build_ball_with_budget, Error, PlanarMap, TessellationParams};
use itertools::Itertools;
use serde_json::{json, Value};

use crate::args::{Format, Kind, Limits, Shape};
use crate::render::{big_number, Cell, Document, Meta, Table};
use crate::CliError;

/// A report plus the invariant failures it uncovered (exit 3 if any).
pub struct Outcome {
    pub doc: Document,
    pub failures: Vec<String>,
}

impl Outcome {
    fn ok(doc: Document) -> Outcome {
        Outcome {
            doc,
            failures: Vec::new(),
        }
    }
}

/// Walks of length beyond this are refused without `--force`.
const WORK_LIMIT: f64 = 5e8;
const MAX_HORIZON: usize = 24;

pub fn params(shape: Shape) -> Result<TessellationParams, CliError> {
    TessellationParams::new(shape.d, shape.k).map_err(|e| CliError::Usage(format!("-d/-k: {e}")))
}

pub fn core_error(e: Error) -> CliError {
    match e {
        Error::DegenerateParams { .. } | Error::NotHyperbolic { .. } => {
            CliError::Usage(format!("-d/-k: {e}"))
        }
        Error::UnknownSystem(_) | Error::ParamTooSmall(_) => CliError::Usage(e.to_string()),
        Error::VertexBudget { .. } => CliError::Budget(format!("{e}; raise --vertex-budget")),
        Error::BeyondRadius { .. } => CliError::Budget(format!("{e}; raise --radius")),
        Error::InteriorUncertified(_) => {
            CliError::Invariant(format!("{e}; a larger --radius may be needed"))
        }
        other => CliError::Invariant(other.to_string()),
    }
}

/// Largest length enumerated without `--force`, and the growth rate used
/// to pick it.
pub fn horizon(params: TessellationParams) -> (usize, f64) {
    let growth = bounds_report(params)
        .ok()
        .and_then(|r| r.best_mu_w_lower())
        .unwrap_or(params.d() as f64 - 1.0)
        .max(1.01);
    let n = (WORK_LIMIT.ln() / growth.ln()).floor() as usize;
    (n.min(MAX_HORIZON), growth)
}

fn prepare_map(
    params: TessellationParams,
    n: usize,
    needed: u32,
    limits: Limits,
) -> Result<PlanarMap, CliError> {
    let radius = limits.radius.unwrap_or(needed);
    if radius < needed {
        return Err(CliError::Usage(format!(
            "--radius {radius} is below the radius {needed} needed for n = {n}"
        )));
    }
    let (d, k) = (params.d(), params.k());
    let mut problems = Vec::new();
    let estimate = estimate_ball_size(params, radius);
    if estimate > limits.vertex_budget as u64 {
        problems.push(format!(
            "H({d},{k}) at radius {radius} needs about {estimate} vertices, over the vertex \
             budget of {}; a budget of at least {estimate} is required (--vertex-budget)",
            limits.vertex_budget
        ));
    }
    let (h, growth) = horizon(params);
    if n > h && !limits.force {
        problems.push(format!(
            "n = {n} is past the enumeration horizon {h} for H({d},{k}) \
             (about {:.2e} walks at growth {growth:.4}); pass --force to run anyway",
            growth.powi(n as i32)
        ));
    }
    if !problems.is_empty() {
        return Err(CliError::Budget(problems.join("\n")));
    }
    build_ball_with_budget(params, radius, limits.vertex_budget).map_err(core_error)
}

fn quantity_table(rows: &[(&str, Cell)]) -> Table {
    let mut t = Table::new("", &["quantity", "value"]);
    for (name, value) in rows {
        t.push(vec![(*name).into(), value.clone()]);
    }
    t
}

pub fn bounds(shape: Shape) -> Result<Outcome, CliError> {
    let params = params(shape)?;
    let r: BoundsReport = bounds_report(params).map_err(core_error)?;
    let meta = Meta::new(
        "bounds",
        Some(r.d),
        Some(r.k),
        None,
        &json!({"d": r.d, "k": r.k}),
    );
    let rows: Vec<(&str, Cell)> = vec![
        ("h", r.h.into()),
        ("R_upper", r.r_upper.into()),
        ("mu_p2_upper", r.mu_p2_upper.into()),
        ("mu_p_upper_mixed", r.mu_p_upper_mixed.value.into()),
        ("p_star", r.mu_p_upper_mixed.p_star.into()),
        ("mu_p_upper_deg3", r.mu_p_upper_deg3.into()),
        ("mu_p_lower", r.mu_p_lower.into()),
        ("mu_w_lower_closed", r.mu_w_lower_closed.into()),
        ("mu_w_lower_eigen", r.mu_w_lower_eigen.into()),
        (
            "mu_w_lower_eigen_system",
            r.mu_w_lower_eigen_system.as_deref().into(),
        ),
        ("mu_w_upper", r.mu_w_upper.into()),
        ("mu_p_lt_mu_w", r.verdicts.mu_p_lt_mu_w.into()),
        ("exponent_condition", r.verdicts.exponent_condition.into()),
    ];
    let mut failures = Vec::new();
    if r.mu_p_lower > r.best_mu_p_upper() {
        failures.push("polygon lower bound exceeds its upper bound".into());
    }
    if r.best_mu_w_lower().is_some_and(|l| l > r.mu_w_upper) {
        failures.push("walk lower bound exceeds d - 1".into());
    }
    let csv = quantity_table(&rows);
    Ok(Outcome {
        doc: Document {
            meta,
            json: serde_json::to_value(&r).expect("serializable"),
            human: vec![csv.clone()],
            csv,
            notes: Vec::new(),
        },
        failures,
    })
}

fn counts_json(table: &CountTable) -> Value {
    Value::Array(table.values.iter().map(big_number).collect())
}

pub fn enumerate(shape: Shape, n: usize, kind: Kind, limits: Limits) -> Result<Outcome, CliError> {
    let params = params(shape)?;
    let needed = match kind {
        Kind::Walks => n as u32,
        Kind::Polygons => sap_radius_needed(n),
    };
    let map = prepare_map(params, n, needed, limits)?;
    let report = bounds_report(params).map_err(core_error)?;
    let key = json!({"d": shape.d, "k": shape.k, "n": n, "kind": kind_name(kind),
                     "radius": map.radius(), "vertex_budget": limits.vertex_budget});
    let meta = Meta::new(
        "enumerate",
        Some(shape.d),
        Some(shape.k),
        Some(map.radius()),
        &key,
    );
    let d = params.d() as f64;
    let mut failures = Vec::new();
    let (human, json) = match kind {
        Kind::Walks => {
            let c = count_saws(&map, n).map_err(core_error)?;
            let lower = report.best_mu_w_lower();
            let roots: Vec<f64> = (1..=n).map(|i| c.as_f64(i).powf(1.0 / i as f64)).collect();
            let below: Vec<usize> = (1..=n)
                .filter(|&i| lower.is_some_and(|l| roots[i - 1] < l * (1.0 - 1e-12)))
                .collect();
            if !below.is_empty() {
                failures.push(format!(
                    "c_n^(1/n) below the walk lower bound at n = {below:?}"
                ));
            }
            let broken: Vec<(usize, usize)> = (1..=n)
                .flat_map(|a| (a..=n - a).map(move |b| (a, b)))
                .filter(|&(a, b)| c.values[a + b] > &c.values[a] * &c.values[b])
                .collect();
            if !broken.is_empty() {
                failures.push(format!("c_(a+b) > c_a c_b for (a, b) in {broken:?}"));
            }
            let mut human = Table::new("", &["n", "c_n", "c_n^(1/n)"]);
            for i in 0..=n {
                let root = (i > 0).then(|| roots[i - 1]);
                human.push(vec![i.into(), (&c.values[i]).into(), root.into()]);
            }
            let json = json!({
                "kind": "walks",
                "counts": counts_json(&c),
                "root_test": {"lower_bound": lower, "violations": below},
                "submultiplicative_violations": broken,
            });
            (human, json)
        }
        Kind::Polygons => {
            let p = count_saps(&map, n).map_err(core_error)?;
            let mixed = report.mu_p_upper_mixed.value;
            let deg3 = (params.d() == 3)
                .then(|| mu_p_upper_deg3(params.k()).ok())
                .flatten();
            let mixed_ok: Vec<bool> = (0..=n)
                .map(|i| p.as_f64(i) <= d * mixed.powi(i as i32) * (1.0 + 1e-12))
                .collect();
            let deg3_ok: Vec<bool> = (0..=n)
                .map(|i| {
                    deg3.is_none_or(|b| {
                        let m = i as f64;
                        p.as_f64(i) <= m * m * b.powi(i as i32) * (1.0 + 1e-12)
                    })
                })
                .collect();
            for (i, (a, b)) in mixed_ok.iter().zip(&deg3_ok).enumerate() {
                if !a {
                    failures.push(format!("p_{i} exceeds d * mu_p_upper_mixed^{i}"));
                }
                if !b {
                    failures.push(format!("p_{i} exceeds {i}^2 * N_k^{i}"));
                }
            }
            let mut human = Table::new("", &["n", "p_n", "d*B^n", "n^2*N_k^n"]);
            for i in 0..=n {
                let m = i as f64;
                human.push(vec![
                    i.into(),
                    (&p.values[i]).into(),
                    (d * mixed.powi(i as i32)).into(),
                    deg3.map(|b| m * m * b.powi(i as i32)).into(),
                ]);
            }
            let json = json!({
                "kind": "polygons",
                "counts": counts_json(&p),
                "mixed_bound": mixed,
                "mixed_bound_ok": mixed_ok,
                "deg3_bound": deg3,
                "deg3_bound_ok": deg3_ok,
            });
            (human, json)
        }
    };
    let mut csv = Table::new("", &["n", kind_column(kind)]);
    for row in &human.rows {
        csv.push(row[..2].to_vec());
    }
    Ok(Outcome {
        doc: Document {
            meta,
            json,
            csv,
            human: vec![human],
            notes: Vec::new(),
        },
        failures,
    })
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Walks => "walks",
        Kind::Polygons => "polygons",
    }
}

fn kind_column(kind: Kind) -> &'static str {
    match kind {
        Kind::Walks => "c_n",
        Kind::Polygons => "p_n",
    }
}

pub fn geometry(
    shape: Shape,
    n: usize,
    limits: Limits,
    format: Format,
) -> Result<Outcome, CliError> {
    let params = params(shape)?;
    let map = prepare_map(params, n, sap_radius_needed(n) + 1, limits)?;
    let key = json!({"d": shape.d, "k": shape.k, "n": n, "radius": map.radius(),
                     "vertex_budget": limits.vertex_budget});
    let meta = Meta::new(
        "geometry",
        Some(shape.d),
        Some(shape.k),
        Some(map.radius()),
        &key,
    );
    let (summary, records) = survey(&map, n, format == Format::Csv).map_err(core_error)?;

    let mut csv = Table::new(
        "",
        &[
            "length",
            "interior",
            "chords",
            "inner_boundary",
            "m",
            "edges_enum_residual",
            "main_lemma_margin",
            "no_chord_residual",
        ],
    );
    for r in &records {
        csv.push(vec![
            r.length.into(),
            r.interior.into(),
            r.chords.into(),
            r.inner_boundary.into(),
            r.m.into(),
            r.edges_enum_residual.into(),
            r.main_lemma_margin.into(),
            r.no_chord_residual.into(),
        ]);
    }
    let mut by_length = Table::new(
        "",
        &[
            "length",
            "polygons",
            "min_margin",
            "tight",
            "edges_enum_failures",
            "no_chord_checked",
            "no_chord_failures",
            "max_interior",
        ],
    );
    for (len, s) in &summary.by_length {
        by_length.push(vec![
            (*len).into(),
            s.count.into(),
            s.min_margin.into(),
            s.tight.into(),
            s.edges_enum_failures.into(),
            s.no_chord_checked.into(),
            s.no_chord_failures.into(),
            s.max_interior.into(),
        ]);
    }
    let mut failures = Vec::new();
    if summary.edges_enum_failures() > 0 {
        failures.push(format!(
            "{} polygons break the edge-count identity",
            summary.edges_enum_failures()
        ));
    }
    if summary.no_chord_failures() > 0 {
        failures.push(format!(
            "{} chordless polygons break the boundary-length identity",
            summary.no_chord_failures()
        ));
    }
    if let Some(m) = summary.min_margin().filter(|&m| m < 0) {
        failures.push(format!("isoperimetric margin {m} < 0"));
    }
    if summary.origin_inside > 0 {
        failures.push(format!(
            "{} polygons enclose the origin",
            summary.origin_inside
        ));
    }
    let json = json!({
        "n_max": n,
        "polygons": summary.total(),
        "min_margin": summary.min_margin(),
        "edges_enum_failures": summary.edges_enum_failures(),
        "no_chord_failures": summary.no_chord_failures(),
        "all_hold": summary.all_hold(),
        "by_length": summary.by_length.iter().map(|(len, s)| {
            let mut v = serde_json::to_value(s).expect("serializable");
            v["length"] = json!(len);
            v
        }).collect_vec(),
    });
    let notes = vec![format!(
        "{} polygons, min margin {}, {} edge-count failures, {} boundary-length failures",
        summary.total(),
        summary.min_margin().map_or("-".into(), |m| m.to_string()),
        summary.edges_enum_failures(),
        summary.no_chord_failures()
    )];
    Ok(Outcome {
        doc: Document {
            meta,
            json,
            csv,
            human: vec![by_length],
            notes,
        },
        failures,
    })
}

pub fn displacement(
    shape: Shape,
    n: usize,
    epsilon: f64,
    limits: Limits,
) -> Result<Outcome, CliError> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(CliError::Usage(format!(
            "--epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let params = params(shape)?;
    let map = prepare_map(params, n, n as u32, limits)?;
    let key = json!({"d": shape.d, "k": shape.k, "n": n, "epsilon": epsilon,
                     "radius": map.radius(), "vertex_budget": limits.vertex_budget});
    let meta = Meta::new(
        "displacement",
        Some(shape.d),
        Some(shape.k),
        Some(map.radius()),
        &key,
    );
    let table = displacement_table(&map, n).map_err(core_error)?;
    let mut csv = Table::new("", &["n", "r", "count", "p_far"]);
    let mut human = Table::new("", &["n", "c_n", "mean_distance", "P(dist >= eps n)"]);
    let mut rows = Vec::new();
    for row in &table {
        let total = row.total();
        let p = row.probability_at_least(epsilon);
        for (r, c) in row.histogram.iter().enumerate() {
            csv.push(vec![row.n.into(), r.into(), c.into(), p.into()]);
        }
        let mean = mean_distance(&row.histogram);
        human.push(vec![row.n.into(), (&total).into(), mean.into(), p.into()]);
        rows.push(json!({
            "n": row.n,
            "total": big_number(&total),
            "p_far": p,
            "mean_distance": mean,
            "histogram": row.histogram.iter().map(big_number).collect_vec(),
        }));
    }
    Ok(Outcome::ok(Document {
        meta,
        json: json!({"epsilon": epsilon, "rows": rows}),
        csv,
        human: vec![human],
        notes: Vec::new(),
    }))
}

fn mean_distance(histogram: &[num_bigint::BigUint]) -> f64 {
    use num_traits::ToPrimitive;
    let (mut num, mut den) = (0.0, 0.0);
    for (r, c) in histogram.iter().enumerate() {
        let c = c.to_f64().unwrap_or(f64::INFINITY);
        num += r as f64 * c;
        den += c;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

pub fn eigen(system: Option<&str>) -> Result<Outcome, CliError> {
    let names: Vec<String> = match system {
        Some(s) => vec![s.to_string()],
        None => BUILTIN_NAMES.iter().map(|s| s.to_string()).collect(),
    };
    let meta = Meta::new("eigen", None, None, None, &json!({"systems": names}));
    let mut table = Table::new(
        "",
        &[
            "system",
            "dimension",
            "lambda",
            "lambda_poly",
            "residual",
            "iterations",
        ],
    );
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for name in &names {
        let sys = builtin_system(name).map_err(|e| CliError::Usage(format!("--system: {e}")))?;
        let root = perron_root(&sys).map_err(core_error)?;
        let poly_root = perron_root_poly(&sys).map_err(core_error)?;
        if (root.lambda - poly_root).abs() > 1e-9 * root.lambda {
            failures.push(format!(
                "{name}: power iteration {} and polynomial root {poly_root} disagree",
                root.lambda
            ));
        }
        table.push(vec![
            name.as_str().into(),
            sys.dimension().into(),
            root.lambda.into(),
            poly_root.into(),
            root.residual.into(),
            root.iterations.into(),
        ]);
        let poly: Vec<String> = characteristic_polynomial(&sys.matrix)
            .iter()
            .map(|c| c.to_string())
            .collect();
        rows.push(json!({
            "system": name,
            "dimension": sys.dimension(),
            "lambda": root.lambda,
            "lambda_poly": poly_root,
            "residual": root.residual,
            "iterations": root.iterations,
            "characteristic_polynomial": poly,
            "matrix": sys.matrix,
        }));
    }
    Ok(Outcome {
        doc: Document {
            meta,
            json: json!({ "systems": rows }),
            csv: table.clone(),
            human: vec![table],
            notes: Vec::new(),
        },
        failures,
    })
}

pub fn asymptotics(range: (u64, u64)) -> Result<Outcome, CliError> {
    let (start, end) = range;
    if start < 7 {
        return Err(CliError::Usage(format!(
            "--d-range: range must start at 7 or above, got {start}"
        )));
    }
    let rows = asymptotic_check(start, end).map_err(core_error)?;
    let meta = Meta::new(
        "asymptotics",
        None,
        None,
        None,
        &json!({"start": start, "end": end}),
    );
    let mut table = Table::new(
        "",
        &[
            "d",
            "sign_lower",
            "g_upper",
            "identity_ok",
            "expansion_ok",
            "bracket_ok",
        ],
    );
    for r in &rows {
        table.push(vec![
            r.d.into(),
            (r.sign_lower as i64).into(),
            Cell::Int(r.g_upper.to_string()),
            r.identity_ok.into(),
            r.expansion_ok.into(),
            r.bracket_ok.into(),
        ]);
    }
    let bad: Vec<u64> = rows
        .iter()
        .filter(|r| !(r.bracket_ok && r.identity_ok && r.expansion_ok))
        .map(|r| r.d)
        .collect();
    let failures = if bad.is_empty() {
        Vec::new()
    } else {
        vec![format!("bracket check fails for d in {bad:?}")]
    };
    let json = json!({
        "rows": rows.iter().map(|r| json!({
            "d": r.d,
            "sign_lower": r.sign_lower,
            "g_upper": r.g_upper.to_string().parse::<serde_json::Number>().expect("integer"),
            "identity_ok": r.identity_ok,
            "expansion_ok": r.expansion_ok,
            "bracket_ok": r.bracket_ok,
        })).collect_vec(),
        "all_bracket_ok": bad.is_empty(),
    });
    let notes = vec![format!("{} rows, {} failing", rows.len(), bad.len())];
    Ok(Outcome {
        doc: Document {
            meta,
            json,
            csv: table.clone(),
            human: vec![table],
            notes,
        },
        failures,
    })
}

pub fn dump_map(shape: Shape, radius: u32, budget: usize) -> Result<Outcome, CliError> {
    let params = params(shape)?;
    let estimate = estimate_ball_size(params, radius);
    if estimate > budget as u64 {
        return Err(CliError::Budget(format!(
            "H({},{}) at radius {radius} needs about {estimate} vertices, over the vertex \
             budget of {budget}; a budget of at least {estimate} is required (--vertex-budget)",
            shape.d, shape.k
        )));
    }
    let map = build_ball_with_budget(params, radius, budget).map_err(core_error)?;
    let meta = Meta::new(
        "dump-map",
        Some(shape.d),
        Some(shape.k),
        Some(radius),
        &json!({"d": shape.d, "k": shape.k, "radius": radius, "vertex_budget": budget}),
    );
    let validation = validate_map(&map);
    let failures = if validation.is_ok() {
        Vec::new()
    } else {
        vec![format!("map validation failed: {validation:?}")]
    };
    let mut csv = Table::new("", &["vertex", "layer", "complete", "rotation"]);
    for v in 0..map.vertex_count() as u32 {
        csv.push(vec![
            (v as u64).into(),
            (map.layer(v) as u64).into(),
            map.is_complete(v).into(),
            Cell::Text(map.neighbours(v).iter().join(" ")),
        ]);
    }
    let summary = quantity_table(&[
        ("vertices", map.vertex_count().into()),
        ("edges", map.edge_count().into()),
        ("faces", map.face_count().into()),
        ("complete_within", (map.complete_within() as u64).into()),
        (
            "layer_sizes",
            Cell::Text(map.layer_sizes().iter().join(" ")),
        ),
        ("valid", validation.is_ok().into()),
    ]);
    let mut json = serde_json::to_value(map.to_dump()).expect("serializable");
    json["complete_within"] = json!(map.complete_within());
    json["validation"] = serde_json::to_value(&validation).expect("serializable");
    Ok(Outcome {
        doc: Document {
            meta,
            json,
            csv,
            human: vec![summary],
            notes: Vec::new(),
        },
        failures,
    })
}
