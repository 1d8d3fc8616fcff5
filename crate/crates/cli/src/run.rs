//! Command implementations. Each returns the JSON document, its CSV
//! flattening and the exit code.

use crate::args::{
    ConstructArgs, ConstructionArg, DescribeArgs, Format, IndexArgs, ModeArg, OperatorArgs, RunConfig, VerifyArgs,
};
use numradius::constructions::{
    ck_witness_boost, compress_l1_sum, compress_linf_sum, diagonal_lift, extension_record, lush_witness, midpoint_join, segment_extension,
    JoinSet, LushOutcome, WitnessRecord, DEFAULT_LIFT_CELLS,
};
use numradius::index::{
    bk_suite, ck_suite, compression_ratio, known_index, known_values_suite, rnp_equality_suite, sum_stability_suite,
};
use numradius::io::{matrix_from_json, vector_from_json};
use numradius::maps::lip_lower;
use numradius::spaces::NormKind;
use numradius::{
    estimate_index, parse_space, Error, LinearOperator, LipschitzMap, Mode, NormedSpace, Operator, PwlOperator, SumKind,
    Vector, VerificationReport, VERSION,
};
use serde_json::{json, Value};
use std::path::Path;

pub const PASS: u8 = 0;
pub const FAIL: u8 = 1;
pub const INPUT: u8 = 2;
pub const UNCONVERGED: u8 = 3;

const BK_SAMPLES: usize = 200;
const CK_SAMPLES: usize = 100;

/// A command failure: its exit code and message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) | Error::Parse { .. } | Error::Dimension { .. } | Error::UnsupportedKind(_) => INPUT,
            _ => FAIL,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: INPUT, message: message.into() }
}

pub struct Output {
    pub json: Value,
    pub csv: String,
    pub code: u8,
}

type Outcome = Result<Output, Failure>;

fn table(rows: &[(&str, String)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(rows.iter().map(|r| r.0)).expect("in-memory csv");
    w.write_record(rows.iter().map(|r| r.1.as_str())).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

/// Shortest round-trip digits, matching the JSON output.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite floats serialize")
}

fn document(config: &RunConfig, result: Value) -> Value {
    json!({ "version": VERSION, "config": config, "result": result })
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn space_arg(spec: Option<&str>) -> Result<NormedSpace, Failure> {
    let spec = spec.ok_or_else(|| input("--space is required"))?;
    Ok(parse_space(spec).map_err(|e| input(format!("--space {spec}: {e}")))?)
}

fn point(name: &str, text: Option<&str>, space: &NormedSpace) -> Result<Vector, Failure> {
    let text = text.ok_or_else(|| input(format!("--{name} is required")))?;
    let v = vector_from_json(text).map_err(|e| input(format!("--{name}: {e}")))?;
    space.check(&v).map_err(|e| input(format!("--{name}: {e}")))?;
    Ok(v)
}

/// The operator named by `--matrix` (on `--space`) or `--pwl`; a PWL file
/// carries its own space, which `--space` must match when both are given.
fn operator(
    space: Option<&str>,
    matrix: Option<&Path>,
    pwl: Option<&Path>,
    config: &mut RunConfig,
) -> Result<Operator, Failure> {
    match (matrix, pwl) {
        (Some(m), _) => {
            config.inputs.push(m.display().to_string());
            let s = space_arg(space)?;
            let mat = matrix_from_json(&read(m)?).map_err(|e| input(format!("{}: {e}", m.display())))?;
            Ok(Operator::Linear(LinearOperator::new(s, mat)?))
        }
        (None, Some(p)) => {
            config.inputs.push(p.display().to_string());
            let op = PwlOperator::from_json(&read(p)?).map_err(|e| input(format!("{}: {e}", p.display())))?;
            if let Some(spec) = space {
                let s = space_arg(Some(spec))?;
                if &s != op.space() {
                    return Err(input(format!("--space {spec} does not match the operator's space {}", op.space())));
                }
            }
            Ok(Operator::Pwl(op))
        }
        (None, None) => Err(input("one of --matrix or --pwl is required")),
    }
}

fn strip_witnesses(v: &mut Value) {
    if let Value::Object(map) = v {
        map.remove("witness");
        map.remove("lower_witness");
    }
}

pub fn radius(a: &OperatorArgs) -> Outcome {
    let mut config = RunConfig::new("radius", a.space.as_deref(), &a.common);
    config.tol = Some(a.tol);
    let op = operator(a.space.as_deref(), a.matrix.as_deref(), a.pwl.as_deref(), &mut config)?;
    if !(a.tol > 0.0) {
        return Err(input("--tol must be positive"));
    }
    let b = op.radius(a.tol);
    let mut result = serde_json::to_value(&b).expect("brackets serialize");
    if !a.common.emit_witnesses {
        strip_witnesses(&mut result);
    }
    let method = result["upper_method"]["kind"].as_str().unwrap_or_default().to_string();
    let csv = table(&[
        ("lower", num(b.lower)),
        ("upper", num(b.upper)),
        ("tol", num(b.tol)),
        ("converged", b.converged.to_string()),
        ("upper_method", method),
    ]);
    Ok(Output { json: document(&config, result), csv, code: if b.converged { PASS } else { UNCONVERGED } })
}

pub fn norm(a: &OperatorArgs) -> Outcome {
    let mut config = RunConfig::new("norm", a.space.as_deref(), &a.common);
    config.tol = Some(a.tol);
    let op = operator(a.space.as_deref(), a.matrix.as_deref(), a.pwl.as_deref(), &mut config)?;
    let b = op.norm_bracket();
    let converged = b.upper - b.lower <= a.tol * b.upper.max(1.0);
    let mut result = serde_json::to_value(&b).expect("brackets serialize");
    result["converged"] = json!(converged);
    if !a.common.emit_witnesses {
        strip_witnesses(&mut result);
    }
    let csv = table(&[
        ("lower", num(b.lower)),
        ("upper", num(b.upper)),
        ("converged", converged.to_string()),
    ]);
    Ok(Output { json: document(&config, result), csv, code: if converged { PASS } else { UNCONVERGED } })
}

pub fn index(a: &IndexArgs) -> Outcome {
    let mut config = RunConfig::new("index", Some(&a.space), &a.common);
    config.budget = Some(a.budget);
    config.mode = Some(a.mode);
    let space = space_arg(Some(&a.space))?;
    let mode = match a.mode {
        ModeArg::Linear => Mode::Linear,
        ModeArg::Lipschitz => Mode::Lipschitz,
    };
    let e = estimate_index(&space, mode, a.budget, a.common.seed)?;
    let csv = table(&[
        ("space", e.space.clone()),
        ("mode", format!("{:?}", e.mode).to_lowercase()),
        ("upper", num(e.upper)),
        ("heuristic_value", num(e.heuristic_value)),
        ("witness_converged", e.search_stats.witness_converged.to_string()),
    ]);
    let result = serde_json::to_value(&e).expect("estimates serialize");
    Ok(Output { json: document(&config, result), csv, code: PASS })
}

fn sum_parts(space: &NormedSpace) -> Result<(NormedSpace, NormedSpace, SumKind), Failure> {
    let s = space.as_sum().ok_or_else(|| input(format!("the sums suite needs a sum space, got {space}")))?;
    Ok((s.left.clone(), s.right.clone(), s.kind))
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    let mut config = RunConfig::new("verify", a.space.as_deref(), &a.common);
    config.suite = Some(a.suite.clone());
    let seed = a.common.seed;
    let budget = |default: usize| a.budget.unwrap_or(default);
    let report: VerificationReport = match a.suite.as_str() {
        "bk" => {
            config.budget = Some(budget(BK_SAMPLES));
            bk_suite(&space_arg(a.space.as_deref())?, budget(BK_SAMPLES), seed)?
        }
        "rnp" => {
            config.budget = Some(budget(numradius::index::DEFAULT_BUDGET));
            rnp_equality_suite(&space_arg(a.space.as_deref())?, budget(numradius::index::DEFAULT_BUDGET), seed)?
        }
        "sums" => {
            config.budget = Some(budget(numradius::index::DEFAULT_BUDGET));
            let (x, y, kind) = sum_parts(&space_arg(a.space.as_deref())?)?;
            sum_stability_suite(&x, &y, kind, budget(numradius::index::DEFAULT_BUDGET), seed)?
        }
        "known" => known_values_suite(seed)?,
        "ck" => {
            config.budget = Some(budget(CK_SAMPLES));
            ck_suite(budget(CK_SAMPLES), seed)?
        }
        other => return Err(input(format!("unknown suite '{other}' (expected bk, rnp, sums, known or ck)"))),
    };
    let mut report = report;
    report.config = json!({ "run": config, "suite": report.config });
    if !a.common.emit_witnesses {
        for c in &mut report.cases {
            c.witness = None;
        }
    }
    let code = if !report.passed() {
        FAIL
    } else if report.has_unconverged() {
        UNCONVERGED
    } else {
        PASS
    };
    let csv = report.to_csv();
    let json = serde_json::to_value(&report).expect("reports serialize");
    Ok(Output { json, csv, code })
}

fn record_output(config: &RunConfig, record: &WitnessRecord, extra: Value, emit: bool, code: u8) -> Output {
    let mut rows: Vec<(&str, String)> = vec![("construction", record.construction.clone())];
    rows.extend(record.residuals.iter().map(|(k, v)| (k.as_str(), num(*v))));
    let csv = table(&rows);
    let mut result = json!({
        "construction": record.construction,
        "residuals": record.residuals,
        "summary": extra,
    });
    if emit {
        result["record"] = serde_json::to_value(record).expect("records serialize");
    }
    Output { json: document(config, result), csv, code }
}

pub fn construct(a: &ConstructArgs) -> Outcome {
    let mut config = RunConfig::new("construct", a.space.as_deref(), &a.common);
    config.construction = Some(a.construction);
    config.budget = Some(a.budget);
    let seed = a.common.seed;
    let emit = a.common.emit_witnesses;
    if !(a.eps > 0.0 && a.eps < 0.5) {
        return Err(input("--eps must lie in (0, 1/2)"));
    }
    match a.construction {
        ConstructionArg::Extend => {
            config.parameters = Some(json!({ "x": a.x, "y": a.y, "fx": a.fx, "fy": a.fy, "lipschitz": a.lipschitz }));
            let s = space_arg(a.space.as_deref())?;
            let (x, y) = (point("x", a.x.as_deref(), &s)?, point("y", a.y.as_deref(), &s)?);
            let (fx, fy) = (point("fx", a.fx.as_deref(), &s)?, point("fy", a.fy.as_deref(), &s)?);
            let map = segment_extension(&s, &s, (&x, &y), (&fx, &fy), a.lipschitz, seed)?;
            let ex = s.norm(&(map.apply(&x)? - &fx))?;
            let ey = s.norm(&(map.apply(&y)? - &fy))?;
            let r = 2.0 * s.norm(&x)?.max(s.norm(&y)?) + 1.0;
            let worst = lip_lower(&map, r, a.budget, seed);
            let excess = (worst.value - a.lipschitz).max(0.0);
            let mut record = extension_record(&map, (&x, &y), (&fx, &fy), a.lipschitz);
            record.outputs["worst_pair"] = serde_json::to_value(&worst).expect("pairs serialize");
            record.residuals.insert("lipschitz_excess".into(), excess);
            let ok = ex <= 1e-12 && ey <= 1e-12 && excess <= 1e-9 * a.lipschitz.max(1.0);
            let summary = json!({ "pairs_checked": a.budget, "worst_quotient": worst.value });
            Ok(record_output(&config, &record, summary, emit, if ok { PASS } else { FAIL }))
        }
        ConstructionArg::Join => {
            config.parameters = Some(json!({ "x": a.x, "y": a.y, "eps": a.eps }));
            let s = space_arg(a.space.as_deref())?;
            let (x, y) = (point("x", a.x.as_deref(), &s)?, point("y", a.y.as_deref(), &s)?);
            let r = midpoint_join(&s, &x, &y, &JoinSet::Sphere, a.eps)?;
            let ok = r.ratio_yz <= 1.0 + a.eps;
            let summary = json!({ "ratio_xz": r.ratio_xz, "ratio_yz": r.ratio_yz, "lambda": r.lambda });
            Ok(record_output(&config, &r.record(&x, &y, a.eps), summary, emit, if ok { PASS } else { FAIL }))
        }
        ConstructionArg::Lush => {
            config.parameters = Some(json!({ "x": a.x, "y": a.y, "eps": a.eps }));
            let s = space_arg(a.space.as_deref())?;
            let (x, y) = (point("x", a.x.as_deref(), &s)?, point("y", a.y.as_deref(), &s)?);
            let out = lush_witness(&s, &x, &y, a.eps, a.budget, seed)?;
            let code = match out {
                LushOutcome::Found(_) => PASS,
                LushOutcome::NotFound { .. } => UNCONVERGED,
            };
            let summary = json!({ "found": code == PASS });
            Ok(record_output(&config, &out.record(&s, &x, &y, a.eps), summary, emit, code))
        }
        ConstructionArg::Boost => {
            config.parameters = Some(json!({ "x": a.x, "y": a.y, "eps": a.eps }));
            let op = operator(a.space.as_deref(), a.matrix.as_deref(), a.pwl.as_deref(), &mut config)?;
            let map = op.as_map();
            let s = op.space().clone();
            let (x, y) = match (a.x.as_deref(), a.y.as_deref()) {
                (None, None) => {
                    let p = lip_lower(map.as_ref(), map.sample_radius(), a.budget, seed);
                    (p.x, p.y)
                }
                (x, y) => (point("x", x, &s)?, point("y", y, &s)?),
            };
            let b = ck_witness_boost(map.as_ref(), &x, &y, a.eps)?;
            let ok = b.value > (1.0 - 2.0 * a.eps) * b.lip_norm;
            let summary = json!({ "value": b.value, "lip_norm": b.lip_norm, "coordinate": b.s });
            Ok(record_output(&config, &b.record(&y, a.eps), summary, emit, if ok { PASS } else { FAIL }))
        }
        ConstructionArg::Compress => {
            config.parameters = Some(json!({ "eps": a.eps }));
            let op = operator(a.space.as_deref(), a.matrix.as_deref(), a.pwl.as_deref(), &mut config)?;
            let kind = match op.space().kind() {
                NormKind::Sum(s) => s.kind,
                _ => return Err(input(format!("compression needs an operator on a sum space, got {}", op.space()))),
            };
            let (c, name) = match kind {
                SumKind::Linf => (compress_linf_sum(op.as_map(), a.eps, a.budget, seed)?, "linf_sum_compress"),
                SumKind::L1 => (compress_l1_sum(op.as_map(), a.eps, a.budget, seed)?, "l1_sum_compress"),
            };
            let before = op.normalized_upper();
            let after = compression_ratio(&c, seed);
            let summary = json!({
                "space": c.map.domain().to_string(),
                "normalized_radius_before": before,
                "normalized_radius_after": after,
            });
            Ok(record_output(&config, &c.record(name), summary, emit, PASS))
        }
        ConstructionArg::Lift => {
            config.parameters = Some(json!({ "blocks": a.blocks }));
            let Operator::Pwl(p) = operator(a.space.as_deref(), None, a.pwl.as_deref(), &mut config)? else {
                return Err(input("lift needs --pwl"));
            };
            let lifted = diagonal_lift(&p, a.blocks, DEFAULT_LIFT_CELLS)?;
            let (l0, l1) = (p.lip_norm(), lifted.lip_norm());
            let (r0, r1) = (p.lip_radius(1e-9), lifted.lip_radius(1e-9));
            let record = WitnessRecord {
                construction: "diagonal_lift".into(),
                inputs: json!({ "blocks": a.blocks }),
                outputs: serde_json::from_str(&lifted.to_json()).expect("operator JSON parses"),
                residuals: [
                    ("lip_norm", (l1 - l0).abs()),
                    ("radius_lower", (r1.lower - r0.lower).abs()),
                    ("radius_upper", (r1.upper - r0.upper).abs()),
                ]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            };
            let ok = (l1 - l0).abs() <= 1e-12 * l0.max(1.0) && r1.width() <= 1e-3 && r0.width() <= 1e-3;
            let summary = json!({
                "space": lifted.space().to_string(),
                "cells": lifted.cells().len(),
                "lip_norm": [l0, l1],
                "radius": [[r0.lower, r0.upper], [r1.lower, r1.upper]],
            });
            Ok(record_output(&config, &record, summary, emit, if ok { PASS } else { FAIL }))
        }
    }
}

fn kind_name(space: &NormedSpace) -> String {
    match space.kind() {
        NormKind::PNorm(p) if p.is_infinite() => "p-norm (p = inf)".into(),
        NormKind::PNorm(p) => format!("p-norm (p = {p})"),
        NormKind::Polyhedral(_) => "polyhedral".into(),
        NormKind::Sum(s) => format!("{}-sum", format!("{:?}", s.kind).to_lowercase()),
    }
}

pub fn describe(a: &DescribeArgs) -> Outcome {
    let config = RunConfig::new("describe", Some(&a.space), &a.common);
    let space = space_arg(Some(&a.space))?;
    let known = known_index(&space);
    let mut result = json!({
        "space": space.to_string(),
        "dim": space.dim(),
        "field": space.field(),
        "kind": kind_name(&space),
        "known_index": known,
        "norming_points": space.norming_points().map(|p| p.len()),
    });
    match space.kind() {
        NormKind::Polyhedral(p) => {
            result["vertices"] = json!(p.vertices);
            result["facets"] = json!(p.facets);
        }
        NormKind::Sum(s) => {
            result["summands"] = json!([s.left.to_string(), s.right.to_string()]);
        }
        NormKind::PNorm(_) => {}
    }
    let csv = table(&[
        ("space", space.to_string()),
        ("dim", space.dim().to_string()),
        ("field", format!("{:?}", space.field()).to_lowercase()),
        ("kind", kind_name(&space)),
        ("known_index", known.map(num).unwrap_or_default()),
    ]);
    Ok(Output { json: document(&config, result), csv, code: PASS })
}

pub fn render(out: &Output, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("values serialize") + "\n",
        Format::Csv => out.csv.clone(),
    }
}
