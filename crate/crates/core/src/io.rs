//! JSON instance and trace documents. Every number is written as a JSON
//! integer or as a string `"p/q"`.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::benders::{replay_master_values, CorePointMode, IterationOutcome, SolveResult, SolveStatus, SolverConfig};
use crate::cglp::ObjectiveSpec;
use crate::model::{EpiPoint, Instance, MasterDomain, ModelError};
use crate::rational::{fmt_rational, parse_rational, Rational};
use crate::separation::Cut;
use crate::verify::{face_report, Classification, FaceReport, VerifyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Dimension(#[from] ModelError),
}

fn field_err(field: &str, message: impl Into<String>) -> IoError {
    IoError::Field { field: field.to_string(), message: message.into() }
}

fn parse_json(text: &str) -> Result<Value, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn rational_to_json(r: &Rational) -> Value {
    if r.denom() == &1.into() {
        if let Ok(i) = i64::try_from(r.numer()) {
            return json!(i);
        }
    }
    Value::String(fmt_rational(r))
}

pub fn rational_from_json(v: &Value, field: &str) -> Result<Rational, IoError> {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => Err(field_err(field, format!("`{n}` is not an integer; write fractions as \"p/q\""))),
        },
        Value::String(s) => parse_rational(s).map_err(|e| field_err(field, e.to_string())),
        other => Err(field_err(field, format!("expected a number, found {other}"))),
    }
}

fn vec_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

fn matrix_to_json(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|r| vec_to_json(r)).collect())
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value, IoError> {
    obj.get(key).ok_or_else(|| field_err(&join(ctx, key), "missing"))
}

fn join(ctx: &str, key: &str) -> String {
    if ctx.is_empty() {
        key.to_string()
    } else {
        format!("{ctx}.{key}")
    }
}

fn as_object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object().ok_or_else(|| field_err(field, "expected an object"))
}

fn vec_from_json(v: &Value, field: &str) -> Result<Vec<Rational>, IoError> {
    let arr = v.as_array().ok_or_else(|| field_err(field, "expected a list"))?;
    arr.iter().enumerate().map(|(i, x)| rational_from_json(x, &format!("{field}[{i}]"))).collect()
}

fn matrix_from_json(v: &Value, field: &str) -> Result<Vec<Vec<Rational>>, IoError> {
    let arr = v.as_array().ok_or_else(|| field_err(field, "expected a list of rows"))?;
    arr.iter().enumerate().map(|(i, r)| vec_from_json(r, &format!("{field}[{i}]"))).collect()
}

fn usize_from_json(v: &Value, field: &str) -> Result<usize, IoError> {
    v.as_u64().map(|u| u as usize).ok_or_else(|| field_err(field, "expected a nonnegative integer"))
}

pub fn instance_to_json(instance: &Instance) -> Value {
    let master = match instance.master() {
        MasterDomain::Polyhedral { g_matrix, g_rhs } => {
            json!({"type": "polyhedron", "G": matrix_to_json(g_matrix), "g": vec_to_json(g_rhs)})
        }
        MasterDomain::Finite { points } => json!({"type": "finite", "points": matrix_to_json(points)}),
    };
    json!({
        "n": instance.n(),
        "k": instance.k(),
        "m": instance.m(),
        "c": vec_to_json(instance.c()),
        "d": vec_to_json(instance.d()),
        "H": matrix_to_json(instance.h()),
        "A": matrix_to_json(instance.a()),
        "b": vec_to_json(instance.b()),
        "master": master,
        "eta_lower_bound": rational_to_json(instance.eta_lower_bound()),
    })
}

pub fn serialize_instance(instance: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_json(instance)).expect("JSON values always serialize")
}

pub fn instance_from_json(v: &Value) -> Result<Instance, IoError> {
    let obj = as_object(v, "")?;
    let c = vec_from_json(get(obj, "c", "")?, "c")?;
    let d = vec_from_json(get(obj, "d", "")?, "d")?;
    let h = matrix_from_json(get(obj, "H", "")?, "H")?;
    let a = matrix_from_json(get(obj, "A", "")?, "A")?;
    let b = vec_from_json(get(obj, "b", "")?, "b")?;
    for (key, actual) in [("n", c.len()), ("k", d.len()), ("m", b.len())] {
        if let Some(v) = obj.get(key) {
            let declared = usize_from_json(v, key)?;
            if declared != actual {
                return Err(ModelError::Dimension { what: key.to_string(), expected: declared, found: actual }.into());
            }
        }
    }
    let mo = as_object(get(obj, "master", "")?, "master")?;
    let kind = get(mo, "type", "master")?.as_str().ok_or_else(|| field_err("master.type", "expected a string"))?;
    let master = match kind {
        "polyhedron" => MasterDomain::Polyhedral {
            g_matrix: matrix_from_json(get(mo, "G", "master")?, "master.G")?,
            g_rhs: vec_from_json(get(mo, "g", "master")?, "master.g")?,
        },
        "finite" => MasterDomain::Finite { points: matrix_from_json(get(mo, "points", "master")?, "master.points")? },
        other => return Err(field_err("master.type", format!("unknown domain type `{other}`"))),
    };
    let eta = rational_from_json(get(obj, "eta_lower_bound", "")?, "eta_lower_bound")?;
    Ok(Instance::new(c, d, h, a, b, master, eta)?)
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    instance_from_json(&parse_json(text)?)
}

/// SHA-256 of the compact serialization, hex encoded.
pub fn instance_digest(instance: &Instance) -> String {
    let text = serde_json::to_string(&instance_to_json(instance)).expect("JSON values always serialize");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn point_to_json(p: &EpiPoint) -> Value {
    json!({"x": vec_to_json(&p.x), "eta": rational_to_json(&p.eta)})
}

pub fn point_from_json(v: &Value, field: &str) -> Result<EpiPoint, IoError> {
    let o = as_object(v, field)?;
    Ok(EpiPoint::new(
        vec_from_json(get(o, "x", field)?, &join(field, "x"))?,
        rational_from_json(get(o, "eta", field)?, &join(field, "eta"))?,
    ))
}

pub fn cut_to_json(cut: &Cut) -> Value {
    json!({"pi": vec_to_json(&cut.pi), "pi0": rational_to_json(&cut.pi0), "alpha": rational_to_json(&cut.alpha)})
}

pub fn cut_from_json(v: &Value, field: &str) -> Result<Cut, IoError> {
    let o = as_object(v, field)?;
    Ok(Cut::new(
        vec_from_json(get(o, "pi", field)?, &join(field, "pi"))?,
        rational_from_json(get(o, "pi0", field)?, &join(field, "pi0"))?,
        rational_from_json(get(o, "alpha", field)?, &join(field, "alpha"))?,
    ))
}

pub fn strategy_to_json(s: &ObjectiveSpec) -> Value {
    match s {
        ObjectiveSpec::MisOnes => json!({"kind": "mis"}),
        ObjectiveSpec::Directional { omega, omega0 } => {
            json!({"kind": "directional", "omega": vec_to_json(omega), "omega0": rational_to_json(omega0)})
        }
        ObjectiveSpec::Custom { omega_tilde, omega_tilde0 } => json!({
            "kind": "custom",
            "omega_tilde": vec_to_json(omega_tilde),
            "omega_tilde0": rational_to_json(omega_tilde0),
        }),
    }
}

fn core_mode_to_json(mode: &Option<CorePointMode>) -> Value {
    match mode {
        None => Value::Null,
        Some(CorePointMode::Fixed(p)) => json!({"kind": "fixed", "point": point_to_json(p)}),
        Some(CorePointMode::FromPoint { omega, omega0 }) => {
            json!({"kind": "from_point", "omega": vec_to_json(omega), "omega0": rational_to_json(omega0)})
        }
        Some(CorePointMode::UpdateOnIncumbent { blend }) => {
            json!({"kind": "update_on_incumbent", "blend": rational_to_json(blend)})
        }
    }
}

pub fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::NonSupporting => "non_supporting",
        Classification::Supporting => "supporting",
        Classification::FacetDefining => "facet_defining",
        Classification::ContainsEpi => "contains_epi",
    }
}

fn face_report_to_json(r: &FaceReport) -> Value {
    json!({
        "face_dimension": r.face_dimension,
        "epi_dimension": r.epi_dimension,
        "classification": classification_name(r.classification),
    })
}

pub fn status_name(s: &SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal { .. } => "optimal",
        SolveStatus::IterationLimit => "iteration_limit",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::IllPosed(_) => "ill_posed",
    }
}

/// The trace document for a finished solve. Cuts are stored canonicalized.
pub fn trace_to_json(instance: &Instance, config: &SolverConfig, result: &SolveResult) -> Value {
    let iterations: Vec<Value> = result
        .trace
        .iter()
        .map(|r| {
            let mut o = json!({
                "index": r.index,
                "master_point": point_to_json(&r.master_point),
                "master_value": rational_to_json(&r.master_value),
            });
            let m = o.as_object_mut().expect("built as an object");
            match &r.outcome {
                IterationOutcome::Converged => {
                    m.insert("outcome".into(), json!("converged"));
                }
                IterationOutcome::CutAdded { cut, certificate, cglp_value, fallback, face_report } => {
                    m.insert("outcome".into(), json!("cut_added"));
                    m.insert("cut".into(), cut_to_json(&cut.canonical()));
                    m.insert("certificate".into(), vec_to_json(&certificate.coords()));
                    m.insert("cglp_value".into(), rational_to_json(cglp_value));
                    m.insert("fallback".into(), json!(fallback));
                    m.insert("face_report".into(), face_report.as_ref().map_or(Value::Null, face_report_to_json));
                }
            }
            o
        })
        .collect();
    let mut status = json!({"status": status_name(&result.status)});
    let so = status.as_object_mut().expect("built as an object");
    match &result.status {
        SolveStatus::Optimal { x, y, value } => {
            so.insert("value".into(), rational_to_json(value));
            so.insert("x".into(), vec_to_json(x));
            so.insert("y".into(), vec_to_json(y));
        }
        SolveStatus::IllPosed(reason) => {
            so.insert("reason".into(), json!(reason));
        }
        _ => {}
    }
    json!({
        "instance_digest": instance_digest(instance),
        "config": {
            "strategy": strategy_to_json(&config.strategy),
            "max_iterations": config.max_iterations,
            "core_point_mode": core_mode_to_json(&config.core_point_mode),
            "verify_each_cut": config.verify_each_cut,
        },
        "iterations": iterations,
        "final": status,
    })
}

pub fn serialize_trace(instance: &Instance, config: &SolverConfig, result: &SolveResult) -> String {
    serde_json::to_string_pretty(&trace_to_json(instance, config, result)).expect("JSON values always serialize")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub digest_matches: bool,
    /// Master values recomputed from the recorded cuts equal the recorded
    /// ones.
    pub master_values_match: bool,
    /// `None` when the trace carries no face reports.
    pub face_reports_match: Option<bool>,
}

impl ReplayReport {
    pub fn ok(&self) -> bool {
        self.digest_matches && self.master_values_match && self.face_reports_match != Some(false)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// Re-solves the master with the recorded cuts and, if present, recomputes
/// every face report.
pub fn replay_trace(instance: &Instance, text: &str) -> Result<ReplayReport, ReplayError> {
    let doc = parse_json(text)?;
    let obj = as_object(&doc, "")?;
    let digest = get(obj, "instance_digest", "")?.as_str().unwrap_or_default();
    let iters = get(obj, "iterations", "")?.as_array().ok_or_else(|| field_err("iterations", "expected a list"))?;
    let mut cuts = Vec::new();
    let mut recorded = Vec::new();
    let mut reports = Vec::new();
    for (i, it) in iters.iter().enumerate() {
        let ctx = format!("iterations[{i}]");
        let o = as_object(it, &ctx)?;
        recorded.push(rational_from_json(get(o, "master_value", &ctx)?, &join(&ctx, "master_value"))?);
        if let Some(c) = o.get("cut") {
            let cut = cut_from_json(c, &join(&ctx, "cut"))?;
            if let Some(fr) = o.get("face_report").filter(|v| !v.is_null()) {
                reports.push((cut.clone(), fr.clone()));
            }
            cuts.push(cut);
        }
    }
    let replayed = replay_master_values(instance, &cuts);
    let master_values_match = recorded.len() <= replayed.len()
        && recorded.iter().zip(&replayed).all(|(r, p)| p.as_ref() == Some(r));
    let face_reports_match = if reports.is_empty() {
        None
    } else {
        let mut all = true;
        for (cut, fr) in &reports {
            all &= face_report_to_json(&face_report(instance, cut)?) == *fr;
        }
        Some(all)
    };
    Ok(ReplayReport { digest_matches: digest == instance_digest(instance), master_values_match, face_reports_match })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benders::solve;
    use crate::fixtures::ex1;
    use crate::rational::{int, rat};

    const EX1: &str = r#"{
        "n": 1, "k": 1, "m": 3,
        "c": [1], "d": [1],
        "H": [[-2], ["-1/2"], [-4]],
        "A": [[-1], [-1], [-4]],
        "b": [-5, -3, -14],
        "master": {"type": "polyhedron", "G": [[-1]], "g": [0]},
        "eta_lower_bound": 0
    }"#;

    #[test]
    fn parses_example_document() {
        assert_eq!(parse_instance(EX1).unwrap(), ex1());
    }

    #[test]
    fn parses_fraction_strings() {
        assert_eq!(rational_from_json(&json!("1/3"), "v").unwrap(), rat(1, 3));
        assert_eq!(rational_from_json(&json!("4/6"), "v").unwrap(), rat(2, 3));
        assert!(rational_from_json(&json!(1.5), "v").is_err());
        assert!(rational_from_json(&json!(true), "v").is_err());
    }

    #[test]
    fn rejects_bad_row_length() {
        let bad = EX1.replace(r#"[[-2], ["-1/2"], [-4]]"#, r#"[[-2], ["-1/2", 1], [-4]]"#);
        assert!(matches!(parse_instance(&bad), Err(IoError::Dimension(_))));
        let bad = EX1.replace(r#""m": 3"#, r#""m": 2"#);
        assert!(matches!(parse_instance(&bad), Err(IoError::Dimension(_))));
    }

    #[test]
    fn reports_locations() {
        match parse_instance("{\n \"c\": [1,\n") {
            Err(IoError::Syntax { line, .. }) => assert!(line >= 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        let bad = EX1.replace(r#"["-1/2"]"#, r#"["x/2"]"#);
        match parse_instance(&bad) {
            Err(IoError::Field { field, .. }) => assert_eq!(field, "H[1][0]"),
            other => panic!("expected field error, got {other:?}"),
        }
        let bad = EX1.replace(r#""eta_lower_bound": 0"#, r#""eta": 0"#);
        assert!(matches!(parse_instance(&bad), Err(IoError::Field { field, .. }) if field == "eta_lower_bound"));
    }

    #[test]
    fn round_trip_including_big_and_finite() {
        let inst = ex1();
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
        let big = Rational::from_integer("123456789012345678901234567890".parse().unwrap());
        let finite = inst
            .with_master(MasterDomain::Finite { points: vec![vec![big.clone()], vec![rat(-7, 3)]] })
            .unwrap();
        assert_eq!(parse_instance(&serialize_instance(&finite)).unwrap(), finite);
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = instance_digest(&ex1());
        assert_eq!(a.len(), 64);
        assert_eq!(a, instance_digest(&parse_instance(EX1).unwrap()));
        let other = ex1().with_master(MasterDomain::free()).unwrap();
        assert_ne!(a, instance_digest(&other));
    }

    #[test]
    fn trace_replays() {
        let inst = ex1();
        let config = SolverConfig { verify_each_cut: true, ..SolverConfig::new(ObjectiveSpec::MisOnes) };
        let result = solve(&inst, &config).unwrap();
        let text = serialize_trace(&inst, &config, &result);
        let report = replay_trace(&inst, &text).unwrap();
        assert!(report.ok(), "{report:?}");
        assert_eq!(report.face_reports_match, Some(true));
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["final"]["value"], json!("11/3"));
        assert_eq!(doc["iterations"][0]["cut"]["pi"], json!([-1]));
        assert_eq!(doc["iterations"][0]["cut"]["alpha"], json!("-7/2"));

        let other = inst.with_master(MasterDomain::free()).unwrap();
        assert!(!replay_trace(&other, &text).unwrap().digest_matches);
    }

    #[test]
    fn tampered_trace_is_detected() {
        let inst = ex1();
        let config = SolverConfig::new(ObjectiveSpec::MisOnes);
        let result = solve(&inst, &config).unwrap();
        let mut doc = trace_to_json(&inst, &config, &result);
        doc["iterations"][0]["cut"]["alpha"] = json!(int(-3).to_string());
        let report = replay_trace(&inst, &doc.to_string()).unwrap();
        assert!(!report.master_values_match);
    }
}
