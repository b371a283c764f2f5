//! Browser bindings for a one-dimensional master: every export takes
//! strings and returns a JSON document, with an `"error"` key on failure.

use benders_cuts::benders::{solve, SolverConfig};
use benders_cuts::cglp::ObjectiveSpec;
use benders_cuts::fixtures::ex1;
use benders_cuts::io::{parse_instance, point_to_json, rational_to_json, serialize_instance, trace_to_json};
use benders_cuts::rational::{fmt_rational, parse_rational, to_f64, Extended, Rational};
use benders_cuts::separation::{exposed_point, separate, Cut, SeparationResult};
use benders_cuts::Instance;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const OUTLINE_STEPS: i64 = 240;

fn num(s: &str, what: &str) -> Result<Rational, String> {
    parse_rational(s.trim()).map_err(|e| format!("{what}: {e}"))
}

fn planar(text: &str) -> Result<Instance, String> {
    let inst = parse_instance(text).map_err(|e| e.to_string())?;
    if inst.n() != 1 {
        return Err(format!("the demo draws instances with n = 1, this one has n = {}", inst.n()));
    }
    Ok(inst)
}

fn spec(strategy: &str, omega: &str, omega0: &str) -> Result<ObjectiveSpec, String> {
    match strategy {
        "mis" => Ok(ObjectiveSpec::MisOnes),
        "directional" => Ok(ObjectiveSpec::Directional { omega: vec![num(omega, "omega")?], omega0: num(omega0, "omega0")? }),
        other => Err(format!("unknown strategy `{other}`")),
    }
}

/// The cut as `eta >= slope·x + offset` (or a vertical line when `π₀ = 0`),
/// in floating point for drawing.
fn cut_json(cut: &Cut) -> Value {
    let canon = cut.canonical();
    let mut v = json!({
        "text": canon.to_string(),
        "pi": rational_to_json(&cut.pi[0]),
        "pi0": rational_to_json(&cut.pi0),
        "alpha": rational_to_json(&cut.alpha),
    });
    let o = v.as_object_mut().expect("built as an object");
    if cut.pi0.is_zero() {
        o.insert("vertical_x".into(), json!(to_f64(&(&cut.alpha / &cut.pi[0]))));
    } else {
        o.insert("slope".into(), json!(to_f64(&(-&cut.pi[0] / &cut.pi0))));
        o.insert("offset".into(), json!(to_f64(&(&cut.alpha / &cut.pi0))));
        o.insert("eta_below".into(), json!(cut.pi0.is_positive()));
    }
    v
}

fn report(result: Result<Value, String>) -> String {
    result.unwrap_or_else(|e| json!({"error": e})).to_string()
}

#[wasm_bindgen]
pub fn example_instance() -> String {
    serialize_instance(&ex1())
}

fn separate_impl(text: &str, x: &str, eta: &str, strategy: &str, omega: &str, omega0: &str) -> Result<Value, String> {
    let inst = planar(text)?;
    let p = benders_cuts::EpiPoint::new(vec![num(x, "x")?], num(eta, "eta")?);
    let s = spec(strategy, omega, omega0)?;
    let sep = match separate(&inst, &p, &s).map_err(|e| e.to_string())? {
        SeparationResult::InEpigraph => return Ok(json!({"status": "in_epigraph"})),
        SeparationResult::Separated(sep) => sep,
    };
    let mut v = json!({
        "status": "separated",
        "cut": cut_json(&sep.cut),
        "cglp_value": fmt_rational(&sep.cglp_value),
        "supporting": sep.supporting,
    });
    if let ObjectiveSpec::Directional { omega, omega0 } = &s {
        if let Ok(e) = exposed_point(&inst, &p, omega, omega0) {
            let o = v.as_object_mut().expect("built as an object");
            o.insert("exposed".into(), point_to_json(&e));
            o.insert("exposed_xy".into(), json!([to_f64(&e.x[0]), to_f64(&e.eta)]));
        }
    }
    Ok(v)
}

/// Separates `(x, eta)`; `strategy` is `mis` or `directional`.
#[wasm_bindgen]
pub fn separate_point(text: &str, x: &str, eta: &str, strategy: &str, omega: &str, omega0: &str) -> String {
    report(separate_impl(text, x, eta, strategy, omega, omega0))
}

fn outline_impl(text: &str, x_min: &str, x_max: &str) -> Result<Value, String> {
    let inst = planar(text)?;
    let (lo, hi) = (num(x_min, "x_min")?, num(x_max, "x_max")?);
    if hi <= lo {
        return Err("x_max must exceed x_min".into());
    }
    let step = (&hi - &lo) / Rational::from_integer(OUTLINE_STEPS.into());
    let mut points = Vec::new();
    for i in 0..=OUTLINE_STEPS {
        let x = &lo + &step * Rational::from_integer(i.into());
        if let Extended::Finite(z) = inst.subproblem_value(std::slice::from_ref(&x)).map_err(|e| e.to_string())? {
            points.push(json!([to_f64(&x), to_f64(&z)]));
        }
    }
    Ok(json!({"points": points}))
}

/// Samples `(x, z(x))` on `[x_min, x_max]` where `z` is finite.
#[wasm_bindgen]
pub fn epigraph_outline(text: &str, x_min: &str, x_max: &str) -> String {
    report(outline_impl(text, x_min, x_max))
}

fn benders_impl(text: &str, strategy: &str, omega: &str, omega0: &str) -> Result<Value, String> {
    let inst = planar(text)?;
    let mut config = SolverConfig::new(spec(strategy, omega, omega0)?);
    config.max_iterations = 50;
    let result = solve(&inst, &config).map_err(|e| e.to_string())?;
    let mut doc = trace_to_json(&inst, &config, &result);
    let lines: Vec<Value> = result.cuts().map(cut_json).collect();
    let masters: Vec<Value> =
        result.trace.iter().map(|r| json!([to_f64(&r.master_point.x[0]), to_f64(&r.master_point.eta)])).collect();
    let o = doc.as_object_mut().expect("trace is an object");
    o.insert("cut_lines".into(), Value::Array(lines));
    o.insert("master_xy".into(), Value::Array(masters));
    Ok(doc)
}

/// Runs the cutting-plane loop and returns its trace with drawable cuts.
#[wasm_bindgen]
pub fn benders_trace(text: &str, strategy: &str, omega: &str, omega0: &str) -> String {
    report(benders_impl(text, strategy, omega, omega0))
}
