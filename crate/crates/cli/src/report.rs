//! JSON building blocks. Reals carry 17 significant digits; `+∞` is the string `"inf"`.

use hoffman_core::{FiniteSystem, IndexSubset, ModulusValue, Tolerances};
use serde_json::{json, Map, Number, Value};

/// `%.17g`: fixed notation for exponents in `[-5, 17)`, scientific otherwise,
/// trailing zeros trimmed.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..17).contains(&exp) {
        trim(&format!("{v:.*}", (16 - exp) as usize))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

pub fn num(v: f64) -> Value {
    if v.is_nan() {
        return Value::String("nan".into());
    }
    if v.is_infinite() {
        return Value::String(if v > 0.0 { "inf" } else { "-inf" }.into());
    }
    Value::Number(format_g17(v).parse::<Number>().expect("valid JSON number"))
}

pub fn modulus(v: ModulusValue) -> Value {
    num(v.value())
}

pub fn vector(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

pub fn points(ps: &[Vec<f64>]) -> Value {
    Value::Array(ps.iter().map(|p| vector(p)).collect())
}

pub fn labels(s: &IndexSubset, sys: &FiniteSystem) -> Value {
    json!(s.labels(sys))
}

/// Labels, zero-based indices and simplex weights of an index subset.
pub fn subset(s: &IndexSubset, sys: &FiniteSystem) -> Value {
    json!({
        "labels": labels(s, sys),
        "indices": s.indices(),
        "weights": s.certificate.as_deref().map_or(Value::Null, vector),
    })
}

pub fn tolerances(tol: &Tolerances) -> Value {
    json!({
        "active": num(tol.active),
        "strict": num(tol.strict),
        "rank": num(tol.rank),
        "subset_cap": tol.subset_cap.to_string(),
    })
}

/// Common header followed by the command's own fields.
pub fn envelope(command: &str, seed: Option<u64>, tol: &Tolerances, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("tool".into(), json!("hoffman"));
    out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    out.insert("command".into(), json!(command));
    out.insert("seed".into(), seed.map_or(Value::Null, |s| json!(s)));
    out.insert("tolerances".into(), tolerances(tol));
    if let Value::Object(fields) = body {
        out.extend(fields);
    }
    Value::Object(out)
}
