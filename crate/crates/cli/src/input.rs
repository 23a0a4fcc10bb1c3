//! System files and vector arguments.

use std::fs;
use std::path::Path;

use hoffman_core::continuous::{builtin, ExtraRow, GridSpec, Segment, SegmentFn};
use hoffman_core::{ContinuousSystem, FiniteSystem, NormKind, Rhs, Row};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::{num, vector};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    n: Option<usize>,
    norm: Option<String>,
    rows: Option<Vec<RowSpec>>,
    b: Option<Vec<f64>>,
    builtin: Option<String>,
    segments: Option<Vec<SegmentSpec>>,
    extra_rows: Option<Vec<ExtraRowSpec>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowSpec {
    label: Option<String>,
    a: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentSpec {
    lo: f64,
    hi: f64,
    samples: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtraRowSpec {
    label: Option<String>,
    a: Vec<f64>,
    b: f64,
}

/// A parsed system file.
#[derive(Debug, Clone)]
pub enum Loaded {
    Finite {
        sys: FiniteSystem,
        b: Option<Rhs>,
    },
    Continuous {
        sys: ContinuousSystem,
        builtin: Option<String>,
    },
}

fn parse_norm(s: Option<&str>) -> Result<Option<NormKind>, CliError> {
    s.map(|s| s.parse::<NormKind>().map_err(CliError::from)).transpose()
}

pub fn load_system(path: &Path) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| match e {
        CliError::Usage(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_system(text: &str) -> Result<Loaded, CliError> {
    let file: SystemFile =
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("malformed system file: {e}")))?;
    let norm = parse_norm(file.norm.as_deref())?;
    let kinds = [file.rows.is_some(), file.builtin.is_some(), file.segments.is_some()];
    if kinds.iter().filter(|k| **k).count() != 1 {
        return Err(CliError::Usage(
            "a system file needs exactly one of `rows`, `builtin` or `segments`".into(),
        ));
    }

    if let Some(rows) = file.rows {
        if file.extra_rows.is_some() {
            return Err(CliError::Usage("`extra_rows` belongs to continuous systems".into()));
        }
        let n = file.n.ok_or_else(|| CliError::Usage("missing `n`".into()))?;
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| Row::new(r.label.unwrap_or_else(|| (i + 1).to_string()), r.a))
            .collect();
        let sys = FiniteSystem::new(n, rows, norm.unwrap_or(NormKind::L2))?;
        let b = file.b.map(|b| rhs_for(&sys, b)).transpose()?;
        return Ok(Loaded::Finite { sys, b });
    }

    if file.b.is_some() {
        return Err(CliError::Usage(
            "continuous systems carry `b` inside their samples".into(),
        ));
    }
    if let Some(name) = file.builtin {
        if file.extra_rows.is_some() || file.n.is_some() {
            return Err(CliError::Usage("a builtin system takes only `norm`".into()));
        }
        let mut sys = builtin(&name)?;
        if let Some(norm) = norm {
            sys.norm = norm;
        }
        return Ok(Loaded::Continuous {
            sys,
            builtin: Some(name),
        });
    }

    let n = file.n.ok_or_else(|| CliError::Usage("missing `n`".into()))?;
    let segments = file
        .segments
        .unwrap_or_default()
        .into_iter()
        .map(|s| {
            let samples = s
                .samples
                .into_iter()
                .map(|row| {
                    if row.len() != n + 2 {
                        return Err(CliError::Usage(format!(
                            "a sample must be [t, a_1..a_{n}, b], found {} numbers",
                            row.len()
                        )));
                    }
                    Ok((row[0], row[1..=n].to_vec(), row[n + 1]))
                })
                .collect::<Result<_, _>>()?;
            Ok(Segment {
                lo: s.lo,
                hi: s.hi,
                func: SegmentFn::Tabulated(samples),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let extra = file
        .extra_rows
        .unwrap_or_default()
        .into_iter()
        .enumerate()
        .map(|(i, e)| ExtraRow {
            label: e.label.unwrap_or_else(|| format!("extra{}", i + 1)),
            a: e.a,
            b: e.b,
        })
        .collect();
    let sys = ContinuousSystem::new(n, segments, extra, norm.unwrap_or(NormKind::L2))?;
    Ok(Loaded::Continuous { sys, builtin: None })
}

fn rhs_for(sys: &FiniteSystem, b: Vec<f64>) -> Result<Rhs, CliError> {
    if b.len() != sys.len() {
        return Err(CliError::Usage(format!(
            "right-hand side has {} entries, the system has {} rows",
            b.len(),
            sys.len()
        )));
    }
    Ok(Rhs::new(b)?)
}

/// A comma-separated list of reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Usage(format!("`{v}` is not a finite real")))
        })
        .collect()
}

/// An inline list, or a JSON file holding an array or an object with key `b`.
pub fn parse_vector_arg(arg: &str) -> Result<Vec<f64>, CliError> {
    let path = Path::new(arg);
    if !path.exists() {
        return parse_list(arg).map_err(|e| match arg.ends_with(".json") {
            true => CliError::Usage(format!("cannot read {arg}: no such file")),
            false => e,
        });
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {arg}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{arg}: {e}")))?;
    let array = match &value {
        Value::Object(map) => map.get("b").cloned().unwrap_or(Value::Null),
        other => other.clone(),
    };
    let Value::Array(items) = array else {
        return Err(CliError::Usage(format!(
            "{arg}: expected an array or an object with `b`"
        )));
    };
    items
        .iter()
        .map(|v| {
            v.as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Usage(format!("{arg}: `{v}` is not a finite real")))
        })
        .collect()
}

/// Resolves a loaded file to a finite system and right-hand side.
///
/// Continuous systems are discretized at `grid`; `rhs` overrides any inline `b`.
pub fn finite_problem(
    loaded: &Loaded,
    grid: Option<f64>,
    rhs: Option<Vec<f64>>,
) -> Result<(FiniteSystem, Option<Rhs>), CliError> {
    let (sys, b) = match loaded {
        Loaded::Finite { sys, b } => {
            if grid.is_some() {
                return Err(CliError::Usage("--grid applies to continuous systems only".into()));
            }
            (sys.clone(), b.clone())
        }
        Loaded::Continuous { sys, .. } => {
            let step = grid.ok_or_else(|| CliError::Usage("a continuous system needs --grid STEP".into()))?;
            let (fsys, b) = sys.discretize(&GridSpec::new(step)?)?;
            (fsys, Some(b))
        }
    };
    let b = match rhs {
        Some(v) => Some(rhs_for(&sys, v)?),
        None => b,
    };
    Ok((sys, b))
}

pub fn require_rhs(b: Option<Rhs>) -> Result<Rhs, CliError> {
    b.ok_or_else(|| CliError::Usage("a right-hand side is required: pass --rhs or put `b` in the file".into()))
}

/// The normalized system file for `loaded`.
pub fn normalized(loaded: &Loaded) -> Value {
    match loaded {
        Loaded::Finite { sys, b } => {
            let rows: Vec<Value> = sys
                .rows()
                .iter()
                .map(|r| json!({"label": r.label, "a": vector(&r.a)}))
                .collect();
            let mut out = json!({"n": sys.dim(), "norm": sys.norm().as_str(), "rows": rows});
            if let Some(b) = b {
                out["b"] = vector(b.values());
            }
            out
        }
        Loaded::Continuous {
            sys,
            builtin: Some(name),
        } => json!({"builtin": name, "norm": sys.norm.as_str()}),
        Loaded::Continuous { sys, builtin: None } => {
            let segments: Vec<Value> = sys
                .segments
                .iter()
                .map(|s| {
                    let samples: Vec<Value> = match &s.func {
                        SegmentFn::Tabulated(samples) => samples
                            .iter()
                            .map(|(t, a, b)| {
                                let mut row = vec![num(*t)];
                                row.extend(a.iter().map(|v| num(*v)));
                                row.push(num(*b));
                                Value::Array(row)
                            })
                            .collect(),
                        SegmentFn::Builtin(_) => unreachable!("builtin families are loaded by name"),
                    };
                    json!({"lo": num(s.lo), "hi": num(s.hi), "samples": samples})
                })
                .collect();
            let extra: Vec<Value> = sys
                .extra
                .iter()
                .map(|e| json!({"label": e.label, "a": vector(&e.a), "b": num(e.b)}))
                .collect();
            json!({"n": sys.n, "norm": sys.norm.as_str(), "segments": segments, "extra_rows": extra})
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOX: &str = r#"{"n": 2, "norm": "l2", "rows": [
        {"label": "r", "a": [1, 0]}, {"label": "l", "a": [-1, 0]},
        {"label": "u", "a": [0, 1]}, {"label": "d", "a": [0, -1]}], "b": [1, 1, 1, 1]}"#;

    #[test]
    fn finite_file() {
        let Loaded::Finite { sys, b } = parse_system(BOX).unwrap() else {
            panic!("expected a finite system");
        };
        assert_eq!(sys.len(), 4);
        assert_eq!(sys.label(2), "u");
        assert_eq!(b.unwrap().values(), &[1.0; 4]);
    }

    #[test]
    fn default_labels_and_norm() {
        let Loaded::Finite { sys, b } = parse_system(r#"{"n": 1, "rows": [{"a": [1]}, {"a": [-1]}]}"#).unwrap() else {
            panic!("expected a finite system");
        };
        assert_eq!(sys.label(1), "2");
        assert_eq!(sys.norm(), NormKind::L2);
        assert!(b.is_none());
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "not json",
            r#"{"n": 2}"#,
            r#"{"n": 2, "rows": [{"a": [1]}]}"#,
            r#"{"n": 1, "rows": [{"a": [1]}], "b": [1, 2]}"#,
            r#"{"n": 1, "norm": "l3", "rows": [{"a": [1]}]}"#,
            r#"{"n": 1, "rows": [{"a": [1]}], "builtin": "example-4-3"}"#,
            r#"{"n": 1, "rows": [{"a": [1], "c": 2}]}"#,
            r#"{"builtin": "nope"}"#,
            r#"{"n": 1, "segments": [{"lo": 0, "hi": 1, "samples": [[0, 1], [1, 1]]}]}"#,
        ] {
            assert!(parse_system(text).is_err(), "{text}");
        }
    }

    #[test]
    fn segments_and_extra_rows() {
        let text = r#"{"n": 1, "segments": [{"lo": 0, "hi": 1, "samples": [[0, 1, 0], [1, 2, 1]]}],
            "extra_rows": [{"a": [-1], "b": 3}]}"#;
        let loaded = parse_system(text).unwrap();
        let (sys, b) = finite_problem(&loaded, Some(0.5), None).unwrap();
        assert_eq!(sys.len(), 4);
        assert_eq!(b.unwrap().values(), &[0.0, 0.5, 1.0, 3.0]);
        assert!(finite_problem(&loaded, None, None).is_err());
    }

    #[test]
    fn normalized_round_trip() {
        for text in [
            BOX,
            r#"{"builtin": "example-4-3", "norm": "linf"}"#,
            r#"{"n": 1, "norm": "l1", "segments": [{"lo": 0, "hi": 1, "samples": [[0, 0.1, 0], [1, 2, 0.3]]}],
                "extra_rows": [{"label": "cap", "a": [-1], "b": 3}]}"#,
        ] {
            let first = normalized(&parse_system(text).unwrap());
            let second = normalized(&parse_system(&first.to_string()).unwrap());
            assert_eq!(first, second);
        }
    }

    #[test]
    fn vector_arguments() {
        assert_eq!(parse_list("1, -2.5,3e1").unwrap(), vec![1.0, -2.5, 30.0]);
        assert!(parse_list("1,,2").is_err());
        assert!(parse_list("nan").is_err());
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.json");
        fs::write(&a, "[1, 2]").unwrap();
        let o = dir.path().join("o.json");
        fs::write(&o, r#"{"b": [3]}"#).unwrap();
        assert_eq!(parse_vector_arg(a.to_str().unwrap()).unwrap(), vec![1.0, 2.0]);
        assert_eq!(parse_vector_arg(o.to_str().unwrap()).unwrap(), vec![3.0]);
        assert!(parse_vector_arg("missing.json").is_err());
    }
}
