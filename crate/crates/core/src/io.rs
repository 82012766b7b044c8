//! JSON instance and solution files. Every number that is not a count is a
//! rational string `"p"` or `"p/q"`; decimals are rejected.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::exact::{format_rational, parse_rational, Rational};
use crate::linalg::{ldl_pd_check, PdCheck, SymMatrix};
use crate::model::{ModelError, SdpData, SdpProblem};
use crate::solver::{Solution, TraceRecord};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("X_star has order {found}, expected {expected}")]
    WrongOrder { expected: usize, found: usize },
    #[error("feasibility residual nonzero at constraint {j}: {residual}")]
    Residual { j: usize, residual: Rational },
    #[error("X_star not positive definite: LDL pivot {index} = {pivot}")]
    NotPositiveDefinite { index: usize, pivot: Rational },
    #[error("objective {claimed} differs from <C, X_star> = {actual}")]
    ObjectiveMismatch { claimed: Rational, actual: Rational },
}

fn field(path: &str, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        path: path.to_string(),
        message: message.into(),
    }
}

fn parse_json(text: &str) -> Result<Value, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn get<'v>(obj: &'v Map<String, Value>, key: &str) -> Result<&'v Value, FormatError> {
    obj.get(key).ok_or_else(|| field(key, "missing"))
}

fn as_count(v: &Value, path: &str) -> Result<usize, FormatError> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| field(path, "expected a non-negative integer"))
}

fn as_rational(v: &Value, path: &str) -> Result<Rational, FormatError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| field(path, e.to_string())),
        Value::Number(_) => Err(field(path, format!("number {v} must be written as a rational string"))),
        _ => Err(field(path, "expected a rational string")),
    }
}

fn as_array<'v>(v: &'v Value, path: &str) -> Result<&'v Vec<Value>, FormatError> {
    v.as_array().ok_or_else(|| field(path, "expected an array"))
}

fn as_vector(v: &Value, path: &str) -> Result<Vec<Rational>, FormatError> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_rational(x, &format!("{path}[{i}]")))
        .collect()
}

fn as_matrix(v: &Value, path: &str, n: usize) -> Result<SymMatrix, FormatError> {
    let rows = as_array(v, path)?;
    if rows.len() != n {
        return Err(field(path, format!("expected {n} rows, found {}", rows.len())));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let p = format!("{path}[{i}]");
            let row = as_vector(row, &p)?;
            if row.len() != n {
                return Err(field(&p, format!("expected {n} entries, found {}", row.len())));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    SymMatrix::from_rows(rows).map_err(|e| field(path, e.to_string()))
}

fn matrix_value(x: &SymMatrix) -> Value {
    Value::Array(
        x.to_rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(|v| Value::String(format_rational(v))).collect()))
            .collect(),
    )
}

fn rational_value(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<SdpProblem, FormatError> {
    let doc = parse_json(text)?;
    let obj = doc.as_object().ok_or_else(|| field("$", "expected an object"))?;
    let n = as_count(get(obj, "n")?, "n")?;
    let m = as_count(get(obj, "m")?, "m")?;
    let a_list = as_array(get(obj, "A")?, "A")?;
    if a_list.len() != m {
        return Err(field("A", format!("expected {m} matrices, found {}", a_list.len())));
    }
    let a = a_list
        .iter()
        .enumerate()
        .map(|(j, aj)| as_matrix(aj, &format!("A[{j}]"), n))
        .collect::<Result<Vec<_>, _>>()?;
    let b = as_vector(get(obj, "b")?, "b")?;
    if b.len() != m {
        return Err(field("b", format!("expected {m} entries, found {}", b.len())));
    }
    let data = SdpData {
        n,
        c: as_matrix(get(obj, "C")?, "C", n)?,
        a,
        b,
        x0: as_matrix(get(obj, "X0")?, "X0", n)?,
        r: as_rational(get(obj, "r")?, "r")?,
        big_r: as_rational(get(obj, "R")?, "R")?,
        epsilon: as_rational(get(obj, "epsilon")?, "epsilon")?,
    };
    Ok(SdpProblem::new(data)?)
}

/// Canonical instance document.
pub fn instance_to_json(problem: &SdpProblem) -> String {
    let d = problem.data();
    let doc = json!({
        "n": d.n,
        "m": d.a.len(),
        "C": matrix_value(&d.c),
        "A": d.a.iter().map(matrix_value).collect::<Vec<_>>(),
        "b": d.b.iter().map(rational_value).collect::<Vec<_>>(),
        "X0": matrix_value(&d.x0),
        "r": rational_value(&d.r),
        "R": rational_value(&d.big_r),
        "epsilon": rational_value(&d.epsilon),
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Solution document; the trace is embedded when `with_trace` is set.
pub fn solution_to_json(problem: &SdpProblem, solution: &Solution, with_trace: bool) -> String {
    let (k1, k2) = solution.iterations();
    let mut doc = json!({
        "X_star": matrix_value(solution.x_star.matrix()),
        "objective": rational_value(&solution.objective),
        "gap_bound": rational_value(&solution.gap_bound),
        "epsilon": rational_value(problem.epsilon()),
        "iterations": { "phase1": k1, "phase2": k2 },
        "phase1_proximity_sq": rational_value(&solution.phase1.proximity_sq),
    });
    if with_trace {
        doc["trace"] = serde_json::to_value(&solution.trace).expect("serializable");
    }
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// One JSON object per line.
pub fn trace_to_json_lines(trace: &[TraceRecord]) -> String {
    trace
        .iter()
        .map(|r| serde_json::to_string(r).expect("serializable") + "\n")
        .collect()
}

/// The parts of a solution document needed for re-verification.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub x_star: SymMatrix,
    pub objective: Rational,
    pub gap_bound: Rational,
    pub iterations: (u64, u64),
}

pub fn parse_solution(text: &str, n: usize) -> Result<SolutionFile, FormatError> {
    let doc = parse_json(text)?;
    let obj = doc.as_object().ok_or_else(|| field("$", "expected an object"))?;
    let iters = get(obj, "iterations")?
        .as_object()
        .ok_or_else(|| field("iterations", "expected an object"))?;
    Ok(SolutionFile {
        x_star: as_matrix(get(obj, "X_star")?, "X_star", n)?,
        objective: as_rational(get(obj, "objective")?, "objective")?,
        gap_bound: as_rational(get(obj, "gap_bound")?, "gap_bound")?,
        iterations: (
            as_count(get(iters, "phase1")?, "iterations.phase1")? as u64,
            as_count(get(iters, "phase2")?, "iterations.phase2")? as u64,
        ),
    })
}

/// Exact feasibility, definiteness and objective checks of a stored solution.
pub fn verify_solution(problem: &SdpProblem, solution: &SolutionFile) -> Result<(), VerifyError> {
    let x = &solution.x_star;
    if x.n() != problem.n() {
        return Err(VerifyError::WrongOrder {
            expected: problem.n(),
            found: x.n(),
        });
    }
    for (j, (lhs, rhs)) in problem.apply_a(x).iter().zip(problem.b()).enumerate() {
        if lhs != rhs {
            return Err(VerifyError::Residual {
                j: j + 1,
                residual: lhs - rhs,
            });
        }
    }
    if let PdCheck::NotPositiveDefinite { pivot_index, pivot } = ldl_pd_check(x) {
        return Err(VerifyError::NotPositiveDefinite {
            index: pivot_index,
            pivot,
        });
    }
    let actual = problem.c().inner(x);
    if actual != solution.objective {
        return Err(VerifyError::ObjectiveMismatch {
            claimed: solution.objective.clone(),
            actual,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    const MINIMAL: &str = r#"{"n": 1, "m": 1, "C": [["1"]], "A": [[["1"]]], "b": ["1"],
        "X0": [["1"]], "r": "1/2", "R": "1", "epsilon": "1/10"}"#;

    #[test]
    fn minimal_instance() {
        let p = parse_instance(MINIMAL).unwrap();
        assert_eq!(p.n(), 1);
        assert_eq!(p.r(), &rat(1, 2));
    }

    #[test]
    fn infeasible_start_is_named() {
        let text = MINIMAL.replace(r#""b": ["1"]"#, r#""b": ["2"]"#);
        let err = parse_instance(&text).unwrap_err().to_string();
        assert!(err.contains("<A1,X0> != b1"), "{err}");
    }

    #[test]
    fn decimals_and_numbers_rejected() {
        let text = MINIMAL.replace(r#""r": "1/2""#, r#""r": "0.5""#);
        let err = parse_instance(&text).unwrap_err().to_string();
        assert!(err.starts_with("r:"), "{err}");
        let text = MINIMAL.replace(r#""r": "1/2""#, r#""r": 0.5"#);
        assert!(parse_instance(&text).unwrap_err().to_string().starts_with("r:"));
    }

    #[test]
    fn locations_reported() {
        let err = parse_instance("{\n \"n\": 1,\n \"m\": }").unwrap_err();
        assert!(matches!(err, FormatError::Json { line: 3, .. }), "{err}");
        let text = MINIMAL.replace(r#""C": [["1"]]"#, r#""C": [["x"]]"#);
        assert!(parse_instance(&text).unwrap_err().to_string().starts_with("C[0][0]:"));
    }

    #[test]
    fn round_trip() {
        let p = parse_instance(MINIMAL).unwrap();
        let q = parse_instance(&instance_to_json(&p)).unwrap();
        assert_eq!(p.data(), q.data());
    }

    #[test]
    fn verification_detects_tampering() {
        let p = parse_instance(MINIMAL).unwrap();
        let good = SolutionFile {
            x_star: SymMatrix::identity(1),
            objective: int(1),
            gap_bound: int(0),
            iterations: (0, 0),
        };
        assert_eq!(verify_solution(&p, &good), Ok(()));
        let mut bad = good.clone();
        bad.x_star = SymMatrix::diag(&[rat(11, 10)]);
        let err = verify_solution(&p, &bad).unwrap_err();
        assert_eq!(err.to_string(), "feasibility residual nonzero at constraint 1: 1/10");
    }
}
