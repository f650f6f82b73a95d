//! The JSON family format:
//!
//! ```json
//! {"schema": 1, "dim": 2, "matrices": [[["0", "-1"], ["1", "0"]]]}
//! ```
//!
//! Entries are integers or fractions `p/q` written as strings; plain JSON
//! integers are accepted too. A missing `schema` means version 1.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::applications::AffineOperator;
use crate::error::{CsrError, Result};
use crate::linalg::{parse_rational, MatrixFamily, RatMatrix, Rational};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct FamilyFile {
    #[serde(default = "default_schema")]
    schema: u64,
    dim: usize,
    matrices: Vec<Vec<Vec<Value>>>,
}

#[derive(Debug, Deserialize)]
struct OperatorFile {
    #[serde(default = "default_schema")]
    schema: u64,
    dim: usize,
    operators: Vec<OperatorEntry>,
}

#[derive(Debug, Deserialize)]
struct OperatorEntry {
    linear: Vec<Vec<Value>>,
    translation: Vec<Value>,
}

fn default_schema() -> u64 {
    SCHEMA_VERSION
}

fn check_schema(schema: u64) -> Result<()> {
    if schema != SCHEMA_VERSION {
        return Err(CsrError::Input(format!("unsupported schema version {schema}")));
    }
    Ok(())
}

fn entry(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        other => Err(CsrError::MalformedRational(other.to_string())),
    }
}

fn matrix(rows: &[Vec<Value>], dim: usize, what: &str) -> Result<RatMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CsrError::DimensionMismatch(format!("{what} is not {dim}x{dim}")));
    }
    let parsed = rows.iter().map(|r| r.iter().map(entry).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    RatMatrix::from_rows(parsed)
}

/// Parses a family document.
pub fn parse_family(text: &str) -> Result<MatrixFamily> {
    let file: FamilyFile = serde_json::from_str(text)?;
    check_schema(file.schema)?;
    if file.dim == 0 {
        return Err(CsrError::DimensionMismatch("dim must be positive".into()));
    }
    let gens = file
        .matrices
        .iter()
        .enumerate()
        .map(|(i, m)| matrix(m, file.dim, &format!("matrix {i}")))
        .collect::<Result<Vec<_>>>()?;
    MatrixFamily::new(gens)
}

/// Serializes a family in the canonical format.
pub fn family_to_json(family: &MatrixFamily) -> Value {
    let matrices: Vec<Value> = family.iter().map(|m| serde_json::to_value(m).expect("matrices serialize")).collect();
    serde_json::json!({ "schema": SCHEMA_VERSION, "dim": family.dim(), "matrices": matrices })
}

/// Parses exactly two affine operators:
/// `{"schema": 1, "dim": d, "operators": [{"linear": [[…]], "translation": […]}, …]}`.
pub fn parse_operators(text: &str) -> Result<(AffineOperator, AffineOperator)> {
    let file: OperatorFile = serde_json::from_str(text)?;
    check_schema(file.schema)?;
    if file.operators.len() != 2 {
        return Err(CsrError::Input(format!("expected 2 operators, found {}", file.operators.len())));
    }
    let mut ops = file.operators.iter().enumerate().map(|(i, op)| {
        let linear = matrix(&op.linear, file.dim, &format!("operator {i}"))?;
        let translation = op.translation.iter().map(entry).collect::<Result<Vec<_>>>()?;
        AffineOperator::new(linear, translation)
    });
    let b0 = ops.next().expect("two operators")?;
    let b1 = ops.next().expect("two operators")?;
    Ok((b0, b1))
}
