//! Exact linear algebra over Z, Q and F_p.

pub(crate) mod domain;
mod matrix;
mod module;
mod ring;
mod snf;
mod sparse;

use serde_json::{json, Value};

pub use matrix::Matrix;
pub use module::FgModule;
pub use ring::{int, Prime, RingSpec, Scalar};
pub use snf::{cokernel, image_basis, invariant_factors, kernel_basis, left_inverse, rank, smith_normal_form, solve, SmithForm};


use crate::error::{Error, Result};

pub fn scalar_to_string(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad number {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == 0.into() {
                return Err(bad());
            }
            Ok(Scalar::new(n, d))
        }
        None => Ok(int(s.parse::<num_bigint::BigInt>().map_err(|_| bad())?)),
    }
}

impl Matrix {
    pub fn to_json(&self) -> Value {
        let entries: Vec<Vec<String>> =
            self.to_rows().iter().map(|r| r.iter().map(scalar_to_string).collect()).collect();
        json!({
            "ring": self.ring().to_string(),
            "rows": self.rows(),
            "cols": self.cols(),
            "entries": entries,
        })
    }

    /// Parses `{"ring", "rows", "cols", "entries"}`; entries are decimal strings (or JSON integers).
    pub fn from_json(v: &Value) -> Result<Matrix> {
        let ring = RingSpec::parse(v["ring"].as_str().ok_or_else(|| Error::Parse("matrix: missing ring".into()))?)?;
        Self::from_json_in(ring, v)
    }

    pub(crate) fn from_json_in(ring: RingSpec, v: &Value) -> Result<Matrix> {
        let rows = v["rows"].as_u64().ok_or_else(|| Error::Parse("matrix: missing rows".into()))? as usize;
        let cols = v["cols"].as_u64().ok_or_else(|| Error::Parse("matrix: missing cols".into()))? as usize;
        let entries = v["entries"].as_array().ok_or_else(|| Error::Parse("matrix: missing entries".into()))?;
        let mut data = Vec::with_capacity(rows);
        for row in entries {
            let row = row.as_array().ok_or_else(|| Error::Parse("matrix: row is not an array".into()))?;
            let mut out = Vec::with_capacity(row.len());
            for e in row {
                let x = match e {
                    Value::String(s) => parse_scalar(s)?,
                    Value::Number(n) => parse_scalar(&n.to_string())?,
                    _ => return Err(Error::Parse("matrix: entry must be a string".into())),
                };
                out.push(x);
            }
            data.push(out);
        }
        Matrix::from_rows_sized(ring, rows, cols, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_json_roundtrip() {
        let m = Matrix::from_i64(RingSpec::Integers, &[&[1, -2], &[0, 12345678901]]);
        let j = m.to_json();
        assert_eq!(Matrix::from_json(&j).unwrap(), m);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"12345678901\""));
    }

    #[test]
    fn rejects_bad_shapes_and_entries() {
        let v = serde_json::json!({"ring": "Z", "rows": 1, "cols": 2, "entries": [["1"]]});
        assert!(Matrix::from_json(&v).is_err());
        let v = serde_json::json!({"ring": "Z", "rows": 1, "cols": 1, "entries": [["1/2"]]});
        assert!(Matrix::from_json(&v).is_err());
        let v = serde_json::json!({"ring": "Q", "rows": 1, "cols": 1, "entries": [["1/2"]]});
        assert!(Matrix::from_json(&v).is_ok());
    }
}
