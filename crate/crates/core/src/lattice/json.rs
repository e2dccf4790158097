//! JSON form `{"dimension": D, "basis": [[...], ...]}` with exact scalar strings.
//!
//! Entries within a row must be rational multiples of one another, since a
//! lattice is stored as `diag(s) * R`. The flow and duality only ever produce
//! bases of that shape.

use serde_json::{json, Value};

use super::Lattice;
use crate::error::{Error, Result};
use crate::scalar::{PowerScalar, Rational};

pub fn to_json(lat: &Lattice) -> Value {
    let basis: Vec<Vec<String>> =
        (0..lat.dim()).map(|i| (0..lat.rank()).map(|j| lat.entry(i, j).to_string()).collect()).collect();
    json!({ "dimension": lat.dim(), "basis": basis })
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn from_json(v: &Value) -> Result<Lattice> {
    let d =
        v.get("dimension").and_then(Value::as_u64).ok_or_else(|| parse_err("missing integer field \"dimension\""))?
            as usize;
    if d == 0 || d > 64 {
        return Err(parse_err("dimension must be between 1 and 64"));
    }
    let rows = v.get("basis").and_then(Value::as_array).ok_or_else(|| parse_err("missing array field \"basis\""))?;
    if rows.len() != d {
        return Err(parse_err(format!("basis has {} rows, expected {d}", rows.len())));
    }
    let mut scales = Vec::with_capacity(d);
    let mut frame = Vec::with_capacity(d);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| parse_err(format!("row {i} is not an array")))?;
        if row.len() != d {
            return Err(parse_err(format!("row {i} has {} entries, expected {d}", row.len())));
        }
        let entries = row
            .iter()
            .map(|x| x.as_str().ok_or_else(|| parse_err("basis entries must be strings")).and_then(PowerScalar::parse))
            .collect::<Result<Vec<_>>>()?;
        let (scale, coeffs) =
            split_row(&entries).ok_or_else(|| parse_err(format!("row {i} mixes incommensurable powers")))?;
        scales.push(scale);
        frame.push(coeffs);
    }
    Lattice::new(scales, frame)
}

/// Row `[c_j m^e]` becomes `(m^e, [c_j])` when all nonzero entries share `m^e`.
fn split_row(entries: &[PowerScalar]) -> Option<(PowerScalar, Vec<Rational>)> {
    let lead = entries.iter().find(|x| !x.is_zero());
    let scale = match lead {
        Some(x) => PowerScalar::new(Rational::from_integer(1.into()), x.base(), x.exponent().clone()).ok()?,
        None => PowerScalar::one(),
    };
    let mut coeffs = Vec::with_capacity(entries.len());
    for x in entries {
        if x.is_zero() {
            coeffs.push(Rational::from_integer(0.into()));
            continue;
        }
        if x.base() != scale.base() || x.exponent() != scale.exponent() {
            return None;
        }
        coeffs.push(x.coefficient().clone());
    }
    Some((scale, coeffs))
}

pub fn parse_lattice_json(s: &str) -> Result<Lattice> {
    let v: Value = serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))?;
    from_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::identity;
    use crate::scalar::rational::{int, rat};

    #[test]
    fn round_trip() {
        let s = vec![PowerScalar::new(int(1), 2, rat(1, 3)).unwrap(), PowerScalar::new(int(3), 2, rat(2, 3)).unwrap()];
        let mut f = identity(2);
        f[0][1] = rat(5, 7);
        let l = Lattice::new(s, f).unwrap();
        let v = to_json(&l);
        assert_eq!(v["basis"][0][1], "5/7*2^1/3");
        let back = from_json(&v).unwrap();
        assert!(back.same_lattice(&l).unwrap());
    }

    #[test]
    fn rejects_mixed_rows() {
        let s = r#"{"dimension":2,"basis":[["1","2^1/2"],["0","1"]]}"#;
        assert!(matches!(parse_lattice_json(s), Err(Error::Parse(_))));
        let s = r#"{"dimension":2,"basis":[["1","2"],["2","4"]]}"#;
        assert_eq!(parse_lattice_json(s), Err(Error::DependentVectors));
    }
}
