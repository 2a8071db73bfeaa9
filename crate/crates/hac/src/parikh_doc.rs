//! JSON documents for linear sets, semilinear sets and counting constraints.

use hac_core::parikh::{CountingConstraint, LinearSet, SemilinearSet};
use serde_json::{json, Map, Value as Json};

use crate::model_file::FormatError;

fn fail<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError(msg.into()))
}

fn only_keys(obj: &Map<String, Json>, allowed: &[&str], what: &str) -> Result<(), FormatError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => fail(format!("unknown field {k:?} in {what}")),
        None => Ok(()),
    }
}

fn naturals(v: &Json, what: &str) -> Result<Vec<u64>, FormatError> {
    serde_json::from_value(v.clone()).map_err(|e| FormatError(format!("{what}: {e}")))
}

/// `{"base":[…],"periods":[[…],…]}`.
pub fn linear_from_json(v: &Json) -> Result<LinearSet, FormatError> {
    let obj = v.as_object().ok_or_else(|| FormatError("linear set must be an object".into()))?;
    only_keys(obj, &["base", "periods"], "linear set")?;
    let base = naturals(obj.get("base").unwrap_or(&Json::Null), "base")?;
    let periods = match obj.get("periods") {
        None => Vec::new(),
        Some(Json::Array(ps)) => ps.iter().map(|p| naturals(p, "period")).collect::<Result<_, _>>()?,
        Some(_) => return fail("periods must be an array"),
    };
    LinearSet::new(base, periods).map_err(|e| FormatError(e.to_string()))
}

/// Either a single linear set or `{"union":[…]}`.
pub fn semilinear_from_json(v: &Json) -> Result<SemilinearSet, FormatError> {
    match v.get("union") {
        Some(Json::Array(parts)) => {
            only_keys(v.as_object().expect("has a key"), &["union"], "semilinear set")?;
            let parts = parts.iter().map(linear_from_json).collect::<Result<Vec<_>, _>>()?;
            SemilinearSet::new(parts).map_err(|e| FormatError(e.to_string()))
        }
        Some(_) => fail("union must be an array"),
        None => Ok(linear_from_json(v)?.into()),
    }
}

pub fn linear_to_json(s: &LinearSet) -> Json {
    json!({ "base": s.base(), "periods": s.periods() })
}

fn letter(v: &Json, what: &str) -> Result<char, FormatError> {
    let s = v.as_str().ok_or_else(|| FormatError(format!("{what} must be a one-letter string")))?;
    let mut cs = s.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) => Ok(c),
        _ => fail(format!("{what} must be a one-letter string, got {s:?}")),
    }
}

pub fn constraint_from_json(v: &Json) -> Result<CountingConstraint, FormatError> {
    let obj = v.as_object().filter(|o| o.len() == 1).ok_or_else(|| FormatError(format!("bad constraint {v}")))?;
    let (key, inner) = obj.iter().next().expect("one entry");
    let list = |inner: &Json| -> Result<Vec<CountingConstraint>, FormatError> {
        inner
            .as_array()
            .ok_or_else(|| FormatError(format!("{key} takes an array")))?
            .iter()
            .map(constraint_from_json)
            .collect()
    };
    match key.as_str() {
        "and" => Ok(CountingConstraint::And(list(inner)?)),
        "or" => Ok(CountingConstraint::Or(list(inner)?)),
        "not" => Ok(CountingConstraint::Not(Box::new(constraint_from_json(inner)?))),
        "ineq" => {
            let o = inner.as_object().ok_or_else(|| FormatError("ineq must be an object".into()))?;
            only_keys(o, &["coefs", "const"], "ineq")?;
            let mut coefs = Vec::new();
            if let Some(c) = o.get("coefs") {
                let c = c.as_object().ok_or_else(|| FormatError("coefs must be an object".into()))?;
                for (name, k) in c {
                    let x = letter(&Json::String(name.clone()), "coefficient key")?;
                    let k = k.as_i64().ok_or_else(|| FormatError(format!("coefficient of {name} must be an integer")))?;
                    coefs.push((x, k));
                }
            }
            let constant = match o.get("const") {
                None => 0,
                Some(k) => k.as_i64().ok_or_else(|| FormatError("const must be an integer".into()))?,
            };
            Ok(CountingConstraint::Ineq { coefs, constant })
        }
        "cong" => {
            let o = inner.as_object().ok_or_else(|| FormatError("cong must be an object".into()))?;
            only_keys(o, &["letter", "mod", "res"], "cong")?;
            let x = letter(o.get("letter").unwrap_or(&Json::Null), "letter")?;
            let num = |k: &str| {
                o.get(k).and_then(Json::as_u64).ok_or_else(|| FormatError(format!("cong needs a natural {k:?}")))
            };
            Ok(CountingConstraint::Cong { letter: x, modulus: num("mod")?, residue: num("res")? })
        }
        other => fail(format!("unknown constraint kind {other:?}")),
    }
}

pub fn constraint_to_json(c: &CountingConstraint) -> Json {
    match c {
        CountingConstraint::Ineq { coefs, constant } => {
            let mut m = Map::new();
            for (x, k) in coefs {
                m.insert(x.to_string(), json!(k));
            }
            json!({ "ineq": { "coefs": m, "const": constant } })
        }
        CountingConstraint::Cong { letter, modulus, residue } => {
            json!({ "cong": { "letter": letter.to_string(), "mod": modulus, "res": residue } })
        }
        CountingConstraint::And(cs) => json!({ "and": cs.iter().map(constraint_to_json).collect::<Vec<_>>() }),
        CountingConstraint::Or(cs) => json!({ "or": cs.iter().map(constraint_to_json).collect::<Vec<_>>() }),
        CountingConstraint::Not(c) => json!({ "not": constraint_to_json(c) }),
    }
}
