use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;

use lcsa_core::catalog::{Family, FamilySpec};
use lcsa_core::lcsa::{ConformalSuperAlgebra, Parity};
use lcsa_core::polyring::{parse_poly, parse_poly_open, MultiPoly, Rational};

/// A usage or input error; maps to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<lcsa_core::Error> for InputError {
    fn from(e: lcsa_core::Error) -> InputError {
        InputError(e.to_string())
    }
}

pub type Input<T> = Result<T, InputError>;

pub fn fail<T>(msg: impl Into<String>) -> Input<T> {
    Err(InputError(msg.into()))
}

/// `k=v,k2=v2`; values are polynomial text.
pub fn parse_params(text: Option<&str>) -> Input<Vec<(String, String)>> {
    let Some(text) = text else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    for (n, part) in text.split(',').enumerate() {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((k, v)) = part.split_once('=') else {
            return fail(format!("--params entry {} (`{part}`): expected key=value", n + 1));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn lookup<'a>(params: &'a [(String, String)], key: &str) -> Option<&'a str> {
    params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

pub fn poly_param(params: &[(String, String)], key: &str) -> Input<Option<MultiPoly>> {
    match lookup(params, key) {
        None => Ok(None),
        Some(v) => parse_poly_open(v).map(Some).map_err(|e| InputError(format!("--params {key}: {e}"))),
    }
}

pub fn rational_param(params: &[(String, String)], key: &str) -> Input<Option<Rational>> {
    match poly_param(params, key)? {
        None => Ok(None),
        Some(p) => match p.as_constant() {
            Some(c) => Ok(Some(c)),
            None => fail(format!("--params {key}: `{p}` is not a rational number")),
        },
    }
}

pub fn family_spec(family: &str, params: &[(String, String)]) -> Input<FamilySpec> {
    let fam = Family::parse(family)?;
    let mut spec = FamilySpec::new(fam);
    for (k, v) in params {
        spec = spec.set_text(k, v).map_err(|e| InputError(format!("--params {k}: {e}")))?;
    }
    Ok(spec)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisDecl {
    name: String,
    parity: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    basis: Vec<BasisDecl>,
    #[serde(default)]
    params: Vec<String>,
    #[serde(default)]
    brackets: BTreeMap<String, BTreeMap<String, String>>,
}

/// Reads the JSON algebra format; `"brackets": {"A,A": {"A": "d+2*l"}}`.
pub fn read_algebra_file(path: &str) -> Input<ConformalSuperAlgebra> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))?;
    parse_algebra_json(&text).map_err(|e| InputError(format!("{path}: {e}")))
}

pub fn parse_algebra_json(text: &str) -> Input<ConformalSuperAlgebra> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| InputError(e.to_string()))?;
    let declared: Vec<&str> = file.params.iter().map(String::as_str).collect();
    let mut b = ConformalSuperAlgebra::builder();
    for (n, decl) in file.basis.iter().enumerate() {
        let parity = match decl.parity.to_ascii_lowercase().as_str() {
            "even" | "0" => Parity::Even,
            "odd" | "1" => Parity::Odd,
            other => return fail(format!("basis[{n}]: parity `{other}` is not even or odd")),
        };
        b = b.generator(&decl.name, parity);
    }
    let names: Vec<&str> = file.basis.iter().map(|d| d.name.as_str()).collect();
    for (pair, row) in &file.brackets {
        let Some((i, j)) = pair.split_once(',') else {
            return fail(format!("brackets[\"{pair}\"]: key must be `X,Y`"));
        };
        let (i, j) = (i.trim(), j.trim());
        for g in [i, j] {
            if !names.contains(&g) {
                return fail(format!("brackets[\"{pair}\"]: unknown generator `{g}`"));
            }
        }
        for (k, poly) in row {
            if !names.contains(&k.as_str()) {
                return fail(format!("brackets[\"{pair}\"][\"{k}\"]: unknown generator `{k}`"));
            }
            let q = parse_poly(poly, &declared).map_err(|e| InputError(format!("brackets[\"{pair}\"][\"{k}\"]: {e}")))?;
            b = b.bracket(i, j, k, q);
        }
    }
    Ok(b.build()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_split() {
        let ps = parse_params(Some("a=1, q=d+2*l,")).unwrap();
        assert_eq!(ps, vec![("a".to_string(), "1".to_string()), ("q".to_string(), "d+2*l".to_string())]);
        assert!(parse_params(Some("a")).is_err());
        assert!(parse_params(None).unwrap().is_empty());
        assert!(rational_param(&ps, "q").is_err());
    }

    #[test]
    fn algebra_json() {
        let alg = parse_algebra_json(r#"{"basis": [{"name": "L", "parity": "even"}], "brackets": {"L,L": {"L": "d+2*l"}}}"#).unwrap();
        assert!(alg.is_lie_conformal());
        let err = parse_algebra_json(r#"{"basis": [{"name": "L", "parity": "up"}]}"#).unwrap_err();
        assert!(err.0.contains("basis[0]"));
        let err = parse_algebra_json(r#"{"basis": [{"name": "L", "parity": "even"}], "brackets": {"L,Y": {"L": "1"}}}"#).unwrap_err();
        assert!(err.0.contains("unknown generator `Y`"));
    }
}
