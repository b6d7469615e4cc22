//! Parsing of Young function names such as `logbump:p=2,a=1.5`.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::orlicz::young::YoungFunction;

fn unknown(name: &str) -> Error {
    Error::Unknown { kind: "young function", name: name.to_string() }
}

fn strip_parens(s: &str) -> &str {
    let s = s.trim();
    if s.starts_with('(') && s.ends_with(')') {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

fn number(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidParameter(format!("{key}: not a number: {v:?}")))
}

/// `key=value` pairs, in the given order, with no extras.
fn params(body: &str, keys: &[&str]) -> Result<Vec<f64>> {
    let parts: Vec<&str> = if body.trim().is_empty() { Vec::new() } else { body.split(',').collect() };
    if parts.len() != keys.len() {
        return Err(Error::InvalidParameter(format!(
            "expected parameters {}, got {body:?}",
            keys.join(",")
        )));
    }
    let mut out = vec![f64::NAN; keys.len()];
    for part in parts {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got {part:?}")))?;
        let i = keys
            .iter()
            .position(|key| *key == k.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unexpected parameter {k:?}")))?;
        out[i] = number(k, v)?;
    }
    Ok(out)
}

pub fn parse_young(s: &str) -> Result<YoungFunction> {
    let s = strip_parens(s);
    let (family, body) = s.split_once(':').unwrap_or((s, ""));
    match family.trim() {
        "power" => YoungFunction::power(params(body, &["p"])?[0]),
        "scaledpower" => YoungFunction::scaled_power(params(body, &["p"])?[0]),
        "logbump" => {
            let v = params(body, &["p", "a"])?;
            YoungFunction::log_bump(v[0], v[1])
        }
        "loglogbump" => {
            let v = params(body, &["p", "a"])?;
            YoungFunction::loglog_bump(v[0], v[1])
        }
        "epsbump" => YoungFunction::eps_bump(params(body, &["eps"])?[0]),
        "ap" => {
            let (inner, p) = body
                .rsplit_once(",p=")
                .ok_or_else(|| Error::InvalidParameter(format!("ap: expected inner=<spec>,p=<value>, got {body:?}")))?;
            let inner = inner
                .strip_prefix("inner=")
                .ok_or_else(|| Error::InvalidParameter(format!("ap: expected inner=, got {inner:?}")))?;
            YoungFunction::transformed(parse_young(inner)?, number("p", p)?)
        }
        "conj" => {
            let inner = body
                .strip_prefix("inner=")
                .ok_or_else(|| Error::InvalidParameter(format!("conj: expected inner=, got {body:?}")))?;
            parse_young(inner)?.conjugate()
        }
        other => Err(unknown(other)),
    }
}

impl FromStr for YoungFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_young(s)
    }
}
