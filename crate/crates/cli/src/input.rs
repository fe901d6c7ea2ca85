//! Instance and marginals files.
//!
//! An instance is a single JSON object `{"values": [...], "t": T, "l": L}`.
//! Values may be JSON numbers or strings holding a decimal or a fraction
//! (`"7/12"`); in exact mode decimals are read exactly, so `0.1` is `1/10`.
//!
//! A marginals file is either a bare JSON array or any object with a
//! `"marginals"` array (such as the `--json` output of `solve`), in the
//! original box order of the instance.

use byzsel::Scalar;
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

/// Raw contents of an instance file, before validation by
/// [`byzsel::normalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile<T> {
    pub values: Vec<T>,
    pub t: usize,
    pub l: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    values: Vec<Value>,
    t: usize,
    l: usize,
}

fn parse_number<T: Scalar>(v: &Value, what: &str, index: usize) -> Result<T, CliError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => {
            return Err(CliError::Parse(format!(
                "{what}[{index}] must be a number or a string, got {other}"
            )));
        }
    };
    T::parse_number(&text).ok_or_else(|| CliError::Parse(format!("{what}[{index}] = {text:?} is not a number")))
}

pub fn parse_instance<T: Scalar>(text: &str) -> Result<InstanceFile<T>, CliError> {
    let raw: RawInstance =
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid instance file: {e}")))?;
    let values = raw
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| parse_number(v, "values", i))
        .collect::<Result<Vec<T>, _>>()?;
    Ok(InstanceFile {
        values,
        t: raw.t,
        l: raw.l,
    })
}

pub fn parse_marginals<T: Scalar>(text: &str) -> Result<Vec<T>, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid marginals file: {e}")))?;
    let items = match &doc {
        Value::Array(items) => items,
        Value::Object(map) => match map.get("marginals") {
            Some(Value::Array(items)) => items,
            _ => return Err(CliError::Parse("marginals file has no \"marginals\" array".into())),
        },
        _ => return Err(CliError::Parse("marginals file must be an array or an object".into())),
    };
    items
        .iter()
        .enumerate()
        .map(|(i, v)| parse_number(v, "marginals", i))
        .collect()
}
