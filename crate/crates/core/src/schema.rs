//! JSON input validation that reports the JSON pointer of the offending field.

use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pointer}: {message}")]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        let pointer = pointer.into();
        let pointer = if pointer.is_empty() { "/".to_owned() } else { pointer };
        Self { pointer, message: message.into() }
    }
}

pub(crate) fn field<'a>(v: &'a Value, ptr: &str, name: &str) -> Result<&'a Value, SchemaError> {
    let obj = v
        .as_object()
        .ok_or_else(|| SchemaError::new(ptr, "expected an object"))?;
    obj.get(name)
        .ok_or_else(|| SchemaError::new(format!("{ptr}/{name}"), "missing field"))
}

pub(crate) fn array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, SchemaError> {
    v.as_array()
        .ok_or_else(|| SchemaError::new(ptr, "expected an array"))
}

pub(crate) fn integer(v: &Value, ptr: &str) -> Result<i64, SchemaError> {
    v.as_i64()
        .ok_or_else(|| SchemaError::new(ptr, "expected an integer"))
}

pub(crate) fn number(v: &Value, ptr: &str) -> Result<f64, SchemaError> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(SchemaError::new(ptr, "expected a finite number")),
    }
}

pub(crate) fn triple(v: &Value, ptr: &str) -> Result<[f64; 3], SchemaError> {
    let a = array(v, ptr)?;
    if a.len() != 3 {
        return Err(SchemaError::new(ptr, format!("expected 3 coordinates, found {}", a.len())));
    }
    let mut out = [0.0; 3];
    for (i, x) in a.iter().enumerate() {
        out[i] = number(x, &format!("{ptr}/{i}"))?;
    }
    Ok(out)
}
