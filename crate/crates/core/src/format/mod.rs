//! Text encodings shared by every file format.
//!
//! Elements are written as JSON values with all integers as decimal strings:
//!
//! * lattice: `["1", "-2"]`
//! * Heisenberg: `{"x": [...], "y": [...], "z": "3"}`
//! * quotient: the Heisenberg record plus `"mod": "19"`
//! * product: an array of component encodings
//!
//! Decoding is guided by a [`GroupDescriptor`], which removes the ambiguity
//! between lattice and product arrays and lets errors name the offending
//! field path.

pub mod files;
pub mod int;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::group::{Element, GroupDescriptor, GroupError, HeisenbergElement, QuotientElement};

/// Version stamped into every file this crate writes.
pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u64),
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl FormatError {
    pub fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Field {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        Self::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

fn int_value(n: &BigInt) -> Value {
    Value::String(n.to_string())
}

fn ints_value(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_value).collect())
}

pub fn encode_element(e: &Element) -> Value {
    match e {
        Element::Lattice(v) => ints_value(v),
        Element::Heisenberg(h) => json!({
            "x": ints_value(h.x()),
            "y": ints_value(h.y()),
            "z": int_value(h.z()),
        }),
        Element::Quotient(q) => json!({
            "x": ints_value(q.base().x()),
            "y": ints_value(q.base().y()),
            "z": int_value(q.base().z()),
            "mod": int_value(q.modulus()),
        }),
        Element::Product(es) => Value::Array(es.iter().map(encode_element).collect()),
    }
}

pub fn decode_int(v: &Value, path: &str) -> Result<BigInt, FormatError> {
    match v {
        Value::String(s) => {
            int::parse(s).ok_or_else(|| FormatError::field(path, format!("invalid decimal integer {s:?}")))
        }
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| FormatError::field(path, format!("{n} is not an integer"))),
        other => Err(FormatError::field(
            path,
            format!("expected an integer, found {}", kind(other)),
        )),
    }
}

fn decode_ints(v: &Value, len: usize, path: &str) -> Result<Vec<BigInt>, FormatError> {
    let items = expect_array(v, path)?;
    if items.len() != len {
        return Err(FormatError::field(
            path,
            format!("expected {len} entries, found {}", items.len()),
        ));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| decode_int(x, &format!("{path}[{i}]")))
        .collect()
}

pub(crate) fn expect_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, FormatError> {
    v.as_array()
        .ok_or_else(|| FormatError::field(path, format!("expected an array, found {}", kind(v))))
}

pub(crate) fn expect_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, FormatError> {
    v.as_object()
        .ok_or_else(|| FormatError::field(path, format!("expected an object, found {}", kind(v))))
}

pub(crate) fn required<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, FormatError> {
    obj.get(key)
        .ok_or_else(|| FormatError::field(join(path, key), "missing field"))
}

pub(crate) fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), FormatError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(FormatError::field(join(path, k), "unexpected field")),
        None => Ok(()),
    }
}

/// Decodes an element of `group` from its JSON encoding.
pub fn decode_element(group: &GroupDescriptor, v: &Value, path: &str) -> Result<Element, FormatError> {
    match group {
        GroupDescriptor::Lattice { rank } => Ok(Element::Lattice(decode_ints(v, *rank, path)?)),
        GroupDescriptor::Heisenberg { d } => {
            let obj = expect_object(v, path)?;
            reject_unknown(obj, &["x", "y", "z"], path)?;
            Ok(Element::Heisenberg(decode_heisenberg(obj, *d, path)?))
        }
        GroupDescriptor::HeisenbergMod { d, e } => {
            let obj = expect_object(v, path)?;
            reject_unknown(obj, &["x", "y", "z", "mod"], path)?;
            let base = decode_heisenberg(obj, *d, path)?;
            let mod_path = join(path, "mod");
            let modulus = decode_int(required(obj, "mod", path)?, &mod_path)?;
            if &modulus != e {
                return Err(FormatError::field(
                    mod_path,
                    format!("modulus {modulus} does not match the group's {e}"),
                ));
            }
            // Representatives outside [0, e) are accepted and canonicalized.
            Ok(Element::Quotient(QuotientElement::project(&base, e)?))
        }
        GroupDescriptor::Product(factors) => {
            let items = expect_array(v, path)?;
            if items.len() != factors.len() {
                return Err(FormatError::field(
                    path,
                    format!("expected {} components, found {}", factors.len(), items.len()),
                ));
            }
            factors
                .iter()
                .zip(items)
                .enumerate()
                .map(|(i, (f, x))| decode_element(f, x, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>, _>>()
                .map(Element::Product)
        }
    }
}

fn decode_heisenberg(obj: &Map<String, Value>, d: usize, path: &str) -> Result<HeisenbergElement, FormatError> {
    let x = decode_ints(required(obj, "x", path)?, d, &join(path, "x"))?;
    let y = decode_ints(required(obj, "y", path)?, d, &join(path, "y"))?;
    let z = decode_int(required(obj, "z", path)?, &join(path, "z"))?;
    Ok(HeisenbergElement::new(x, y, z)?)
}

/// Parses a group descriptor, validating its invariants.
pub fn decode_group(v: &Value, path: &str) -> Result<GroupDescriptor, FormatError> {
    let g: GroupDescriptor = serde_json::from_value(v.clone())
        .map_err(|e| FormatError::field(path, format!("invalid group descriptor: {e}")))?;
    g.validate().map_err(|e| FormatError::field(path, e.to_string()))?;
    Ok(g)
}

pub fn encode_group(g: &GroupDescriptor) -> Value {
    serde_json::to_value(g).expect("descriptor serializes")
}
