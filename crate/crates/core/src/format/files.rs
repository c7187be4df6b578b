//! Instance, reduction, element and witness files.
//!
//! ```text
//! instance:  {"version": 1, "group": G, "submonoids": [[g, ..], ..], "conjugators": [g, ..]?}
//! reduction: {"version": 1, "kind": K, "ambient": GxH, "generators": [(g, h), ..],
//!             "target": h, "meta": {...}}
//! element:   {"version": 1, "element": g} or {"version": 1, "query": (g, h)} or a bare g
//! witness:   {"version": 1, "reduction": {"path": .., "sha256": ..}, "query": (g, h),
//!             "word": [i, ..], "factorization": {...}}
//! ```

use serde_json::{json, Value};

use super::{
    decode_element, decode_group, encode_element, encode_group, expect_array, expect_object, join, required,
    FormatError, FORMAT_VERSION,
};
use crate::group::{Element, GroupDescriptor};
use crate::reductions::{build_reduction, Factorization, ProductInstance, ReductionKind, SectionReduction};
use crate::words::Word;

fn parse_json(text: &str) -> Result<Value, FormatError> {
    Ok(serde_json::from_str(text)?)
}

fn check_version(obj: &serde_json::Map<String, Value>) -> Result<(), FormatError> {
    let v = required(obj, "version", "")?;
    match v.as_u64() {
        Some(FORMAT_VERSION) => Ok(()),
        Some(other) => Err(FormatError::UnsupportedVersion(other)),
        None => match v.as_str().and_then(|s| s.parse::<u64>().ok()) {
            Some(FORMAT_VERSION) => Ok(()),
            Some(other) => Err(FormatError::UnsupportedVersion(other)),
            None => Err(FormatError::field("version", "expected a non-negative integer")),
        },
    }
}

fn decode_list(group: &GroupDescriptor, v: &Value, path: &str) -> Result<Vec<Element>, FormatError> {
    expect_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, e)| decode_element(group, e, &format!("{path}[{i}]")))
        .collect()
}

fn reject_unknown(obj: &serde_json::Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), FormatError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(FormatError::field(join(path, k), "unexpected field")),
        None => Ok(()),
    }
}

pub fn decode_instance(v: &Value) -> Result<ProductInstance, FormatError> {
    let obj = expect_object(v, "")?;
    reject_unknown(obj, &["version", "group", "submonoids", "conjugators"], "")?;
    check_version(obj)?;
    let group = decode_group(required(obj, "group", "")?, "group")?;
    let subs = expect_array(required(obj, "submonoids", "")?, "submonoids")?;
    let submonoids = subs
        .iter()
        .enumerate()
        .map(|(i, s)| decode_list(&group, s, &format!("submonoids[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let conjugators = match obj.get("conjugators") {
        None | Some(Value::Null) => None,
        Some(c) => Some(decode_list(&group, c, "conjugators")?),
    };
    ProductInstance::new(group, submonoids, conjugators).map_err(|e| FormatError::field("submonoids", e.to_string()))
}

pub fn parse_instance(text: &str) -> Result<ProductInstance, FormatError> {
    decode_instance(&parse_json(text)?)
}

pub fn encode_instance(instance: &ProductInstance) -> Value {
    instance.to_json()
}

pub fn encode_reduction(red: &SectionReduction) -> Value {
    json!({
        "version": FORMAT_VERSION,
        "kind": red.kind().name(),
        "ambient": encode_group(red.ambient()),
        "generators": red.generators().iter().map(encode_element).collect::<Vec<_>>(),
        "target": encode_element(red.target()),
        "meta": red.meta(),
    })
}

/// Parses a reduction file. The construction is replayed from the instance
/// stored in `meta`, and the file's ambient group, generators and target
/// must match the replay exactly.
pub fn parse_reduction(text: &str) -> Result<SectionReduction, FormatError> {
    let v = parse_json(text)?;
    let obj = expect_object(&v, "")?;
    reject_unknown(obj, &["version", "kind", "ambient", "generators", "target", "meta"], "")?;
    check_version(obj)?;
    let kind_v = required(obj, "kind", "")?;
    let kind = kind_v
        .as_str()
        .and_then(ReductionKind::parse)
        .ok_or_else(|| FormatError::field("kind", format!("unknown reduction kind {kind_v}")))?;
    let ambient = decode_group(required(obj, "ambient", "")?, "ambient")?;
    let generators = decode_list(&ambient, required(obj, "generators", "")?, "generators")?;
    let meta = expect_object(required(obj, "meta", "")?, "meta")?;
    let instance = decode_instance(required(meta, "instance", "meta")?).map_err(|e| match e {
        FormatError::Field { path, message } => FormatError::field(join("meta.instance", &path), message),
        other => other,
    })?;
    let red = build_reduction(kind, &instance).map_err(|e| FormatError::field("meta.instance", e.to_string()))?;
    if &ambient != red.ambient() {
        return Err(FormatError::field(
            "ambient",
            format!("expected {}, found {ambient}", red.ambient()),
        ));
    }
    let target = decode_element(red.h_group(), required(obj, "target", "")?, "target")?;
    if generators.len() != red.generators().len() {
        return Err(FormatError::field(
            "generators",
            format!(
                "expected {} generators, found {}",
                red.generators().len(),
                generators.len()
            ),
        ));
    }
    if let Some(i) = generators.iter().zip(red.generators()).position(|(a, b)| a != b) {
        return Err(FormatError::field(
            format!("generators[{i}]"),
            "does not match the construction recorded in meta",
        ));
    }
    if &target != red.target() {
        return Err(FormatError::field(
            "target",
            "does not match the construction recorded in meta",
        ));
    }
    Ok(red)
}

/// Reads the query of a membership request: a bare `G` element or one
/// wrapped as `{"element": g}` becomes `(g, h)` for the reduction's target;
/// `{"query": (g, h)}` is taken as is.
pub fn parse_query(red: &SectionReduction, text: &str) -> Result<Element, FormatError> {
    let v = parse_json(text)?;
    if let Some(obj) = v
        .as_object()
        .filter(|o| o.contains_key("element") || o.contains_key("query"))
    {
        reject_unknown(obj, &["version", "element", "query"], "")?;
        if obj.contains_key("version") {
            check_version(obj)?;
        }
        return match (obj.get("element"), obj.get("query")) {
            (Some(e), None) => Ok(red.query(decode_element(red.g_group(), e, "element")?)),
            (None, Some(q)) => decode_element(red.ambient(), q, "query"),
            _ => Err(FormatError::field("", "give either \"element\" or \"query\", not both")),
        };
    }
    Ok(red.query(decode_element(red.g_group(), &v, "")?))
}

pub fn encode_witness(
    reduction_path: &str,
    reduction_sha256: &str,
    query: &Element,
    word: &Word,
    factorization: &Factorization,
) -> Value {
    json!({
        "version": FORMAT_VERSION,
        "reduction": { "path": reduction_path, "sha256": reduction_sha256 },
        "query": encode_element(query),
        "word": word,
        "factorization": factorization.to_json(),
    })
}

/// Pretty JSON with a trailing newline, the form every written file uses.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
