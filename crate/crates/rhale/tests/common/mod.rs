//! Shared test support: a small JSON Schema interpreter covering the subset
//! the shipped schema uses, and an SVG well-formedness check.

#![allow(dead_code)]

use serde_json::Value;
use std::path::Path;

/// Loads the schema shipped with the repository.
pub fn load_schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/output.schema.json");
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    serde_json::from_str(&text).expect("schema is valid JSON")
}

/// Validates `doc` against the shipped schema; panics with a path-qualified
/// message on the first violation.
pub fn assert_valid_document(doc: &Value) {
    let schema = load_schema();
    if let Err(msg) = validate(doc, &schema, &schema, "$") {
        panic!("schema violation: {msg}");
    }
}

fn resolve<'a>(root: &'a Value, reference: &str) -> &'a Value {
    let path = reference
        .strip_prefix("#/")
        .unwrap_or_else(|| panic!("unsupported $ref {reference}"));
    let mut node = root;
    for part in path.split('/') {
        node = node
            .get(part)
            .unwrap_or_else(|| panic!("dangling $ref {reference}"));
    }
    node
}

fn type_matches(doc: &Value, ty: &str) -> bool {
    match ty {
        "object" => doc.is_object(),
        "array" => doc.is_array(),
        "string" => doc.is_string(),
        "boolean" => doc.is_boolean(),
        "null" => doc.is_null(),
        "number" => doc.is_number(),
        "integer" => doc.is_i64() || doc.is_u64(),
        other => panic!("unsupported type keyword {other}"),
    }
}

/// Recursive check. Supports: $ref, oneOf, type (single or list), const,
/// enum, required, properties, additionalProperties: false, items,
/// minItems, minimum. That is the complete vocabulary of the shipped file.
fn validate(doc: &Value, schema: &Value, root: &Value, at: &str) -> Result<(), String> {
    if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
        return validate(doc, resolve(root, reference), root, at);
    }
    if let Some(variants) = schema.get("oneOf").and_then(Value::as_array) {
        let hits = variants
            .iter()
            .filter(|v| validate(doc, v, root, at).is_ok())
            .count();
        if hits != 1 {
            return Err(format!("{at}: matched {hits} oneOf variants, want exactly 1"));
        }
        return Ok(());
    }
    if let Some(ty) = schema.get("type") {
        let ok = match ty {
            Value::String(s) => type_matches(doc, s),
            Value::Array(list) => list
                .iter()
                .any(|t| type_matches(doc, t.as_str().expect("type entries are strings"))),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            return Err(format!("{at}: type mismatch, got {doc}"));
        }
    }
    if let Some(expected) = schema.get("const") {
        if doc != expected {
            return Err(format!("{at}: expected const {expected}, got {doc}"));
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(doc) {
            return Err(format!("{at}: {doc} not in enum"));
        }
    }
    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        if let Some(v) = doc.as_f64() {
            if v < min {
                return Err(format!("{at}: {v} below minimum {min}"));
            }
        }
    }
    if let Some(obj) = doc.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().unwrap();
                if !obj.contains_key(key) {
                    return Err(format!("{at}: missing required key {key:?}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in obj.keys() {
                if props.map_or(true, |p| !p.contains_key(key)) {
                    return Err(format!("{at}: unexpected key {key:?}"));
                }
            }
        }
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(child) = obj.get(key) {
                    validate(child, sub, root, &format!("{at}.{key}"))?;
                }
            }
        }
    }
    if let Some(list) = doc.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (list.len() as u64) < min {
                return Err(format!("{at}: {} items, need at least {min}", list.len()));
            }
        }
        if let Some(item_schema) = schema.get("items") {
            for (i, item) in list.iter().enumerate() {
                validate(item, item_schema, root, &format!("{at}[{i}]"))?;
            }
        }
    }
    Ok(())
}

/// Minimal well-formedness check for the SVGs we emit: tags balance,
/// attribute quotes pair up.
pub fn assert_well_formed_svg(svg: &str) {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = svg;
    while let Some(open) = rest.find('<') {
        let tail = &rest[open + 1..];
        let close = tail.find('>').expect("unclosed tag");
        let tag = &tail[..close];
        if let Some(name) = tag.strip_prefix('/') {
            let top = stack.pop().expect("closing tag with empty stack");
            assert_eq!(top, name.trim(), "mismatched closing tag");
        } else if !tag.ends_with('/') && !tag.starts_with('!') && !tag.starts_with('?') {
            let name: String = tag
                .chars()
                .take_while(|c| !c.is_whitespace() && *c != '>')
                .collect();
            stack.push(name);
        }
        assert_eq!(tag.matches('\'').count() % 2, 0, "unbalanced quotes in {tag}");
        rest = &tail[close + 1..];
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
}
