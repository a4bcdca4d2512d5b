//! Validates documents against `schema/output.schema.json`.
//!
//! Only the keywords that schema uses are implemented: `type`, `enum`,
//! `const`, `minimum`, `minItems`, `required`, `properties`,
//! `additionalProperties`, `items`, `oneOf`, and local `$ref`. An unknown
//! keyword is an error so the schema cannot silently outgrow this checker.

use serde_json::Value;

const SCHEMA: &str = include_str!("../../schema/output.schema.json");

const KNOWN: &[&str] = &[
    "$schema",
    "$id",
    "$defs",
    "title",
    "type",
    "enum",
    "const",
    "minimum",
    "minItems",
    "required",
    "properties",
    "additionalProperties",
    "items",
    "oneOf",
    "$ref",
];

pub fn validate(doc: &Value) -> Result<(), Vec<String>> {
    let root: Value = serde_json::from_str(SCHEMA).expect("schema parses");
    let mut errors = Vec::new();
    check(&root, &root, doc, "$", &mut errors);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "integer" => v.is_u64() || v.is_i64(),
        "number" => v.is_number(),
        other => panic!("unknown type {other}"),
    }
}

fn resolve<'a>(root: &'a Value, reference: &str) -> &'a Value {
    let pointer = reference
        .strip_prefix('#')
        .unwrap_or_else(|| panic!("non-local $ref {reference}"));
    root.pointer(pointer)
        .unwrap_or_else(|| panic!("dangling $ref {reference}"))
}

fn check(root: &Value, schema: &Value, v: &Value, at: &str, errors: &mut Vec<String>) {
    let Some(schema) = schema.as_object() else {
        return;
    };
    for key in schema.keys() {
        assert!(KNOWN.contains(&key.as_str()), "unsupported schema keyword {key}");
    }
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        check(root, resolve(root, r), v, at, errors);
    }
    if let Some(t) = schema.get("type") {
        let ok = match t {
            Value::String(name) => type_matches(name, v),
            Value::Array(names) => names.iter().any(|n| type_matches(n.as_str().unwrap(), v)),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            errors.push(format!("{at}: expected type {t}, got {v}"));
            return;
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            errors.push(format!("{at}: {v} not in {options:?}"));
        }
    }
    if let Some(c) = schema.get("const") {
        if c != v {
            errors.push(format!("{at}: expected {c}, got {v}"));
        }
    }
    if let (Some(min), Some(x)) = (schema.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            errors.push(format!("{at}: {x} below minimum {min}"));
        }
    }
    if let Some(items) = v.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (items.len() as u64) < min {
                errors.push(format!("{at}: fewer than {min} items"));
            }
        }
        if let Some(item_schema) = schema.get("items") {
            for (i, item) in items.iter().enumerate() {
                check(root, item_schema, item, &format!("{at}[{i}]"), errors);
            }
        }
    }
    if let Some(map) = v.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !map.contains_key(key) {
                    errors.push(format!("{at}: missing {key}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, value) in map {
            let path = format!("{at}.{key}");
            match (props.and_then(|p| p.get(key)), schema.get("additionalProperties")) {
                (Some(s), _) => check(root, s, value, &path, errors),
                (None, Some(Value::Bool(false))) => errors.push(format!("{path}: not allowed")),
                (None, Some(extra)) => check(root, extra, value, &path, errors),
                (None, None) => {}
            }
        }
    }
    if let Some(options) = schema.get("oneOf").and_then(Value::as_array) {
        let matching = options
            .iter()
            .filter(|o| {
                let mut sub = Vec::new();
                check(root, o, v, at, &mut sub);
                sub.is_empty()
            })
            .count();
        if matching != 1 {
            errors.push(format!("{at}: matches {matching} oneOf branches"));
        }
    }
}

#[test]
fn rejects_malformed_envelopes() {
    let bad = serde_json::json!({ "command": "phik", "inputs": {}, "result": {}, "provenance": [], "version": "x" });
    assert!(validate(&bad).is_err());
    let unknown = serde_json::json!({ "command": "nope", "inputs": {}, "result": {}, "provenance": ["oracle"], "version": "x" });
    assert!(validate(&unknown).is_err());
}
