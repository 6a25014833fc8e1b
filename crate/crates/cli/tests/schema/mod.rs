//! Minimal JSON-Schema checker for the report schemas shipped in
//! `schemas/`: supports `type`, `required`, `properties`, `items`,
//! `minItems`/`maxItems`, `allOf` and same-directory `$ref` resolution.

use std::collections::HashMap;
use std::path::Path;

use serde_json::Value;

pub struct SchemaSet {
    docs: HashMap<String, Value>,
}

impl SchemaSet {
    pub fn load(dir: &Path) -> Self {
        let mut docs = HashMap::new();
        for entry in std::fs::read_dir(dir).expect("schema dir") {
            let path = entry.unwrap().path();
            if path.extension().and_then(|e| e.to_str()) == Some("json") {
                let name = path.file_name().unwrap().to_str().unwrap().to_string();
                let doc: Value =
                    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
                docs.insert(name, doc);
            }
        }
        SchemaSet { docs }
    }

    fn resolve<'a>(&'a self, current: &str, reference: &str) -> (&'a str, &'a Value) {
        let (file, pointer) = match reference.split_once('#') {
            Some((f, p)) => (if f.is_empty() { current } else { f }, p),
            None => (reference, ""),
        };
        let doc = self
            .docs
            .get(file)
            .unwrap_or_else(|| panic!("unknown schema file `{file}`"));
        let file = self.docs.get_key_value(file).unwrap().0;
        let target = doc
            .pointer(pointer)
            .unwrap_or_else(|| panic!("bad pointer `{pointer}` in `{file}`"));
        (file, target)
    }

    fn check(&self, file: &str, schema: &Value, value: &Value, at: &str) {
        if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
            let (ref_file, target) = self.resolve(file, reference);
            // owned name keeps the borrow checker happy across recursion
            let ref_file = ref_file.to_string();
            self.check(&ref_file, target, value, at);
            return;
        }
        if let Some(all) = schema.get("allOf").and_then(Value::as_array) {
            for sub in all {
                self.check(file, sub, value, at);
            }
        }
        if let Some(ty) = schema.get("type") {
            let allowed: Vec<&str> = match ty {
                Value::String(s) => vec![s.as_str()],
                Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
                _ => panic!("bad type spec at {at}"),
            };
            let actual = match value {
                Value::Null => "null",
                Value::Bool(_) => "boolean",
                Value::Number(n) => {
                    if n.is_u64() || n.is_i64() {
                        "integer"
                    } else {
                        "number"
                    }
                }
                Value::String(_) => "string",
                Value::Array(_) => "array",
                Value::Object(_) => "object",
            };
            let ok = allowed
                .iter()
                .any(|&t| t == actual || (t == "number" && actual == "integer"));
            assert!(ok, "{at}: expected type {allowed:?}, found {actual}");
        }
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                assert!(
                    value.get(key).is_some(),
                    "{at}: missing required field `{key}`"
                );
            }
        }
        if let Some(props) = schema.get("properties").and_then(Value::as_object) {
            if let Some(obj) = value.as_object() {
                for (key, sub) in props {
                    if let Some(field) = obj.get(key) {
                        self.check(file, sub, field, &format!("{at}.{key}"));
                    }
                }
            }
        }
        if let Some(items) = schema.get("items") {
            if let Some(arr) = value.as_array() {
                if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
                    assert!(arr.len() as u64 >= min, "{at}: fewer than {min} items");
                }
                if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
                    assert!(arr.len() as u64 <= max, "{at}: more than {max} items");
                }
                for (i, item) in arr.iter().enumerate() {
                    self.check(file, items, item, &format!("{at}[{i}]"));
                }
            }
        }
    }
}

/// Validate a document against one of the shipped schema files.
pub fn validate_file(dir: &Path, schema_file: &str, doc: &Value) {
    let set = SchemaSet::load(dir);
    let schema = set
        .docs
        .get(schema_file)
        .unwrap_or_else(|| panic!("schema `{schema_file}` not found"))
        .clone();
    set.check(schema_file, &schema, doc, "$");
}
