//! Run configuration: defaults, overlaid by a JSON config file, overlaid by
//! explicit flags. The resolved value is echoed as `run_config.json`.

use std::path::Path;

use laylens::manifest::{parse_json, to_canonical_json, write_text};
use laylens::synthgen::{GenConfig, Preset};
use laylens::Result;
use serde::{de::DeserializeOwned, Serialize};
use serde_json::{Map, Value};

/// Map-valued settings that a layer replaces wholesale.
const REPLACED_MAPS: &[&str] = &["element_mix"];

/// Recursively overlays `top` onto `base`; objects merge key by key, any
/// other value replaces.
pub fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) if REPLACED_MAPS.contains(&k.as_str()) => *slot = v,
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| laylens::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_json(&text, &path.display().to_string())
}

pub fn from_value<T: DeserializeOwned>(v: Value, context: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| laylens::Error::Config(format!("{context}: {e}")))
}

/// Builds a flag overlay from `(key, value)` pairs, skipping absent flags.
#[derive(Default)]
pub struct Flags(Map<String, Value>);

impl Flags {
    pub fn set<V: Serialize>(&mut self, key: &str, value: Option<V>) -> &mut Self {
        if let Some(v) = value {
            self.0.insert(key.to_string(), serde_json::to_value(v).expect("flag values serialize"));
        }
        self
    }

    pub fn nested(&mut self, key: &str, inner: Flags) -> &mut Self {
        if !inner.0.is_empty() {
            self.0.insert(key.to_string(), Value::Object(inner.0));
        }
        self
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

/// Defaults, then the config file, then the flags.
pub fn layered(defaults: Value, file: Option<&Path>, flags: Flags) -> Result<Value> {
    let mut v = defaults;
    if let Some(path) = file {
        merge(&mut v, read_json(path)?);
    }
    merge(&mut v, flags.into_value());
    Ok(v)
}

/// Resolves a generator config from a raw (possibly partial) object. The
/// preset named in it selects the defaults the rest is laid over.
pub fn resolve_gen(raw: Value) -> Result<GenConfig> {
    let preset = match raw.get("preset") {
        Some(p) => from_value::<Preset>(p.clone(), "preset")?,
        None => Preset::Source8,
    };
    let mut base = serde_json::to_value(GenConfig::preset(preset)).expect("config serializes");
    merge(&mut base, raw);
    from_value(base, "generator config")
}

pub fn echo<T: Serialize>(dir: &Path, config: &T) -> Result<()> {
    write_text(&dir.join("run_config.json"), &to_canonical_json(config))
}
