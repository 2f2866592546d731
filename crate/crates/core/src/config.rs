//! JSON run configuration: defaults, unknown-key rejection and the resolved
//! copy written next to the results.

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::campaign::{CampaignConfig, SCHEMA};
use crate::error::{Error, Result};

/// Dotted paths of keys in `given` that do not exist in `known`.
fn unknown_keys(given: &Value, known: &Value, prefix: &str, out: &mut Vec<String>) {
    let (Value::Object(g), Value::Object(k)) = (given, known) else {
        return;
    };
    for (key, value) in g {
        let path = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}.{key}")
        };
        match k.get(key) {
            Some(reference) => unknown_keys(value, reference, &path, out),
            None => out.push(path),
        }
    }
}

/// Resolves a JSON document against the defaults. Every unknown key is
/// reported at once; missing keys take their default values.
pub fn parse_config_str(text: &str) -> Result<CampaignConfig> {
    let given: Value = serde_json::from_str(text)?;
    if !given.is_object() {
        return Err(Error::Config("configuration must be a JSON object".into()));
    }
    let known = serde_json::to_value(CampaignConfig::default())?;
    let mut unknown = Vec::new();
    unknown_keys(&given, &known, "", &mut unknown);
    if !unknown.is_empty() {
        return Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))));
    }
    if let Some(schema) = given.get("schema") {
        if schema != SCHEMA {
            return Err(Error::Config(format!("unsupported schema {schema}, expected {SCHEMA:?}")));
        }
    }
    serde_json::from_value(given).map_err(|e| Error::Config(e.to_string()))
}

pub fn parse_config(path: &Path) -> Result<CampaignConfig> {
    parse_config_str(&fs::read_to_string(path)?)
}

pub fn to_json(cfg: &CampaignConfig) -> Result<String> {
    Ok(serde_json::to_string_pretty(cfg)? + "\n")
}

/// Writes the resolved configuration as `config.resolved.json` in `dir`.
pub fn write_resolved(cfg: &CampaignConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.resolved.json"), to_json(cfg)?)?;
    Ok(())
}
