//! TOML configuration merged into command-line arguments.

use crate::error::{Error, Result};

fn flag_present(args: &[String], flag: &str) -> bool {
    args.iter().any(|a| a == flag || a.starts_with(&format!("{flag}=")))
}

fn render(key: &str, value: &toml::Value) -> Result<Option<String>> {
    Ok(Some(match value {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(true) => return Ok(None),
        toml::Value::Array(items) => items
            .iter()
            .map(|v| match v {
                toml::Value::String(s) => Ok(s.clone()),
                toml::Value::Integer(i) => Ok(i.to_string()),
                toml::Value::Float(f) => Ok(f.to_string()),
                _ => Err(Error::invalid(format!("config key '{key}': unsupported list element"))),
            })
            .collect::<Result<Vec<_>>>()?
            .join(","),
        _ => return Err(Error::invalid(format!("config key '{key}': unsupported value"))),
    }))
}

/// Appends `--key value` for every config entry whose flag is not already
/// on the command line. `subcommand` selects the matching `[table]`.
pub fn merge_args(args: &[String], toml_text: &str, subcommand: Option<&str>) -> Result<Vec<String>> {
    let table: toml::Table = toml_text
        .parse()
        .map_err(|e| Error::invalid(format!("config file: {e}")))?;
    let mut entries: Vec<(String, toml::Value)> = Vec::new();
    for (k, v) in &table {
        match v {
            toml::Value::Table(sub) => {
                if Some(k.as_str()) == subcommand {
                    entries.extend(sub.iter().map(|(k, v)| (k.clone(), v.clone())));
                }
            }
            _ => entries.push((k.clone(), v.clone())),
        }
    }
    let mut out = args.to_vec();
    for (key, value) in entries {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" || flag_present(args, &flag) {
            continue;
        }
        if matches!(value, toml::Value::Boolean(false)) {
            continue;
        }
        out.push(flag);
        if let Some(v) = render(&key, &value)? {
            out.push(v);
        }
    }
    Ok(out)
}
