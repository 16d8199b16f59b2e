//! Configuration file loading and command-line overrides.

use std::fs;
use std::path::Path;

use rotorbath::RawConfig;

use crate::failure::{CliResult, Failure};

/// Reads a key-value configuration file; `None` yields all defaults.
pub fn load(path: Option<&Path>) -> CliResult<RawConfig> {
    let Some(path) = path else {
        return Ok(RawConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    toml::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

/// Applies `KEY=VALUE` overrides, each parsed with the file syntax.
pub fn apply_overrides(base: &RawConfig, overrides: &[String]) -> CliResult<RawConfig> {
    if overrides.is_empty() {
        return Ok(base.clone());
    }
    let mut doc = String::new();
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Failure::config(format!("override `{o}` is not KEY=VALUE")))?;
        doc.push_str(&format!("{} = {}\n", k.trim(), v.trim()));
    }
    let over: RawConfig =
        toml::from_str(&doc).map_err(|e| Failure::config(format!("override: {e}")))?;
    Ok(base.merged(&over))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_win_over_file_values() {
        let base: RawConfig = toml::from_str("K = 3.5\neta = 1.0\nkicks = 200").unwrap();
        let merged = apply_overrides(&base, &["eta=0.1".into(), "hbar = 0.3".into()]).unwrap();
        assert_eq!(merged.kick, Some(3.5));
        assert_eq!(merged.eta, Some(0.1));
        assert_eq!(merged.hbar, Some(0.3));
        assert_eq!(merged.kicks, Some(200));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(apply_overrides(&RawConfig::default(), &["gamma=2".into()]).is_err());
        assert!(apply_overrides(&RawConfig::default(), &["eta".into()]).is_err());
    }
}
