//! Flat key-value experiment files and flag/file merging.
//!
//! Format: one `key = value` per line, `#` comments, blank lines ignored.
//! Keys are the long flag names without the leading dashes. A `command` key,
//! when present, must name the subcommand the file is used with. Flags
//! always override file values; unknown keys are rejected outright so a
//! typo cannot silently fall back to a default.

use crate::CliError;
use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config file {path}: {e}"))
        })?;
        Self::parse(&text, path)
    }

    fn parse(text: &str, path: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!(
                    "{path}:{}: expected `key = value`, got `{line}`",
                    lineno + 1
                ))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Validation(format!(
                    "{path}:{}: empty key",
                    lineno + 1
                )));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(CliError::Validation(format!(
                    "{path}:{}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        Ok(ConfigFile { entries })
    }

    /// Enforce that the file describes this subcommand (when it says at all)
    /// and contains no keys the subcommand does not understand.
    pub fn check_against(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        if let Some(named) = self.entries.get("command") {
            if named != command {
                return Err(CliError::Validation(format!(
                    "config file is for command `{named}`, not `{command}`"
                )));
            }
        }
        for key in self.entries.keys() {
            if key != "command" && !allowed.contains(&key.as_str()) {
                return Err(CliError::Validation(format!(
                    "unknown config key `{key}` for command `{command}`"
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// Fill a flag slot from the file when the flag was not given: flags win.
pub fn fill<T: FromStr>(
    slot: &mut Option<T>,
    file: &ConfigFile,
    key: &str,
) -> Result<(), CliError>
where
    T::Err: std::fmt::Display,
{
    if slot.is_none() {
        if let Some(raw) = file.get(key) {
            let parsed = raw.parse::<T>().map_err(|e| {
                CliError::Validation(format!("config key `{key}`: cannot parse `{raw}`: {e}"))
            })?;
            *slot = Some(parsed);
        }
    }
    Ok(())
}

/// Comma-separated reals, e.g. `0.02,0.01,0.005`.
pub fn parse_f64_list(raw: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> = raw
        .split(',')
        .map(|piece| piece.trim().parse::<f64>())
        .collect();
    values.map_err(|e| CliError::Validation(format!("{what}: cannot parse `{raw}`: {e}")))
}

/// Comma-separated unsigned integers, e.g. `8,16,32,64`.
pub fn parse_usize_list(raw: &str, what: &str) -> Result<Vec<usize>, CliError> {
    let values: Result<Vec<usize>, _> = raw
        .split(',')
        .map(|piece| piece.trim().parse::<usize>())
        .collect();
    values.map_err(|e| CliError::Validation(format!("{what}: cannot parse `{raw}`: {e}")))
}

/// A `low,high` pair.
pub fn parse_window(raw: &str, what: &str) -> Result<(f64, f64), CliError> {
    let values = parse_f64_list(raw, what)?;
    if values.len() != 2 {
        return Err(CliError::Validation(format!(
            "{what}: expected two comma-separated values, got {}",
            values.len()
        )));
    }
    Ok((values[0], values[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_blanks_and_pairs() {
        let text = "# experiment\n\ncommand = lattice\n t = 1.5 \nn=4\n";
        let file = ConfigFile::parse(text, "test.cfg").unwrap();
        assert_eq!(file.get("command"), Some("lattice"));
        assert_eq!(file.get("t"), Some("1.5"));
        assert_eq!(file.get("n"), Some("4"));
        assert_eq!(file.get("missing"), None);
    }

    #[test]
    fn rejects_malformed_lines_and_duplicates() {
        assert!(matches!(
            ConfigFile::parse("just words\n", "f").unwrap_err(),
            CliError::Validation(_)
        ));
        assert!(matches!(
            ConfigFile::parse("= 3\n", "f").unwrap_err(),
            CliError::Validation(_)
        ));
        let err = ConfigFile::parse("t = 1\nt = 2\n", "f").unwrap_err();
        assert!(err.to_string().contains("duplicate key `t`"));
    }

    #[test]
    fn command_mismatch_and_unknown_keys_are_rejected() {
        let file = ConfigFile::parse("command = lattice\nt = 1\n", "f").unwrap();
        assert!(file.check_against("lattice", &["t"]).is_ok());
        let err = file.check_against("propagate", &["t"]).unwrap_err();
        assert!(err.to_string().contains("`lattice`"));
        let err = file.check_against("lattice", &["n"]).unwrap_err();
        assert!(err.to_string().contains("unknown config key `t`"));
    }

    #[test]
    fn flags_override_file_values() {
        let file = ConfigFile::parse("t = 2.0\n", "f").unwrap();
        let mut from_flag = Some(1.0f64);
        fill(&mut from_flag, &file, "t").unwrap();
        assert_eq!(from_flag, Some(1.0));
        let mut absent: Option<f64> = None;
        fill(&mut absent, &file, "t").unwrap();
        assert_eq!(absent, Some(2.0));
    }

    #[test]
    fn list_and_window_parsing() {
        assert_eq!(
            parse_f64_list("0.02, 0.01 ,0.005", "eps").unwrap(),
            vec![0.02, 0.01, 0.005]
        );
        assert_eq!(parse_usize_list("8,16", "n").unwrap(), vec![8, 16]);
        assert_eq!(parse_window("-4,4", "window").unwrap(), (-4.0, 4.0));
        assert!(parse_window("1,2,3", "window").is_err());
        assert!(parse_f64_list("a,b", "eps").is_err());
    }
}
