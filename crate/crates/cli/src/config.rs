//! Experiment configuration: a plain `key = value` text file, with any key
//! overridable from the command line. Diff-able provenance for every run.

use std::collections::HashMap;
use std::path::Path;

use crate::CliError;

/// Parsed configuration. Precedence: built-in defaults < file < flags.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: HashMap<String, String>,
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str_content(&text)
    }

    pub fn from_str_content(text: &str) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::InvalidConfig(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    /// Rejects keys outside the command's vocabulary (catches typos before
    /// they silently fall back to defaults).
    pub fn validate_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::InvalidConfig(format!("unknown key `{key}`")));
            }
        }
        Ok(())
    }

    /// The `command` key, when present, must match the invoked subcommand.
    pub fn check_command(&self, command: &str) -> Result<(), CliError> {
        if let Some(declared) = self.values.get("command") {
            if declared != command {
                return Err(CliError::InvalidConfig(format!(
                    "config declares command `{declared}` but `{command}` was invoked"
                )));
            }
        }
        Ok(())
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        self.values
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::InvalidConfig(format!("key `{key}`: bad number `{v}`"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::InvalidConfig(format!("key `{key}`: bad count `{v}`"))),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::InvalidConfig(format!("key `{key}`: bad integer `{v}`"))),
        }
    }

    /// Comma-separated list of reals.
    pub fn get_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|part| {
                    part.trim().parse().map_err(|_| {
                        CliError::InvalidConfig(format!("key `{key}`: bad number `{part}`"))
                    })
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_lines_with_comments() {
        let cfg = Config::from_str_content(
            "command = render\n# comment\nwidth = 400\nescape_radius = 100.0 # trailing\n",
        )
        .unwrap();
        assert_eq!(cfg.get_str("command", ""), "render");
        assert_eq!(cfg.get_usize("width", 0).unwrap(), 400);
        assert_eq!(cfg.get_f64("escape_radius", 0.0).unwrap(), 100.0);
    }

    #[test]
    fn rejects_malformed_lines_and_bad_numbers() {
        assert!(Config::from_str_content("just words\n").is_err());
        let cfg = Config::from_str_content("width = many\n").unwrap();
        assert!(cfg.get_usize("width", 0).is_err());
    }

    #[test]
    fn command_mismatch_detected() {
        let cfg = Config::from_str_content("command = trace\n").unwrap();
        assert!(cfg.check_command("render").is_err());
        assert!(cfg.check_command("trace").is_ok());
    }

    #[test]
    fn unknown_keys_rejected() {
        let cfg = Config::from_str_content("widht = 4\n").unwrap();
        assert!(cfg.validate_keys(&["width"]).is_err());
    }

    #[test]
    fn list_parsing() {
        let cfg = Config::from_str_content("s_list = 5, 10,20\n").unwrap();
        assert_eq!(cfg.get_f64_list("s_list", &[]).unwrap(), vec![5.0, 10.0, 20.0]);
    }
}
