//! `key = value` config files merged under command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use clap::ArgMatches;

use crate::CliError;

/// Keys accepted in a config file for every subcommand.
pub const GLOBAL_KEYS: [&str; 2] = ["jobs", "seed"];

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::invalid(format!("config line {}: expected `key = value`", no + 1)));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(CliError::invalid(format!("config line {}: empty key", no + 1)));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CliError::invalid(format!("config line {}: duplicate key `{k}`", no + 1)));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Rejects keys that are neither subcommand keys nor global keys.
    pub fn check_keys(&self, command: &str, keys: &[&str]) -> Result<(), CliError> {
        for k in self.entries.keys() {
            if !keys.contains(&k.as_str()) && !GLOBAL_KEYS.contains(&k.as_str()) {
                return Err(CliError::invalid(format!("unknown config key `{k}` for `{command}`")));
            }
        }
        Ok(())
    }
}

/// Resolved subcommand settings: flag value if given, else config value.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn resolve(keys: &[&str], matches: &ArgMatches, file: &ConfigFile) -> Self {
        let mut values = BTreeMap::new();
        for &k in keys {
            let v = matches.get_one::<String>(k).cloned().or_else(|| file.get(k).map(str::to_string));
            if let Some(v) = v {
                values.insert(k.to_string(), v);
            }
        }
        Settings { values }
    }

    #[cfg(test)]
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        Settings { values: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect() }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => {
                s.parse::<T>().map(Some).map_err(|_| CliError::invalid(format!("--{key} expects {what} (got `{s}`)")))
            }
        }
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.parsed::<f64>(key, "a number")
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.f64_opt(key)?.ok_or_else(|| missing(key))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn u32(&self, key: &str) -> Result<u32, CliError> {
        self.parsed::<u32>(key, "a nonnegative integer")?.ok_or_else(|| missing(key))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        Ok(self.parsed::<usize>(key, "a nonnegative integer")?.unwrap_or(default))
    }

    /// Comma- or whitespace-separated numbers.
    pub fn list_opt(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(s) = self.raw(key) else {
            return Ok(None);
        };
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>().map_err(|_| {
                    CliError::invalid(format!("--{key} expects a comma-separated list of numbers (got `{t}`)"))
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.list_opt(key)?.ok_or_else(|| missing(key))
    }
}

fn missing(key: &str) -> CliError {
    CliError::invalid(format!("missing required setting --{key}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_rejects_duplicates() {
        let c = ConfigFile::parse("# header\nN = 3\nm=2 # inline\n\nq = 1.5\n").unwrap();
        assert_eq!(c.get("N"), Some("3"));
        assert_eq!(c.get("m"), Some("2"));
        assert_eq!(c.get("q"), Some("1.5"));
        assert!(ConfigFile::parse("N = 3\nN = 4\n").is_err());
        assert!(ConfigFile::parse("just words\n").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let c = ConfigFile::parse("N = 3\nseed = 4\nbogus = 1\n").unwrap();
        assert!(c.check_keys("classify", &["N", "m"]).is_err());
        let c = ConfigFile::parse("N = 3\nseed = 4\n").unwrap();
        assert!(c.check_keys("classify", &["N", "m"]).is_ok());
    }

    #[test]
    fn lists_and_numbers() {
        let s = Settings::from_pairs(&[("radii", "0.1, 0.2,0.4"), ("N", "x")]);
        assert_eq!(s.list("radii").unwrap(), vec![0.1, 0.2, 0.4]);
        assert!(s.u32("N").is_err());
        assert!(s.f64("m").is_err());
        assert_eq!(s.f64_or("m", 2.0).unwrap(), 2.0);
    }
}
