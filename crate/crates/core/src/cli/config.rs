//! Flat `key = value` config files and the flag > file > default merge.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use super::CliError;

/// Keys a config file may set. Names follow the long flags.
pub const KNOWN_KEYS: &[&str] = &[
    "format",
    "p",
    "alpha",
    "eps",
    "mu",
    "r",
    "theta",
    "theta-frac",
    "units",
    "alpha0",
    "beta",
    "g-mu",
    "oracle",
    "route",
    "rel-tol",
    "abs-tol",
    "max-subdivisions",
    "splittings",
    "quantity",
    "p-set",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    origin: String,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Blank lines and `#` comments are skipped. Keys are case-insensitive
    /// and `_` reads as `-`.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{origin}:{}: expected key = value, got {raw:?}",
                    i + 1
                )));
            };
            let key = k.trim().to_ascii_lowercase().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("{origin}:{}: unknown key {key:?}", i + 1)));
            }
            let value = v.trim().trim_matches('"').to_string();
            if values.insert(key.clone(), value).is_some() {
                return Err(CliError::Usage(format!("{origin}:{}: duplicate key {key:?}", i + 1)));
            }
        }
        Ok(Self {
            values,
            origin: origin.to_string(),
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|e| {
                CliError::Usage(format!("{}: bad value {s:?} for {key}: {e}", self.origin))
            }),
        }
    }

    /// The flag if given, else the file's value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn pick_or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    pub fn pick_bool(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_merges() {
        let c = ConfigFile::parse("# medium\neps = 2.25\nrel_tol=1e-8  # tighter\n\n", "t").unwrap();
        assert_eq!(c.get::<f64>("eps").unwrap(), Some(2.25));
        assert_eq!(c.pick(Some(4.0), "eps").unwrap(), Some(4.0));
        assert_eq!(c.pick::<f64>(None, "rel-tol").unwrap(), Some(1e-8));
        assert_eq!(c.pick_or::<f64>(None, "mu", 1.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_junk() {
        assert!(ConfigFile::parse("eps 2", "t").is_err());
        assert!(ConfigFile::parse("colour = red", "t").is_err());
        assert!(ConfigFile::parse("p = 2\np = 3", "t").is_err());
        let c = ConfigFile::parse("p = two", "t").unwrap();
        assert!(c.get::<u32>("p").is_err());
    }
}
