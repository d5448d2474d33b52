use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::ExpansionConfig;
use crate::geometry::DEFAULT_STABILITY_EPS;
use crate::poly::DEFAULT_ROOT_TOL;
use crate::runners::{DEFAULT_GRID, DEFAULT_REFINE_TOL};

/// Environment variable consulted when `--config` is not given.
pub const CONFIG_ENV: &str = "EXPANSIONLAB_CONFIG";

/// Resolved tolerances and flags. Every field may be set from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub root_tol: f64,
    pub eval_tol: f64,
    pub stability_eps: f64,
    pub max_boundary_size: usize,
    pub include_tied_pairs: bool,
    /// Samples for equal-gap time scans.
    pub scan_grid: usize,
    /// Samples per period for the lonely-runner oracle.
    pub oracle_grid: usize,
    pub refine_tol: f64,
    /// Tolerance on the equal-gap condition.
    pub gap_tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            root_tol: DEFAULT_ROOT_TOL,
            eval_tol: 1e-9,
            stability_eps: DEFAULT_STABILITY_EPS,
            max_boundary_size: 10_000,
            include_tied_pairs: true,
            scan_grid: 10_000,
            oracle_grid: DEFAULT_GRID,
            refine_tol: DEFAULT_REFINE_TOL,
            gap_tol: 1e-9,
        }
    }
}

const KEYS: &[&str] = &[
    "root_tol",
    "eval_tol",
    "stability_eps",
    "max_boundary_size",
    "include_tied_pairs",
    "scan_grid",
    "oracle_grid",
    "refine_tol",
    "gap_tol",
];

impl Config {
    pub fn expansion(&self) -> ExpansionConfig {
        ExpansionConfig {
            max_boundary_size: self.max_boundary_size,
            root_tol: self.root_tol,
            eval_tol: self.eval_tol,
            include_tied_pairs: self.include_tied_pairs,
        }
    }

    pub fn parse(text: &str) -> Result<Config> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("config must be a JSON object".into()))?;
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::UnknownKey(k.clone()));
        }
        let cfg: Config =
            serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Config::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.expansion().validate()?;
        let positive = [self.stability_eps, self.refine_tol, self.gap_tol];
        if positive.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.scan_grid < 2 || self.oracle_grid < 2 {
            return Err(Error::InvalidArgument("grids need at least 2 samples".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_defaults() {
        assert_eq!(Config::parse("{}").unwrap(), Config::default());
    }

    #[test]
    fn overrides_apply() {
        let c = Config::parse(r#"{"include_tied_pairs": false, "root_tol": 1e-10}"#).unwrap();
        assert!(!c.include_tied_pairs);
        assert_eq!(c.root_tol, 1e-10);
        assert_eq!(c.max_boundary_size, 10_000);
    }

    #[test]
    fn malformed_reports_position() {
        let err = Config::parse("{\n  \"root_tol\": ,\n}").unwrap_err();
        assert_eq!(err.code(), "ParseError");
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_key() {
        assert_eq!(
            Config::parse(r#"{"root_toll": 1}"#).unwrap_err(),
            Error::UnknownKey("root_toll".into())
        );
    }

    #[test]
    fn invalid_values() {
        assert!(Config::parse(r#"{"max_boundary_size": 0}"#).is_err());
        assert!(Config::parse(r#"{"gap_tol": -1}"#).is_err());
    }
}
