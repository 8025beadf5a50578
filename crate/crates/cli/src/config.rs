//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use fbh_core::maximal::TimeGrid;
use serde::Serialize;
use thiserror::Error;

/// Defaults compiled into the binary.
pub const DEFAULTS: &str = include_str!("../defaults.conf");

/// Largest eigenbasis the zero table is asked to hold.
pub const MAX_TERMS: usize = 200_000;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: `{value}`")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub nu: f64,
    pub seed: u64,
    pub n_terms: usize,
    pub quad_nodes: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub ratio: f64,
    pub series_tolerance: f64,
    pub reconstruct_tolerance: f64,
    pub depth: u32,
    pub batch_size: usize,
    pub max_scale: u32,
    pub grid: usize,
}

const KEYS: [&str; 13] = [
    "nu",
    "seed",
    "n_terms",
    "quad_nodes",
    "t_min",
    "t_max",
    "ratio",
    "series_tolerance",
    "reconstruct_tolerance",
    "depth",
    "batch_size",
    "max_scale",
    "grid",
];

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn value<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T, ConfigError> {
    let raw = map
        .get(key)
        .ok_or_else(|| ConfigError::Invalid(format!("missing config key `{key}`")))?;
    raw.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: raw.clone(),
    })
}

impl RunConfig {
    /// Layer the shipped defaults, then each override set in order, then validate.
    pub fn layered(overrides: &[Vec<(String, String)>]) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        let base = parse_pairs(DEFAULTS)?;
        for (k, v) in base.into_iter().chain(overrides.iter().flatten().cloned()) {
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey(k));
            }
            map.insert(k, v);
        }
        let cfg = RunConfig {
            nu: value(&map, "nu")?,
            seed: value(&map, "seed")?,
            n_terms: value(&map, "n_terms")?,
            quad_nodes: value(&map, "quad_nodes")?,
            t_min: value(&map, "t_min")?,
            t_max: value(&map, "t_max")?,
            ratio: value(&map, "ratio")?,
            series_tolerance: value(&map, "series_tolerance")?,
            reconstruct_tolerance: value(&map, "reconstruct_tolerance")?,
            depth: value(&map, "depth")?,
            batch_size: value(&map, "batch_size")?,
            max_scale: value(&map, "max_scale")?,
            grid: value(&map, "grid")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.nu > -0.5 && self.nu.is_finite()) {
            return bad(format!("nu must be finite and exceed -1/2, got {}", self.nu));
        }
        if self.n_terms == 0 || self.n_terms > MAX_TERMS {
            return bad(format!("n_terms must lie in 1..={MAX_TERMS}, got {}", self.n_terms));
        }
        if self.quad_nodes < 8 {
            return bad(format!("quad_nodes must be at least 8, got {}", self.quad_nodes));
        }
        for (k, v) in [
            ("series_tolerance", self.series_tolerance),
            ("reconstruct_tolerance", self.reconstruct_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{k} must be positive, got {v}"));
            }
        }
        self.time_grid()?;
        if self.depth > fbh_core::hardy::MAX_DEPTH {
            return bad(format!("depth must be at most {}, got {}", fbh_core::hardy::MAX_DEPTH, self.depth));
        }
        if self.max_scale > 30 {
            return bad(format!("max_scale must be at most 30, got {}", self.max_scale));
        }
        if self.grid < 2 {
            return bad(format!("grid must be at least 2, got {}", self.grid));
        }
        Ok(())
    }

    pub fn time_grid(&self) -> Result<TimeGrid, ConfigError> {
        TimeGrid::geometric(self.t_min, self.t_max, self.ratio).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(s: &str) -> Vec<(String, String)> {
        parse_pairs(s).unwrap()
    }

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::layered(&[]).unwrap();
        assert_eq!(c.nu, 0.5);
        assert!(c.n_terms <= MAX_TERMS);
    }

    #[test]
    fn later_layers_win() {
        let c = RunConfig::layered(&[pairs("nu = 1\nseed = 3"), pairs("nu=2 # comment")]).unwrap();
        assert_eq!((c.nu, c.seed), (2.0, 3));
    }

    #[test]
    fn rejects_bad_input() {
        for text in ["nu = -0.5", "series_tolerance = 0", "bogus = 1", "n_terms = x", "ratio = 2", "t_min = 0.1"] {
            assert!(RunConfig::layered(&[pairs(text)]).is_err(), "{text}");
        }
        assert!(matches!(parse_pairs("nu 1"), Err(ConfigError::Syntax { line: 1, .. })));
    }
}
