//! Settings resolved from built-in defaults, an optional TOML file and
//! command-line flags, later layers winning.

use std::path::Path;

use serde::{Deserialize, Serialize};
use subregion::{BoundMode, Metric, ScoringParams};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub lambda: f64,
    pub c: f64,
    pub tile_size: usize,
    pub dim: usize,
    pub capacity: usize,
    pub metric: Metric,
    pub mode: BoundMode,
    pub k: usize,
    pub seed: u64,
    /// Gray level of the perfect background tile.
    pub background: u8,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            lambda: ScoringParams::DEFAULT_LAMBDA,
            c: ScoringParams::DEFAULT_C,
            tile_size: 32,
            dim: 6,
            capacity: subregion::index::DEFAULT_CAPACITY,
            metric: Metric::L2,
            mode: BoundMode::PaperDp,
            k: 10,
            seed: 0,
            background: 0,
        }
    }
}

/// One layer of optional overrides; also the schema of the config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Layer {
    pub lambda: Option<f64>,
    pub c: Option<f64>,
    pub tile_size: Option<usize>,
    pub dim: Option<usize>,
    pub capacity: Option<usize>,
    pub metric: Option<String>,
    pub mode: Option<String>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub background: Option<u8>,
}

impl Layer {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

impl Settings {
    /// Defaults, then `config` if given, then `flags`.
    pub fn resolve(config: Option<&Path>, flags: &Layer) -> CliResult<Self> {
        let mut s = Settings::default();
        if let Some(path) = config {
            s.apply(&Layer::from_file(path)?)?;
        }
        s.apply(flags)?;
        Ok(s)
    }

    pub fn apply(&mut self, layer: &Layer) -> CliResult<()> {
        let usage = |e: subregion::Error| CliError::Usage(e.to_string());
        if let Some(v) = layer.lambda {
            self.lambda = v;
        }
        if let Some(v) = layer.c {
            self.c = v;
        }
        if let Some(v) = layer.tile_size {
            self.tile_size = v;
        }
        if let Some(v) = layer.dim {
            self.dim = v;
        }
        if let Some(v) = layer.capacity {
            self.capacity = v;
        }
        if let Some(v) = &layer.metric {
            self.metric = v.parse().map_err(usage)?;
        }
        if let Some(v) = &layer.mode {
            self.mode = v.parse().map_err(usage)?;
        }
        if let Some(v) = layer.k {
            self.k = v;
        }
        if let Some(v) = layer.seed {
            self.seed = v;
        }
        if let Some(v) = layer.background {
            self.background = v;
        }
        self.validate()
    }

    pub fn validate(&self) -> CliResult<()> {
        ScoringParams::new(self.lambda, self.c).map_err(|e| CliError::Usage(e.to_string()))?;
        let bad = |m: &str| Err(CliError::Usage(m.into()));
        if self.tile_size == 0 || !self.tile_size.is_multiple_of(8) {
            return bad("tile size must be a positive multiple of 8");
        }
        if self.dim == 0 {
            return bad("dim must be at least 1");
        }
        if self.capacity < 2 {
            return bad("capacity must be at least 2");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        Ok(())
    }

    pub fn params(&self) -> ScoringParams {
        ScoringParams {
            lambda: self.lambda,
            c: self.c,
            background: subregion::Background { level: self.background },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let s = Settings::resolve(None, &Layer::default()).unwrap();
        assert_eq!((s.lambda, s.c, s.tile_size, s.dim, s.capacity), (1.0, 23000.0, 32, 6, 64));
        assert_eq!((s.metric, s.mode), (Metric::L2, BoundMode::PaperDp));
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "c = 100.0\nk = 3\nmetric = \"l1\"\n").unwrap();
        let flags = Layer {
            k: Some(7),
            ..Layer::default()
        };
        let s = Settings::resolve(Some(&path), &flags).unwrap();
        assert_eq!((s.c, s.k, s.metric, s.lambda), (100.0, 7, Metric::L1, 1.0));
    }

    #[test]
    fn bad_values_are_usage_errors() {
        let flags = Layer {
            lambda: Some(0.0),
            ..Layer::default()
        };
        assert_eq!(Settings::resolve(None, &flags).unwrap_err().exit_code(), 1);
        let flags = Layer {
            mode: Some("greedy".into()),
            ..Layer::default()
        };
        assert!(Settings::resolve(None, &flags).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "colour = 3\n").unwrap();
        assert_eq!(Settings::resolve(Some(&path), &Layer::default()).unwrap_err().exit_code(), 1);
    }
}
