//! Run configuration: resource caps, output format, cache location.
//!
//! Values are layered: command-line flags override `DECKFORGE_*` environment
//! variables, which override a TOML config file, which overrides defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Resource caps shared by every computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Canonicalizations allowed while enumerating one stratum.
    pub max_states: u64,
    /// Dense matrix cells allowed in a single normal-form computation.
    pub max_matrix_cells: u64,
    /// Largest multiset size the exact minimal-mass search will try.
    pub max_mass: usize,
    /// Multisets the exact search may examine for sizes above two.
    pub search_budget: u64,
    /// Coefficient bound for kernel box enumeration.
    pub box_bound: u32,
    /// Lattice points the box enumeration may visit.
    pub max_box_points: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 10_000_000,
            max_matrix_cells: 50_000_000,
            max_mass: 3,
            search_budget: 5_000_000,
            box_bound: 2,
            max_box_points: 2_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::input(format!(
                "unknown output format {other:?} (expected json, csv or text)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    /// `None` disables the catalog cache.
    pub cache_dir: Option<PathBuf>,
    pub read_only_cache: bool,
    pub limits: Limits,
    pub format: OutputFormat,
    /// Worker threads; 0 lets the pool pick.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cache_dir: None,
            read_only_cache: false,
            limits: Limits::default(),
            format: OutputFormat::Json,
            jobs: 0,
        }
    }
}

/// One configuration layer. Every field is optional; unset fields fall
/// through to the next layer.
#[derive(Clone, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub cache_dir: Option<PathBuf>,
    pub read_only_cache: Option<bool>,
    pub max_states: Option<u64>,
    pub max_matrix_cells: Option<u64>,
    pub max_mass: Option<usize>,
    pub search_budget: Option<u64>,
    pub box_bound: Option<u32>,
    pub max_box_points: Option<u64>,
    pub format: Option<String>,
    pub jobs: Option<usize>,
}

impl ConfigLayer {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        toml::from_str(&text)
            .map_err(|e| Error::input(format!("{}: {e}", path.display())))
    }

    /// Reads `DECKFORGE_*` variables through `lookup`.
    pub fn from_env(lookup: impl Fn(&str) -> Option<String>) -> Result<Self> {
        fn parsed<T: FromStr>(
            lookup: &impl Fn(&str) -> Option<String>,
            key: &str,
        ) -> Result<Option<T>> {
            match lookup(key) {
                None => Ok(None),
                Some(raw) => raw
                    .trim()
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::input(format!("environment variable {key}={raw:?} is not valid"))),
            }
        }
        Ok(ConfigLayer {
            cache_dir: lookup("DECKFORGE_CACHE").map(PathBuf::from),
            read_only_cache: parsed(&lookup, "DECKFORGE_READ_ONLY_CACHE")?,
            max_states: parsed(&lookup, "DECKFORGE_MAX_STATES")?,
            max_matrix_cells: parsed(&lookup, "DECKFORGE_MAX_MATRIX_CELLS")?,
            max_mass: parsed(&lookup, "DECKFORGE_MAX_MASS")?,
            search_budget: parsed(&lookup, "DECKFORGE_SEARCH_BUDGET")?,
            box_bound: parsed(&lookup, "DECKFORGE_BOX_BOUND")?,
            max_box_points: parsed(&lookup, "DECKFORGE_MAX_BOX_POINTS")?,
            format: lookup("DECKFORGE_FORMAT"),
            jobs: parsed(&lookup, "DECKFORGE_JOBS")?,
        })
    }
}

impl RunConfig {
    /// Applies layers from lowest to highest precedence on top of the defaults.
    pub fn resolve(layers: &[ConfigLayer]) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for layer in layers {
            cfg.apply(layer)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, layer: &ConfigLayer) -> Result<()> {
        if let Some(dir) = &layer.cache_dir {
            self.cache_dir = Some(dir.clone());
        }
        let limits = &mut self.limits;
        macro_rules! take {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(value) = layer.$field { $target = value; })*
            };
        }
        take! {
            read_only_cache => self.read_only_cache,
            max_states => limits.max_states,
            max_matrix_cells => limits.max_matrix_cells,
            max_mass => limits.max_mass,
            search_budget => limits.search_budget,
            box_bound => limits.box_bound,
            max_box_points => limits.max_box_points,
            jobs => self.jobs,
        }
        if let Some(format) = &layer.format {
            self.format = format.parse()?;
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let l = &self.limits;
        let caps = [
            ("max_states", l.max_states),
            ("max_matrix_cells", l.max_matrix_cells),
            ("max_mass", l.max_mass as u64),
            ("search_budget", l.search_budget),
            ("max_box_points", l.max_box_points),
        ];
        if let Some((name, _)) = caps.iter().find(|(_, v)| *v == 0) {
            return Err(Error::input(format!("{name} must be positive")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_is_flags_env_file_defaults() {
        let file = ConfigLayer {
            max_states: Some(10),
            box_bound: Some(5),
            format: Some("csv".into()),
            ..Default::default()
        };
        let env = ConfigLayer::from_env(|k| match k {
            "DECKFORGE_MAX_STATES" => Some("20".into()),
            "DECKFORGE_CACHE" => Some("/tmp/deckforge".into()),
            _ => None,
        })
        .unwrap();
        let flags = ConfigLayer {
            max_states: Some(30),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&[file, env, flags]).unwrap();
        assert_eq!(cfg.limits.max_states, 30);
        assert_eq!(cfg.limits.box_bound, 5);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.cache_dir, Some(PathBuf::from("/tmp/deckforge")));
        assert_eq!(cfg.limits.search_budget, Limits::default().search_budget);
    }

    #[test]
    fn rejects_zero_caps_and_bad_values() {
        let zero = ConfigLayer {
            max_states: Some(0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&[zero]).is_err());
        assert!(ConfigLayer::from_env(|k| (k == "DECKFORGE_JOBS").then(|| "many".into())).is_err());
        let bad_format = ConfigLayer {
            format: Some("xml".into()),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&[bad_format]).is_err());
    }

    #[test]
    fn toml_file_layer() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deckforge.toml");
        std::fs::write(&path, "max_mass = 4\nformat = \"text\"\n").unwrap();
        let layer = ConfigLayer::from_toml_file(&path).unwrap();
        let cfg = RunConfig::resolve(&[layer]).unwrap();
        assert_eq!(cfg.limits.max_mass, 4);
        assert_eq!(cfg.format, OutputFormat::Text);
        std::fs::write(&path, "unknown_key = 1\n").unwrap();
        assert!(ConfigLayer::from_toml_file(&path).is_err());
    }
}
