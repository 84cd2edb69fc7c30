//! On-disk catalog cache keyed by `(format_version, v, n)`.

use std::path::{Path, PathBuf};

use crate::catalog::{enumerate_stratum, CatalogFile, StratumCatalog, CATALOG_FORMAT_VERSION};
use crate::config::{Limits, RunConfig};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CatalogStore {
    dir: Option<PathBuf>,
    read_only: bool,
    limits: Limits,
}

impl CatalogStore {
    /// A store that always recomputes.
    pub fn uncached(limits: Limits) -> Self {
        CatalogStore {
            dir: None,
            read_only: true,
            limits,
        }
    }

    pub fn new(dir: impl Into<PathBuf>, read_only: bool, limits: Limits) -> Self {
        CatalogStore {
            dir: Some(dir.into()),
            read_only,
            limits,
        }
    }

    pub fn from_config(cfg: &RunConfig) -> Self {
        CatalogStore {
            dir: cfg.cache_dir.clone(),
            read_only: cfg.read_only_cache,
            limits: cfg.limits,
        }
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn path_for(&self, v: usize, n: usize) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("catalog-f{CATALOG_FORMAT_VERSION}-v{v}-n{n}.json")))
    }

    /// Returns the stratum, reading the cache when a valid entry exists and
    /// writing it after a fresh enumeration.
    pub fn stratum(&self, v: usize, n: usize) -> Result<StratumCatalog> {
        if let Some(path) = self.path_for(v, n) {
            if path.exists() {
                let catalog = read_catalog(&path)?;
                if catalog.vertex_count() != v || catalog.edge_count() != n {
                    return Err(Error::input(format!(
                        "{}: cached catalog is for (v={}, n={})",
                        path.display(),
                        catalog.vertex_count(),
                        catalog.edge_count()
                    )));
                }
                return Ok(catalog);
            }
        }
        let catalog = enumerate_stratum(v, n, &self.limits)?;
        if let (Some(path), false) = (self.path_for(v, n), self.read_only) {
            write_catalog(&path, &catalog)?;
        }
        Ok(catalog)
    }
}

pub fn read_catalog(path: &Path) -> Result<StratumCatalog> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let file: CatalogFile = serde_json::from_str(&text).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })?;
    file.try_into()
}

pub fn write_catalog(path: &Path, catalog: &StratumCatalog) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io_err)?;
    }
    let json = serde_json::to_string_pretty(&CatalogFile::from(catalog)).map_err(|source| {
        Error::Json {
            context: path.display().to_string(),
            source,
        }
    })?;
    // Write then rename so a concurrent reader never sees a partial file.
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, json + "\n").map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}
