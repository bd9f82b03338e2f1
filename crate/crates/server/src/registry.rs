use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use squid_core::field::{load_dataset, EnsembleField, MANIFEST_FILE};
use squid_core::summary::{summarize_time, LocationSummary};
use squid_core::{Error, Result};

type CachedSummaries = std::result::Result<Arc<Vec<LocationSummary>>, Arc<Error>>;

pub struct Dataset {
    pub id: String,
    pub field: EnsembleField,
    summaries: Vec<OnceLock<CachedSummaries>>,
}

impl Dataset {
    pub fn new(id: impl Into<String>, field: EnsembleField) -> Self {
        let summaries = (0..field.nt()).map(|_| OnceLock::new()).collect();
        Dataset {
            id: id.into(),
            field,
            summaries,
        }
    }

    /// Summaries of every location at `t`, computed on first use.
    pub fn summaries(
        &self,
        t: usize,
    ) -> std::result::Result<Arc<Vec<LocationSummary>>, Arc<Error>> {
        self.field.check_time(t).map_err(Arc::new)?;
        self.summaries[t]
            .get_or_init(|| {
                summarize_time(&self.field, t)
                    .map(Arc::new)
                    .map_err(Arc::new)
            })
            .clone()
    }

    pub fn info(&self) -> DatasetInfo {
        DatasetInfo {
            id: self.id.clone(),
            name: self.field.name().to_string(),
            dims: self.field.dims(),
            nt: self.field.nt(),
            n_members: self.field.n_members(),
            spacing: self.field.spacing(),
            origin: self.field.origin(),
            dtype: self.field.dtype().as_str(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub id: String,
    pub name: String,
    pub dims: [usize; 3],
    pub nt: usize,
    pub n_members: usize,
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    pub dtype: &'static str,
}

/// Datasets keyed by directory name. Immutable after the startup scan.
#[derive(Default)]
pub struct Registry {
    datasets: BTreeMap<String, Dataset>,
}

/// A directory that looked like a dataset but failed to load.
#[derive(Debug)]
pub struct SkippedDataset {
    pub path: PathBuf,
    pub error: Error,
}

impl Registry {
    /// Registers every child of `data_dir` holding a manifest, plus
    /// `data_dir` itself if it is a dataset.
    pub fn scan(data_dir: impl AsRef<Path>) -> Result<(Self, Vec<SkippedDataset>)> {
        let data_dir = data_dir.as_ref();
        let mut dirs = Vec::new();
        if data_dir.join(MANIFEST_FILE).is_file() {
            dirs.push(data_dir.to_path_buf());
        }
        let entries = fs::read_dir(data_dir).map_err(|source| Error::Io {
            path: data_dir.to_path_buf(),
            source,
        })?;
        for entry in entries.flatten() {
            let p = entry.path();
            if p.is_dir() && p.join(MANIFEST_FILE).is_file() {
                dirs.push(p);
            }
        }

        let mut reg = Registry::default();
        let mut skipped = Vec::new();
        for dir in dirs {
            let id = dir
                .canonicalize()
                .unwrap_or_else(|_| dir.clone())
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into());
            match load_dataset(&dir) {
                Ok(field) => reg.insert(Dataset::new(id, field)),
                Err(error) => skipped.push(SkippedDataset { path: dir, error }),
            }
        }
        Ok((reg, skipped))
    }

    pub fn insert(&mut self, dataset: Dataset) {
        self.datasets.insert(dataset.id.clone(), dataset);
    }

    pub fn get(&self, id: &str) -> Option<&Dataset> {
        self.datasets.get(id)
    }

    pub fn list(&self) -> Vec<DatasetInfo> {
        self.datasets.values().map(Dataset::info).collect()
    }

    pub fn len(&self) -> usize {
        self.datasets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datasets.is_empty()
    }
}
