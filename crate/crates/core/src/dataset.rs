//! Ordered collections of subspaces and their on-disk directory format.
//!
//! A dataset directory contains `manifest.json` plus one CSV basis file per
//! point:
//!
//! ```text
//! { "ambient_dim": 20,
//!   "entries": [ { "path": "point_0000.csv", "k": 3, "label": 0 }, ... ],
//!   "provenance": { "generator": "...", "params": {...}, "seed": 7 } }
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::Subspace;
use crate::io;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Subspaces of a common ambient space with optional integer class labels.
#[derive(Debug, Clone)]
pub struct SubspaceDataset {
    points: Vec<Subspace>,
    labels: Option<Vec<usize>>,
    pub provenance: Provenance,
}

impl SubspaceDataset {
    pub fn new(points: Vec<Subspace>) -> Result<Self> {
        if let Some(first) = points.first() {
            let n = first.ambient_dim();
            if let Some((i, p)) = points
                .iter()
                .enumerate()
                .find(|(_, p)| p.ambient_dim() != n)
            {
                return Err(Error::DimensionMismatch(format!(
                    "point {i} lives in R^{}, expected R^{n}",
                    p.ambient_dim()
                )));
            }
        }
        Ok(SubspaceDataset {
            points,
            labels: None,
            provenance: Provenance::default(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} points",
                labels.len(),
                self.points.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn points(&self) -> &[Subspace] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Shared ambient dimension, `None` for an empty dataset.
    pub fn ambient_dim(&self) -> Option<usize> {
        self.points.first().map(Subspace::ambient_dim)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.points.iter().map(Subspace::sub_dim).collect()
    }

    /// Subset in the given index order, labels carried along.
    pub fn select(&self, indices: &[usize]) -> SubspaceDataset {
        SubspaceDataset {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
            provenance: self.provenance.clone(),
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut entries = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            let name = format!("point_{i:04}.csv");
            io::write_subspace(&dir.join(&name), p)?;
            entries.push(ManifestEntry {
                path: name,
                k: p.sub_dim(),
                label: self.labels.as_ref().map(|l| l[i]),
            });
        }
        let manifest = Manifest {
            ambient_dim: self.ambient_dim().unwrap_or(0),
            entries,
            provenance: self.provenance.clone(),
        };
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest)?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }

    /// Loads a dataset directory. Bases that fail the orthonormality check
    /// are re-orthonormalized; the returned list holds the indices whose
    /// stored basis needed a noticeable correction.
    pub fn load(dir: &Path) -> Result<(SubspaceDataset, Vec<usize>)> {
        let path = dir.join("manifest.json");
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let mut points = Vec::with_capacity(manifest.entries.len());
        let mut corrected = Vec::new();
        let mut labels = Vec::new();
        for (i, entry) in manifest.entries.iter().enumerate() {
            let file = dir.join(&entry.path);
            let loaded = io::read_subspace(&file)?;
            let s = loaded.subspace;
            if s.ambient_dim() != manifest.ambient_dim || s.sub_dim() != entry.k {
                return Err(Error::Parse {
                    path: file,
                    message: format!(
                        "basis is {}x{}, manifest says {}x{}",
                        s.ambient_dim(),
                        s.sub_dim(),
                        manifest.ambient_dim,
                        entry.k
                    ),
                });
            }
            if loaded.corrected {
                corrected.push(i);
            }
            labels.push(entry.label);
            points.push(s);
        }
        let mut ds = SubspaceDataset::new(points)?.with_provenance(manifest.provenance);
        if !labels.is_empty() && labels.iter().all(Option::is_some) {
            ds = ds.with_labels(labels.into_iter().flatten().collect())?;
        }
        Ok((ds, corrected))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    ambient_dim: usize,
    entries: Vec<ManifestEntry>,
    #[serde(default)]
    provenance: Provenance,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestEntry {
    path: String,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<usize>,
}
