//! Image discovery. An image id is the PNG's path relative to the dataset
//! root, without extension and with `/` separators; HR/SR/LR trees pair up
//! by id.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use walkdir::WalkDir;

#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub root: PathBuf,
    /// Sorted by image id.
    pub entries: BTreeMap<String, PathBuf>,
}

fn is_png(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

impl DatasetManifest {
    /// Recursively lists PNG files under `root`.
    pub fn discover(root: &Path) -> anyhow::Result<Self> {
        if !root.is_dir() {
            bail!("{} is not a directory", root.display());
        }
        let mut entries = BTreeMap::new();
        for entry in WalkDir::new(root).sort_by_file_name() {
            let entry = entry.with_context(|| format!("walking {}", root.display()))?;
            let path = entry.path();
            if !entry.file_type().is_file() || !is_png(path) {
                continue;
            }
            let id = image_id(root, path)?;
            if let Some(prev) = entries.insert(id.clone(), path.to_path_buf()) {
                bail!("image id {id} is ambiguous: {} and {}", prev.display(), path.display());
            }
        }
        Ok(Self { root: root.to_path_buf(), entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Group for per-dataset statistics: the first path component of nested
    /// ids, otherwise the root directory's name.
    pub fn dataset_of(&self, image_id: &str) -> String {
        match image_id.split_once('/') {
            Some((first, _)) => first.to_owned(),
            None => self
                .root
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| ".".to_owned()),
        }
    }
}

fn image_id(root: &Path, path: &Path) -> anyhow::Result<String> {
    let rel = path.strip_prefix(root).with_context(|| format!("{} outside {}", path.display(), root.display()))?;
    let stem = rel.with_extension("");
    let parts: Vec<String> = stem.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
    Ok(parts.join("/"))
}

/// Ids present in both manifests, and those present in only one.
pub struct Pairing {
    pub paired: Vec<String>,
    pub unpaired: Vec<String>,
}

pub fn pair(a: &DatasetManifest, b: &DatasetManifest) -> Pairing {
    let paired = a.entries.keys().filter(|k| b.entries.contains_key(*k)).cloned().collect();
    let mut unpaired: Vec<String> = a
        .entries
        .keys()
        .filter(|k| !b.entries.contains_key(*k))
        .chain(b.entries.keys().filter(|k| !a.entries.contains_key(*k)))
        .cloned()
        .collect();
    unpaired.sort();
    Pairing { paired, unpaired }
}
