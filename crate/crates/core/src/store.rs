//! On-disk catalog of named models: `<store>/<name>/{manifest,params}.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{MqlError, Result};
use crate::learn::{Algorithm, FeatureSpec, Hyper, MetricRecord, MlType, Model, Params};

pub const FORMAT_VERSION: u32 = 1;
const MANIFEST: &str = "manifest.json";
const PARAMS: &str = "params.json";

/// Everything about a stored model except its learned parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub name: String,
    pub ml_type: MlType,
    pub algorithm: Algorithm,
    pub features: Vec<FeatureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub class_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_count: Option<usize>,
    pub train_metrics: MetricRecord,
    pub test_metrics: Option<MetricRecord>,
    pub seed: u64,
    pub hyper: Hyper,
    pub ridge_fallback: bool,
    pub train_rows: usize,
    pub test_rows: usize,
    pub created_at: String,
}

impl Manifest {
    pub fn of(m: &Model) -> Self {
        Manifest {
            format_version: FORMAT_VERSION,
            name: m.name.clone(),
            ml_type: m.ml_type,
            algorithm: m.algorithm,
            features: m.features.clone(),
            target: m.target.clone(),
            class_labels: m.class_labels.clone(),
            cluster_count: m.cluster_count,
            train_metrics: m.train_metrics.clone(),
            test_metrics: m.test_metrics.clone(),
            seed: m.seed,
            hyper: m.hyper,
            ridge_fallback: m.ridge_fallback(),
            train_rows: m.train_rows,
            test_rows: m.test_rows,
            created_at: m.created_at.clone(),
        }
    }

    /// Test metrics when present, else training metrics.
    pub fn reference_metrics(&self) -> &MetricRecord {
        self.test_metrics.as_ref().unwrap_or(&self.train_metrics)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ParamsFile {
    format_version: u32,
    algorithm: Algorithm,
    #[serde(with = "crate::learn::decimal::vec")]
    train_medians: Vec<f64>,
    params: Params,
}

/// Names become directory names, so only a conservative character set is allowed.
pub fn validate_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name.len() <= 128
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(MqlError::InvalidModelName(name.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct ModelStore {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("model types serialize");
    s.push('\n');
    s
}

impl ModelStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ModelStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn model_dir(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        validate_name(name).is_ok() && self.model_dir(name).join(MANIFEST).is_file()
    }

    /// Writes both files into a scratch directory, then renames it into place.
    pub fn save(&self, m: &Model, replace: bool) -> Result<PathBuf> {
        validate_name(&m.name)?;
        let target = self.model_dir(&m.name);
        if target.exists() && !replace {
            return Err(MqlError::NameCollision(m.name.clone()));
        }
        fs::create_dir_all(&self.dir).map_err(|e| MqlError::io(&self.dir, e))?;
        let tag = format!(
            "{}-{}-{}",
            m.name,
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        );
        let tmp = self.dir.join(format!(".tmp-{tag}"));
        fs::create_dir(&tmp).map_err(|e| MqlError::io(&tmp, e))?;
        let params = ParamsFile {
            format_version: FORMAT_VERSION,
            algorithm: m.algorithm,
            train_medians: m.train_medians.clone(),
            params: m.params.clone(),
        };
        let write = |file: &str, text: String| {
            let p = tmp.join(file);
            fs::write(&p, text).map_err(|e| MqlError::io(p, e))
        };
        let written = write(MANIFEST, to_json(&Manifest::of(m))).and_then(|_| write(PARAMS, to_json(&params)));
        if let Err(e) = written {
            let _ = fs::remove_dir_all(&tmp);
            return Err(e);
        }
        if target.exists() {
            let old = self.dir.join(format!(".old-{tag}"));
            fs::rename(&target, &old).map_err(|e| MqlError::io(&target, e))?;
            fs::rename(&tmp, &target).map_err(|e| MqlError::io(&target, e))?;
            let _ = fs::remove_dir_all(&old);
        } else {
            fs::rename(&tmp, &target).map_err(|e| MqlError::io(&target, e))?;
        }
        Ok(target)
    }

    pub fn manifest(&self, name: &str) -> Result<Manifest> {
        validate_name(name).map_err(|_| MqlError::UnknownModel(name.to_string()))?;
        let dir = self.model_dir(name);
        if !dir.is_dir() {
            return Err(MqlError::UnknownModel(name.to_string()));
        }
        let manifest: Manifest = read_json(name, &dir.join(MANIFEST))?;
        let corrupt = |reason: String| MqlError::CorruptManifest {
            name: name.to_string(),
            reason,
        };
        if manifest.format_version != FORMAT_VERSION {
            return Err(corrupt(format!(
                "unsupported format_version {}",
                manifest.format_version
            )));
        }
        if manifest.name != name {
            return Err(corrupt(format!("manifest names model `{}`", manifest.name)));
        }
        Ok(manifest)
    }

    pub fn load(&self, name: &str) -> Result<Model> {
        let mf = self.manifest(name)?;
        let pf: ParamsFile = read_json(name, &self.model_dir(name).join(PARAMS))?;
        let corrupt = |reason: &str| MqlError::CorruptManifest {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        if pf.format_version != FORMAT_VERSION || pf.algorithm != mf.algorithm {
            return Err(corrupt("params file does not match the manifest"));
        }
        if pf.train_medians.len() != mf.features.len() || !shape_ok(&pf.params, &mf) {
            return Err(corrupt("parameter shapes do not match the feature schema"));
        }
        Ok(Model {
            name: mf.name,
            ml_type: mf.ml_type,
            algorithm: mf.algorithm,
            features: mf.features,
            target: mf.target,
            class_labels: mf.class_labels,
            cluster_count: mf.cluster_count,
            params: pf.params,
            train_medians: pf.train_medians,
            train_metrics: mf.train_metrics,
            test_metrics: mf.test_metrics,
            seed: mf.seed,
            hyper: mf.hyper,
            train_rows: mf.train_rows,
            test_rows: mf.test_rows,
            created_at: mf.created_at,
        })
    }

    /// Manifests sorted by name. A missing store directory is an empty store.
    pub fn list(&self) -> Result<Vec<Manifest>> {
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(MqlError::io(&self.dir, e)),
        };
        let mut names: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter(|e| e.path().is_dir())
            .filter_map(|e| e.file_name().into_string().ok())
            .filter(|n| validate_name(n).is_ok())
            .collect();
        names.sort();
        names.iter().map(|n| self.manifest(n)).collect()
    }

    pub fn delete(&self, name: &str) -> Result<()> {
        if !self.contains(name) {
            return Err(MqlError::UnknownModel(name.to_string()));
        }
        let dir = self.model_dir(name);
        fs::remove_dir_all(&dir).map_err(|e| MqlError::io(dir, e))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(name: &str, path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| MqlError::CorruptManifest {
        name: name.to_string(),
        reason: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| MqlError::CorruptManifest {
        name: name.to_string(),
        reason: format!("{}: {e}", path.display()),
    })
}

fn shape_ok(params: &Params, mf: &Manifest) -> bool {
    let d = mf.features.len();
    match params {
        Params::Linear(l) => l.coefficients.len() == d,
        Params::Tree { tree } => !tree.nodes.is_empty(),
        Params::Forest { trees } => !trees.is_empty() && trees.iter().all(|t| !t.nodes.is_empty()),
        Params::Knn(k) => k.points.cols == d && k.standardizer.means.len() == d,
        Params::KMeans {
            centroids,
            standardizer,
            ..
        } => centroids.cols == d && standardizer.means.len() == d && Some(centroids.rows) == mf.cluster_count,
    }
}

pub fn save_model(m: &Model, store_dir: &Path, replace: bool) -> Result<PathBuf> {
    ModelStore::new(store_dir).save(m, replace)
}

pub fn load_model(name: &str, store_dir: &Path) -> Result<Model> {
    ModelStore::new(store_dir).load(name)
}

pub fn list_models(store_dir: &Path) -> Result<Vec<Manifest>> {
    ModelStore::new(store_dir).list()
}

pub fn delete_model(name: &str, store_dir: &Path) -> Result<()> {
    ModelStore::new(store_dir).delete(name)
}
