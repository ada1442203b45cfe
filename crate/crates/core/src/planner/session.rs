use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use chrono::{DateTime, SecondsFormat, Utc};

use crate::analyzer::Catalog;
use crate::error::{MqlError, Result};
use crate::store::{Manifest, ModelStore};
use crate::table::{read_csv, Table};

/// How missing feature cells of scored rows are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Zero,
    /// Training-set median per feature.
    Impute,
}

impl FromStr for MissingPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "zero" => Ok(MissingPolicy::Zero),
            "impute" => Ok(MissingPolicy::Impute),
            _ => Err(format!("unknown missing policy `{s}` (expected zero or impute)")),
        }
    }
}

impl fmt::Display for MissingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MissingPolicy::Zero => "zero",
            MissingPolicy::Impute => "impute",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Native,
    /// Write backend scripts instead of executing.
    Emit,
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "native" => Ok(Backend::Native),
            "emit" => Ok(Backend::Emit),
            _ => Err(format!("unknown backend `{s}` (expected native or emit)")),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Native => "native",
            Backend::Emit => "emit",
        })
    }
}

/// Source of `created_at` timestamps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clock {
    System,
    /// Seconds since the Unix epoch.
    Fixed(i64),
}

impl Clock {
    /// `SOURCE_DATE_EPOCH` when set and valid, else the system clock.
    pub fn from_env() -> Clock {
        std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map_or(Clock::System, Clock::Fixed)
    }

    /// RFC 3339 UTC with second precision.
    pub fn now(&self) -> String {
        let t = match self {
            Clock::System => Utc::now(),
            Clock::Fixed(s) => DateTime::from_timestamp(*s, 0).unwrap_or_default(),
        };
        t.to_rfc3339_opts(SecondsFormat::Secs, true)
    }
}

/// Everything a program runs against. Bindings made by INSPECT shadow files
/// for the rest of the session.
#[derive(Debug)]
pub struct Session {
    pub data_dir: PathBuf,
    pub out_dir: PathBuf,
    pub store: ModelStore,
    pub seed: u64,
    pub missing: MissingPolicy,
    pub backend: Backend,
    pub clock: Clock,
    bindings: HashMap<String, Arc<Table>>,
    next_statement: usize,
}

/// Binding key: `x` and `x.csv` name the same table.
pub(crate) fn binding_key(name: &str) -> &str {
    name.strip_suffix(".csv").unwrap_or(name)
}

impl Session {
    pub fn new(data_dir: impl Into<PathBuf>, out_dir: impl Into<PathBuf>, store_dir: impl Into<PathBuf>) -> Self {
        Session {
            data_dir: data_dir.into(),
            out_dir: out_dir.into(),
            store: ModelStore::new(store_dir),
            seed: 42,
            missing: MissingPolicy::Zero,
            backend: Backend::Native,
            clock: Clock::from_env(),
            bindings: HashMap::new(),
            next_statement: 1,
        }
    }

    /// Index the next executed statement receives.
    pub fn next_statement_index(&self) -> usize {
        self.next_statement
    }

    pub(crate) fn take_statement_index(&mut self) -> usize {
        let i = self.next_statement;
        self.next_statement += 1;
        i
    }

    pub fn bind(&mut self, name: &str, t: Table) -> Arc<Table> {
        let t = Arc::new(t);
        self.bindings.insert(binding_key(name).to_string(), t.clone());
        t
    }

    pub fn binding(&self, name: &str) -> Option<Arc<Table>> {
        self.bindings.get(binding_key(name)).cloned()
    }

    /// First existing file among `<data_dir>/<name>.csv`, `<data_dir>/<name>`, `<name>`.
    pub fn resolve_path(&self, name: &str) -> Option<PathBuf> {
        [
            self.data_dir.join(format!("{name}.csv")),
            self.data_dir.join(name),
            PathBuf::from(name),
        ]
        .into_iter()
        .find(|p| p.is_file())
    }

    /// Bindings first, then files.
    pub fn resolve_table(&self, name: &str) -> Result<Arc<Table>> {
        if let Some(t) = self.binding(name) {
            return Ok(t);
        }
        let path = self
            .resolve_path(name)
            .ok_or_else(|| MqlError::UnknownTable(name.to_string()))?;
        let file = std::fs::File::open(&path).map_err(|e| MqlError::io(&path, e))?;
        Ok(Arc::new(read_csv(file, name)?))
    }

    pub(crate) fn out_path(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }

    pub(crate) fn write_artifact(&self, file: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir).map_err(|e| MqlError::io(&self.out_dir, e))?;
        let path = self.out_path(file);
        std::fs::write(&path, contents).map_err(|e| MqlError::io(&path, e))?;
        Ok(path)
    }

    pub fn store_dir(&self) -> &Path {
        self.store.dir()
    }
}

impl Catalog for Session {
    fn table(&self, name: &str) -> Result<Arc<Table>> {
        self.resolve_table(name)
    }

    fn manifest(&self, name: &str) -> Result<Manifest> {
        self.store.manifest(name)
    }
}
