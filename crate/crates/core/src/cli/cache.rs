//! Append-only JSON-lines cache of class group results.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classgroup::{ClassGroupConfig, ClassGroupResult};
use crate::cubicforms::BinaryCubicForm;
use crate::{Error, Result};

pub const CACHE_SCHEMA: &str = "cubiclab.cache/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    /// Coefficients of the reduced form of the field, comma separated.
    pub key: String,
    pub config_hash: String,
    pub toolchain: String,
    pub result: ClassGroupResult,
}

#[derive(Serialize, Deserialize)]
struct Header {
    schema: String,
}

pub fn cache_key(reduced: &BinaryCubicForm) -> String {
    reduced
        .coeffs()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Hash of everything that can change a result: the configuration and
/// whether the oracle was used.
pub fn config_hash(config: &ClassGroupConfig, oracle: bool) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("config serializes"));
    h.update([u8::from(oracle)]);
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn toolchain() -> String {
    format!("cubiclab {}", env!("CARGO_PKG_VERSION"))
}

pub struct Cache {
    path: PathBuf,
    entries: HashMap<(String, String), ClassGroupResult>,
}

impl Cache {
    /// Opens the cache at `path`, creating it with a schema header.
    pub fn open(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        if path.exists() {
            let f = BufReader::new(std::fs::File::open(path)?);
            for (i, line) in f.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let bad = |e: serde_json::Error| Error::Parse(format!("{}:{}: {e}", path.display(), i + 1));
                if i == 0 {
                    let h: Header = serde_json::from_str(&line).map_err(bad)?;
                    if h.schema != CACHE_SCHEMA {
                        return Err(Error::Parse(format!("unsupported cache schema {:?}", h.schema)));
                    }
                    continue;
                }
                let e: CacheEntry = serde_json::from_str(&line).map_err(bad)?;
                let k = (e.key, e.config_hash);
                match entries.get(&k) {
                    Some(prev) if prev != &e.result => return Err(Error::CacheConflict(k.0)),
                    _ => {
                        entries.insert(k, e.result);
                    }
                }
            }
        }
        if !path.exists() || std::fs::metadata(path)?.len() == 0 {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(f, "{}", serde_json::to_string(&Header { schema: CACHE_SCHEMA.into() })?)?;
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn get(&self, key: &str, config_hash: &str) -> Option<&ClassGroupResult> {
        self.entries.get(&(key.to_string(), config_hash.to_string()))
    }

    /// Appends a result; an existing different value under the same key and
    /// configuration is a conflict.
    pub fn put(&mut self, key: &str, config_hash: &str, result: &ClassGroupResult) -> Result<()> {
        let k = (key.to_string(), config_hash.to_string());
        if let Some(prev) = self.entries.get(&k) {
            if prev != result {
                return Err(Error::CacheConflict(key.to_string()));
            }
            return Ok(());
        }
        let entry = CacheEntry {
            key: k.0.clone(),
            config_hash: k.1.clone(),
            toolchain: toolchain(),
            result: result.clone(),
        };
        let mut f = OpenOptions::new().append(true).open(&self.path)?;
        writeln!(f, "{}", serde_json::to_string(&entry)?)?;
        self.entries.insert(k, result.clone());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
