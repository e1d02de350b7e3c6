//! Content-addressed result cache.
//!
//! An entry is a file named by the hex SHA-256 of its key material. The
//! first line holds the SHA-256 of the payload that follows; an entry whose
//! payload no longer matches is evicted and the result recomputed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::CliError;

const HEADER: &str = "sha256=";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

/// What a lookup found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup {
    Hit(String),
    Miss,
    /// The entry existed but failed its checksum and was removed.
    Evicted,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Key over every input that can change the output bytes. Fields are length
/// prefixed so that no two field lists collide.
pub fn cache_key(fields: &[&str]) -> String {
    let mut h = Sha256::new();
    for f in fields {
        h.update((f.len() as u64).to_be_bytes());
        h.update(f.as_bytes());
    }
    hex::encode(h.finalize())
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(Cache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.entry"))
    }

    pub fn lookup(&self, key: &str) -> Lookup {
        let path = self.entry_path(key);
        let Ok(text) = fs::read_to_string(&path) else {
            return Lookup::Miss;
        };
        let valid = text.split_once('\n').and_then(|(head, payload)| {
            let sum = head.strip_prefix(HEADER)?;
            (sum == digest(payload.as_bytes())).then(|| payload.to_string())
        });
        match valid {
            Some(payload) => {
                log::info!("cache hit {}", path.display());
                Lookup::Hit(payload)
            }
            None => {
                log::warn!("cache entry {} failed its checksum; evicting", path.display());
                if let Err(e) = fs::remove_file(&path) {
                    log::warn!("could not remove {}: {e}", path.display());
                }
                Lookup::Evicted
            }
        }
    }

    /// Writes through a temporary file and a rename, so concurrent readers
    /// see either the old entry or the whole new one.
    pub fn store(&self, key: &str, payload: &str) -> Result<(), CliError> {
        let path = self.entry_path(key);
        let io = |source| CliError::Io {
            path: path.clone(),
            source,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        write!(tmp, "{HEADER}{}\n{payload}", digest(payload.as_bytes())).map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        log::info!("cache store {}", path.display());
        Ok(())
    }
}
