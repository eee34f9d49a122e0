// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Content-addressed table cache.
//!
//! Files live under one directory (flag `--cache-dir`, else `SU3KIT_CACHE`,
//! else a per-user cache directory) and are keyed by the hash of
//! `(p₁, p₂, schema version, phase convention)`. Every file carries a
//! checksum of its payload; mismatches are treated as a miss and the entry
//! is rebuilt. Writes go to a temp file first and are renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};
use su3kit::coupling::{CGTable, PHASE_CONVENTION, SCHEMA_VERSION};
use su3kit::json::{cg_table_from_json, cg_table_to_json};
use su3kit::IrrepLabel;

pub struct Cache {
    dir: Option<PathBuf>,
    pub quiet: bool,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn sha(s: &str) -> String {
    hex(&Sha256::digest(s.as_bytes()))
}

impl Cache {
    /// Resolve the cache directory; an unwritable directory degrades to
    /// in-memory-only mode with a warning on stderr.
    pub fn open(explicit: Option<&Path>, quiet: bool) -> Cache {
        let dir = explicit
            .map(|p| p.to_path_buf())
            .or_else(|| std::env::var_os("SU3KIT_CACHE").map(PathBuf::from))
            .or_else(|| dirs::cache_dir().map(|d| d.join("su3kit")));
        let dir = match dir {
            Some(d) => {
                if std::fs::create_dir_all(&d).is_err() || !is_writable(&d) {
                    eprintln!(
                        "warning: cache directory {} is not writable; running without a persistent cache",
                        d.display()
                    );
                    None
                } else {
                    Some(d)
                }
            }
            None => None,
        };
        Cache { dir, quiet }
    }

    pub fn key(p1: IrrepLabel, p2: IrrepLabel) -> String {
        sha(&format!(
            "cgTable:{},{}:{},{}:v{}:{}",
            p1.p(),
            p1.q(),
            p2.p(),
            p2.q(),
            SCHEMA_VERSION,
            PHASE_CONVENTION
        ))
    }

    fn path_for(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// Fetch a table through the persistent layer: disk hit, else build and
    /// persist. The in-process cache of the core crate still applies.
    pub fn cg_table(&self, p1: IrrepLabel, p2: IrrepLabel) -> su3kit::Result<Arc<CGTable>> {
        let key = Self::key(p1, p2);
        if let Some(path) = self.path_for(&key) {
            if let Some(table) = self.try_load(&path) {
                if !self.quiet {
                    eprintln!("cache hit: {}x{} ({})", p1, p2, path.display());
                }
                return Ok(Arc::new(table));
            }
        }
        let table = su3kit::coupling::cg_table(p1, p2)?;
        if let Some(path) = self.path_for(&key) {
            self.store(&path, &table);
            if !self.quiet {
                eprintln!("cache store: {}x{} ({})", p1, p2, path.display());
            }
        }
        Ok(table)
    }

    fn try_load(&self, path: &Path) -> Option<CGTable> {
        let text = std::fs::read_to_string(path).ok()?;
        let (checksum, payload) = split_envelope(&text)?;
        if sha(payload) != checksum {
            eprintln!(
                "warning: checksum mismatch in {}; rebuilding",
                path.display()
            );
            return None;
        }
        match cg_table_from_json(payload) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("warning: unreadable cache file {}: {e}; rebuilding", path.display());
                None
            }
        }
    }

    fn store(&self, path: &Path, table: &CGTable) {
        let payload = cg_table_to_json(table);
        let wrapped = format!("{{\"checksum\":\"{}\",\"payload\":{}}}", sha(&payload), payload);
        let tmp = path.with_extension("tmp");
        let ok = std::fs::File::create(&tmp)
            .and_then(|mut f| f.write_all(wrapped.as_bytes()))
            .and_then(|_| std::fs::rename(&tmp, path));
        if let Err(e) = ok {
            eprintln!("warning: could not persist cache file {}: {e}", path.display());
        }
    }
}

fn is_writable(dir: &Path) -> bool {
    let probe = dir.join(".su3kit-probe");
    let ok = std::fs::write(&probe, b"ok").is_ok();
    let _ = std::fs::remove_file(&probe);
    ok
}

/// Pull `checksum` and the raw payload text back out of the envelope without
/// reserializing (so the checksum matches byte-for-byte).
fn split_envelope(text: &str) -> Option<(String, &str)> {
    let rest = text.strip_prefix("{\"checksum\":\"")?;
    let quote = rest.find('"')?;
    let checksum = rest[..quote].to_string();
    let payload = rest[quote..].strip_prefix("\",\"payload\":")?;
    let payload = payload.strip_suffix('}')?;
    Some((checksum, payload))
}
