//! Content-addressed Gröbner basis store. Hits are byte-verified; anything that fails
//! verification is moved to `quarantine/` and recomputed, never used.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gbasis::{groebner, DegreeCap, GBResult, MonomialOrder};
use crate::presentation::Presentation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheEventKind {
    Hit,
    Miss,
    Quarantined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEvent {
    pub kind: CacheEventKind,
    pub key: String,
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub struct GbCache {
    dir: Option<PathBuf>,
    pub events: Vec<CacheEvent>,
}

fn cache_err(path: &Path, e: impl ToString) -> Error {
    Error::Cache {
        path: path.display().to_string(),
        reason: e.to_string(),
    }
}

/// Key over the presentation hash, monomial order and cap; distinct orders give distinct keys.
pub fn cache_key(p: &Presentation, cap: DegreeCap) -> String {
    let order = MonomialOrder::deglex(&p.precedence).label();
    let text = format!("{}\n{}\nlen {}\nbits {}\n", p.hash(), order, cap.max_len, cap.bit_ceiling);
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl GbCache {
    /// `None` disables caching. The directory is created if needed.
    pub fn new(dir: Option<PathBuf>) -> Result<GbCache> {
        if let Some(d) = &dir {
            for sub in ["gb", "quarantine"] {
                let p = d.join(sub);
                fs::create_dir_all(&p).map_err(|e| cache_err(&p, e))?;
            }
        }
        Ok(GbCache { dir, events: vec![] })
    }

    pub fn entry_path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join("gb").join(format!("{key}.gb")))
    }

    /// Returns the stored basis when it verifies against `p` and `cap`, otherwise computes it.
    pub fn get_or_compute(&mut self, p: &Presentation, cap: DegreeCap) -> Result<GBResult> {
        let key = cache_key(p, cap);
        let Some(path) = self.entry_path(&key) else {
            return groebner(p, cap);
        };
        if path.exists() {
            let bytes = fs::read(&path).map_err(|e| cache_err(&path, e))?;
            match verify(&bytes, p, cap) {
                Ok(g) => {
                    self.note(CacheEventKind::Hit, &key, &path, None);
                    return Ok(g);
                }
                Err(reason) => {
                    let dest = self.quarantine(&key, &path)?;
                    self.note(CacheEventKind::Quarantined, &key, &dest, Some(reason));
                }
            }
        } else {
            self.note(CacheEventKind::Miss, &key, &path, None);
        }
        let g = groebner(p, cap)?;
        write_atomic(&path, g.to_text().as_bytes())?;
        Ok(g)
    }

    fn note(&mut self, kind: CacheEventKind, key: &str, path: &Path, reason: Option<String>) {
        self.events.push(CacheEvent {
            kind,
            key: key.to_string(),
            path: path.display().to_string(),
            reason,
        });
    }

    fn quarantine(&self, key: &str, path: &Path) -> Result<PathBuf> {
        let qdir = self.dir.as_ref().unwrap().join("quarantine");
        let mut n = 0;
        let dest = loop {
            let d = qdir.join(format!("{key}.{n}.gb"));
            if !d.exists() {
                break d;
            }
            n += 1;
        };
        fs::rename(path, &dest).map_err(|e| cache_err(path, e))?;
        Ok(dest)
    }
}

fn verify(bytes: &[u8], p: &Presentation, cap: DegreeCap) -> std::result::Result<GBResult, String> {
    let text = std::str::from_utf8(bytes).map_err(|e| e.to_string())?;
    let g = GBResult::from_text(text).map_err(|e| e.to_string())?;
    if g.input_hash != p.hash() {
        return Err("input hash does not match the presentation".into());
    }
    if g.cap != cap.max_len || g.order.precedence != p.precedence {
        return Err("cap or monomial order does not match".into());
    }
    if g.to_text().as_bytes() != bytes {
        return Err("stored bytes are not canonical".into());
    }
    Ok(g)
}

/// Write to a sibling temporary file, then rename over the target.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let tmp = dir.join(format!(".{}.tmp{}", path.file_name().unwrap().to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(|e| cache_err(&tmp, e))?;
    f.write_all(bytes).map_err(|e| cache_err(&tmp, e))?;
    f.sync_all().map_err(|e| cache_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| cache_err(path, e))
}
