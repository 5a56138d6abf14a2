//! Content-addressed cache of homology groups.
//!
//! A result lives in `<dir>/<sha256>.json`, keyed by the canonical spec, the
//! coefficients and the kind of groups. Writers go through a temporary file
//! and an atomic rename, so concurrent readers never see partial files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use symstrat_core::foxneuwirth::FnSpec;
use symstrat_core::homology::{Coefficients, GradedGroups, HomologyGroup};
use symstrat_core::verify::{canonical_spec, space_groups, GroupKind, GroupSource};
use symstrat_core::{Error, Result};

const CACHE_FORMAT: u32 = 1;
pub const CACHE_ENV: &str = "SYMSTRAT_CACHE";
pub const DEFAULT_CACHE_DIR: &str = ".symstrat-cache";

#[derive(Serialize)]
struct Key<'a> {
    format: u32,
    spec: &'a FnSpec,
    coefficients: String,
    kind: GroupKind,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    degree: usize,
    group: HomologyGroup,
}

#[derive(Serialize, Deserialize)]
struct Stored {
    format: u32,
    spec: FnSpec,
    coefficients: String,
    kind: GroupKind,
    groups: Vec<Entry>,
}

pub struct DiskCache {
    dir: PathBuf,
    limit: u32,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl DiskCache {
    pub fn open(dir: &Path, limit: u32) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), limit })
    }

    pub fn key(spec: &FnSpec, coeff: Coefficients, kind: GroupKind) -> String {
        let key = Key { format: CACHE_FORMAT, spec: &canonical_spec(spec), coefficients: coeff.to_string(), kind };
        let bytes = serde_json::to_vec(&key).expect("keys always serialise");
        hex::encode(Sha256::digest(bytes))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    fn load(&self, path: &Path, spec: &FnSpec, coeff: Coefficients, kind: GroupKind) -> Option<GradedGroups> {
        let stored: Stored = serde_json::from_slice(&fs::read(path).ok()?).ok()?;
        let matches = stored.format == CACHE_FORMAT
            && stored.spec == canonical_spec(spec)
            && stored.coefficients == coeff.to_string()
            && stored.kind == kind;
        matches.then(|| stored.groups.into_iter().map(|e| (e.degree, e.group)).collect())
    }

    fn store(&self, path: &Path, stored: &Stored) -> io::Result<()> {
        let n = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
        let tmp = path.with_extension(format!("tmp.{}.{n}", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(stored).map_err(io::Error::other)?)?;
        fs::rename(&tmp, path).inspect_err(|_| {
            let _ = fs::remove_file(&tmp);
        })
    }
}

impl GroupSource for DiskCache {
    fn groups(&self, spec: &FnSpec, coeff: Coefficients, kind: GroupKind) -> Result<GradedGroups> {
        let total = spec.total_weight();
        if total > self.limit {
            return Err(Error::SizeLimitExceeded { total, limit: self.limit });
        }
        let path = self.path(&Self::key(spec, coeff, kind));
        if let Some(hit) = self.load(&path, spec, coeff, kind) {
            return Ok(hit);
        }
        let groups = space_groups(spec, coeff, kind, self.limit)?;
        let stored = Stored {
            format: CACHE_FORMAT,
            spec: canonical_spec(spec),
            coefficients: coeff.to_string(),
            kind,
            groups: groups.iter().map(|(&degree, g)| Entry { degree, group: g.clone() }).collect(),
        };
        if let Err(e) = self.store(&path, &stored) {
            eprintln!("warning: could not write cache entry {}: {e}", path.display());
        }
        Ok(groups)
    }
}
