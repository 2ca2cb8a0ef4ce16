use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{RegistryError, RemoteLookup, SpdxDb};
use crate::license::{LicenseInstance, LicenseKind, Origin, PackageRef, Role};
use crate::preprocess::text::normalize_text;

/// What the index knew about one package when it was queried.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    /// An SPDX id, an expression, or free license text. `None` records that
    /// the index had no license for the package.
    pub license_expr: Option<String>,
    pub retrieved_at: DateTime<Utc>,
}

/// Offline copy of package-index license metadata.
///
/// Keys are `name` or `name@version`, with names normalized by
/// [`normalize_package_name`]. Stored on disk as a JSON object.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PackageIndexSnapshot {
    entries: BTreeMap<String, SnapshotEntry>,
}

/// Lowercases and folds runs of `-`, `_`, `.` to `-`, so "Foo_Bar" and
/// "foo-bar" are the same package.
pub fn normalize_package_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut sep = false;
    for c in name.trim().chars() {
        if matches!(c, '-' | '_' | '.') {
            sep = true;
            continue;
        }
        if sep && !out.is_empty() {
            out.push('-');
        }
        sep = false;
        out.extend(c.to_lowercase());
    }
    out
}

fn key(name: &str, version: Option<&str>) -> String {
    match version {
        Some(v) => format!("{}@{}", normalize_package_name(name), v.trim()),
        None => normalize_package_name(name),
    }
}

impl PackageIndexSnapshot {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let raw = fs::read_to_string(path).map_err(|e| RegistryError::io(path, e))?;
        Self::from_json(&raw)
    }

    pub fn from_json(raw: &str) -> Result<Self, RegistryError> {
        Ok(serde_json::from_str(raw)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("snapshot serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), RegistryError> {
        fs::write(path, self.to_json()).map_err(|e| RegistryError::io(path, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, name: &str, version: Option<&str>, entry: SnapshotEntry) {
        self.entries.insert(key(name, version), entry);
    }

    /// Exact entry for `(name, version)`, falling back to the versionless one.
    pub fn get(&self, name: &str, version: Option<&str>) -> Option<&SnapshotEntry> {
        if let Some(v) = version {
            if let Some(e) = self.entries.get(&key(name, Some(v))) {
                return Some(e);
            }
        }
        self.entries.get(&key(name, None))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SnapshotEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }
}

fn package_origin(r: &PackageRef) -> Origin {
    match &r.version {
        Some(v) => Origin::Registry(format!("pkg:{}@{v}", normalize_package_name(&r.name))),
        None => Origin::Registry(format!("pkg:{}", normalize_package_name(&r.name))),
    }
}

fn is_expression(expr: &str) -> bool {
    let upper = format!(" {} ", expr.to_uppercase().replace(['(', ')'], " "));
    [" OR ", " AND ", " WITH "].iter().any(|op| upper.contains(op))
}

/// Turns index metadata into a license instance, or explains why not.
fn instance_from_expr(expr: &str, r: &PackageRef, db: &SpdxDb) -> Result<LicenseInstance, String> {
    let origin = package_origin(r);
    let looks_like_text = expr.contains('\n') || expr.split_whitespace().count() >= 12;
    if !looks_like_text {
        if let Some(entry) = db.lookup(expr) {
            return Ok(LicenseInstance {
                kind: LicenseKind::Referenced,
                origin,
                text: entry.canonical_text.clone(),
                role: Role::Component,
                scope: None,
                spdx_id: Some(entry.id.clone()),
            });
        }
        if is_expression(expr) {
            return Err(format!(
                "package {origin}: license expression {expr:?} is not resolved (only single identifiers are supported)"
            ));
        }
        return Err(format!("package {origin}: unknown license {expr:?}"));
    }
    let text = normalize_text(expr.trim());
    Ok(LicenseInstance {
        kind: LicenseKind::Referenced,
        origin,
        text,
        role: Role::Component,
        scope: None,
        spdx_id: None,
    })
}

fn from_entry(
    entry: &SnapshotEntry,
    r: &PackageRef,
    db: &SpdxDb,
    warnings: &mut Vec<String>,
) -> Option<LicenseInstance> {
    match &entry.license_expr {
        Some(expr) => instance_from_expr(expr, r, db).map_err(|w| warnings.push(w)).ok(),
        None => {
            warnings.push(format!("package {}: the index lists no license", package_origin(r)));
            None
        }
    }
}

/// Resolves a package's license: snapshot first, then at most one remote
/// call whose answer is cached back into `snapshot`.
pub fn resolve_package(
    r: &PackageRef,
    snapshot: &mut PackageIndexSnapshot,
    remote: Option<&dyn RemoteLookup>,
    db: &SpdxDb,
    warnings: &mut Vec<String>,
) -> Option<LicenseInstance> {
    if let Some(entry) = snapshot.get(&r.name, r.version.as_deref()) {
        return from_entry(entry, r, db, warnings);
    }
    let Some(remote) = remote else {
        warnings.push(format!("package {}: not in the index snapshot", package_origin(r)));
        return None;
    };
    match remote.request(&r.name, r.version.as_deref()) {
        Ok(answer) => {
            let entry = SnapshotEntry {
                license_expr: answer,
                retrieved_at: Utc::now(),
            };
            snapshot.insert(&r.name, r.version.as_deref(), entry.clone());
            from_entry(&entry, r, db, warnings)
        }
        Err(e) => {
            warnings.push(format!("package {}: {e}; using snapshot only", package_origin(r)));
            None
        }
    }
}

/// Shared package resolver for one run.
///
/// Cache writes go through one mutex, and each `(name, version)` is sent to
/// the remote index at most once, even when resolution fails.
pub struct PackageResolver<'a> {
    db: &'a SpdxDb,
    snapshot: Mutex<PackageIndexSnapshot>,
    remote: Option<&'a dyn RemoteLookup>,
    attempted: Mutex<HashSet<String>>,
    remote_calls: AtomicUsize,
}

impl<'a> PackageResolver<'a> {
    pub fn new(db: &'a SpdxDb, snapshot: PackageIndexSnapshot, remote: Option<&'a dyn RemoteLookup>) -> Self {
        PackageResolver {
            db,
            snapshot: Mutex::new(snapshot),
            remote,
            attempted: Mutex::new(HashSet::new()),
            remote_calls: AtomicUsize::new(0),
        }
    }

    pub fn resolve(&self, r: &PackageRef, warnings: &mut Vec<String>) -> Option<LicenseInstance> {
        let cached = self
            .snapshot
            .lock()
            .expect("resolver lock")
            .get(&r.name, r.version.as_deref())
            .cloned();
        if let Some(entry) = cached {
            return from_entry(&entry, r, self.db, warnings);
        }
        let k = key(&r.name, r.version.as_deref());
        let first_attempt = self.attempted.lock().expect("resolver lock").insert(k);
        let Some(remote) = self.remote.filter(|_| first_attempt) else {
            warnings.push(format!("package {}: not in the index snapshot", package_origin(r)));
            return None;
        };
        self.remote_calls.fetch_add(1, Ordering::SeqCst);
        let mut scratch = PackageIndexSnapshot::new();
        let out = resolve_package(r, &mut scratch, Some(remote), self.db, warnings);
        let mut snap = self.snapshot.lock().expect("resolver lock");
        for (k, e) in scratch.entries {
            snap.entries.insert(k, e);
        }
        out
    }

    /// Number of remote requests issued so far.
    pub fn remote_calls(&self) -> usize {
        self.remote_calls.load(Ordering::SeqCst)
    }

    pub fn into_snapshot(self) -> PackageIndexSnapshot {
        self.snapshot.into_inner().expect("resolver lock")
    }
}
