//! Collects the licenses of a project tree: declared license files,
//! referenced licenses (names, URLs, dependency manifests) and inline
//! license headers of source files.

mod config;
mod inline;
mod manifests;
mod mentions;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use globset::GlobSet;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

pub use config::ScanConfig;
pub use inline::{has_license_cue, leading_comment_block};
pub use manifests::{parse_manifest, parse_package_json, parse_requirements, parse_toml, python_imports, ManifestContents};
pub use mentions::{find_references, mention_candidates};

use crate::exec::Execution;
use crate::license::{LicenseInstance, LicenseKind, Origin, PackageRef, Role};
use crate::preprocess::{collapse_whitespace, normalize_text};
use crate::registry::{resolve_reference_at, SpdxDb};

#[derive(Debug, thiserror::Error)]
pub enum ExtractionError {
    #[error("project root {0} does not exist or is not a directory")]
    RootNotFound(PathBuf),
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("invalid scan config: {0}")]
    Config(#[source] serde_json::Error),
    #[error("invalid glob {0:?}: {1}")]
    Glob(String, String),
}

/// Everything found in one project tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectScan {
    pub root: PathBuf,
    /// Sorted by origin, then kind.
    pub instances: Vec<LicenseInstance>,
    /// Sorted and deduplicated.
    pub package_refs: Vec<PackageRef>,
    pub warnings: Vec<String>,
}

impl ProjectScan {
    /// Adds instances found elsewhere (such as licenses of resolved
    /// packages), keeping the dedup and ordering guarantees.
    pub fn add_instances(&mut self, extra: Vec<LicenseInstance>) {
        let mut all = std::mem::take(&mut self.instances);
        all.extend(extra);
        self.instances = dedup(all, &mut self.warnings);
        self.instances.sort_by_key(LicenseInstance::sort_key);
    }
}

/// Header blocks that name a license and otherwise hold fewer words than this
/// (copyright lines aside) are treated as references rather than as license
/// text of their own.
const SHORT_HEADER_WORDS: usize = 12;

#[derive(Default)]
struct Found {
    instances: Vec<LicenseInstance>,
    refs: Vec<PackageRef>,
    warnings: Vec<String>,
}

impl Found {
    fn merge(&mut self, other: Found) {
        self.instances.extend(other.instances);
        self.refs.extend(other.refs);
        self.warnings.extend(other.warnings);
    }
}

fn read_utf8(root: &Path, rel: &Path, warnings: &mut Vec<String>) -> Option<String> {
    match fs::read(root.join(rel)) {
        Ok(bytes) => match String::from_utf8(bytes) {
            Ok(s) => Some(s),
            Err(_) => {
                warnings.push(format!("{}: not valid UTF-8, skipped", Origin::path(rel)));
                None
            }
        },
        Err(e) => {
            warnings.push(format!("{}: {e}", Origin::path(rel)));
            None
        }
    }
}

fn file_name(rel: &Path) -> &str {
    rel.file_name().and_then(|n| n.to_str()).unwrap_or("")
}

fn is_readme(name: &str) -> bool {
    name.to_ascii_lowercase().starts_with("readme")
}

/// Project-relative paths of all regular files, in sorted order. Hidden
/// directories and files are skipped.
fn walk(root: &Path, warnings: &mut Vec<String>) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let walker = WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
    for entry in walker {
        match entry {
            Ok(e) if e.file_type().is_file() => {
                if let Ok(rel) = e.path().strip_prefix(root) {
                    out.push(rel.to_path_buf());
                }
            }
            Ok(_) => {}
            Err(e) => {
                let p = e.path().and_then(|p| p.strip_prefix(root).ok()).map(Origin::path);
                warnings.push(format!("{}: {e}", p.map_or_else(|| root.display().to_string(), |o| o.to_string())));
            }
        }
    }
    out
}

fn declared_instance(root: &Path, rel: &Path, warnings: &mut Vec<String>) -> Option<LicenseInstance> {
    let raw = read_utf8(root, rel, warnings)?;
    let text = normalize_text(&raw).trim().to_string();
    if text.is_empty() {
        warnings.push(format!("{}: empty license file, skipped", Origin::path(rel)));
        return None;
    }
    let at_root = rel.parent().is_none_or(|p| p.as_os_str().is_empty());
    Some(LicenseInstance {
        kind: LicenseKind::Declared,
        origin: Origin::path(rel),
        text,
        role: if at_root { Role::Project } else { Role::Component },
        scope: None,
        spdx_id: None,
    })
}

/// License files of the tree. Files directly under `root` are project
/// licenses; nested ones are component licenses.
pub fn extract_declared(root: &Path, config: &ScanConfig) -> (Vec<LicenseInstance>, Vec<String>) {
    let mut warnings = Vec::new();
    let files = walk(root, &mut warnings);
    let instances = files
        .iter()
        .filter(|rel| config.is_declared_name(file_name(rel)))
        .filter_map(|rel| declared_instance(root, rel, &mut warnings))
        .collect();
    (instances, warnings)
}

fn is_copyright_line(line: &str) -> bool {
    let l = line.trim_start().to_lowercase();
    l.starts_with("copyright") || l.starts_with("(c)") || l.starts_with('©')
}

/// Instances from the header of one source file. `rel` is relative to
/// `root`. A short header that just names a license (an SPDX tag, say)
/// yields referenced instances; any other header with a license cue yields
/// one inline instance.
pub fn extract_inline(root: &Path, rel: &Path, db: &SpdxDb) -> (Vec<LicenseInstance>, Vec<String>) {
    let mut warnings = Vec::new();
    let Some(raw) = read_utf8(root, rel, &mut warnings) else {
        return (Vec::new(), warnings);
    };
    let ext = rel.extension().and_then(|e| e.to_str()).unwrap_or("");
    let Some(block) = leading_comment_block(&raw, ext) else {
        return (Vec::new(), warnings);
    };
    if !has_license_cue(&block) {
        return (Vec::new(), warnings);
    }
    let origin = Origin::path(rel);
    let mut refs = find_references(&block, &origin, db);
    if !refs.is_empty() {
        let other_words: usize = block
            .lines()
            .filter(|l| !is_copyright_line(l))
            .filter(|l| mention_candidates(l).iter().all(|c| db.lookup(c).is_none()))
            .map(|l| l.split_whitespace().count())
            .sum();
        if other_words < SHORT_HEADER_WORDS {
            for r in &mut refs {
                r.scope = Some(rel.to_path_buf());
            }
            return (refs, warnings);
        }
    }
    let text = normalize_text(&block).trim().to_string();
    let inst = LicenseInstance {
        kind: LicenseKind::Inline,
        origin,
        text,
        role: Role::Component,
        scope: Some(rel.to_path_buf()),
        spdx_id: None,
    };
    (vec![inst], warnings)
}

fn manifest_file(root: &Path, rel: &Path, db: &SpdxDb, found: &mut Found) {
    let Some(raw) = read_utf8(root, rel, &mut found.warnings) else {
        return;
    };
    let m = parse_manifest(&raw, rel);
    found.refs.extend(m.packages);
    found.warnings.extend(m.warnings);
    for field in m.license_fields {
        match resolve_reference_at(&field, db, Some(Origin::path(rel))) {
            Some(inst) => found.instances.push(inst),
            None => found.warnings.push(format!("{}: unrecognized license {field:?}", Origin::path(rel))),
        }
    }
}

/// Dependencies named in the manifests of the tree, plus Python imports
/// when `config.scan_imports` is set.
pub fn collect_package_refs(root: &Path, config: &ScanConfig) -> Result<(Vec<PackageRef>, Vec<String>), ExtractionError> {
    let globs = config.manifest_set()?;
    let mut found = Found::default();
    let files = walk(root, &mut found.warnings);
    let db = SpdxDb::builtin();
    for rel in &files {
        if globs.is_match(rel) {
            manifest_file(root, rel, db, &mut found);
        }
        if config.scan_imports && rel.extension().is_some_and(|e| e == "py") {
            if let Some(raw) = read_utf8(root, rel, &mut found.warnings) {
                found.refs.extend(python_imports(&raw, rel));
            }
        }
    }
    found.refs.sort();
    found.refs.dedup();
    Ok((found.refs, found.warnings))
}

fn scan_file(root: &Path, rel: &Path, config: &ScanConfig, globs: &GlobSet, db: &SpdxDb) -> Found {
    let mut found = Found::default();
    let name = file_name(rel);
    if config.is_declared_name(name) {
        if let Some(inst) = declared_instance(root, rel, &mut found.warnings) {
            found.instances.push(inst);
        }
    } else if is_readme(name) {
        if let Some(raw) = read_utf8(root, rel, &mut found.warnings) {
            found.instances.extend(find_references(&raw, &Origin::path(rel), db));
        }
    }
    if globs.is_match(rel) {
        manifest_file(root, rel, db, &mut found);
    }
    if config.is_source(name) {
        let (instances, warnings) = extract_inline(root, rel, db);
        found.instances.extend(instances);
        found.warnings.extend(warnings);
        if config.scan_imports && rel.extension().is_some_and(|e| e == "py") {
            if let Some(raw) = read_utf8(root, rel, &mut found.warnings) {
                found.refs.extend(python_imports(&raw, rel));
            }
        }
    }
    found
}

/// Keeps one instance per kind and whitespace-normalized text, preferring a
/// project license and then the smallest origin. Each merge is reported.
fn dedup(instances: Vec<LicenseInstance>, warnings: &mut Vec<String>) -> Vec<LicenseInstance> {
    let mut groups: BTreeMap<(LicenseKind, String), Vec<LicenseInstance>> = BTreeMap::new();
    for inst in instances {
        groups.entry((inst.kind, collapse_whitespace(&inst.text))).or_default().push(inst);
    }
    let mut out = Vec::new();
    for (_, mut group) in groups {
        group.sort_by_key(|g| (g.role, g.sort_key()));
        if group.len() > 1 {
            let origins: Vec<String> = group.iter().map(|g| g.origin.to_string()).collect();
            let kind = format!("{:?}", group[0].kind).to_lowercase();
            warnings.push(format!("identical {kind} license text at {}", origins.join(", ")));
        }
        out.push(group.swap_remove(0));
    }
    out
}

/// Walks `root` and returns every license instance and dependency found.
/// Per-file problems become warnings; only a missing root is an error.
pub fn scan_project(root: &Path, config: &ScanConfig, db: &SpdxDb, exec: Execution) -> Result<ProjectScan, ExtractionError> {
    if !root.is_dir() {
        return Err(ExtractionError::RootNotFound(root.to_path_buf()));
    }
    let globs = config.manifest_set()?;
    let mut warnings = Vec::new();
    let files = walk(root, &mut warnings);
    let mut found = Found::default();
    for f in exec.map(&files, |rel| scan_file(root, rel, config, &globs, db)) {
        found.merge(f);
    }
    warnings.append(&mut found.warnings);

    let mut instances = dedup(found.instances, &mut warnings);
    instances.sort_by_key(LicenseInstance::sort_key);
    let pls: Vec<String> = instances.iter().filter(|i| i.is_project()).map(|i| i.origin.to_string()).collect();
    if pls.len() > 1 {
        warnings.push(format!("several top-level license files, all treated as project licenses: {}", pls.join(", ")));
    }
    found.refs.sort();
    found.refs.dedup();
    Ok(ProjectScan {
        root: root.to_path_buf(),
        instances,
        package_refs: found.refs,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(root: &Path, rel: &str, text: &[u8]) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, text).unwrap();
    }

    fn scan(root: &Path) -> ProjectScan {
        scan_project(root, &ScanConfig::default(), SpdxDb::builtin(), Execution::Sequential).unwrap()
    }

    #[test]
    fn empty_and_missing() {
        let d = tempfile::tempdir().unwrap();
        let s = scan(d.path());
        assert!(s.instances.is_empty() && s.warnings.is_empty());
        let missing = d.path().join("nope");
        assert!(matches!(
            scan_project(&missing, &ScanConfig::default(), SpdxDb::builtin(), Execution::Sequential),
            Err(ExtractionError::RootNotFound(_))
        ));
    }

    #[test]
    fn declared_roles() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "COPYING", b"You may copy this.");
        write(d.path(), "vendor/x/license.MD", b"You may not sell this.");
        write(d.path(), "LICENSES_OF_OTHERS.doc", b"Other.");
        let s = scan(d.path());
        let got: Vec<_> = s.instances.iter().map(|i| (i.origin.to_string(), i.role)).collect();
        assert_eq!(got, [("COPYING".to_string(), Role::Project), ("vendor/x/license.MD".to_string(), Role::Component)]);
    }

    #[test]
    fn inline_headers() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "src/a.rs", b"// TODO: refactor\nfn main() {}\n");
        write(d.path(), "src/b.py", b"import os\n# Permission is granted to use this file.\n");
        write(d.path(), "src/c.c", b"/* Copyright 2020 Z. Redistribution of this file is prohibited without written consent. */\nint x;\n");
        write(d.path(), "src/d.rs", b"// SPDX-License-Identifier: MIT\n// Copyright 2021 Q\nfn f() {}\n");
        let s = scan(d.path());
        let got: Vec<_> = s.instances.iter().map(|i| (i.origin.to_string(), i.kind, i.scope.is_some())).collect();
        assert_eq!(
            got,
            [
                ("src/c.c".to_string(), LicenseKind::Inline, true),
                ("src/d.rs".to_string(), LicenseKind::Referenced, true)
            ]
        );
        assert_eq!(s.instances[1].spdx_id.as_deref(), Some("MIT"));
    }

    #[test]
    fn dedup_and_warnings() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "LICENSE", b"Same   text.\n");
        write(d.path(), "a/LICENSE", b"Same text.");
        write(d.path(), "b/LICENSE", b"\xff\xfe bad");
        let s = scan(d.path());
        assert_eq!(s.instances.len(), 1);
        assert_eq!(s.instances[0].role, Role::Project);
        assert!(s.warnings.iter().any(|w| w.contains("b/LICENSE") && w.contains("UTF-8")));
        assert!(s.warnings.iter().any(|w| w.contains("a/LICENSE") && w.contains("identical")));
    }

    #[test]
    fn manifests_and_parallel_agree() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "requirements.txt", b"requests==2.28.1\n# comment\n");
        write(d.path(), "sub/Cargo.toml", b"[package]\nlicense = \"MIT\"\n[dependencies]\nserde = \"1.0\"\n");
        write(d.path(), "README.md", b"Licensed under the Apache License, Version 2.0.\n");
        write(d.path(), "LICENSE", b"Permission is granted to use.");
        let s = scan(d.path());
        let names: Vec<_> = s.package_refs.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["requests", "serde"]);
        let ids: Vec<_> = s.instances.iter().map(|i| i.spdx_id.clone()).collect();
        assert_eq!(ids, [None, Some("Apache-2.0".into()), Some("MIT".into())]);
        let p = scan_project(d.path(), &ScanConfig::default(), SpdxDb::builtin(), Execution::Parallel).unwrap();
        assert_eq!(s, p);
        let (refs, _) = collect_package_refs(d.path(), &ScanConfig::default()).unwrap();
        assert_eq!(refs, s.package_refs);
        let (declared, _) = extract_declared(d.path(), &ScanConfig::default());
        assert_eq!(declared.len(), 1);
    }
}
