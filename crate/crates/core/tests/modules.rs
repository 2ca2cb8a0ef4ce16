use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use lidetect_core::attitude::AttitudeLexicon;
use lidetect_core::compat::DefaultPolicy;
use lidetect_core::extraction::{scan_project, ScanConfig};
use lidetect_core::pipeline::{self, Session};
use lidetect_core::preprocess::{normalize_tokens, split_sentences};
use lidetect_core::registry::{
    resolve_reference, PackageIndexSnapshot, PackageResolver, RemoteError, RemoteLookup, SnapshotEntry, SpdxDb,
};
use lidetect_core::{Execution, LicenseKind, PackageRef, Role};

fn write(root: &Path, rel: &str, text: &str) {
    let p = root.join(rel);
    fs::create_dir_all(p.parent().unwrap()).unwrap();
    fs::write(p, text).unwrap();
}

fn scan(root: &Path) -> lidetect_core::extraction::ProjectScan {
    scan_project(root, &ScanConfig::default(), SpdxDb::builtin(), Execution::Parallel).unwrap()
}

#[test]
fn scan_finds_all_three_forms() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    write(root, "COPYING", "You may redistribute this program.");
    write(root, "vendor/x/license.MD", "Do not sell this library.");
    write(root, "LICENSES_OF_OTHERS.doc", "ignored");
    write(root, "src/main.py", "# SPDX-License-Identifier: MIT\nprint('hi')\n");
    write(root, "src/util.rs", "// Copyright 2020 Someone\n// Permission is granted to use this file for any purpose.\nfn f() {}\n");
    write(root, "src/late.py", "x = 1\n# Licensed under the Apache License 2.0\n");
    write(root, "requirements.txt", "requests==2.28.1\n# comment\n");

    let s = scan(root);
    let kinds: Vec<(String, LicenseKind, Role)> = s.instances.iter().map(|i| (i.origin.to_string(), i.kind, i.role)).collect();
    assert!(kinds.contains(&("COPYING".into(), LicenseKind::Declared, Role::Project)));
    assert!(kinds.contains(&("vendor/x/license.MD".into(), LicenseKind::Declared, Role::Component)));
    assert!(kinds.iter().any(|(o, k, _)| o == "src/main.py" && *k == LicenseKind::Referenced));
    assert!(kinds.iter().any(|(o, k, _)| o == "src/util.rs" && *k == LicenseKind::Inline));
    assert!(!kinds.iter().any(|(o, ..)| o.contains("LICENSES_OF_OTHERS") || o == "src/late.py"));
    assert!(s.instances.iter().filter(|i| i.kind == LicenseKind::Inline).all(|i| i.scope.is_some()));
    assert_eq!(s.package_refs.len(), 1);
    assert_eq!(s.package_refs[0].name, "requests");
    assert_eq!(s.package_refs[0].version.as_deref(), Some("2.28.1"));
    assert_eq!(s, scan(root));
}

#[test]
fn empty_directory_scans_clean() {
    let dir = tempfile::tempdir().unwrap();
    let s = scan(dir.path());
    assert!(s.instances.is_empty() && s.warnings.is_empty());
}

#[test]
fn missing_root_is_an_error() {
    let r = scan_project(Path::new("/no/such/root"), &ScanConfig::default(), SpdxDb::builtin(), Execution::Sequential);
    assert!(r.is_err());
}

#[test]
fn references_resolve_by_name_and_url() {
    let db = SpdxDb::builtin();
    let apache = resolve_reference("Apache License 2.0", db).unwrap();
    assert_eq!(apache.spdx_id.as_deref(), Some("Apache-2.0"));
    assert_eq!(apache.text, db.get("Apache-2.0").unwrap().canonical_text);
    assert_eq!(resolve_reference("https://opensource.org/licenses/MIT", db).unwrap().spdx_id.as_deref(), Some("MIT"));
    assert!(resolve_reference("My Cool EULA v7", db).is_none());
}

struct CountingRemote(AtomicUsize);

impl RemoteLookup for CountingRemote {
    fn request(&self, name: &str, _version: Option<&str>) -> Result<Option<String>, RemoteError> {
        self.0.fetch_add(1, Ordering::SeqCst);
        match name {
            "leftpad" => Ok(Some("MIT".into())),
            "offline" => Err(RemoteError("connection refused".into())),
            _ => Ok(None),
        }
    }
}

fn pkg(name: &str, version: Option<&str>) -> PackageRef {
    PackageRef {
        name: name.into(),
        version: version.map(str::to_string),
        source_file: "requirements.txt".into(),
    }
}

#[test]
fn resolver_prefers_snapshot_and_asks_remote_once() {
    let db = SpdxDb::builtin();
    let mut snapshot = PackageIndexSnapshot::new();
    let when = "2024-05-01T00:00:00Z".parse().unwrap();
    snapshot.insert("requests", None, SnapshotEntry { license_expr: Some("Apache-2.0".into()), retrieved_at: when });
    let remote = CountingRemote(AtomicUsize::new(0));
    let resolver = PackageResolver::new(db, snapshot, Some(&remote));
    let mut warnings = Vec::new();

    let r = resolver.resolve(&pkg("Requests", Some("2.28.1")), &mut warnings).unwrap();
    assert_eq!(r.spdx_id.as_deref(), Some("Apache-2.0"));
    assert_eq!(remote.0.load(Ordering::SeqCst), 0);

    for _ in 0..3 {
        assert_eq!(resolver.resolve(&pkg("leftpad", Some("1.0")), &mut warnings).unwrap().spdx_id.as_deref(), Some("MIT"));
        assert!(resolver.resolve(&pkg("offline", None), &mut warnings).is_none());
    }
    assert_eq!(remote.0.load(Ordering::SeqCst), 2);
    assert!(warnings.iter().any(|w| w.contains("unavailable")));

    let snap = resolver.into_snapshot();
    assert!(snap.get("leftpad", Some("1.0")).is_some());
    assert_eq!(PackageIndexSnapshot::from_json(&snap.to_json()).unwrap(), snap);
}

#[test]
fn resolved_packages_join_the_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    write(root, "LICENSE", &SpdxDb::builtin().get("MIT").unwrap().canonical_text);
    write(root, "requirements.txt", "leftpad==1.0\n");
    let remote = CountingRemote(AtomicUsize::new(0));
    let db = SpdxDb::builtin();
    let session = Session {
        db,
        config: ScanConfig::default(),
        resolver: Some(PackageResolver::new(db, PackageIndexSnapshot::new(), Some(&remote))),
        exec: Execution::Sequential,
    };
    let doc = pipeline::cmd_analyze(
        root,
        &session,
        &pipeline::default_model(),
        &AttitudeLexicon::default(),
        &DefaultPolicy::default(),
    )
    .unwrap();
    assert_eq!(doc.stats.referenced, 1);
    assert!(!doc.verdict, "{:?}", doc.conflicts);
}

#[test]
fn sentences_and_tokens() {
    assert_eq!(split_sentences("A. B.").len(), 2);
    assert_eq!(split_sentences("See Sec. 4 for terms.").len(), 1);
    assert!(split_sentences("  \n ").is_empty());
    let stems: Vec<String> = normalize_tokens("Redistribution and use").into_iter().map(|t| t.stem).collect();
    assert_eq!(stems, ["redistribut", "and", "use"]);
    let parts: Vec<String> = normalize_tokens("MUST-HAVE").into_iter().map(|t| t.stem).collect();
    assert_eq!(parts, ["must", "-", "have"]);
}
