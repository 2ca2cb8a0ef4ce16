use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use serde::Deserialize;

use super::RegistryError;
use crate::license::{LicenseInstance, LicenseKind, Origin, Role};
use crate::preprocess::text::{fold_for_match, normalize_text};

/// Mentions longer than this are not treated as references.
pub const MAX_REFERENCE_LEN: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpdxEntry {
    pub id: String,
    pub name: String,
    pub canonical_text: String,
    pub aliases: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct IndexRecord {
    id: String,
    name: String,
    #[serde(default)]
    aliases: Vec<String>,
    file: String,
}

/// Local snapshot of official license texts keyed by SPDX id.
#[derive(Debug, Clone)]
pub struct SpdxDb {
    entries: BTreeMap<String, SpdxEntry>,
    /// Normalized name/alias/id key to SPDX id.
    keys: HashMap<String, String>,
    /// Normalized URL (no scheme, no trailing slash) to SPDX id.
    urls: HashMap<String, String>,
    /// Comparison form of each canonical text.
    folded: BTreeMap<String, String>,
}

macro_rules! builtin_file {
    ($f:literal) => {
        ($f, include_str!(concat!("../../resources/spdx/", $f)))
    };
}

const BUILTIN_INDEX: &str = include_str!("../../resources/spdx/index.json");
const BUILTIN_FILES: &[(&str, &str)] = &[
    builtin_file!("0BSD.txt"),
    builtin_file!("Apache-2.0.txt"),
    builtin_file!("Beerware.txt"),
    builtin_file!("BSD-2-Clause.txt"),
    builtin_file!("BSD-3-Clause.txt"),
    builtin_file!("BSL-1.0.txt"),
    builtin_file!("ISC.txt"),
    builtin_file!("JSON.txt"),
    builtin_file!("MIT.txt"),
    builtin_file!("MIT-0.txt"),
    builtin_file!("PostgreSQL.txt"),
    builtin_file!("Unlicense.txt"),
    builtin_file!("Zlib.txt"),
];

impl SpdxDb {
    /// The database shipped with the crate.
    pub fn builtin() -> &'static SpdxDb {
        static DB: OnceLock<SpdxDb> = OnceLock::new();
        DB.get_or_init(|| {
            Self::from_index(BUILTIN_INDEX, |file| {
                BUILTIN_FILES
                    .iter()
                    .find(|(f, _)| *f == file)
                    .map(|(_, text)| text.to_string())
                    .ok_or_else(|| RegistryError::MissingFile(file.into()))
            })
            .expect("shipped SPDX snapshot is valid")
        })
    }

    /// Loads a database directory: an `index.json` plus the text files it names.
    pub fn load_dir(dir: &Path) -> Result<Self, RegistryError> {
        let index_path = dir.join("index.json");
        let index = fs::read_to_string(&index_path).map_err(|e| RegistryError::io(&index_path, e))?;
        Self::from_index(&index, |file| {
            let p = dir.join(file);
            fs::read_to_string(&p).map_err(|e| RegistryError::io(&p, e))
        })
    }

    fn from_index(
        index: &str,
        read: impl Fn(&str) -> Result<String, RegistryError>,
    ) -> Result<Self, RegistryError> {
        let records: Vec<IndexRecord> = serde_json::from_str(index)?;
        let entries = records
            .into_iter()
            .map(|r| {
                let text = read(&r.file)?;
                Ok(SpdxEntry {
                    id: r.id,
                    name: r.name,
                    canonical_text: normalize_text(text.trim()),
                    aliases: r.aliases,
                })
            })
            .collect::<Result<Vec<_>, RegistryError>>()?;
        Self::from_entries(entries)
    }

    pub fn from_entries(list: Vec<SpdxEntry>) -> Result<Self, RegistryError> {
        let mut entries = BTreeMap::new();
        let mut keys: HashMap<String, String> = HashMap::new();
        let mut urls: HashMap<String, String> = HashMap::new();
        for e in list {
            if e.canonical_text.trim().is_empty() {
                return Err(RegistryError::EmptyText(e.id));
            }
            if entries.contains_key(&e.id) {
                return Err(RegistryError::DuplicateId(e.id));
            }
            let claim = |map: &mut HashMap<String, String>, key: String| {
                if key.is_empty() {
                    return Ok(());
                }
                match map.get(&key) {
                    Some(owner) if owner != &e.id => Err(RegistryError::AliasCollision {
                        alias: key,
                        first: owner.clone(),
                        second: e.id.clone(),
                    }),
                    _ => {
                        map.insert(key, e.id.clone());
                        Ok(())
                    }
                }
            };
            for name in std::iter::once(&e.id).chain([&e.name]).chain(&e.aliases) {
                if let Some(u) = url_key(name) {
                    claim(&mut urls, u)?;
                } else {
                    claim(&mut keys, name_key(name))?;
                }
            }
            entries.insert(e.id.clone(), e);
        }
        let mut db = SpdxDb {
            entries,
            keys,
            urls,
            folded: BTreeMap::new(),
        };
        let folded = db
            .entries
            .values()
            .map(|e| (e.id.clone(), fold_for_match(&e.canonical_text, |l| db.is_title(l)).text))
            .collect();
        db.folded = folded;
        Ok(db)
    }

    /// Comparison form of the canonical text of `id`.
    pub(crate) fn folded(&self, id: &str) -> Option<&str> {
        self.folded.get(id).map(String::as_str)
    }

    pub fn get(&self, id: &str) -> Option<&SpdxEntry> {
        self.entries.get(id)
    }

    pub fn entries(&self) -> impl Iterator<Item = &SpdxEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Finds the entry a short mention (id, name, alias, or URL) refers to.
    pub fn lookup(&self, mention: &str) -> Option<&SpdxEntry> {
        let m = strip_mention_prefix(mention.trim());
        let m = m.trim_matches(|c: char| c == '"' || c == '\'' || c == '<' || c == '>' || c == '(' || c == ')');
        let m = m.trim_end_matches(['.', ',', ';']);
        if m.is_empty() {
            return None;
        }
        if let Some(e) = self.entries.values().find(|e| e.id.eq_ignore_ascii_case(m)) {
            return Some(e);
        }
        if let Some(u) = url_key(m) {
            if let Some(id) = self.urls.get(&u) {
                return self.entries.get(id);
            }
            return self.lookup_url_pattern(&u);
        }
        self.keys.get(&name_key(m)).and_then(|id| self.entries.get(id))
    }

    fn lookup_url_pattern(&self, url: &str) -> Option<&SpdxEntry> {
        const PATTERNS: &[&str] = &[
            "opensource.org/licenses/",
            "opensource.org/license/",
            "spdx.org/licenses/",
            "choosealicense.com/licenses/",
            "tldrlegal.com/license/",
        ];
        let tail = PATTERNS.iter().find_map(|p| url.strip_prefix(p))?;
        let tail = tail
            .trim_end_matches(".html")
            .trim_end_matches(".txt")
            .trim_end_matches(".json")
            .trim_end_matches(".php");
        if tail.is_empty() || tail.contains('/') {
            return None;
        }
        self.entries
            .values()
            .find(|e| e.id.eq_ignore_ascii_case(tail))
            .or_else(|| self.keys.get(&name_key(tail)).and_then(|id| self.entries.get(id)))
    }

    /// True when `line` is just the title of a known license ("MIT License").
    pub fn is_title(&self, line: &str) -> bool {
        let l = line.trim();
        if l.len() > 80 || url_key(l).is_some() {
            return false;
        }
        self.keys.contains_key(&name_key(l))
    }
}

/// Resolves a short license mention to a referenced instance carrying the
/// canonical text.
pub fn resolve_reference(ref_text: &str, db: &SpdxDb) -> Option<LicenseInstance> {
    resolve_reference_at(ref_text, db, None)
}

/// Like [`resolve_reference`], recording `origin` (where the mention was seen).
pub fn resolve_reference_at(
    ref_text: &str,
    db: &SpdxDb,
    origin: Option<Origin>,
) -> Option<LicenseInstance> {
    if ref_text.chars().count() > MAX_REFERENCE_LEN {
        return None;
    }
    let entry = db.lookup(ref_text)?;
    Some(LicenseInstance {
        kind: LicenseKind::Referenced,
        origin: origin.unwrap_or_else(|| Origin::Registry(format!("spdx:{}", entry.id))),
        text: entry.canonical_text.clone(),
        role: Role::Component,
        scope: None,
        spdx_id: Some(entry.id.clone()),
    })
}

fn strip_mention_prefix(m: &str) -> &str {
    let lower = m.to_ascii_lowercase();
    for p in [
        "spdx-license-identifier:",
        "licensed under the",
        "licensed under",
        "license:",
        "licence:",
        "license =",
        "license=",
    ] {
        if lower.starts_with(p) {
            return m[p.len()..].trim();
        }
    }
    m
}

/// Normalized key for names: lowercase words with filler words removed, so
/// "Apache License, Version 2.0" and "Apache-2.0" agree.
pub(crate) fn name_key(s: &str) -> String {
    let cleaned: String = s
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '.' || c == '+' { c } else { ' ' })
        .collect();
    cleaned
        .split_whitespace()
        .map(|w| w.trim_matches('.'))
        .filter(|w| !w.is_empty() && !matches!(*w, "the" | "license" | "licence" | "version" | "v"))
        .map(|w| {
            w.strip_prefix('v')
                .filter(|rest| rest.chars().next().is_some_and(|c| c.is_ascii_digit()))
                .unwrap_or(w)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn url_key(s: &str) -> Option<String> {
    let lower = s.trim().to_lowercase();
    let rest = lower
        .strip_prefix("https://")
        .or_else(|| lower.strip_prefix("http://"))
        .or_else(|| lower.starts_with("www.").then_some(lower.as_str()))?;
    let rest = rest.strip_prefix("www.").unwrap_or(rest);
    Some(rest.trim_end_matches('/').to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads() {
        let db = SpdxDb::builtin();
        assert!(db.len() >= 12);
        assert!(db.get("MIT").unwrap().canonical_text.contains("Permission is hereby granted"));
    }

    #[test]
    fn reference_examples() {
        let db = SpdxDb::builtin();
        let apache = resolve_reference("Apache License 2.0", db).unwrap();
        assert_eq!(apache.spdx_id.as_deref(), Some("Apache-2.0"));
        assert_eq!(apache.kind, LicenseKind::Referenced);
        assert_eq!(apache.text, db.get("Apache-2.0").unwrap().canonical_text);
        assert!(resolve_reference("My Cool EULA v7", db).is_none());
        let mit = resolve_reference("https://opensource.org/licenses/MIT", db).unwrap();
        assert_eq!(mit.spdx_id.as_deref(), Some("MIT"));
    }

    #[test]
    fn lookup_variants() {
        let db = SpdxDb::builtin();
        for (m, id) in [
            ("mit", "MIT"),
            ("MIT License", "MIT"),
            ("Apache License, Version 2.0", "Apache-2.0"),
            ("apache-2.0", "Apache-2.0"),
            ("SPDX-License-Identifier: BSD-3-Clause", "BSD-3-Clause"),
            ("https://spdx.org/licenses/ISC.html", "ISC"),
            ("https://www.apache.org/licenses/LICENSE-2.0", "Apache-2.0"),
            ("https://choosealicense.com/licenses/unlicense/", "Unlicense"),
            ("License: Zlib", "Zlib"),
        ] {
            assert_eq!(db.lookup(m).map(|e| e.id.as_str()), Some(id), "{m}");
        }
        assert!(db.lookup("https://example.com/licenses/MIT").is_none());
        assert!(resolve_reference(&"x".repeat(201), db).is_none());
    }

    #[test]
    fn alias_collisions_rejected() {
        let mk = |id: &str, alias: &str| SpdxEntry {
            id: id.into(),
            name: format!("{id} name"),
            canonical_text: "text".into(),
            aliases: vec![alias.into()],
        };
        let err = SpdxDb::from_entries(vec![mk("A", "shared"), mk("B", "Shared")]).unwrap_err();
        assert!(matches!(err, RegistryError::AliasCollision { .. }));
        let err = SpdxDb::from_entries(vec![mk("A", "x"), mk("A", "y")]).unwrap_err();
        assert!(matches!(err, RegistryError::DuplicateId(_)));
    }

    #[test]
    fn load_dir_matches_builtin() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("resources/spdx");
        let db = SpdxDb::load_dir(&dir).unwrap();
        let builtin = SpdxDb::builtin();
        assert_eq!(db.len(), builtin.len());
        for e in builtin.entries() {
            assert_eq!(db.get(&e.id), Some(e));
        }
    }
}
