use std::fs;
use std::path::Path;

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};

use super::ExtractionError;

/// What a scan looks for. Loaded from JSON; missing fields take defaults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    /// File names (without extension) of license files, matched
    /// case-insensitively.
    pub declared_names: Vec<String>,
    /// Extensions, without the dot, of source files whose header comments
    /// are checked for inline licenses.
    pub source_extensions: Vec<String>,
    /// Globs, relative to the root, of dependency manifests.
    pub manifest_globs: Vec<String>,
    /// Also collect package names from import statements.
    pub scan_imports: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect();
        ScanConfig {
            declared_names: s(&["LICENSE", "LICENCE", "COPYING", "COPYRIGHT", "NOTICE"]),
            source_extensions: s(&["py", "rs", "c", "h", "js", "go", "java"]),
            manifest_globs: s(&["**/requirements*.txt", "**/Cargo.toml", "**/pyproject.toml", "**/package.json"]),
            scan_imports: false,
        }
    }
}

/// Extensions a declared license file may carry; empty means none.
pub(crate) const DECLARED_EXTENSIONS: &[&str] = &["", "txt", "md", "rst"];

impl ScanConfig {
    pub fn load(path: &Path) -> Result<Self, ExtractionError> {
        let raw = fs::read_to_string(path).map_err(|e| ExtractionError::Io(path.to_path_buf(), e))?;
        serde_json::from_str(&raw).map_err(ExtractionError::Config)
    }

    pub(crate) fn manifest_set(&self) -> Result<GlobSet, ExtractionError> {
        let mut b = GlobSetBuilder::new();
        for g in &self.manifest_globs {
            b.add(Glob::new(g).map_err(|e| ExtractionError::Glob(g.clone(), e.to_string()))?);
        }
        b.build().map_err(|e| ExtractionError::Glob(String::new(), e.to_string()))
    }

    /// Whether a file name names a license file.
    pub fn is_declared_name(&self, file_name: &str) -> bool {
        let lower = file_name.to_lowercase();
        let (stem, ext) = match lower.rsplit_once('.') {
            Some((s, e)) if !s.is_empty() => (s, e),
            _ => (lower.as_str(), ""),
        };
        DECLARED_EXTENSIONS.contains(&ext) && self.declared_names.iter().any(|n| n.to_lowercase() == stem)
    }

    pub fn is_source(&self, file_name: &str) -> bool {
        file_name
            .rsplit_once('.')
            .is_some_and(|(_, e)| self.source_extensions.iter().any(|x| x.trim_start_matches('.').eq_ignore_ascii_case(e)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declared_names() {
        let c = ScanConfig::default();
        for yes in ["LICENSE", "license.MD", "COPYING", "Licence.txt", "NOTICE.rst"] {
            assert!(c.is_declared_name(yes), "{yes}");
        }
        for no in ["LICENSES_OF_OTHERS.doc", "LICENSE.doc", "license-mit", "README.md"] {
            assert!(!c.is_declared_name(no), "{no}");
        }
    }

    #[test]
    fn json_defaults() {
        let c: ScanConfig = serde_json::from_str(r#"{"scan_imports": true}"#).unwrap();
        assert!(c.scan_imports);
        assert_eq!(c.declared_names, ScanConfig::default().declared_names);
        assert!(c.manifest_set().unwrap().is_match("a/b/requirements-dev.txt"));
        assert!(c.manifest_set().unwrap().is_match("requirements.txt"));
    }
}
