//! License instances found in a project.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// The form in which a license appears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LicenseKind {
    /// A license file such as `LICENSE` or `COPYING`.
    Declared,
    /// A license named by identifier, URL, or via an imported package.
    Referenced,
    /// License text in a source file's leading comment block.
    Inline,
}

/// Project license or component license.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "PL")]
    Project,
    #[serde(rename = "CL")]
    Component,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Project => "PL",
            Role::Component => "CL",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a license instance came from: a path relative to the scanned root, or
/// a registry identifier such as `pypi:requests@2.28.1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum Origin {
    Path(PathBuf),
    Registry(String),
}

const REGISTRY_PREFIXES: &[&str] = &["spdx:", "pypi:", "crates:", "pkg:", "registry:"];

impl Origin {
    pub fn path(p: impl AsRef<Path>) -> Self {
        Origin::Path(p.as_ref().to_path_buf())
    }

    pub fn as_path(&self) -> Option<&Path> {
        match self {
            Origin::Path(p) => Some(p),
            Origin::Registry(_) => None,
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Path(p) => {
                let s = p.to_string_lossy().replace('\\', "/");
                f.write_str(&s)
            }
            Origin::Registry(id) => f.write_str(id),
        }
    }
}

impl From<Origin> for String {
    fn from(o: Origin) -> String {
        o.to_string()
    }
}

impl From<String> for Origin {
    fn from(s: String) -> Origin {
        if REGISTRY_PREFIXES.iter().any(|p| s.starts_with(p)) {
            Origin::Registry(s)
        } else {
            Origin::Path(PathBuf::from(s))
        }
    }
}

/// One license text found in a project.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseInstance {
    pub kind: LicenseKind,
    pub origin: Origin,
    /// Normalized UTF-8 text, never empty.
    pub text: String,
    pub role: Role,
    /// For inline licenses, the file whose header carries the text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<PathBuf>,
    /// SPDX id when the instance was resolved from a registry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spdx_id: Option<String>,
}

impl LicenseInstance {
    pub fn is_project(&self) -> bool {
        self.role == Role::Project
    }

    /// Stable ordering key: origin first, then kind.
    pub fn sort_key(&self) -> (String, LicenseKind) {
        (self.origin.to_string(), self.kind)
    }
}

/// A dependency named in a manifest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PackageRef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    /// Manifest the reference was read from, relative to the scanned root.
    pub source_file: PathBuf,
}

impl PackageRef {
    /// Builds a reference, rejecting empty names and versions that are not
    /// dotted identifiers such as `1.0` or `2.28.1rc1`.
    pub fn new(name: &str, version: Option<&str>, source_file: impl Into<PathBuf>) -> Option<Self> {
        let name = name.trim();
        if name.is_empty() {
            return None;
        }
        let version = match version.map(str::trim) {
            Some(v) if !is_dotted_identifier(v) => return None,
            v => v.map(str::to_string),
        };
        Some(PackageRef {
            name: name.to_string(),
            version,
            source_file: source_file.into(),
        })
    }
}

pub(crate) fn is_dotted_identifier(v: &str) -> bool {
    !v.is_empty()
        && v.split('.').all(|part| {
            !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '+' || c == '_')
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_string_round_trip() {
        for s in ["vendor/x/LICENSE", "pypi:requests@2.28.1", "spdx:MIT"] {
            let o = Origin::from(s.to_string());
            assert_eq!(o.to_string(), s);
        }
        assert!(matches!(Origin::from("pypi:x".to_string()), Origin::Registry(_)));
        assert!(matches!(Origin::from("LICENSE".to_string()), Origin::Path(_)));
    }

    #[test]
    fn package_ref_validation() {
        assert!(PackageRef::new("requests", Some("2.28.1"), "r.txt").is_some());
        assert!(PackageRef::new("", None, "r.txt").is_none());
        assert!(PackageRef::new("x", Some("1..2"), "r.txt").is_none());
        assert!(PackageRef::new("x", Some(">=1.0"), "r.txt").is_none());
    }
}
