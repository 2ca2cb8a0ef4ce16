use std::path::Path;

use crate::license::PackageRef;

/// Dependencies and declared license expressions read from one manifest.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ManifestContents {
    pub packages: Vec<PackageRef>,
    /// Values of license fields, such as `license = "MIT"`.
    pub license_fields: Vec<String>,
    pub warnings: Vec<String>,
}

/// Parses a manifest, choosing the format from the file name: `.toml` files
/// as dependency tables, `.json` files as npm-style manifests, anything else
/// as a requirements list.
pub fn parse_manifest(text: &str, source_file: &Path) -> ManifestContents {
    let name = source_file.file_name().and_then(|n| n.to_str()).unwrap_or("").to_ascii_lowercase();
    if name.ends_with(".toml") {
        parse_toml(text, source_file)
    } else if name.ends_with(".json") {
        parse_package_json(text, source_file)
    } else {
        parse_requirements(text, source_file)
    }
}

/// Version from a requirement or table value; range operators are dropped.
fn clean_version(v: &str) -> Option<String> {
    let v = v.trim().trim_start_matches(['=', '^', '~', '>', '<', 'v', ' ']).trim();
    (!v.is_empty()).then(|| v.to_string())
}

/// One `name[extras]==version` requirement per line. Only pinned versions
/// (`==`) are kept; other specifiers leave the version unset.
pub fn parse_requirements(text: &str, source_file: &Path) -> ManifestContents {
    let mut out = ManifestContents::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(" #").next().unwrap_or("").split(';').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('-') {
            continue;
        }
        let name_end = line.find(|c: char| !(c.is_alphanumeric() || matches!(c, '-' | '_' | '.'))).unwrap_or(line.len());
        let name = &line[..name_end];
        let mut rest = line[name_end..].trim();
        if rest.starts_with('[') {
            rest = rest.find(']').map_or("", |at| rest[at + 1..].trim());
        }
        let version = rest.strip_prefix("==").and_then(clean_version);
        let valid_rest = rest.is_empty() || rest.starts_with(['=', '<', '>', '~', '!', ',']);
        match PackageRef::new(name, version.as_deref(), source_file) {
            Some(r) if valid_rest => out.packages.push(r),
            _ => out.warnings.push(format!("{}:{}: malformed requirement {raw:?}", source_file.display(), i + 1)),
        }
    }
    out
}

/// `[dependencies]` tables (also `[dev-dependencies]` and Poetry's
/// `[tool.poetry.dependencies]`) mapping names to a version string or a table
/// with a `version` key, plus `license` fields of `[package]`/`[project]`.
pub fn parse_toml(text: &str, source_file: &Path) -> ManifestContents {
    let mut out = ManifestContents::default();
    let doc: toml::Table = match text.parse() {
        Ok(d) => d,
        Err(e) => {
            let line = e.span().map(|s| text[..s.start].lines().count().max(1)).unwrap_or(0);
            out.warnings.push(format!("{}:{line}: malformed manifest: {}", source_file.display(), e.message()));
            return out;
        }
    };
    let mut tables: Vec<&toml::Table> = Vec::new();
    for key in ["dependencies", "dev-dependencies", "build-dependencies"] {
        if let Some(t) = doc.get(key).and_then(|v| v.as_table()) {
            tables.push(t);
        }
    }
    if let Some(t) = doc
        .get("tool")
        .and_then(|v| v.get("poetry"))
        .and_then(|v| v.get("dependencies"))
        .and_then(|v| v.as_table())
    {
        tables.push(t);
    }
    for table in tables {
        for (name, value) in table {
            if name == "python" {
                continue;
            }
            let version = match value {
                toml::Value::String(s) => clean_version(s),
                toml::Value::Table(t) => t.get("version").and_then(|v| v.as_str()).and_then(clean_version),
                _ => None,
            };
            let version = version.filter(|v| crate::license::is_dotted_identifier(v));
            match PackageRef::new(name, version.as_deref(), source_file) {
                Some(r) => out.packages.push(r),
                None => out.warnings.push(format!("{}: malformed dependency {name:?}", source_file.display())),
            }
        }
    }
    // PEP 621 dependency strings
    if let Some(list) = doc.get("project").and_then(|p| p.get("dependencies")).and_then(|d| d.as_array()) {
        let lines: Vec<&str> = list.iter().filter_map(|v| v.as_str()).collect();
        let parsed = parse_requirements(&lines.join("\n"), source_file);
        out.packages.extend(parsed.packages);
        out.warnings.extend(parsed.warnings);
    }
    for section in ["package", "project"] {
        match doc.get(section).and_then(|p| p.get("license")) {
            Some(toml::Value::String(s)) => out.license_fields.push(s.clone()),
            Some(toml::Value::Table(t)) => {
                if let Some(s) = t.get("text").and_then(|v| v.as_str()) {
                    out.license_fields.push(s.to_string());
                }
            }
            _ => {}
        }
    }
    out
}

/// npm-style `package.json`: `dependencies`, `devDependencies` and `license`.
pub fn parse_package_json(text: &str, source_file: &Path) -> ManifestContents {
    let mut out = ManifestContents::default();
    let doc: serde_json::Value = match serde_json::from_str(text) {
        Ok(d) => d,
        Err(e) => {
            out.warnings.push(format!("{}:{}: malformed manifest: {e}", source_file.display(), e.line()));
            return out;
        }
    };
    for key in ["dependencies", "devDependencies"] {
        if let Some(deps) = doc.get(key).and_then(|d| d.as_object()) {
            for (name, v) in deps {
                let version = v.as_str().and_then(clean_version).filter(|v| crate::license::is_dotted_identifier(v));
                match PackageRef::new(name, version.as_deref(), source_file) {
                    Some(r) => out.packages.push(r),
                    None => out.warnings.push(format!("{}: malformed dependency {name:?}", source_file.display())),
                }
            }
        }
    }
    if let Some(l) = doc.get("license").and_then(|l| l.as_str()) {
        out.license_fields.push(l.to_string());
    }
    out
}

/// Top-level module names from Python import statements.
pub fn python_imports(text: &str, source_file: &Path) -> Vec<PackageRef> {
    let mut out = Vec::new();
    for line in text.lines().map(str::trim) {
        let names: Vec<&str> = if let Some(rest) = line.strip_prefix("import ") {
            rest.split(',').map(|p| p.split_whitespace().next().unwrap_or("")).collect()
        } else if let Some(rest) = line.strip_prefix("from ") {
            vec![rest.split_whitespace().next().unwrap_or("")]
        } else {
            continue;
        };
        for n in names {
            let top = n.split('.').next().unwrap_or("");
            if top.is_empty() {
                continue;
            }
            if let Some(r) = PackageRef::new(top, None, source_file) {
                out.push(r);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("requirements.txt")
    }

    #[test]
    fn requirements() {
        let m = parse_requirements("requests==2.28.1\n# comment\n\nflask>=2.0\nnumpy[extra]==1.24\n-r other.txt\n", p());
        let got: Vec<_> = m.packages.iter().map(|r| (r.name.as_str(), r.version.as_deref())).collect();
        assert_eq!(got, [("requests", Some("2.28.1")), ("flask", None), ("numpy", Some("1.24"))]);
        assert!(m.warnings.is_empty());
        let m = parse_requirements("??? what\n", p());
        assert!(m.packages.is_empty());
        assert!(m.warnings[0].contains(":1:"));
    }

    #[test]
    fn toml_tables() {
        let m = parse_toml(
            "[package]\nname = \"x\"\nlicense = \"MIT\"\n[dependencies]\nserde = \"1.0\"\nrand = { version = \"0.8\", features = [] }\nlocal = { path = \"../l\" }\n",
            Path::new("Cargo.toml"),
        );
        let got: Vec<_> = m.packages.iter().map(|r| (r.name.as_str(), r.version.as_deref())).collect();
        assert_eq!(got, [("local", None), ("rand", Some("0.8")), ("serde", Some("1.0"))]);
        assert_eq!(m.license_fields, ["MIT"]);
        assert_eq!(parse_toml("[dependencies\n", Path::new("Cargo.toml")).warnings.len(), 1);
    }

    #[test]
    fn package_json_and_imports() {
        let m = parse_package_json(r#"{"license": "ISC", "dependencies": {"left-pad": "^1.3.0"}}"#, Path::new("package.json"));
        assert_eq!(m.packages[0].version.as_deref(), Some("1.3.0"));
        assert_eq!(m.license_fields, ["ISC"]);
        let refs = python_imports("import os, sys\nfrom yaml.loader import X\nx = 1\n", Path::new("a.py"));
        let names: Vec<_> = refs.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["os", "sys", "yaml"]);
    }
}
