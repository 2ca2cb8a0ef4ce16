//! The machine-readable report and its text rendering.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::attitude::{Evidence, LicenseRef};
use crate::compat::{ConcreteSummary, ConflictRecord, ProjectReport};
use crate::extraction::ProjectScan;
use crate::license::{LicenseInstance, LicenseKind, Origin, Role};
use crate::terms::{Attitude, TermId};

pub const SCHEMA_VERSION: &str = "1.0";

/// JSON schema for [`ReportDocument`].
pub const REPORT_SCHEMA: &str = include_str!("../resources/report.schema.json");

/// One term of one license.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermReport {
    pub id: TermId,
    pub name: String,
    pub attitude: Attitude,
    /// The attitude came from the default policy, not from the text.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub defaulted: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<Evidence>,
}

/// A condition relationship between two terms of one license.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionPair {
    pub antecedent: TermId,
    pub consequent: TermId,
}

/// One license of the project. `terms` is empty in scan-only reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseReport {
    pub origin: Origin,
    pub kind: LicenseKind,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spdx_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<ConditionPair>,
}

impl LicenseReport {
    pub fn from_instance(i: &LicenseInstance) -> Self {
        LicenseReport {
            origin: i.origin.clone(),
            kind: i.kind,
            role: i.role,
            spdx_id: i.spdx_id.clone(),
            scope: i.scope.clone(),
            terms: Vec::new(),
            conditions: Vec::new(),
        }
    }

    pub fn from_summary(s: &ConcreteSummary, scope: Option<PathBuf>) -> Self {
        let inner = s.summary();
        let terms = TermId::all()
            .map(|t| TermReport {
                id: t,
                name: t.name().to_string(),
                attitude: s.attitude(t),
                defaulted: s.is_defaulted(t),
                evidence: inner.evidence[t.index()].iter().filter(|e| !e.defaulted).cloned().collect(),
            })
            .collect();
        let l = s.license();
        LicenseReport {
            origin: l.origin.clone(),
            kind: l.kind,
            role: l.role,
            spdx_id: l.spdx_id.clone(),
            scope,
            terms,
            conditions: inner
                .condition_terms()
                .into_iter()
                .map(|(antecedent, consequent)| ConditionPair { antecedent, consequent })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub licenses: usize,
    pub declared: usize,
    pub referenced: usize,
    pub inline: usize,
    pub project_licenses: usize,
    pub package_refs: usize,
    pub pairs_checked: usize,
    pub conflicts: usize,
}

/// Result of a scan or an analysis. `verdict` is true when the project
/// holds incompatible licenses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub project: PathBuf,
    pub summaries: Vec<LicenseReport>,
    pub conflicts: Vec<ConflictRecord>,
    pub verdict: bool,
    pub stats: Stats,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn base_stats(scan: &ProjectScan) -> Stats {
    let count = |k: LicenseKind| scan.instances.iter().filter(|i| i.kind == k).count();
    Stats {
        licenses: scan.instances.len(),
        declared: count(LicenseKind::Declared),
        referenced: count(LicenseKind::Referenced),
        inline: count(LicenseKind::Inline),
        project_licenses: scan.instances.iter().filter(|i| i.is_project()).count(),
        package_refs: scan.package_refs.len(),
        pairs_checked: 0,
        conflicts: 0,
    }
}

impl ReportDocument {
    /// A report listing the licenses of a scan, without analysis.
    pub fn from_scan(scan: &ProjectScan) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            project: scan.root.clone(),
            summaries: scan.instances.iter().map(LicenseReport::from_instance).collect(),
            conflicts: Vec::new(),
            verdict: false,
            stats: base_stats(scan),
            warnings: scan.warnings.clone(),
        }
    }

    pub fn from_analysis(scan: &ProjectScan, analysis: &ProjectReport, summary_warnings: Vec<String>) -> Self {
        let scope_of = |l: &LicenseRef| {
            scan.instances
                .iter()
                .find(|i| i.origin == l.origin && i.kind == l.kind)
                .and_then(|i| i.scope.clone())
        };
        let mut stats = base_stats(scan);
        stats.pairs_checked = analysis.pairs_checked;
        stats.conflicts = analysis.conflicts.len();
        let mut warnings = scan.warnings.clone();
        warnings.extend(summary_warnings);
        warnings.extend(analysis.warnings.iter().cloned());
        ReportDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            project: scan.root.clone(),
            summaries: analysis
                .summaries
                .iter()
                .map(|s| LicenseReport::from_summary(s, scope_of(s.license())))
                .collect(),
            conflicts: analysis.conflicts.clone(),
            verdict: analysis.incompatible,
            stats,
            warnings,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(raw: &str) -> serde_json::Result<Self> {
        serde_json::from_str(raw)
    }

    /// Human-oriented summary; the layout may change between versions.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "project: {}", self.project.display());
        let _ = writeln!(out, "licenses: {}", self.summaries.len());
        for s in &self.summaries {
            let id = s.spdx_id.as_deref().map(|i| format!(" [{i}]")).unwrap_or_default();
            let kind = format!("{:?}", s.kind).to_lowercase();
            let _ = writeln!(out, "  {} {} {kind}{id}", s.role, s.origin);
            let stated: Vec<String> = s
                .terms
                .iter()
                .filter(|t| !t.defaulted && t.attitude.is_concrete())
                .map(|t| format!("{}={}", t.name, t.attitude))
                .collect();
            if !stated.is_empty() {
                let _ = writeln!(out, "    {}", stated.join(", "));
            }
        }
        if !self.conflicts.is_empty() {
            let _ = writeln!(out, "conflicts: {}", self.conflicts.len());
            for c in &self.conflicts {
                let def = if c.is_defaulted() { " (default)" } else { "" };
                let _ = writeln!(
                    out,
                    "  {}: {} {} {} vs {} {} {}{def}",
                    c.term.name(),
                    c.left.license.role,
                    c.left.license.origin,
                    c.left.attitude,
                    c.right.license.role,
                    c.right.license.origin,
                    c.right.attitude,
                );
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(out, "verdict: {}", if self.verdict { "incompatible" } else { "compatible" });
        out
    }
}

/// How each license of a project treats one term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub term: TermId,
    pub name: String,
    pub licenses: Vec<ExplainedLicense>,
    pub conflicts: Vec<ConflictRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplainedLicense {
    pub origin: Origin,
    pub role: Role,
    pub attitude: Attitude,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub defaulted: bool,
    pub evidence: Vec<Evidence>,
}

impl Explanation {
    pub fn from_report(doc: &ReportDocument, term: TermId) -> Self {
        Explanation {
            term,
            name: term.name().to_string(),
            licenses: doc
                .summaries
                .iter()
                .filter_map(|s| {
                    let t = s.terms.get(term.index())?;
                    Some(ExplainedLicense {
                        origin: s.origin.clone(),
                        role: s.role,
                        attitude: t.attitude,
                        defaulted: t.defaulted,
                        evidence: t.evidence.clone(),
                    })
                })
                .collect(),
            conflicts: doc.conflicts.iter().filter(|c| c.term == term).cloned().collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.term);
        for l in &self.licenses {
            let how = if l.defaulted { " (default policy, not mentioned)" } else { "" };
            let _ = writeln!(out, "  {} {}: {}{how}", l.role, l.origin, l.attitude);
            for e in &l.evidence {
                let _ = writeln!(out, "    sentence {}: {}", e.sentence_index, e.sentence);
                let _ = writeln!(out, "      entity \"{}\" -> {}", e.text, e.attitude);
                for p in &e.pts {
                    let mark = p.mark.map(|m| format!(" marks {m}")).unwrap_or_default();
                    let _ = writeln!(out, "        {} {} {:?}{mark}", p.surface, p.pos.as_str(), p.locality);
                }
            }
        }
        for c in &self.conflicts {
            let _ = writeln!(
                out,
                "  conflict: {} {} vs {} {}",
                c.left.license.origin, c.left.attitude, c.right.license.origin, c.right.attitude
            );
        }
        out
    }
}
