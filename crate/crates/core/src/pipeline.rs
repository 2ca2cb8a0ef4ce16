//! End-to-end operations behind the command-line tool: scan, analyze,
//! explain, train and evaluate.

use std::fs;
use std::path::{Path, PathBuf};

use crate::attitude::{summarize_all, AttitudeLexicon};
use crate::compat::{analyze_project, DefaultPolicy};
use crate::exec::Execution;
use crate::extraction::{scan_project, ExtractionError, ProjectScan, ScanConfig};
use crate::registry::{PackageResolver, SpdxDb};
use crate::report::{Explanation, ReportDocument};
use crate::term_id::{
    evaluate, load_tsv, read_unlabeled, train_reporting, Metrics, SequenceModel, TermError, TrainConfig, TrainReport,
    TrainingCorpus,
};
use crate::terms::TermId;

/// The model shipped with the library, trained on the bundled corpus.
pub const DEFAULT_MODEL_JSON: &str = include_str!("../resources/model.json");

pub fn default_model() -> SequenceModel {
    SequenceModel::from_json(DEFAULT_MODEL_JSON).expect("bundled model is valid")
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
}

/// Shared inputs of the project-level commands.
pub struct Session<'a> {
    pub db: &'a SpdxDb,
    pub config: ScanConfig,
    /// Resolves package references to licenses; `None` skips them.
    pub resolver: Option<PackageResolver<'a>>,
    pub exec: Execution,
}

impl<'a> Session<'a> {
    /// Default scan settings, no package resolution.
    pub fn new(db: &'a SpdxDb, exec: Execution) -> Self {
        Session {
            db,
            config: ScanConfig::default(),
            resolver: None,
            exec,
        }
    }
}

/// Extraction plus registry resolution of the packages found.
pub fn collect(root: &Path, session: &Session) -> Result<ProjectScan, PipelineError> {
    let mut scan = scan_project(root, &session.config, session.db, session.exec)?;
    if let Some(resolver) = &session.resolver {
        let resolved = session.exec.map(&scan.package_refs, |r| {
            let mut w = Vec::new();
            (resolver.resolve(r, &mut w), w)
        });
        let mut extra = Vec::new();
        for (inst, w) in resolved {
            extra.extend(inst);
            scan.warnings.extend(w);
        }
        scan.add_instances(extra);
    }
    Ok(scan)
}

pub fn cmd_scan(root: &Path, session: &Session) -> Result<ReportDocument, PipelineError> {
    Ok(ReportDocument::from_scan(&collect(root, session)?))
}

pub fn cmd_analyze(
    root: &Path,
    session: &Session,
    model: &SequenceModel,
    lexicon: &AttitudeLexicon,
    policy: &DefaultPolicy,
) -> Result<ReportDocument, PipelineError> {
    let scan = collect(root, session)?;
    let summaries = summarize_all(&scan.instances, session.db, model, lexicon, session.exec);
    let summary_warnings = summaries
        .iter()
        .flat_map(|s| s.warnings.iter().map(move |w| format!("{}: {w}", s.license.origin)))
        .collect();
    let analysis = analyze_project(root, &summaries, policy, session.exec);
    Ok(ReportDocument::from_analysis(&scan, &analysis, summary_warnings))
}

pub fn cmd_explain(
    root: &Path,
    session: &Session,
    model: &SequenceModel,
    lexicon: &AttitudeLexicon,
    policy: &DefaultPolicy,
    term: TermId,
) -> Result<Explanation, PipelineError> {
    let doc = cmd_analyze(root, session, model, lexicon, policy)?;
    Ok(Explanation::from_report(&doc, term))
}

/// Trains on a labeled TSV corpus plus an optional file of unlabeled
/// sentences (one per line).
pub fn cmd_train(
    labeled: &Path,
    unlabeled: Option<&Path>,
    config: &TrainConfig,
) -> Result<(SequenceModel, TrainReport), PipelineError> {
    let labeled = load_tsv(labeled)?;
    let unlabeled = match unlabeled {
        Some(p) => read_unlabeled(&fs::read_to_string(p).map_err(|e| PipelineError::Io(p.to_path_buf(), e))?),
        None => Vec::new(),
    };
    Ok(train_reporting(&TrainingCorpus { labeled, unlabeled }, config)?)
}

pub fn cmd_eval(model: &SequenceModel, testset: &Path) -> Result<Metrics, PipelineError> {
    Ok(evaluate(model, &load_tsv(testset)?)?)
}
