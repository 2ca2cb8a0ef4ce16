use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lidetect_core::attitude::AttitudeLexicon;
use lidetect_core::compat::DefaultPolicy;
use lidetect_core::extraction::ScanConfig;
use lidetect_core::pipeline::{self, Session};
use lidetect_core::registry::{PackageIndexSnapshot, PackageResolver, PypiJsonLookup, RemoteLookup, SpdxDb};
use lidetect_core::term_id::{SequenceModel, TrainConfig};
use lidetect_core::{Attitude, Execution, TermId};

/// Finds the licenses of a project and reports incompatibilities between them.
#[derive(Parser)]
#[command(name = "lidetect", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the licenses found in a project.
    Scan {
        root: PathBuf,
        #[command(flatten)]
        project: ProjectArgs,
    },
    /// Check a project for incompatible licenses. Exits 1 when any are found.
    Analyze {
        root: PathBuf,
        #[command(flatten)]
        project: ProjectArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Show how every license of a project treats one term.
    Explain {
        root: PathBuf,
        /// Term name ("Distribute", "give credit") or id (0-22).
        #[arg(long)]
        term: String,
        #[command(flatten)]
        project: ProjectArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Train a term identification model.
    Train {
        /// Labeled corpus, one `token<TAB>label` line per token.
        #[arg(long)]
        corpus: PathBuf,
        /// Unlabeled sentences, one per line, for pseudo-labeling.
        #[arg(long)]
        unlabeled: Option<PathBuf>,
        /// Training settings as JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Score a model on a labeled test set.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        testset: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum AbsentAttitude {
    Can,
    Cannot,
}

impl From<AbsentAttitude> for Attitude {
    fn from(a: AbsentAttitude) -> Attitude {
        match a {
            AbsentAttitude::Can => Attitude::Can,
            AbsentAttitude::Cannot => Attitude::Cannot,
        }
    }
}

#[derive(Args)]
struct ProjectArgs {
    /// Scan settings as JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Directory of SPDX license texts with an index.json.
    #[arg(long, env = "LIDETECT_SPDX_DB")]
    spdx_db: Option<PathBuf>,
    /// Package index snapshot used to resolve dependency licenses.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Never query a remote package index.
    #[arg(long)]
    offline: bool,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct AnalysisArgs {
    /// Term identification model; the bundled model when omitted.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Attitude keyword lists as JSON.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AbsentAttitude::Cannot)]
    default_absent_right: AbsentAttitude,
    #[arg(long, value_enum, default_value_t = AbsentAttitude::Can)]
    default_absent_obligation: AbsentAttitude,
}

struct Loaded {
    db: SpdxDb,
    config: ScanConfig,
    snapshot: Option<PackageIndexSnapshot>,
    remote: Option<PypiJsonLookup>,
    exec: Execution,
}

impl ProjectArgs {
    fn load(&self) -> Result<Loaded> {
        let db = match &self.spdx_db {
            Some(dir) => SpdxDb::load_dir(dir).with_context(|| format!("loading SPDX database {}", dir.display()))?,
            None => SpdxDb::builtin().clone(),
        };
        let config = match &self.config {
            Some(p) => ScanConfig::load(p)?,
            None => ScanConfig::default(),
        };
        let snapshot = match &self.snapshot {
            Some(p) if p.exists() => Some(PackageIndexSnapshot::load(p)?),
            Some(_) | None => None,
        };
        let remote = (!self.offline).then(PypiJsonLookup::default);
        let exec = if self.sequential { Execution::Sequential } else { Execution::Parallel };
        Ok(Loaded {
            db,
            config,
            snapshot,
            remote,
            exec,
        })
    }
}

impl Loaded {
    fn session(&self) -> Session<'_> {
        let resolve = self.snapshot.is_some() || self.remote.is_some();
        Session {
            db: &self.db,
            config: self.config.clone(),
            resolver: resolve.then(|| {
                let remote = self.remote.as_ref().map(|r| r as &dyn RemoteLookup);
                PackageResolver::new(&self.db, self.snapshot.clone().unwrap_or_default(), remote)
            }),
            exec: self.exec,
        }
    }
}

/// Writes newly fetched package metadata back to the snapshot file.
fn save_snapshot(session: Session, path: Option<&Path>) -> Result<()> {
    if let (Some(resolver), Some(path)) = (session.resolver, path) {
        if resolver.remote_calls() > 0 {
            resolver.into_snapshot().save(path)?;
        }
    }
    Ok(())
}

impl AnalysisArgs {
    fn load(&self) -> Result<(SequenceModel, AttitudeLexicon, DefaultPolicy)> {
        let model = match &self.model {
            Some(p) => SequenceModel::load(p).with_context(|| format!("loading model {}", p.display()))?,
            None => pipeline::default_model(),
        };
        let lexicon = match &self.lexicon {
            Some(p) => AttitudeLexicon::load(p)?,
            None => AttitudeLexicon::default(),
        };
        let policy = DefaultPolicy::new(self.default_absent_right.into(), self.default_absent_obligation.into())?;
        Ok((model, lexicon, policy))
    }
}

fn emit(format: Format, json: String, text: String) {
    match format {
        Format::Json => print!("{json}"),
        Format::Text => print!("{text}"),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Scan { root, project } => {
            let loaded = project.load()?;
            let session = loaded.session();
            let doc = pipeline::cmd_scan(&root, &session)?;
            save_snapshot(session, project.snapshot.as_deref())?;
            emit(project.format, doc.to_json(), doc.to_text());
            Ok(0)
        }
        Command::Analyze { root, project, analysis } => {
            let (model, lexicon, policy) = analysis.load()?;
            let loaded = project.load()?;
            let session = loaded.session();
            let doc = pipeline::cmd_analyze(&root, &session, &model, &lexicon, &policy)?;
            save_snapshot(session, project.snapshot.as_deref())?;
            emit(project.format, doc.to_json(), doc.to_text());
            Ok(u8::from(doc.verdict))
        }
        Command::Explain {
            root,
            term,
            project,
            analysis,
        } => {
            let Some(term) = TermId::parse_loose(&term) else {
                bail!("unknown term {term:?}");
            };
            let (model, lexicon, policy) = analysis.load()?;
            let loaded = project.load()?;
            let session = loaded.session();
            let ex = pipeline::cmd_explain(&root, &session, &model, &lexicon, &policy, term)?;
            save_snapshot(session, project.snapshot.as_deref())?;
            let json = serde_json::to_string_pretty(&ex)? + "\n";
            emit(project.format, json, ex.to_text());
            Ok(0)
        }
        Command::Train {
            corpus,
            unlabeled,
            config,
            seed,
            output,
        } => {
            let mut cfg: TrainConfig = match &config {
                Some(p) => serde_json::from_str(&fs::read_to_string(p).with_context(|| p.display().to_string())?)?,
                None => TrainConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let (model, report) = pipeline::cmd_train(&corpus, unlabeled.as_deref(), &cfg)?;
            model.save(&output)?;
            eprintln!(
                "trained on {} labeled and {} pseudo-labeled sentences, {} weights, loss {:.4}",
                report.labeled, report.pseudo_accepted, report.parameters, report.final_loss
            );
            Ok(0)
        }
        Command::Eval { model, testset, format } => {
            let model = SequenceModel::load(&model).with_context(|| format!("loading model {}", model.display()))?;
            let m = pipeline::cmd_eval(&model, &testset)?;
            let text = format!(
                "precision {:.4}\nrecall {:.4}\nF1 {:.4}\n",
                m.precision, m.recall, m.f1
            );
            emit(format, serde_json::to_string_pretty(&m)? + "\n", text);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
