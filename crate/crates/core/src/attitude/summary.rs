use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::conditions::{detect_conditions, Condition};
use super::lexicon::AttitudeLexicon;
use super::parse::parse_sentence;
use super::pos::{pos_tag, Tag};
use super::pts::{aggregate, collect_pts, marks, Locality};
use crate::exec::Execution;
use crate::license::{LicenseInstance, LicenseKind, Origin, Role};
use crate::preprocess::{match_official, split_sentences_reporting, MatchResult, Sentence};
use crate::registry::SpdxDb;
use crate::term_id::{decode_entities_reporting, SequenceModel, TermEntity};
use crate::terms::{Attitude, TermId, TERM_COUNT};

/// Identifies the license a summary describes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LicenseRef {
    pub origin: Origin,
    pub kind: LicenseKind,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spdx_id: Option<String>,
}

impl From<&LicenseInstance> for LicenseRef {
    fn from(l: &LicenseInstance) -> Self {
        LicenseRef {
            origin: l.origin.clone(),
            kind: l.kind,
            role: l.role,
            spdx_id: l.spdx_id.clone(),
        }
    }
}

/// One powerful token as used for an attitude decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenEvidence {
    pub token_index: usize,
    pub surface: String,
    pub pos: Tag,
    pub locality: Locality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mark: Option<Attitude>,
}

/// Why a term received an attitude: the entity, its sentence and its
/// powerful tokens. Records added by a default policy have no span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub sentence_index: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
    /// The whole sentence, tokens joined by spaces.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub sentence: String,
    pub attitude: Attitude,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pts: Vec<TokenEvidence>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub defaulted: bool,
}

impl Evidence {
    pub fn defaulted(attitude: Attitude) -> Self {
        Evidence {
            sentence_index: 0,
            start: 0,
            end: 0,
            text: String::new(),
            sentence: String::new(),
            attitude,
            pts: Vec::new(),
            defaulted: true,
        }
    }
}

/// The attitude of one license toward each of the 23 terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseSummary {
    pub license: LicenseRef,
    pub attitudes: Vec<Attitude>,
    pub conditions: Vec<Condition>,
    /// Evidence records per term, indexed by term id.
    pub evidence: Vec<Vec<Evidence>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl LicenseSummary {
    /// A summary with every term UNKNOWN.
    pub fn unknown(license: LicenseRef) -> Self {
        LicenseSummary {
            license,
            attitudes: vec![Attitude::Unknown; TERM_COUNT],
            conditions: Vec::new(),
            evidence: vec![Vec::new(); TERM_COUNT],
            warnings: Vec::new(),
        }
    }

    pub fn attitude(&self, term: TermId) -> Attitude {
        self.attitudes[term.index()]
    }

    /// Pairs of (antecedent term, consequent term), deduplicated, in order.
    pub fn condition_terms(&self) -> Vec<(TermId, TermId)> {
        let mut out: Vec<_> = self
            .conditions
            .iter()
            .map(|c| (c.antecedent.term, c.consequent.term))
            .filter(|(a, c)| a != c)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Adds an evidence record and lets the more restrictive attitude win.
    pub fn record(&mut self, term: TermId, evidence: Evidence) {
        let slot = &mut self.attitudes[term.index()];
        if !slot.is_concrete() || evidence.attitude.restrictiveness() > slot.restrictiveness() {
            *slot = evidence.attitude;
        }
        self.evidence[term.index()].push(evidence);
    }
}

/// Attitude analysis of one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceAnalysis {
    pub entities: Vec<TermEntity>,
    pub evidence: Vec<(TermId, Evidence)>,
    pub conditions: Vec<Condition>,
    pub warnings: Vec<String>,
}

/// Runs term identification and attitude inference over one sentence.
pub fn analyze_sentence(sentence: &Sentence, model: &SequenceModel, lexicon: &AttitudeLexicon) -> SentenceAnalysis {
    let labels = model.tag(sentence);
    let (entities, mut warnings) = match decode_entities_reporting(&labels, sentence) {
        Ok(x) => x,
        Err(e) => (Vec::new(), vec![format!("sentence {}: {e}", sentence.index)]),
    };
    let mut evidence = Vec::new();
    if entities.is_empty() {
        return SentenceAnalysis {
            entities,
            evidence,
            conditions: Vec::new(),
            warnings,
        };
    }
    let tags = pos_tag(sentence);
    let tree = match parse_sentence(sentence, &tags) {
        Ok(t) => t,
        Err(e) => {
            warnings.push(format!("sentence {}: {e}", sentence.index));
            return SentenceAnalysis {
                entities,
                evidence,
                conditions: Vec::new(),
                warnings,
            };
        }
    };
    let sentence_text = sentence.tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
    for e in &entities {
        let pts = match collect_pts(&tree, e, &tags) {
            Ok(p) => p,
            Err(err) => {
                warnings.push(format!("sentence {}: {err}", sentence.index));
                continue;
            }
        };
        let m = marks(&pts, &sentence.tokens, lexicon);
        let attitude = aggregate(&m);
        let mark_of = |i: usize| m.iter().find(|(ix, _)| ix.contains(&i)).map(|(_, a)| *a);
        let text = sentence.tokens[e.start..e.end]
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        let pts = pts
            .iter()
            .map(|p| TokenEvidence {
                token_index: p.token_index,
                surface: sentence.tokens[p.token_index].surface.clone(),
                pos: p.pos,
                locality: p.locality,
                mark: mark_of(p.token_index),
            })
            .collect();
        evidence.push((
            e.term,
            Evidence {
                sentence_index: sentence.index,
                start: e.start,
                end: e.end,
                text,
                sentence: sentence_text.clone(),
                attitude,
                pts,
                defaulted: false,
            },
        ));
    }
    let conditions = detect_conditions(&tree, sentence, &entities);
    SentenceAnalysis {
        entities,
        evidence,
        conditions,
        warnings,
    }
}

/// Summarizes a license text sentence by sentence. Per term, the most
/// restrictive attitude found wins (CANNOT over MUST over CAN); terms never
/// mentioned stay UNKNOWN.
pub fn summarize_text(license: LicenseRef, text: &str, model: &SequenceModel, lexicon: &AttitudeLexicon) -> LicenseSummary {
    let (sentences, warnings) = split_sentences_reporting(text);
    let mut summary = LicenseSummary::unknown(license);
    summary.warnings = warnings;
    for s in &sentences {
        let a = analyze_sentence(s, model, lexicon);
        for (term, ev) in a.evidence {
            summary.record(term, ev);
        }
        summary.conditions.extend(a.conditions);
        summary.warnings.extend(a.warnings);
    }
    summary
}

pub fn summarize(instance: &LicenseInstance, model: &SequenceModel, lexicon: &AttitudeLexicon) -> LicenseSummary {
    summarize_text(LicenseRef::from(instance), &instance.text, model, lexicon)
}

impl LicenseSummary {
    /// Adds the attitudes, conditions and warnings of `extra` to `self`.
    fn absorb(&mut self, extra: LicenseSummary) {
        for (t, evs) in TermId::all().zip(extra.evidence) {
            for ev in evs {
                self.record(t, ev);
            }
        }
        self.conditions.extend(extra.conditions);
        self.warnings.extend(extra.warnings);
    }
}

/// Summary of a license text after official-text filtering. An exact
/// official text takes the known summary of that license; a text that
/// contains one gets the known summary plus the analysis of the rest.
fn summarize_filtered(
    license: LicenseRef,
    text: &str,
    db: &SpdxDb,
    official: &HashMap<String, LicenseSummary>,
    model: &SequenceModel,
    lexicon: &AttitudeLexicon,
) -> LicenseSummary {
    let m = match_official(text, db);
    let known = m.spdx_id().and_then(|id| official.get(id));
    let Some(known) = known else {
        return summarize_text(license, text, model, lexicon);
    };
    let mut out = LicenseSummary {
        license: LicenseRef {
            spdx_id: license.spdx_id.clone().or_else(|| m.spdx_id().map(str::to_string)),
            ..license.clone()
        },
        ..known.clone()
    };
    if let MatchResult::ContainsOfficial { residual, .. } = &m {
        if !residual.trim().is_empty() {
            out.absorb(summarize_text(license, residual, model, lexicon));
        }
    }
    out
}

/// Summaries of many licenses, in input order. Official license texts are
/// analyzed once per identifier from their canonical text; identical other
/// texts are analyzed once.
pub fn summarize_all(
    instances: &[LicenseInstance],
    db: &SpdxDb,
    model: &SequenceModel,
    lexicon: &AttitudeLexicon,
    exec: Execution,
) -> Vec<LicenseSummary> {
    let mut first: HashMap<&str, usize> = HashMap::new();
    let mut unique: Vec<usize> = Vec::new();
    for (i, l) in instances.iter().enumerate() {
        first.entry(l.text.as_str()).or_insert_with(|| {
            unique.push(i);
            i
        });
    }
    let matched: Vec<Option<String>> = exec.map(&unique, |&i| match_official(&instances[i].text, db).spdx_id().map(str::to_string));
    let mut ids: Vec<&str> = matched.iter().flatten().map(String::as_str).collect();
    ids.sort_unstable();
    ids.dedup();
    let official: HashMap<String, LicenseSummary> = ids
        .iter()
        .zip(exec.map(&ids, |id| {
            let e = db.get(id).expect("matched id is in the database");
            let license = LicenseRef {
                origin: Origin::Registry(format!("spdx:{id}")),
                kind: LicenseKind::Referenced,
                role: Role::Component,
                spdx_id: Some(id.to_string()),
            };
            summarize_text(license, &e.canonical_text, model, lexicon)
        }))
        .map(|(id, s)| (id.to_string(), s))
        .collect();
    let computed = exec.map(&unique, |&i| {
        summarize_filtered(LicenseRef::from(&instances[i]), &instances[i].text, db, &official, model, lexicon)
    });
    let by_index: HashMap<usize, &LicenseSummary> = unique.iter().copied().zip(computed.iter()).collect();
    instances
        .iter()
        .map(|l| {
            let src = by_index[&first[l.text.as_str()]];
            let mut license = LicenseRef::from(l);
            license.spdx_id = license.spdx_id.or_else(|| src.license.spdx_id.clone());
            LicenseSummary { license, ..src.clone() }
        })
        .collect()
}
