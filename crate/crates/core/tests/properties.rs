use std::path::{Path, PathBuf};

use lidetect_core::attitude::{AttitudeLexicon, Condition, LicenseRef, LicenseSummary};
use lidetect_core::compat::{default_fill, detect, detect_brute_force, DefaultPolicy, Rule};
use lidetect_core::pipeline::{self, Session};
use lidetect_core::preprocess::{collapse_whitespace, match_official, MatchResult, Sentence};
use lidetect_core::registry::SpdxDb;
use lidetect_core::report::{ReportDocument, REPORT_SCHEMA};
use lidetect_core::term_id::{decode_entities, encode_labels, is_valid_sequence, SequenceModel, TermEntity};
use lidetect_core::{Attitude, Execution, LicenseKind, Origin, Role, TermId, TERM_COUNT};
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("resources/fixtures/projects").join(name)
}

fn attitude() -> impl Strategy<Value = Attitude> {
    prop_oneof![
        Just(Attitude::Can),
        Just(Attitude::Cannot),
        Just(Attitude::Must),
        Just(Attitude::Unknown)
    ]
}

fn summary(role: Role) -> impl Strategy<Value = LicenseSummary> {
    (
        prop::collection::vec(attitude(), TERM_COUNT),
        prop::collection::vec((0u8..23, 0u8..23), 0..4),
    )
        .prop_map(move |(atts, conds)| {
            let mut s = LicenseSummary::unknown(LicenseRef {
                origin: Origin::path("LICENSE"),
                kind: LicenseKind::Declared,
                role,
                spdx_id: None,
            });
            s.attitudes.copy_from_slice(&atts);
            for (k, (a, c)) in conds.into_iter().enumerate() {
                let e = |id, start| TermEntity { term: TermId::new(id).unwrap(), start, end: start + 1, sentence_index: k };
                s.conditions.push(Condition { antecedent: e(a, 0), consequent: e(c, 1) });
            }
            s
        })
}

/// Non-overlapping entities inside a sentence of `len` tokens.
fn entities() -> impl Strategy<Value = (usize, Vec<TermEntity>)> {
    prop::collection::vec((0usize..3, 1usize..4, 0u8..23), 0..8).prop_map(|spans| {
        let mut pos = 0;
        let mut out = Vec::new();
        for (gap, len, id) in spans {
            let start = pos + gap;
            out.push(TermEntity { term: TermId::new(id).unwrap(), start, end: start + len, sentence_index: 0 });
            pos = start + len;
        }
        (pos + 1, out)
    })
}

proptest! {
    #[test]
    fn detect_agrees_with_enumeration(a in summary(Role::Component), b in summary(Role::Component), pl in any::<bool>()) {
        let policy = DefaultPolicy::default();
        let (a, b) = (default_fill(&a, &policy), default_fill(&b, &policy));
        let rule = if pl { Rule::PlVsCl } else { Rule::ClVsCl };
        prop_assert_eq!(detect(&a, &b, rule, &policy).incompatible, detect_brute_force(&a, &b, rule, &policy));
    }

    #[test]
    fn cl_cl_detection_is_symmetric(a in summary(Role::Component), b in summary(Role::Component)) {
        let policy = DefaultPolicy::default();
        let (a, b) = (default_fill(&a, &policy), default_fill(&b, &policy));
        prop_assert_eq!(
            detect(&a, &b, Rule::ClVsCl, &policy).incompatible,
            detect(&b, &a, Rule::ClVsCl, &policy).incompatible
        );
    }

    #[test]
    fn unconditional_license_never_conflicts_with_itself(mut a in summary(Role::Component)) {
        a.conditions.clear();
        let policy = DefaultPolicy::default();
        let a = default_fill(&a, &policy);
        prop_assert!(!detect(&a, &a, Rule::ClVsCl, &policy).incompatible);
    }

    #[test]
    fn filling_defaults_leaves_no_unknown(a in summary(Role::Project)) {
        let filled = default_fill(&a, &DefaultPolicy::default());
        prop_assert!(filled.attitudes().iter().all(|t| t.is_concrete()));
        for t in TermId::all() {
            if a.attitudes[t.index()].is_concrete() {
                prop_assert_eq!(filled.attitude(t), a.attitudes[t.index()]);
            }
        }
    }

    #[test]
    fn bio_round_trip((len, ents) in entities()) {
        let labels = encode_labels(&ents, len).unwrap();
        prop_assert!(is_valid_sequence(&labels));
        let s = Sentence::from_surfaces(&vec!["x"; len], 0);
        prop_assert_eq!(decode_entities(&labels, &s).unwrap(), ents);
    }

    #[test]
    fn collapse_whitespace_is_idempotent(s in "[a-z \\t\\n\\r]{0,40}") {
        let once = collapse_whitespace(&s);
        prop_assert_eq!(collapse_whitespace(&once), once.clone());
        prop_assert!(!once.contains("  "));
    }

    #[test]
    fn reflowed_official_text_still_matches(idx in 0usize..13, width in 20usize..90) {
        let db = SpdxDb::builtin();
        let e = db.entries().nth(idx % db.len()).unwrap();
        // titles and copyright notices are recognized line by line, so they keep their own line
        let mut reflowed = String::new();
        let mut col = 0;
        for (n, line) in e.canonical_text.lines().enumerate() {
            let lower = line.to_lowercase();
            if n == 0 || lower.contains("copyright") || lower.contains("rights reserved") {
                reflowed.push('\n');
                reflowed.push_str(line);
                reflowed.push('\n');
                col = 0;
                continue;
            }
            for w in line.split_whitespace() {
                if col + w.len() > width {
                    reflowed.push('\n');
                    col = 0;
                } else if col > 0 {
                    reflowed.push(' ');
                }
                reflowed.push_str(w);
                col += w.len() + 1;
            }
        }
        prop_assert_eq!(match_official(&reflowed, db), MatchResult::ExactOfficial { spdx_id: e.id.clone() });
    }
}

fn analyze(root: &Path, exec: Execution) -> ReportDocument {
    let session = Session::new(SpdxDb::builtin(), exec);
    pipeline::cmd_analyze(
        root,
        &session,
        &pipeline::default_model(),
        &AttitudeLexicon::default(),
        &DefaultPolicy::default(),
    )
    .unwrap()
}

#[test]
fn sequential_and_parallel_reports_are_identical() {
    for name in ["bsd_dnr", "credit_clash", "mit_only"] {
        let root = fixture(name);
        assert_eq!(analyze(&root, Execution::Sequential).to_json(), analyze(&root, Execution::Parallel).to_json());
    }
}

#[test]
fn reports_match_schema_and_round_trip() {
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::JSONSchema::compile(&schema).unwrap();
    for name in ["bsd_dnr", "credit_clash", "mit_only"] {
        let doc = analyze(&fixture(name), Execution::Parallel);
        let json = doc.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        if let Err(errors) = validator.validate(&value) {
            let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
            panic!("{name}: {msgs:?}");
        }
        assert_eq!(ReportDocument::from_json(&json).unwrap(), doc);
    }
    let scan = pipeline::cmd_scan(&fixture("bsd_dnr"), &Session::new(SpdxDb::builtin(), Execution::Sequential)).unwrap();
    assert!(validator.is_valid(&serde_json::from_str(&scan.to_json()).unwrap()));
}

#[test]
fn bundled_model_round_trips_through_json() {
    let json = pipeline::DEFAULT_MODEL_JSON;
    let model = SequenceModel::from_json(json).unwrap();
    let again = SequenceModel::from_json(&model.to_json()).unwrap();
    assert_eq!(model.to_json(), again.to_json());
}

#[test]
fn mit_only_project_is_compatible() {
    let doc = analyze(&fixture("mit_only"), Execution::Parallel);
    assert!(!doc.verdict, "{:?}", doc.conflicts);
    assert_eq!(doc.summaries[0].spdx_id.as_deref(), Some("MIT"));
}
