use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::labels::{LabeledSentence, TermEntity};
use super::model::SequenceModel;
use super::TermError;

/// Entity-level scores. An entity counts as correct only if both its span and
/// its term match a gold entity exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl Metrics {
    /// Scores from counts. Undefined ratios are reported as 0.
    pub fn from_counts(true_positives: usize, predicted: usize, gold: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(true_positives, predicted);
        let recall = ratio(true_positives, gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Metrics {
            precision,
            recall,
            f1,
            true_positives,
            predicted,
            gold,
        }
    }
}

/// Compares predicted and gold entities sentence by sentence.
pub fn score(predicted: &[Vec<TermEntity>], gold: &[Vec<TermEntity>]) -> Metrics {
    let mut tp = 0;
    let mut p = 0;
    let mut g = 0;
    for (pr, go) in predicted.iter().zip(gold) {
        let gold_set: HashSet<_> = go.iter().map(|e| (e.term, e.start, e.end)).collect();
        tp += pr.iter().filter(|e| gold_set.contains(&(e.term, e.start, e.end))).count();
        p += pr.len();
        g += go.len();
    }
    Metrics::from_counts(tp, p, g)
}

pub fn evaluate(model: &SequenceModel, testset: &[LabeledSentence]) -> Result<Metrics, TermError> {
    if testset.is_empty() {
        return Err(TermError::EmptyTestset);
    }
    let mut predicted = Vec::with_capacity(testset.len());
    let mut gold = Vec::with_capacity(testset.len());
    for s in testset {
        let labels = model.tag(&s.sentence);
        predicted.push(super::labels::decode_entities(&labels, &s.sentence)?);
        gold.push(s.entities());
    }
    Ok(score(&predicted, &gold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::TermId;

    fn ent(t: u8, a: usize, b: usize) -> TermEntity {
        TermEntity { term: TermId::new(t).unwrap(), start: a, end: b, sentence_index: 0 }
    }

    #[test]
    fn formula_examples() {
        let gold = vec![vec![ent(0, 0, 2), ent(1, 3, 4)]];
        let m = score(&gold, &gold);
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        let m = score(&[vec![]], &gold);
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        let m = score(&[vec![ent(0, 0, 2), ent(2, 3, 4)]], &gold);
        assert_eq!((m.precision, m.recall, m.f1), (0.5, 0.5, 0.5));
    }

    #[test]
    fn empty_testset_is_an_error() {
        assert!(matches!(evaluate(&SequenceModel::zero(), &[]), Err(TermError::EmptyTestset)));
    }
}
