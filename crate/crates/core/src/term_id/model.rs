use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{featurize_sentence, TEMPLATE_VERSION};
use super::labels::{BioLabel, LABEL_COUNT};
use super::TermError;
use crate::preprocess::Sentence;

const L: usize = LABEL_COUNT;

/// Linear-chain CRF over the 47 BIO labels.
///
/// Each token gets a score per label from the weights of its features; label
/// transitions carry a learned weight. Transitions that would produce an
/// invalid BIO sequence are excluded at decode time rather than stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceModel {
    template_version: String,
    /// Feature name to `(label index, weight)` pairs, sorted by label.
    features: HashMap<String, Vec<(u8, f64)>>,
    /// Row-major `prev * 47 + next`.
    transitions: Vec<f64>,
}

/// On-disk layout of a model.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    template_version: String,
    label_alphabet: Vec<String>,
    features: BTreeMap<String, BTreeMap<String, f64>>,
    transitions: Vec<Vec<f64>>,
}

/// Transition allowed between label indices (`prev = None` at start).
pub(crate) fn allowed(prev: Option<usize>, next: usize) -> bool {
    let next = BioLabel::from_index(next).expect("label index");
    next.may_follow(prev.map(|p| BioLabel::from_index(p).expect("label index")))
}

fn allowed_matrix() -> &'static [[bool; L]; L] {
    use std::sync::OnceLock;
    static M: OnceLock<[[bool; L]; L]> = OnceLock::new();
    M.get_or_init(|| {
        let mut m = [[false; L]; L];
        for (p, row) in m.iter_mut().enumerate() {
            for (n, cell) in row.iter_mut().enumerate() {
                *cell = allowed(Some(p), n);
            }
        }
        m
    })
}

fn start_allowed(next: usize) -> bool {
    allowed(None, next)
}

/// Scaled forward-backward tables for one sentence.
///
/// Works in probability space: `u` and `t` are exponentiated unary and
/// transition scores (zero where a transition is forbidden), and every
/// forward row is normalized by `scale[i]`.
pub(crate) struct Lattice {
    pub u: Vec<[f64; L]>,
    pub t: Vec<f64>,
    pub alpha: Vec<[f64; L]>,
    pub beta: Vec<[f64; L]>,
    pub scale: Vec<f64>,
    pub log_z: f64,
}

impl Lattice {
    /// Posterior of label `y` at token `i`.
    pub fn node(&self, i: usize, y: usize) -> f64 {
        self.alpha[i][y] * self.beta[i][y]
    }

    /// Posterior of labels `(a, b)` at tokens `(i - 1, i)`.
    pub fn edge(&self, i: usize, a: usize, b: usize) -> f64 {
        self.alpha[i - 1][a] * self.t[a * L + b] * self.u[i][b] * self.beta[i][b] / self.scale[i]
    }
}

pub(crate) fn forward_backward(unary: &[[f64; L]], trans: &[f64]) -> Lattice {
    let n = unary.len();
    let allow = allowed_matrix();
    let mut t = vec![0.0; L * L];
    for a in 0..L {
        for b in 0..L {
            if allow[a][b] {
                t[a * L + b] = trans[a * L + b].exp();
            }
        }
    }
    let mut log_z = 0.0;
    let u: Vec<[f64; L]> = unary
        .iter()
        .map(|row| {
            let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            log_z += m;
            let mut out = [0.0; L];
            for (o, x) in out.iter_mut().zip(row) {
                *o = (x - m).exp();
            }
            out
        })
        .collect();
    let mut alpha = vec![[0.0; L]; n];
    let mut beta = vec![[0.0; L]; n];
    let mut scale = vec![1.0; n];
    if n == 0 {
        return Lattice { u, t, alpha, beta, scale, log_z: 0.0 };
    }
    for y in 0..L {
        if start_allowed(y) {
            alpha[0][y] = u[0][y];
        }
    }
    for i in 0..n {
        if i > 0 {
            for y in 0..L {
                let mut s = 0.0;
                for a in 0..L {
                    s += alpha[i - 1][a] * t[a * L + y];
                }
                alpha[i][y] = s * u[i][y];
            }
        }
        let c: f64 = alpha[i].iter().sum();
        scale[i] = c;
        for x in alpha[i].iter_mut() {
            *x /= c;
        }
        log_z += c.ln();
    }
    beta[n - 1] = [1.0; L];
    for i in (0..n - 1).rev() {
        let mut next = [0.0; L];
        for b in 0..L {
            next[b] = u[i + 1][b] * beta[i + 1][b];
        }
        for a in 0..L {
            let mut s = 0.0;
            for b in 0..L {
                s += t[a * L + b] * next[b];
            }
            beta[i][a] = s / scale[i + 1];
        }
    }
    Lattice { u, t, alpha, beta, scale, log_z }
}

/// Constrained Viterbi decoding; ties go to the label earlier in the alphabet.
pub(crate) fn viterbi(unary: &[[f64; L]], trans: &[f64]) -> Vec<usize> {
    let n = unary.len();
    if n == 0 {
        return Vec::new();
    }
    let allow = allowed_matrix();
    let mut score = vec![[f64::NEG_INFINITY; L]; n];
    let mut back = vec![[0usize; L]; n];
    for y in 0..L {
        if start_allowed(y) {
            score[0][y] = unary[0][y];
        }
    }
    for i in 1..n {
        for y in 0..L {
            let mut best = f64::NEG_INFINITY;
            let mut arg = usize::MAX;
            for p in 0..L {
                if !allow[p][y] || score[i - 1][p] == f64::NEG_INFINITY {
                    continue;
                }
                let s = score[i - 1][p] + trans[p * L + y];
                if arg == usize::MAX || s > best {
                    best = s;
                    arg = p;
                }
            }
            if arg != usize::MAX {
                score[i][y] = best + unary[i][y];
                back[i][y] = arg;
            }
        }
    }
    let mut last = 0;
    for y in 1..L {
        if score[n - 1][y] > score[n - 1][last] {
            last = y;
        }
    }
    let mut path = vec![last; n];
    for i in (1..n).rev() {
        path[i - 1] = back[i][path[i]];
    }
    path
}

impl SequenceModel {
    /// A model whose weights are all zero; it tags everything O.
    pub fn zero() -> Self {
        SequenceModel {
            template_version: TEMPLATE_VERSION.to_string(),
            features: HashMap::new(),
            transitions: vec![0.0; L * L],
        }
    }

    pub(crate) fn from_parts(features: HashMap<String, Vec<(u8, f64)>>, transitions: Vec<f64>) -> Self {
        assert_eq!(transitions.len(), L * L);
        SequenceModel {
            template_version: TEMPLATE_VERSION.to_string(),
            features,
            transitions,
        }
    }

    pub fn template_version(&self) -> &str {
        &self.template_version
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    /// Number of stored weights, feature and transition.
    pub fn num_weights(&self) -> usize {
        self.features.values().map(Vec::len).sum::<usize>() + L * L
    }

    pub fn feature_weight(&self, feature: &str, label: BioLabel) -> f64 {
        self.features
            .get(feature)
            .and_then(|ws| ws.iter().find(|(l, _)| *l as usize == label.index()))
            .map_or(0.0, |(_, w)| *w)
    }

    pub fn set_feature_weight(&mut self, feature: &str, label: BioLabel, weight: f64) {
        let ws = self.features.entry(feature.to_string()).or_default();
        match ws.iter_mut().find(|(l, _)| *l as usize == label.index()) {
            Some(slot) => slot.1 = weight,
            None => {
                ws.push((label.index() as u8, weight));
                ws.sort_by_key(|(l, _)| *l);
            }
        }
    }

    pub fn transition(&self, prev: BioLabel, next: BioLabel) -> f64 {
        self.transitions[prev.index() * L + next.index()]
    }

    pub fn set_transition(&mut self, prev: BioLabel, next: BioLabel, weight: f64) {
        self.transitions[prev.index() * L + next.index()] = weight;
    }

    /// Largest absolute weight, features and transitions together.
    pub fn max_abs_weight(&self) -> f64 {
        self.features
            .values()
            .flatten()
            .map(|(_, w)| w.abs())
            .chain(self.transitions.iter().map(|w| w.abs()))
            .fold(0.0, f64::max)
    }

    pub(crate) fn unary(&self, sentence: &Sentence) -> Vec<[f64; L]> {
        featurize_sentence(sentence)
            .into_iter()
            .map(|feats| {
                let mut row = [0.0; L];
                for f in &feats {
                    if let Some(ws) = self.features.get(f) {
                        for &(l, w) in ws {
                            row[l as usize] += w;
                        }
                    }
                }
                row
            })
            .collect()
    }

    /// Most likely BIO labels for the sentence.
    pub fn tag(&self, sentence: &Sentence) -> Vec<BioLabel> {
        viterbi(&self.unary(sentence), &self.transitions)
            .into_iter()
            .map(|i| BioLabel::from_index(i).expect("label index"))
            .collect()
    }

    /// Per-token posterior probability of every label.
    pub fn marginals(&self, sentence: &Sentence) -> Vec<[f64; L]> {
        let unary = self.unary(sentence);
        let lat = forward_backward(&unary, &self.transitions);
        (0..unary.len())
            .map(|i| {
                let mut row = [0.0; L];
                for (y, cell) in row.iter_mut().enumerate() {
                    *cell = lat.node(i, y);
                }
                row
            })
            .collect()
    }

    /// Viterbi labels plus the smallest per-token marginal of those labels.
    pub fn tag_with_confidence(&self, sentence: &Sentence) -> (Vec<BioLabel>, f64) {
        let labels = self.tag(sentence);
        let marg = self.marginals(sentence);
        let conf = labels
            .iter()
            .zip(&marg)
            .map(|(l, row)| row[l.index()])
            .fold(1.0, f64::min);
        (labels, conf)
    }

    pub fn to_json(&self) -> String {
        let alphabet: Vec<String> = BioLabel::alphabet().map(|l| l.to_string()).collect();
        let features = self
            .features
            .iter()
            .map(|(f, ws)| {
                let m = ws.iter().map(|&(l, w)| (alphabet[l as usize].clone(), w)).collect();
                (f.clone(), m)
            })
            .collect();
        let file = ModelFile {
            template_version: self.template_version.clone(),
            label_alphabet: alphabet,
            features,
            transitions: self.transitions.chunks(L).map(<[f64]>::to_vec).collect(),
        };
        let mut s = serde_json::to_string(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(raw: &str) -> Result<Self, TermError> {
        let file: ModelFile = serde_json::from_str(raw).map_err(|e| TermError::BadModel(e.to_string()))?;
        let alphabet: Vec<String> = BioLabel::alphabet().map(|l| l.to_string()).collect();
        if file.label_alphabet != alphabet {
            return Err(TermError::BadModel("label alphabet differs from O, B-0..B-22, I-0..I-22".into()));
        }
        if file.template_version != TEMPLATE_VERSION {
            return Err(TermError::BadModel(format!(
                "feature template {} is not supported (expected {TEMPLATE_VERSION})",
                file.template_version
            )));
        }
        if file.transitions.len() != L || file.transitions.iter().any(|r| r.len() != L) {
            return Err(TermError::BadModel("transition matrix must be 47x47".into()));
        }
        let transitions: Vec<f64> = file.transitions.into_iter().flatten().collect();
        let mut features = HashMap::with_capacity(file.features.len());
        for (f, ws) in file.features {
            let mut v = Vec::with_capacity(ws.len());
            for (label, w) in ws {
                let l: BioLabel = label.parse()?;
                v.push((l.index() as u8, w));
            }
            v.sort_by_key(|(l, _)| *l);
            features.insert(f, v);
        }
        let all_finite = transitions.iter().chain(features.values().flatten().map(|(_, w)| w)).all(|w| w.is_finite());
        if !all_finite {
            return Err(TermError::BadModel("non-finite weight".into()));
        }
        Ok(SequenceModel {
            template_version: file.template_version,
            features,
            transitions,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), TermError> {
        fs::write(path, self.to_json()).map_err(|e| TermError::Io(path.to_path_buf(), e))
    }

    pub fn load(path: &Path) -> Result<Self, TermError> {
        let raw = fs::read_to_string(path).map_err(|e| TermError::Io(path.to_path_buf(), e))?;
        Self::from_json(&raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::TermId;

    #[test]
    fn zero_model_tags_all_o() {
        let s = Sentence::from_raw("Redistribution and use are permitted .", 0);
        assert_eq!(SequenceModel::zero().tag(&s), vec![BioLabel::O; s.len()]);
        assert!(SequenceModel::zero().tag(&Sentence::from_raw("", 0)).is_empty());
    }

    #[test]
    fn constraints_beat_weights() {
        let mut m = SequenceModel::zero();
        let i0 = BioLabel::I(TermId::new(0).unwrap());
        m.set_feature_weight("bias", i0, 100.0);
        let labels = m.tag(&Sentence::from_raw("a b c", 0));
        assert!(super::super::labels::is_valid_sequence(&labels));
        assert_eq!(labels[0], BioLabel::B(TermId::new(0).unwrap()));
        assert_eq!(&labels[1..], [i0, i0]);
    }

    #[test]
    fn marginals_sum_to_one() {
        let mut m = SequenceModel::zero();
        m.set_feature_weight("stem[0]=use", BioLabel::B(TermId::new(8).unwrap()), 2.0);
        m.set_transition(BioLabel::O, BioLabel::O, 0.5);
        for row in m.marginals(&Sentence::from_raw("you may use it", 0)) {
            let s: f64 = row.iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut m = SequenceModel::zero();
        m.set_feature_weight("stem[0]=use", BioLabel::B(TermId::new(8).unwrap()), 0.1 + 0.2);
        m.set_transition(BioLabel::O, BioLabel::B(TermId::new(3).unwrap()), -1.0 / 3.0);
        let json = m.to_json();
        let back = SequenceModel::from_json(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), json);
    }
}
