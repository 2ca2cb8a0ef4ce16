use std::collections::HashMap;
use std::sync::Mutex;

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::corpus::TrainingCorpus;
use super::features::featurize_sentence;
use super::labels::{LabeledSentence, LABEL_COUNT};
use super::model::{forward_backward, SequenceModel};
use super::TermError;
use crate::preprocess::Sentence;

const L: usize = LABEL_COUNT;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// L2 regularization strength.
    pub l2: f64,
    pub max_iterations: u64,
    pub seed: u64,
    /// Run the pseudo-labeling phase over the unlabeled sentences.
    pub semi_supervised: bool,
    /// Minimum per-token marginal for a pseudo-labeled sentence to be kept.
    pub pseudo_threshold: f64,
    /// L-BFGS history size.
    pub memory: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2: 0.1,
            max_iterations: 200,
            seed: 7,
            semi_supervised: true,
            pseudo_threshold: 0.9,
            memory: 7,
        }
    }
}

/// What a training run did, for logs and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub labeled: usize,
    pub pseudo_candidates: usize,
    pub pseudo_accepted: usize,
    /// Objective at the solution, divided by the number of sentences.
    pub final_loss: f64,
    pub parameters: usize,
}

type Evaluated = (Vec<f64>, f64, Vec<f64>);

/// Indexed training data and the parameter layout.
struct Problem {
    /// Per sentence, per token: feature ids.
    feats: Vec<Vec<Vec<u32>>>,
    gold: Vec<Vec<usize>>,
    /// Per feature id: the `(label, parameter)` pairs it owns.
    params: Vec<Vec<(u8, u32)>>,
    names: Vec<String>,
    n_state: usize,
    order: Vec<usize>,
    l2: f64,
    /// Last evaluated point with its loss and gradient.
    cache: Mutex<Option<Evaluated>>,
    /// Lowest-loss point evaluated so far.
    best: Mutex<Option<(Vec<f64>, f64)>>,
}

impl Problem {
    fn new(data: &[(&Sentence, Vec<usize>)], l2: f64, seed: u64) -> Self {
        let mut ids: HashMap<String, u32> = HashMap::new();
        let mut names: Vec<String> = Vec::new();
        let mut pairs: Vec<Vec<u8>> = Vec::new();
        let mut feats = Vec::with_capacity(data.len());
        let mut gold = Vec::with_capacity(data.len());
        for (sentence, labels) in data {
            let per_token: Vec<Vec<u32>> = featurize_sentence(sentence)
                .into_iter()
                .zip(labels)
                .map(|(fs, &y)| {
                    fs.into_iter()
                        .map(|f| {
                            let id = *ids.entry(f.clone()).or_insert_with(|| {
                                names.push(f);
                                pairs.push(Vec::new());
                                (names.len() - 1) as u32
                            });
                            let owned = &mut pairs[id as usize];
                            if !owned.contains(&(y as u8)) {
                                owned.push(y as u8);
                            }
                            id
                        })
                        .collect()
                })
                .collect();
            feats.push(per_token);
            gold.push(labels.clone());
        }
        let mut next = 0u32;
        let params = pairs
            .into_iter()
            .map(|mut ls| {
                ls.sort_unstable();
                ls.into_iter()
                    .map(|l| {
                        next += 1;
                        (l, next - 1)
                    })
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Problem {
            feats,
            gold,
            params,
            names,
            n_state: next as usize,
            order,
            l2,
            cache: Mutex::new(None),
            best: Mutex::new(None),
        }
    }

    fn dim(&self) -> usize {
        self.n_state + L * L
    }

    fn evaluate(&self, w: &[f64]) -> (f64, Vec<f64>) {
        if let Some((p, c, g)) = self.cache.lock().expect("cache lock").as_ref() {
            if p.as_slice() == w {
                return (*c, g.clone());
            }
        }
        let trans = &w[self.n_state..];
        let mut loss = 0.0;
        let mut grad = vec![0.0; w.len()];
        for &s in &self.order {
            let feats = &self.feats[s];
            let gold = &self.gold[s];
            let n = feats.len();
            if n == 0 {
                continue;
            }
            let unary: Vec<[f64; L]> = feats
                .iter()
                .map(|fs| {
                    let mut row = [0.0; L];
                    for &f in fs {
                        for &(l, p) in &self.params[f as usize] {
                            row[l as usize] += w[p as usize];
                        }
                    }
                    row
                })
                .collect();
            let lat = forward_backward(&unary, trans);
            let mut gold_score = unary[0][gold[0]];
            for i in 1..n {
                gold_score += unary[i][gold[i]] + trans[gold[i - 1] * L + gold[i]];
            }
            loss += lat.log_z - gold_score;

            for (i, fs) in feats.iter().enumerate() {
                for &f in fs {
                    for &(l, p) in &self.params[f as usize] {
                        let observed = if l as usize == gold[i] { 1.0 } else { 0.0 };
                        grad[p as usize] += lat.node(i, l as usize) - observed;
                    }
                }
            }
            let tg = &mut grad[self.n_state..];
            for i in 1..n {
                for a in 0..L {
                    if lat.alpha[i - 1][a] == 0.0 {
                        continue;
                    }
                    for b in 0..L {
                        if lat.t[a * L + b] != 0.0 {
                            tg[a * L + b] += lat.edge(i, a, b);
                        }
                    }
                }
                tg[gold[i - 1] * L + gold[i]] -= 1.0;
            }
        }
        for (g, x) in grad.iter_mut().zip(w) {
            loss += 0.5 * self.l2 * x * x;
            *g += self.l2 * x;
        }
        // Per-sentence scale keeps the first line-search steps reasonable;
        // the minimizer is unchanged.
        let scale = 1.0 / self.feats.len().max(1) as f64;
        loss *= scale;
        for g in &mut grad {
            *g *= scale;
        }
        {
            let mut best = self.best.lock().expect("best lock");
            if best.as_ref().is_none_or(|(_, b)| loss < *b) {
                *best = Some((w.to_vec(), loss));
            }
        }
        *self.cache.lock().expect("cache lock") = Some((w.to_vec(), loss, grad.clone()));
        (loss, grad)
    }

    fn into_model(self, w: &[f64]) -> SequenceModel {
        let mut features = HashMap::with_capacity(self.names.len());
        for (name, ps) in self.names.into_iter().zip(&self.params) {
            let ws: Vec<(u8, f64)> = ps.iter().map(|&(l, p)| (l, w[p as usize])).collect();
            features.insert(name, ws);
        }
        SequenceModel::from_parts(features, w[self.n_state..].to_vec())
    }
}

struct Objective<'a>(&'a Problem);

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, w: &Self::Param) -> Result<f64, argmin::core::Error> {
        Ok(self.0.evaluate(w).0)
    }
}

impl Gradient for Objective<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, w: &Self::Param) -> Result<Vec<f64>, argmin::core::Error> {
        Ok(self.0.evaluate(w).1)
    }
}

fn fit(data: &[(&Sentence, Vec<usize>)], config: &TrainConfig) -> Result<(SequenceModel, f64), TermError> {
    let problem = Problem::new(data, config.l2, config.seed);
    let init = vec![0.0; problem.dim()];
    let (loss0, _) = problem.evaluate(&init);
    if !loss0.is_finite() {
        return Err(TermError::NonFiniteLoss { iteration: 0, loss: loss0 });
    }
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), config.memory)
        .with_tolerance_grad(1e-6)
        .and_then(|s| s.with_tolerance_cost(1e-9))
        .map_err(|e| TermError::Optimizer(e.to_string()))?;
    let outcome = Executor::new(Objective(&problem), solver)
        .configure(|state| state.param(init.clone()).max_iters(config.max_iterations))
        .run();
    let (w, loss, iters) = match outcome {
        Ok(res) => {
            let state = res.state();
            let w = state.get_best_param().cloned().unwrap_or(init);
            (w, state.get_best_cost(), state.get_iter())
        }
        // The line search can fail once the gradient is at noise level; the
        // best point seen is then as good as converged.
        Err(e) => {
            let best = problem.best.lock().expect("best lock").clone();
            match best {
                Some((w, c)) if c.is_finite() => {
                    log::debug!("optimizer stopped early: {e}");
                    (w, c, 0)
                }
                _ => return Err(TermError::Optimizer(e.to_string())),
            }
        }
    };
    if !loss.is_finite() || w.iter().any(|x| !x.is_finite()) {
        return Err(TermError::NonFiniteLoss { iteration: iters, loss });
    }
    Ok((problem.into_model(&w), loss))
}

fn label_indices(s: &LabeledSentence) -> Vec<usize> {
    s.labels.iter().map(|l| l.index()).collect()
}

/// Trains a sequence model, optionally with one round of pseudo-labeling.
pub fn train(corpus: &TrainingCorpus, config: &TrainConfig) -> Result<SequenceModel, TermError> {
    train_reporting(corpus, config).map(|(m, _)| m)
}

pub fn train_reporting(
    corpus: &TrainingCorpus,
    config: &TrainConfig,
) -> Result<(SequenceModel, TrainReport), TermError> {
    if corpus.labeled.is_empty() {
        return Err(TermError::EmptyLabeledCorpus);
    }
    let gold: Vec<(&Sentence, Vec<usize>)> =
        corpus.labeled.iter().map(|s| (&s.sentence, label_indices(s))).collect();
    let (model, loss) = fit(&gold, config)?;
    let mut report = TrainReport {
        labeled: gold.len(),
        pseudo_candidates: 0,
        pseudo_accepted: 0,
        final_loss: loss,
        parameters: 0,
    };
    if !config.semi_supervised || corpus.unlabeled.is_empty() {
        report.parameters = model.num_weights();
        return Ok((model, report));
    }

    report.pseudo_candidates = corpus.unlabeled.len();
    let accepted: Vec<(&Sentence, Vec<usize>)> = corpus
        .unlabeled
        .iter()
        .filter(|s| !s.is_empty())
        .filter_map(|s| {
            let (labels, confidence) = model.tag_with_confidence(s);
            (confidence >= config.pseudo_threshold).then(|| (s, labels.iter().map(|l| l.index()).collect()))
        })
        .collect();
    report.pseudo_accepted = accepted.len();
    if accepted.is_empty() {
        report.parameters = model.num_weights();
        return Ok((model, report));
    }
    let mut combined = gold;
    combined.extend(accepted);
    let (model, loss) = fit(&combined, config)?;
    report.final_loss = loss;
    report.parameters = model.num_weights();
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term_id::corpus::parse_bracketed;

    fn corpus(lines: &[&str]) -> TrainingCorpus {
        TrainingCorpus {
            labeled: lines.iter().enumerate().map(|(i, l)| parse_bracketed(l, i).unwrap()).collect(),
            unlabeled: Vec::new(),
        }
    }

    #[test]
    fn memorizes_repeated_sentence() {
        let line = "[[0|Redistribution and use in source and binary forms]] , with or without modification , are permitted .";
        let c = corpus(&vec![line; 50]);
        let cfg = TrainConfig { semi_supervised: false, ..TrainConfig::default() };
        let m = train(&c, &cfg).unwrap();
        assert_eq!(m.tag(&c.labeled[0].sentence), c.labeled[0].labels);
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(matches!(train(&TrainingCorpus::default(), &TrainConfig::default()), Err(TermError::EmptyLabeledCorpus)));
    }

    #[test]
    fn phase_two_without_unlabeled_is_noop_and_deterministic() {
        let c = corpus(&["You [[1|may modify]] it .", "[[17|Give credit]] to the author ."]);
        let a = train(&c, &TrainConfig { semi_supervised: false, ..TrainConfig::default() }).unwrap();
        let b = train(&c, &TrainConfig { semi_supervised: true, ..TrainConfig::default() }).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(train(&c, &TrainConfig::default()).unwrap().to_json(), b.to_json());
    }

    #[test]
    fn stronger_l2_shrinks_weights() {
        let c = corpus(&["You [[1|may modify]] it .", "You [[0|may distribute]] it .", "No [[4|liability]] ."]);
        let mut last = f64::INFINITY;
        for l2 in [0.1, 10.0, 1000.0] {
            let cfg = TrainConfig { l2, semi_supervised: false, ..TrainConfig::default() };
            let w = train(&c, &cfg).unwrap().max_abs_weight();
            assert!(w < last, "l2={l2}: {w} !< {last}");
            last = w;
        }
        assert!(last < 0.05);
    }
}
