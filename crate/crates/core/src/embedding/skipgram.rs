//! Skip-gram with negative sampling.
//!
//! Each document stream (title and abstract TIDs concatenated) is one context
//! unit: windows never cross documents. The objective for a (center, context)
//! pair with sampled negatives `n_k` is
//!
//! ```text
//! -ln σ(u_context · v_center) - Σ_k ln σ(-u_{n_k} · v_center)
//! ```
//!
//! where `v` are input vectors (the returned embeddings) and `u` are output
//! vectors (discarded after training).
//!
//! After every epoch the objective is re-evaluated with the current
//! parameters over a fixed set of pairs and negatives, so epochs are compared
//! on identical terms. The running mean of pre-step losses seen during the
//! pass is reported alongside; it is biased low by updates made earlier in
//! the same window, and the bias shrinks as the learning rate decays.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use super::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::Tid;

const MIN_LEARNING_RATE: f64 = 1e-4;
const NOISE_EXPONENT: f64 = 0.75;
/// Pair budget for the end-of-epoch evaluation.
const EVAL_MAX_PAIRS: usize = 250_000;
const EVAL_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub dim: usize,
    /// Maximum distance between center and context token.
    pub window: usize,
    pub epochs: usize,
    pub negative_samples: usize,
    pub initial_learning_rate: f64,
    /// Tokens occurring in fewer documents than this are left out.
    pub min_token_count: u32,
    pub rng_seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            dim: 100,
            window: 100,
            epochs: 10,
            negative_samples: 5,
            initial_learning_rate: 0.025,
            min_token_count: 1,
            rng_seed: 1,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("{what} must be positive")));
        if self.dim == 0 {
            return bad("dim");
        }
        if self.window == 0 {
            return bad("window");
        }
        if self.epochs == 0 {
            return bad("epochs");
        }
        if self.negative_samples == 0 {
            return bad("negative_samples");
        }
        if !(self.initial_learning_rate.is_finite() && self.initial_learning_rate > 0.0) {
            return bad("initial_learning_rate");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingOutcome {
    pub matrix: EmbeddingMatrix,
    /// Mean pair objective after each epoch, on the fixed evaluation pairs.
    pub epoch_losses: Vec<f64>,
    /// Mean pre-step pair loss observed during each epoch.
    pub running_losses: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `-ln σ(x)`, computed without overflow.
fn neg_log_sigmoid(x: f64) -> f64 {
    if x > 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Negative-sampling loss for one center vector against its positive context
/// output vector and negative output vectors.
pub fn pair_loss(center: &[f64], positive: &[f64], negatives: &[&[f64]]) -> f64 {
    neg_log_sigmoid(dot(center, positive))
        + negatives
            .iter()
            .map(|n| neg_log_sigmoid(-dot(center, n)))
            .sum::<f64>()
}

/// One SGD step on [`pair_loss`].
///
/// `outputs` is the row-major output matrix with rows of `center.len()`;
/// `targets` lists `(row, is_positive)`. Every update is computed from the
/// pre-step parameters. Returns the loss before the step.
pub fn sgd_pair(
    center: &mut [f64],
    outputs: &mut [f64],
    targets: &[(usize, bool)],
    learning_rate: f64,
    scratch: &mut Vec<f64>,
) -> f64 {
    let dim = center.len();
    scratch.clear();
    scratch.resize(dim, 0.0);
    let mut loss = 0.0;
    for &(row, positive) in targets {
        let out = &mut outputs[row * dim..(row + 1) * dim];
        let score = dot(center, out);
        let label = if positive { 1.0 } else { 0.0 };
        loss += if positive {
            neg_log_sigmoid(score)
        } else {
            neg_log_sigmoid(-score)
        };
        // Negative gradient of the loss with respect to the score.
        let g = (label - sigmoid(score)) * learning_rate;
        for ((s, o), c) in scratch.iter_mut().zip(out.iter_mut()).zip(center.iter()) {
            *s += g * *o;
            *o += g * c;
        }
    }
    for (c, s) in center.iter_mut().zip(scratch.iter()) {
        *c += s;
    }
    loss
}

#[derive(Debug, Clone)]
pub struct SkipGramTrainer {
    config: TrainingConfig,
}

impl SkipGramTrainer {
    pub fn new(config: TrainingConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &TrainingConfig {
        &self.config
    }

    /// Trains over `streams`, one TID sequence per document. Deterministic for
    /// a given seed.
    pub fn train(&self, streams: &[Vec<Tid>]) -> Result<TrainingOutcome> {
        self.train_with(streams, |_, _| {})
    }

    /// As [`train`](Self::train), calling `on_epoch(epoch, loss)` with the
    /// evaluated objective after each pass.
    pub fn train_with(
        &self,
        streams: &[Vec<Tid>],
        mut on_epoch: impl FnMut(usize, f64),
    ) -> Result<TrainingOutcome> {
        let cfg = &self.config;
        let dim = cfg.dim;

        let mut doc_freq: BTreeMap<Tid, u32> = BTreeMap::new();
        let mut occurrences: BTreeMap<Tid, u64> = BTreeMap::new();
        for stream in streams {
            let mut seen = std::collections::HashSet::new();
            for &tid in stream {
                *occurrences.entry(tid).or_default() += 1;
                if seen.insert(tid) {
                    *doc_freq.entry(tid).or_default() += 1;
                }
            }
        }
        let vocab: Vec<Tid> = doc_freq
            .iter()
            .filter(|(_, df)| **df >= cfg.min_token_count)
            .map(|(t, _)| *t)
            .collect();
        if vocab.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let row_of: HashMap<Tid, usize> = vocab.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let rows: Vec<Vec<usize>> = streams
            .iter()
            .map(|s| s.iter().filter_map(|t| row_of.get(t).copied()).collect())
            .collect();
        let total_tokens: usize = rows.iter().map(Vec::len).sum();

        let noise = WeightedAliasIndex::new(
            vocab
                .iter()
                .map(|t| (occurrences[t] as f64).powf(NOISE_EXPONENT))
                .collect(),
        )
        .map_err(|e| Error::Config(format!("noise distribution: {e}")))?;

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let bound = 0.5 / dim as f64;
        let mut input: Vec<f64> = (0..vocab.len() * dim)
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        let mut output = vec![0.0f64; vocab.len() * dim];

        let total_work = (cfg.epochs * total_tokens).max(1) as f64;
        let lr0 = cfg.initial_learning_rate;
        let mut processed = 0usize;
        let mut targets: Vec<(usize, bool)> = Vec::with_capacity(cfg.negative_samples + 1);
        let mut scratch = Vec::with_capacity(dim);
        let mut epoch_losses = Vec::with_capacity(cfg.epochs);
        let mut running_losses = Vec::with_capacity(cfg.epochs);
        let eval_docs = evaluation_sample(&rows, cfg.window);

        for epoch in 0..cfg.epochs {
            let mut loss_sum = 0.0;
            let mut pairs = 0u64;
            for stream in &rows {
                for (i, &center) in stream.iter().enumerate() {
                    let progress = processed as f64 / total_work;
                    let lr = (lr0 - (lr0 - MIN_LEARNING_RATE) * progress).max(MIN_LEARNING_RATE);
                    processed += 1;

                    // Reduced window, sampled per center token.
                    let span = cfg.window - rng.random_range(0..cfg.window);
                    let lo = i.saturating_sub(span);
                    let hi = (i + span).min(stream.len() - 1);
                    for (j, &context) in stream.iter().enumerate().take(hi + 1).skip(lo) {
                        if j == i {
                            continue;
                        }
                        targets.clear();
                        targets.push((context, true));
                        for _ in 0..cfg.negative_samples {
                            let neg = noise.sample(&mut rng);
                            if neg != context {
                                targets.push((neg, false));
                            }
                        }
                        let row = &mut input[center * dim..(center + 1) * dim];
                        loss_sum += sgd_pair(row, &mut output, &targets, lr, &mut scratch);
                        pairs += 1;
                    }
                }
            }
            running_losses.push(if pairs == 0 { 0.0 } else { loss_sum / pairs as f64 });
            let evaluated = evaluate(&rows, &eval_docs, &input, &output, &noise, cfg);
            on_epoch(epoch, evaluated);
            epoch_losses.push(evaluated);
        }

        let mut matrix = EmbeddingMatrix::new(dim);
        for (i, tid) in vocab.iter().enumerate() {
            let v: Vec<f32> = input[i * dim..(i + 1) * dim].iter().map(|x| *x as f32).collect();
            matrix.insert(*tid, v)?;
        }
        Ok(TrainingOutcome {
            matrix,
            epoch_losses,
            running_losses,
        })
    }
}

fn pairs_in(len: usize, window: usize) -> usize {
    (0..len).map(|i| i.min(window) + (len - 1 - i).min(window)).sum()
}

/// Evenly strided documents whose full-window pairs fit the budget.
fn evaluation_sample(rows: &[Vec<usize>], window: usize) -> Vec<usize> {
    let total: usize = rows.iter().map(|r| pairs_in(r.len(), window)).sum();
    let stride = total.div_ceil(EVAL_MAX_PAIRS).max(1);
    (0..rows.len()).step_by(stride).collect()
}

/// Mean objective over every full-window pair of the sampled documents. The
/// negatives come from a fixed seed, so repeated calls draw the same ones.
fn evaluate(
    rows: &[Vec<usize>],
    docs: &[usize],
    input: &[f64],
    output: &[f64],
    noise: &WeightedAliasIndex<f64>,
    cfg: &TrainingConfig,
) -> f64 {
    let dim = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ EVAL_SEED_SALT);
    let (mut sum, mut pairs) = (0.0, 0u64);
    for &d in docs {
        let stream = &rows[d];
        for (i, &center) in stream.iter().enumerate() {
            let v = &input[center * dim..(center + 1) * dim];
            let lo = i.saturating_sub(cfg.window);
            let hi = (i + cfg.window).min(stream.len() - 1);
            for (j, &context) in stream.iter().enumerate().take(hi + 1).skip(lo) {
                if j == i {
                    continue;
                }
                let mut loss = neg_log_sigmoid(dot(v, &output[context * dim..(context + 1) * dim]));
                for _ in 0..cfg.negative_samples {
                    let neg = noise.sample(&mut rng);
                    if neg != context {
                        loss += neg_log_sigmoid(-dot(v, &output[neg * dim..(neg + 1) * dim]));
                    }
                }
                sum += loss;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        0.0
    } else {
        sum / pairs as f64
    }
}

pub fn train_skipgram(streams: &[Vec<Tid>], config: &TrainingConfig) -> Result<EmbeddingMatrix> {
    Ok(SkipGramTrainer::new(config.clone())?.train(streams)?.matrix)
}
