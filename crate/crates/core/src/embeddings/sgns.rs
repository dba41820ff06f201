//! Skip-gram with negative sampling.
//!
//! Each center word predicts the words in a window around it. For a pair
//! `(center, context)` with sampled negatives `n_1..n_k` the per-pair loss is
//!
//! ```text
//! -ln σ(v_center · u_context) - Σ_i ln σ(-v_center · u_{n_i})
//! ```
//!
//! where `v` rows live in the input table (the vectors returned to callers) and
//! `u` rows in the output table. Negatives are drawn from the unigram distribution
//! raised to the 3/4 power; frequent words are subsampled; the learning rate
//! decays linearly to `1e-4` of its initial value.
//!
//! With `threads == 1` training is strictly sequential and bitwise reproducible
//! for a given seed. With more threads, workers update the shared tables without
//! locking. Each weight is an `AtomicU64` accessed with relaxed ordering, so
//! concurrent updates to the same weight may lose an increment; results are then
//! reproducible only statistically.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EmbeddingError, EmbeddingTable};
use crate::corpus::Corpus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SgnsConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_learning_rate: f64,
    pub min_count: u64,
    pub subsample_threshold: f64,
    pub seed: u64,
    /// Worker threads; 1 selects the deterministic sequential mode.
    pub threads: usize,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        Self {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_learning_rate: 0.025,
            min_count: 5,
            subsample_threshold: 1e-3,
            seed: 0,
            threads: 1,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<(), SgnsError> {
        let bad = |field: &'static str, value: String| Err(SgnsError::InvalidConfig { field, value });
        if self.dim < 2 {
            return bad("dim", self.dim.to_string());
        }
        if self.window == 0 {
            return bad("window", "0".into());
        }
        if self.negatives == 0 {
            return bad("negatives", "0".into());
        }
        if self.epochs == 0 {
            return bad("epochs", "0".into());
        }
        if !(self.initial_learning_rate.is_finite() && self.initial_learning_rate > 0.0) {
            return bad("initial_learning_rate", self.initial_learning_rate.to_string());
        }
        if self.min_count == 0 {
            return bad("min_count", "0".into());
        }
        if !(self.subsample_threshold.is_finite() && self.subsample_threshold > 0.0) {
            return bad("subsample_threshold", self.subsample_threshold.to_string());
        }
        if self.threads == 0 {
            return bad("threads", "0".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SgnsError {
    #[error("invalid configuration: {field} = {value}")]
    InvalidConfig { field: &'static str, value: String },
    #[error("no word occurs at least {min_count} times")]
    EmptyVocabulary { min_count: u64 },
    #[error(transparent)]
    Table(#[from] EmbeddingError),
}

/// Training vocabulary: words with at least `min_count` occurrences, most frequent first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    total: u64,
}

impl Vocabulary {
    pub fn build(corpus: &Corpus, min_count: u64) -> Self {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for lyric in corpus.tokenized() {
            for token in lyric.tokens() {
                *counts.entry(token).or_insert(0) += 1;
            }
        }
        Self::from_counts(counts.into_iter().map(|(w, n)| (w.to_owned(), n)), min_count)
    }

    pub fn from_counts<I: IntoIterator<Item = (String, u64)>>(counts: I, min_count: u64) -> Self {
        let mut kept: Vec<(String, u64)> = counts.into_iter().filter(|(_, n)| *n >= min_count).collect();
        kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let index = kept.iter().enumerate().map(|(i, (w, _))| (w.clone(), i as u32)).collect();
        let total = kept.iter().map(|(_, n)| n).sum();
        let (words, counts) = kept.into_iter().unzip();
        Self {
            words,
            counts,
            index,
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    /// Occurrences of all vocabulary words.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Draws negative words with probability proportional to `count^0.75`.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    probabilities: Vec<f64>,
    dist: WeightedIndex<f64>,
}

impl NegativeSampler {
    pub fn new(vocab: &Vocabulary) -> Self {
        let weights: Vec<f64> = vocab.counts.iter().map(|&n| (n as f64).powf(0.75)).collect();
        let norm: f64 = weights.iter().sum();
        let probabilities = weights.iter().map(|w| w / norm).collect();
        let dist = WeightedIndex::new(&weights).expect("vocabulary is non-empty with positive counts");
        Self { probabilities, dist }
    }

    /// Sampling probability of each vocabulary id.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.dist.sample(rng) as u32
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Loss of one (center, context, negatives) triple.
pub fn pair_loss(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    let positive = -sigmoid(dot(center, context)).ln();
    let negative: f64 = negatives.iter().map(|n| -sigmoid(-dot(center, n)).ln()).sum();
    positive + negative
}

/// Gradient of [`pair_loss`] with respect to each argument.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

pub fn pair_gradient(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> PairGradient {
    // d/dx -ln σ(x) = σ(x) - 1 and d/dx -ln σ(-x) = σ(x)
    let g_pos = sigmoid(dot(center, context)) - 1.0;
    let mut grad_center: Vec<f64> = context.iter().map(|o| g_pos * o).collect();
    let grad_context = center.iter().map(|c| g_pos * c).collect();
    let mut grad_negatives = Vec::with_capacity(negatives.len());
    for n in negatives {
        let g = sigmoid(dot(center, n));
        for (gc, x) in grad_center.iter_mut().zip(n.iter()) {
            *gc += g * x;
        }
        grad_negatives.push(center.iter().map(|c| g * c).collect());
    }
    PairGradient {
        center: grad_center,
        context: grad_context,
        negatives: grad_negatives,
    }
}

/// Row-major matrix shared between training workers.
struct SharedMatrix {
    dim: usize,
    data: Vec<AtomicU64>,
}

impl SharedMatrix {
    fn from_values(dim: usize, values: impl IntoIterator<Item = f64>) -> Self {
        Self {
            dim,
            data: values.into_iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
        }
    }

    fn load_row(&self, row: u32, out: &mut [f64]) {
        let start = row as usize * self.dim;
        for (o, cell) in out.iter_mut().zip(&self.data[start..start + self.dim]) {
            *o = f64::from_bits(cell.load(Ordering::Relaxed));
        }
    }

    fn add_scaled(&self, row: u32, scale: f64, v: &[f64]) {
        let start = row as usize * self.dim;
        for (cell, x) in self.data[start..start + self.dim].iter().zip(v) {
            let current = f64::from_bits(cell.load(Ordering::Relaxed));
            cell.store((current + scale * x).to_bits(), Ordering::Relaxed);
        }
    }

    fn store_row(&self, row: u32, v: &[f64]) {
        let start = row as usize * self.dim;
        for (cell, x) in self.data[start..start + self.dim].iter().zip(v) {
            cell.store(x.to_bits(), Ordering::Relaxed);
        }
    }

    fn to_vec(&self) -> Vec<f64> {
        self.data.iter().map(|c| f64::from_bits(c.load(Ordering::Relaxed))).collect()
    }
}

/// Input and output vector tables of a skip-gram model.
pub struct SgnsModel {
    dim: usize,
    input: SharedMatrix,
    output: SharedMatrix,
}

/// Per-worker buffers for [`SgnsModel::step`].
pub struct StepScratch {
    center: Vec<f64>,
    target: Vec<f64>,
    grad: Vec<f64>,
}

impl StepScratch {
    pub fn new(dim: usize) -> Self {
        Self {
            center: vec![0.0; dim],
            target: vec![0.0; dim],
            grad: vec![0.0; dim],
        }
    }
}

impl SgnsModel {
    /// Input rows uniform in `(-0.5/dim, 0.5/dim)`, output rows zero.
    pub fn initialise(vocab_size: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        let input = (0..vocab_size * dim).map(|_| (rng.gen::<f64>() - 0.5) / dim as f64);
        Self {
            dim,
            input: SharedMatrix::from_values(dim, input),
            output: SharedMatrix::from_values(dim, std::iter::repeat_n(0.0, vocab_size * dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn input_vector(&self, id: u32) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.input.load_row(id, &mut v);
        v
    }

    pub fn output_vector(&self, id: u32) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.output.load_row(id, &mut v);
        v
    }

    pub fn set_input_vector(&self, id: u32, v: &[f64]) {
        assert_eq!(v.len(), self.dim);
        self.input.store_row(id, v);
    }

    pub fn set_output_vector(&self, id: u32, v: &[f64]) {
        assert_eq!(v.len(), self.dim);
        self.output.store_row(id, v);
    }

    /// One stochastic gradient step on the pair loss with learning rate `lr`.
    ///
    /// Output rows are updated as they are visited; the center row is updated once
    /// at the end with the accumulated gradient. A negative equal to `context` is
    /// skipped.
    pub fn step(&self, center: u32, context: u32, negatives: &[u32], lr: f64, scratch: &mut StepScratch) {
        self.input.load_row(center, &mut scratch.center);
        scratch.grad.iter_mut().for_each(|g| *g = 0.0);
        let targets = std::iter::once((context, 1.0)).chain(negatives.iter().map(|&n| (n, 0.0)));
        for (target, label) in targets {
            if label == 0.0 && target == context {
                continue;
            }
            self.output.load_row(target, &mut scratch.target);
            // ascent direction of the log-likelihood, i.e. minus the loss gradient
            let g = (label - sigmoid(dot(&scratch.center, &scratch.target))) * lr;
            for (acc, o) in scratch.grad.iter_mut().zip(&scratch.target) {
                *acc += g * o;
            }
            self.output.add_scaled(target, g, &scratch.center);
        }
        self.input.add_scaled(center, 1.0, &scratch.grad);
    }

    /// Mean [`pair_loss`] over `(center, context, negatives)` triples.
    pub fn batch_loss(&self, batch: &[(u32, u32, Vec<u32>)]) -> f64 {
        let total: f64 = batch
            .iter()
            .map(|(c, o, negs)| {
                let center = self.input_vector(*c);
                let context = self.output_vector(*o);
                let negs: Vec<Vec<f64>> = negs.iter().map(|&n| self.output_vector(n)).collect();
                let refs: Vec<&[f64]> = negs.iter().map(Vec::as_slice).collect();
                pair_loss(&center, &context, &refs)
            })
            .sum();
        total / batch.len() as f64
    }
}

/// Stateful trainer; [`train_sgns`] runs it to completion.
pub struct SgnsTrainer {
    config: SgnsConfig,
    vocab: Vocabulary,
    sampler: NegativeSampler,
    model: SgnsModel,
    /// Corpus as vocabulary ids, one sentence per song.
    ids: Vec<u32>,
    sentence_ends: Vec<usize>,
    keep_probability: Vec<f64>,
    words_done: AtomicU64,
    epochs_done: usize,
}

impl SgnsTrainer {
    pub fn new(corpus: &Corpus, config: SgnsConfig) -> Result<Self, SgnsError> {
        config.validate()?;
        let vocab = Vocabulary::build(corpus, config.min_count);
        if vocab.is_empty() {
            return Err(SgnsError::EmptyVocabulary {
                min_count: config.min_count,
            });
        }
        let mut ids = Vec::new();
        let mut sentence_ends = Vec::with_capacity(corpus.len());
        for lyric in corpus.tokenized() {
            ids.extend(lyric.tokens().filter_map(|t| vocab.id(t)));
            if sentence_ends.last() != Some(&ids.len()) {
                sentence_ends.push(ids.len());
            }
        }
        let threshold = config.subsample_threshold * vocab.total() as f64;
        let keep_probability = vocab
            .counts
            .iter()
            .map(|&n| {
                let n = n as f64;
                (((n / threshold).sqrt() + 1.0) * threshold / n).min(1.0)
            })
            .collect();
        let sampler = NegativeSampler::new(&vocab);
        let model = SgnsModel::initialise(vocab.len(), config.dim, config.seed);
        Ok(Self {
            config,
            vocab,
            sampler,
            model,
            ids,
            sentence_ends,
            keep_probability,
            words_done: AtomicU64::new(0),
            epochs_done: 0,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn sampler(&self) -> &NegativeSampler {
        &self.sampler
    }

    pub fn model(&self) -> &SgnsModel {
        &self.model
    }

    pub fn epochs_done(&self) -> usize {
        self.epochs_done
    }

    /// Current linearly decayed learning rate.
    pub fn learning_rate(&self) -> f64 {
        let planned = (self.config.epochs as u64 * self.ids.len() as u64 + 1) as f64;
        let progress = self.words_done.load(Ordering::Relaxed) as f64 / planned;
        let floor = self.config.initial_learning_rate * 1e-4;
        (self.config.initial_learning_rate * (1.0 - progress)).max(floor)
    }

    pub fn train_epoch(&mut self) {
        let epoch = self.epochs_done as u64;
        let workers = self.config.threads.min(self.sentence_ends.len()).max(1);
        if workers == 1 {
            self.run_worker(epoch, 0, 0..self.sentence_ends.len());
        } else {
            let per = self.sentence_ends.len().div_ceil(workers);
            let this = &*self;
            std::thread::scope(|scope| {
                for w in 0..workers {
                    let start = w * per;
                    let end = ((w + 1) * per).min(this.sentence_ends.len());
                    scope.spawn(move || this.run_worker(epoch, w as u64, start..end));
                }
            });
        }
        self.epochs_done += 1;
    }

    fn run_worker(&self, epoch: u64, worker: u64, sentences: std::ops::Range<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(epoch * 4096 + worker);
        let mut scratch = StepScratch::new(self.config.dim);
        let mut kept = Vec::new();
        let mut negatives = vec![0u32; self.config.negatives];
        let mut pending = 0u64;
        let mut lr = self.learning_rate();
        for s in sentences {
            let start = if s == 0 { 0 } else { self.sentence_ends[s - 1] };
            let sentence = &self.ids[start..self.sentence_ends[s]];
            kept.clear();
            kept.extend(
                sentence
                    .iter()
                    .copied()
                    .filter(|&id| self.keep_probability[id as usize] >= rng.gen::<f64>()),
            );
            for pos in 0..kept.len() {
                let reach = rng.gen_range(1..=self.config.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(kept.len() - 1);
                for ctx in lo..=hi {
                    if ctx == pos {
                        continue;
                    }
                    for n in negatives.iter_mut() {
                        *n = self.sampler.sample(&mut rng);
                    }
                    self.model.step(kept[pos], kept[ctx], &negatives, lr, &mut scratch);
                }
            }
            pending += sentence.len() as u64;
            if pending >= 10_000 {
                self.words_done.fetch_add(pending, Ordering::Relaxed);
                pending = 0;
                lr = self.learning_rate();
            }
        }
        self.words_done.fetch_add(pending, Ordering::Relaxed);
    }

    /// Runs the remaining epochs and returns the input vectors.
    pub fn train(mut self) -> Result<EmbeddingTable, SgnsError> {
        while self.epochs_done < self.config.epochs {
            self.train_epoch();
        }
        self.into_table()
    }

    pub fn into_table(self) -> Result<EmbeddingTable, SgnsError> {
        let values = self.model.input.to_vec();
        let table = EmbeddingTable::from_rows(
            self.config.dim,
            self.vocab.words.iter().zip(values.chunks(self.config.dim)).map(|(w, v)| (w.clone(), v)),
        )?;
        let zeros = table.zero_words();
        if !zeros.is_empty() {
            log::warn!("{} trained vectors are zero and will be refused in similarity queries", zeros.len());
        }
        Ok(table)
    }
}

/// Trains skip-gram negative-sampling vectors on the corpus tokens.
pub fn train_sgns(corpus: &Corpus, config: &SgnsConfig) -> Result<EmbeddingTable, SgnsError> {
    SgnsTrainer::new(corpus, config.clone())?.train()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SgnsConfig::default().validate().is_ok());
        for cfg in [
            SgnsConfig { dim: 1, ..Default::default() },
            SgnsConfig { window: 0, ..Default::default() },
            SgnsConfig { negatives: 0, ..Default::default() },
            SgnsConfig { epochs: 0, ..Default::default() },
            SgnsConfig { initial_learning_rate: 0.0, ..Default::default() },
            SgnsConfig { min_count: 0, ..Default::default() },
            SgnsConfig { subsample_threshold: -1.0, ..Default::default() },
            SgnsConfig { threads: 0, ..Default::default() },
        ] {
            assert!(matches!(cfg.validate(), Err(SgnsError::InvalidConfig { .. })), "{cfg:?}");
        }
    }

    #[test]
    fn vocabulary_order_and_cutoff() {
        let v = Vocabulary::from_counts(
            [("b".to_owned(), 3), ("a".to_owned(), 3), ("c".to_owned(), 9), ("d".to_owned(), 1)],
            2,
        );
        assert_eq!(v.words(), ["c", "a", "b"]);
        assert_eq!(v.total(), 15);
        assert_eq!(v.id("d"), None);
    }

    #[test]
    fn positive_step_moves_center_towards_context() {
        let model = SgnsModel::initialise(2, 3, 1);
        let center = [0.1, -0.2, 0.05];
        let context = [0.3, 0.4, -0.1];
        model.set_input_vector(0, &center);
        model.set_output_vector(1, &context);
        let before = cosine_distance(&center, &context);
        let mut scratch = StepScratch::new(3);
        model.step(0, 1, &[], 0.5, &mut scratch);
        let moved = model.input_vector(0);
        let delta: Vec<f64> = moved.iter().zip(&center).map(|(a, b)| a - b).collect();
        assert!(dot(&delta, &context) > 0.0);
        assert!(cosine_distance(&moved, &context) < before);
    }

    fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
        1.0 - dot(a, b) / (dot(a, a).sqrt() * dot(b, b).sqrt())
    }

    #[test]
    fn step_applies_the_analytic_gradient() {
        let model = SgnsModel::initialise(4, 3, 1);
        let vecs = [[0.2, -0.1, 0.3], [0.5, 0.1, -0.4], [-0.3, 0.2, 0.1], [0.05, -0.6, 0.2]];
        model.set_input_vector(0, &vecs[0]);
        for (i, v) in vecs.iter().enumerate().skip(1) {
            model.set_output_vector(i as u32, v);
        }
        let grad = pair_gradient(&vecs[0], &vecs[1], &[&vecs[2], &vecs[3]]);
        let lr = 0.01;
        model.step(0, 1, &[2, 3], lr, &mut StepScratch::new(3));
        let check = |after: Vec<f64>, before: &[f64], g: &[f64]| {
            for ((a, b), g) in after.iter().zip(before).zip(g) {
                assert!((a - (b - lr * g)).abs() < 1e-15);
            }
        };
        check(model.input_vector(0), &vecs[0], &grad.center);
        check(model.output_vector(1), &vecs[1], &grad.context);
        check(model.output_vector(2), &vecs[2], &grad.negatives[0]);
        check(model.output_vector(3), &vecs[3], &grad.negatives[1]);
    }

    #[test]
    fn learning_rate_decays_to_floor() {
        let corpus = crate::corpus::test_support::corpus(vec![crate::corpus::test_support::song(
            "a",
            2000,
            crate::corpus::Cohort::Other,
            "x y x y x y",
        )]);
        let cfg = SgnsConfig { dim: 2, min_count: 1, epochs: 1, ..Default::default() };
        let trainer = SgnsTrainer::new(&corpus, cfg).unwrap();
        assert_eq!(trainer.learning_rate(), 0.025);
        trainer.words_done.store(1_000, Ordering::Relaxed);
        assert!((trainer.learning_rate() - 0.025e-4).abs() < 1e-18);
    }

    #[test]
    fn empty_vocabulary_is_an_error() {
        let corpus = crate::corpus::test_support::corpus(vec![crate::corpus::test_support::song(
            "a",
            2000,
            crate::corpus::Cohort::Other,
            "x y",
        )]);
        assert!(matches!(
            train_sgns(&corpus, &SgnsConfig::default()),
            Err(SgnsError::EmptyVocabulary { min_count: 5 })
        ));
    }
}
