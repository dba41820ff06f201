use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{PValueMode, WeatError};
use crate::embeddings::{cosine, EmbeddingTable};

/// Largest number of partitions exact mode will enumerate.
pub const EXACT_BUDGET: u64 = 200_000;

/// `s(w, A, B)` for words looked up in `table`.
pub fn association<S: AsRef<str>>(table: &EmbeddingTable, w: &str, a: &[S], b: &[S]) -> Result<f64, WeatError> {
    let lookup = |word: &str| table.vector(word).map_err(|_| WeatError::OutOfVocabulary(word.to_owned()));
    let wv = lookup(w)?;
    let av = a.iter().map(|x| lookup(x.as_ref())).collect::<Result<Vec<_>, _>>()?;
    let bv = b.iter().map(|x| lookup(x.as_ref())).collect::<Result<Vec<_>, _>>()?;
    association_of(wv, &av, &bv)
}

/// `s(w, A, B)` on raw vectors.
pub fn association_of(w: &[f64], a: &[&[f64]], b: &[&[f64]]) -> Result<f64, WeatError> {
    let mean_cos = |set: &[&[f64]]| -> Result<f64, WeatError> {
        let mut sum = 0.0;
        for v in set {
            sum += cosine(w, v)?;
        }
        Ok(sum / set.len() as f64)
    };
    Ok(mean_cos(a)? - mean_cos(b)?)
}

fn sum(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc + v)
}

/// `Σ_X s - Σ_Y s`.
pub fn test_statistic_from_scores(sx: &[f64], sy: &[f64]) -> f64 {
    sum(sx) - sum(sy)
}

/// Difference of mean scores over the population standard deviation of all scores.
pub fn effect_size_from_scores(sx: &[f64], sy: &[f64]) -> Result<f64, WeatError> {
    if sx.is_empty() || sy.is_empty() {
        return Err(WeatError::UnderFilled {
            list: if sx.is_empty() { "x" } else { "y" },
            found: 0,
            required: 1,
        });
    }
    let mean_x = sum(sx) / sx.len() as f64;
    let mean_y = sum(sy) / sy.len() as f64;
    let all = || sx.iter().chain(sy);
    let n = (sx.len() + sy.len()) as f64;
    let mean = all().fold(0.0, |acc, v| acc + v) / n;
    let variance = all().map(|s| (s - mean) * (s - mean)).fold(0.0, |acc, v| acc + v) / n;
    let std = variance.sqrt();
    let scale = all().fold(0.0f64, |acc, s| acc.max(s.abs()));
    if std <= 1e-12 * scale {
        return Err(WeatError::Degenerate);
    }
    Ok((mean_x - mean_y) / std)
}

/// `C(2n, n)`, saturating at `u128::MAX`.
pub fn partition_count(n: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..n as u128 {
        // C(n+i+1, i+1) = C(n+i, i) * (n+i+1) / (i+1) stays integral at every step
        c = match c.checked_mul(n as u128 + i + 1) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// Statistic of the partition whose `X` side is marked in `in_x`, summing scores in index order.
fn split_statistic(scores: &[f64], in_x: &[bool]) -> f64 {
    let mut sx = 0.0;
    let mut sy = 0.0;
    for (s, &x) in scores.iter().zip(in_x) {
        if x {
            sx += s;
        } else {
            sy += s;
        }
    }
    sx - sy
}

/// One-sided permutation p-value from the association scores of `X` and `Y`.
///
/// Scores are pooled as `X` then `Y`; each candidate partition's statistic is
/// summed in pooled index order. A partition counts when its statistic is strictly
/// greater than the observed one, or greater or equal when `inclusive` is set.
/// Monte Carlo draws use ChaCha8 seeded with `seed` on stream `stream`.
pub fn permutation_p_from_scores(
    sx: &[f64],
    sy: &[f64],
    mode: PValueMode,
    inclusive: bool,
    stream: u64,
) -> Result<f64, WeatError> {
    if sx.len() != sy.len() {
        return Err(WeatError::UnequalTargets { x: sx.len(), y: sy.len() });
    }
    let n = sx.len();
    if n == 0 {
        return Err(WeatError::UnderFilled { list: "x", found: 0, required: 1 });
    }
    let scores: Vec<f64> = sx.iter().chain(sy).copied().collect();
    let mut in_x = vec![false; 2 * n];
    in_x[..n].iter_mut().for_each(|b| *b = true);
    let observed = split_statistic(&scores, &in_x);
    let beats = |s: f64| if inclusive { s >= observed } else { s > observed };

    match mode {
        PValueMode::Exact => {
            let partitions = partition_count(n);
            if partitions > EXACT_BUDGET as u128 {
                return Err(WeatError::ExactBudget {
                    partitions,
                    budget: EXACT_BUDGET,
                });
            }
            let mut chosen: Vec<usize> = (0..n).collect();
            let mut hits = 0u64;
            let mut total = 0u64;
            loop {
                in_x.iter_mut().for_each(|b| *b = false);
                for &i in &chosen {
                    in_x[i] = true;
                }
                if beats(split_statistic(&scores, &in_x)) {
                    hits += 1;
                }
                total += 1;
                if !next_combination(&mut chosen, 2 * n) {
                    break;
                }
            }
            Ok(hits as f64 / total as f64)
        }
        PValueMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(WeatError::ZeroSamples);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let mut order: Vec<usize> = (0..2 * n).collect();
            let mut hits = 0u64;
            for _ in 0..samples {
                order.shuffle(&mut rng);
                in_x.iter_mut().for_each(|b| *b = false);
                for &i in &order[..n] {
                    in_x[i] = true;
                }
                if beats(split_statistic(&scores, &in_x)) {
                    hits += 1;
                }
            }
            Ok(hits as f64 / samples as f64)
        }
    }
}

/// Advances `c` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}
