//! Prior-art measures used for comparison: Skew and NDKL, mean attention and
//! the attention bias ratio, expected cumulative exposure, nDCG, and the
//! intent-aware family (global gain, intent recall, D-nDCG, D#-nDCG).

use crate::divergence::kld_kernel;
use crate::error::{Error, Result};
use crate::model::{exponential_gain, Distribution, TopicIntents};

/// Parameters of the geometric attention curve `100 * p * (1-p)^(k-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttentionParams {
    p: f64,
}

impl AttentionParams {
    pub fn new(p: f64) -> Result<AttentionParams> {
        if p > 0.0 && p < 1.0 {
            Ok(AttentionParams { p })
        } else {
            Err(Error::Eval(format!(
                "attention parameter {p} outside (0, 1)"
            )))
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Attention at 1-based rank `k`.
    pub fn attention_at(&self, k: usize) -> f64 {
        100.0 * self.p * (1.0 - self.p).powi(k as i32 - 1)
    }
}

impl Default for AttentionParams {
    fn default() -> AttentionParams {
        AttentionParams { p: 0.15 }
    }
}

/// Skew of one attribute value: the natural log of achieved over target
/// probability. A zero target cell is replaced by `epsilon` when it is
/// positive, and is an error otherwise.
pub fn skew(
    achieved: &Distribution,
    pstar: &Distribution,
    value: &str,
    epsilon: f64,
) -> Result<f64> {
    achieved.check_same_set(pstar)?;
    let i = achieved
        .set()
        .index_of(value)
        .ok_or_else(|| Error::UnknownValue {
            set: achieved.set().name().to_string(),
            value: value.to_string(),
        })?;
    skew_at(achieved, pstar, i, epsilon)
}

fn skew_at(achieved: &Distribution, pstar: &Distribution, i: usize, epsilon: f64) -> Result<f64> {
    let gold = if pstar.probs()[i] > 0.0 {
        pstar.probs()[i]
    } else if epsilon > 0.0 {
        epsilon
    } else {
        return Err(Error::ZeroTargetCell {
            value: achieved.set().values()[i].clone(),
            achieved: achieved.probs()[i],
        });
    };
    // ln(0 / gold) is -inf; that is the mathematical value, not an error.
    Ok((achieved.probs()[i] / gold).ln())
}

/// Minimum and maximum skew over all attribute values.
pub fn skew_extremes(
    achieved: &Distribution,
    pstar: &Distribution,
    epsilon: f64,
) -> Result<(f64, f64)> {
    achieved.check_same_set(pstar)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..achieved.arity() {
        let s = skew_at(achieved, pstar, i, epsilon)?;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok((lo, hi))
}

/// Normalised discounted KL divergence over ranking prefixes: the KLD of each
/// prefix distribution against the target, discounted by `1/log2(k+1)` and
/// normalised by the discount mass. Zero iff every prefix matches the target;
/// unbounded above.
pub fn ndkl(memberships: &[Distribution], pstar: &Distribution, epsilon: f64) -> Result<f64> {
    let first = memberships.first().ok_or(Error::EmptyPrefix)?;
    first.check_same_set(pstar)?;
    let n = pstar.arity();
    let mut running = vec![0.0; n];
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, m) in memberships.iter().enumerate() {
        m.check_same_set(pstar)?;
        for (r, &g) in running.iter_mut().zip(m.probs()) {
            *r += g;
        }
        let inv = 1.0 / (k + 1) as f64;
        let achieved: Vec<f64> = running.iter().map(|r| r * inv).collect();
        let d = 1.0 / ((k + 2) as f64).log2();
        num += d * kld_kernel(&achieved, pstar.probs(), epsilon, |i| {
            pstar.set().values()[i].clone()
        })?;
        den += d;
    }
    Ok(num / den)
}

/// Mean attention of one attribute value: attention weighted by membership
/// mass, averaged over that mass. Undefined when the value never occurs.
pub fn mean_attention(
    memberships: &[Distribution],
    value: &str,
    params: AttentionParams,
) -> Result<f64> {
    let first = memberships.first().ok_or(Error::EmptyPrefix)?;
    let i = first
        .set()
        .index_of(value)
        .ok_or_else(|| Error::UnknownValue {
            set: first.set().name().to_string(),
            value: value.to_string(),
        })?;
    match mean_attention_at(memberships, i, params) {
        Some(ma) => Ok(ma),
        None => Err(Error::AttentionUndefined(value.to_string())),
    }
}

fn mean_attention_at(
    memberships: &[Distribution],
    i: usize,
    params: AttentionParams,
) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, m) in memberships.iter().enumerate() {
        let g = m.probs()[i];
        num += g * params.attention_at(k + 1);
        den += g;
    }
    (den > 0.0).then(|| num / den)
}

/// Attention bias ratio: minimum over maximum mean attention across all
/// attribute values. A value with no mass anywhere counts as mean attention
/// zero, so the ratio drops to 0 rather than erroring.
pub fn abr(memberships: &[Distribution], params: AttentionParams) -> Result<f64> {
    let first = memberships.first().ok_or(Error::EmptyPrefix)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..first.arity() {
        let ma = mean_attention_at(memberships, i, params).unwrap_or(0.0);
        lo = lo.min(ma);
        hi = hi.max(ma);
    }
    debug_assert!(
        hi > 0.0,
        "memberships sum to 1 per rank, so some value has mass"
    );
    Ok(lo / hi)
}

/// Expected cumulative exposure: per attribute value, the attention-weighted
/// sum of membership mass over ranks. The raw vector sums to the total
/// attention mass of the list.
pub fn ece(memberships: &[Distribution], params: AttentionParams) -> Result<Vec<f64>> {
    let first = memberships.first().ok_or(Error::EmptyPrefix)?;
    let mut out = vec![0.0; first.arity()];
    for (k, m) in memberships.iter().enumerate() {
        let att = params.attention_at(k + 1);
        for (e, &g) in out.iter_mut().zip(m.probs()) {
            *e += g * att;
        }
    }
    Ok(out)
}

/// ECE divided by its sum, so it reads as a probability distribution.
pub fn ece_normalized(memberships: &[Distribution], params: AttentionParams) -> Result<Vec<f64>> {
    let raw = ece(memberships, params)?;
    let sum: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|e| e / sum).collect())
}

/// DCG over arbitrary non-negative gain values, discounting every rank
/// (including rank 1) by `1/log2(r+1)`.
fn dcg(gains: &[f64], k: usize) -> f64 {
    gains
        .iter()
        .take(k)
        .enumerate()
        .map(|(r, g)| g / ((r + 2) as f64).log2())
        .sum()
}

/// nDCG over raw gain values; the ideal ranking sorts the pool of gains
/// descending. Returns `None` when the ideal DCG is zero (nothing relevant
/// is known for the topic).
pub fn ndcg_over_gains(gains: &[f64], pool: &[f64], k: usize) -> Option<f64> {
    let mut ideal = pool.to_vec();
    ideal.sort_by(|a, b| b.partial_cmp(a).expect("gains are finite"));
    let idcg = dcg(&ideal, k);
    (idcg > 0.0).then(|| dcg(gains, k) / idcg)
}

/// Graded nDCG with exponential gains `2^g - 1`. `pool` holds the grades of
/// all judged items for the topic.
pub fn ndcg(grades: &[u32], pool: &[u32], k: usize) -> Option<f64> {
    let gains: Vec<f64> = grades.iter().map(|&g| exponential_gain(g)).collect();
    let pool: Vec<f64> = pool.iter().map(|&g| exponential_gain(g)).collect();
    ndcg_over_gains(&gains, &pool, k)
}

/// Global gain of an item: intent probabilities dotted with per-intent gains.
/// Items absent from the intent data have gain 0.
pub fn global_gain(intents: &TopicIntents, item: &str) -> f64 {
    match intents.gains(item) {
        Some(gains) => intents.probs().iter().zip(gains).map(|(p, g)| p * g).sum(),
        None => 0.0,
    }
}

/// Fraction of intents covered by at least one positive-gain item in the
/// top-k of the list.
pub fn intent_recall(items: &[String], intents: &TopicIntents, k: usize) -> f64 {
    let n = intents.intents().len();
    let mut covered = vec![false; n];
    for item in items.iter().take(k) {
        if let Some(gains) = intents.gains(item) {
            for (c, &g) in covered.iter_mut().zip(gains) {
                *c = *c || g > 0.0;
            }
        }
    }
    covered.iter().filter(|c| **c).count() as f64 / n as f64
}

/// D-nDCG: nDCG computed over global gains, with the ideal list drawn from
/// all items known to the intent data.
pub fn d_ndcg(items: &[String], intents: &TopicIntents, k: usize) -> Option<f64> {
    let gains: Vec<f64> = items.iter().map(|i| global_gain(intents, i)).collect();
    let pool: Vec<f64> = intents
        .items()
        .map(|(item, _)| global_gain(intents, item))
        .collect();
    ndcg_over_gains(&gains, &pool, k)
}

/// D#-nDCG: the mean of intent recall and D-nDCG.
pub fn dsharp_ndcg(items: &[String], intents: &TopicIntents, k: usize) -> Option<f64> {
    d_ndcg(items, intents, k).map(|d| (intent_recall(items, intents, k) + d) / 2.0)
}
