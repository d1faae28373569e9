//! Group-fairness and relevance measures: GF per attribute set, the GFR
//! combination, its integrated single-pass form, binary polarity, and
//! intersectional aggregation.

use std::sync::Arc;

use crate::divergence::{divergence_kernel, DivergenceKind};
use crate::error::{Error, Result};
use crate::model::{Distribution, MembershipTable, RankedItem};
use crate::user_model::{err_decay_sequence, utility, UtilityKind};

/// Weight vectors must sum to 1 within this tolerance.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// One per-topic measure value in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct TopicScore {
    pub topic: String,
    pub measure: String,
    pub value: f64,
}

impl TopicScore {
    pub fn new(
        topic: impl Into<String>,
        measure: impl Into<String>,
        value: f64,
    ) -> Result<TopicScore> {
        if !(-1e-9..=1.0 + 1e-9).contains(&value) {
            return Err(Error::Eval(format!("score {value} outside [0, 1]")));
        }
        Ok(TopicScore {
            topic: topic.into(),
            measure: measure.into(),
            value: value.clamp(0.0, 1.0),
        })
    }
}

fn check_list(memberships: &[Distribution], decay: &[f64], pstar: &Distribution) -> Result<()> {
    if memberships.is_empty() {
        return Err(Error::EmptyPrefix);
    }
    if memberships.len() != decay.len() {
        return Err(Error::Eval(format!(
            "{} membership vectors but {} decay weights",
            memberships.len(),
            decay.len()
        )));
    }
    for m in memberships {
        m.check_same_set(pstar)?;
    }
    Ok(())
}

/// Group fairness of a ranked prefix: the decay-weighted sum over ranks of
/// the similarity between the achieved distribution at that rank and the
/// target. Membership and decay slices are aligned by rank and already
/// truncated to the evaluation cutoff.
pub fn gf(
    memberships: &[Distribution],
    decay: &[f64],
    pstar: &Distribution,
    kind: DivergenceKind,
) -> Result<f64> {
    check_list(memberships, decay, pstar)?;
    if matches!(kind, DivergenceKind::Nmd | DivergenceKind::Rnod)
        && !pstar.set().supports_ordinal_divergence()
    {
        return Err(Error::OrdinalRequired {
            measure: kind.as_str(),
            set: pstar.set().name().to_string(),
            arity: pstar.set().arity(),
        });
    }
    let n = pstar.arity();
    let mut running = vec![0.0; n];
    let mut achieved = vec![0.0; n];
    let mut total = 0.0;
    for (k, (m, &w)) in memberships.iter().zip(decay).enumerate() {
        for (r, &g) in running.iter_mut().zip(m.probs()) {
            *r += g;
        }
        let inv = 1.0 / (k + 1) as f64;
        for (a, &r) in achieved.iter_mut().zip(&running) {
            *a = r * inv;
        }
        total += w * (1.0 - divergence_kernel(kind, &achieved, pstar.probs()));
    }
    Ok(total)
}

/// Relevance score under the ERR cascade decay: ERR itself for
/// [`UtilityKind::Err`], iRBU for [`UtilityKind::Irbu`].
pub fn relevance_score(kind: UtilityKind, grades: &[u32]) -> f64 {
    err_decay_sequence(grades)
        .iter()
        .enumerate()
        .map(|(k, w)| w * utility(kind, k + 1))
        .sum()
}

fn check_weights(weights: &[f64], components: usize) -> Result<()> {
    if weights.len() != components {
        return Err(Error::BadWeights(format!(
            "{} weights for {} components",
            weights.len(),
            components
        )));
    }
    if weights.iter().any(|w| *w < 0.0) {
        return Err(Error::BadWeights("negative weight".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::BadWeights(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

/// Weighted combination `w_0 * relevance + sum_m w_m * gf_m`. `relevance`
/// may be absent only when `w_0 = 0`.
pub fn gfr(weights: &[f64], relevance: Option<f64>, gf_scores: &[f64]) -> Result<f64> {
    check_weights(weights, gf_scores.len() + 1)?;
    let rel = match relevance {
        Some(r) => r,
        None if weights[0] == 0.0 => 0.0,
        None => {
            return Err(Error::BadWeights(
                "relevance weight is positive but no relevance score is available".into(),
            ))
        }
    };
    Ok(weights[0] * rel
        + weights[1..]
            .iter()
            .zip(gf_scores)
            .map(|(w, s)| w * s)
            .sum::<f64>())
}

/// Single-pass GFR: `sum_k Decay@k (w_0 Utility@k + sum_m w_m DistrSim^m@k)`.
/// Equals the composition of [`relevance_score`] and [`gf`] under the same
/// cascade decay and utility kind.
pub fn gfr_integrated(
    weights: &[f64],
    grades: &[u32],
    memberships: &[Vec<Distribution>],
    targets: &[Distribution],
    kinds: &[DivergenceKind],
    utility_kind: UtilityKind,
) -> Result<f64> {
    check_weights(weights, memberships.len() + 1)?;
    if memberships.len() != targets.len() || memberships.len() != kinds.len() {
        return Err(Error::Eval(
            "memberships, targets, and divergence kinds must align per attribute set".into(),
        ));
    }
    if grades.is_empty() {
        return Err(Error::EmptyPrefix);
    }
    for ((ms, t), &kind) in memberships.iter().zip(targets).zip(kinds) {
        if ms.len() != grades.len() {
            return Err(Error::Eval(
                "membership list length differs from grade list length".into(),
            ));
        }
        for m in ms {
            m.check_same_set(t)?;
        }
        if matches!(kind, DivergenceKind::Nmd | DivergenceKind::Rnod)
            && !t.set().supports_ordinal_divergence()
        {
            return Err(Error::OrdinalRequired {
                measure: kind.as_str(),
                set: t.set().name().to_string(),
                arity: t.set().arity(),
            });
        }
    }

    let decay = err_decay_sequence(grades);
    let mut running: Vec<Vec<f64>> = targets.iter().map(|t| vec![0.0; t.arity()]).collect();
    let mut total = 0.0;
    for k in 0..grades.len() {
        let inv = 1.0 / (k + 1) as f64;
        let mut inner = weights[0] * utility(utility_kind, k + 1);
        for (m, target) in targets.iter().enumerate() {
            for (r, &g) in running[m].iter_mut().zip(memberships[m][k].probs()) {
                *r += g;
            }
            let achieved: Vec<f64> = running[m].iter().map(|r| r * inv).collect();
            inner +=
                weights[m + 1] * (1.0 - divergence_kernel(kinds[m], &achieved, target.probs()));
        }
        total += decay[k] * inner;
    }
    Ok(total)
}

/// Polarity of a ranked list over a binary attribute set: GF under a 100%
/// target on the first value minus GF under a 100% target on the second.
/// Positive values lean towards the first value.
pub fn delta_gf(memberships: &[Distribution], decay: &[f64], kind: DivergenceKind) -> Result<f64> {
    let first = memberships.first().ok_or(Error::EmptyPrefix)?;
    let set = first.set();
    if !set.is_binary() {
        return Err(Error::BinaryRequired {
            set: set.name().to_string(),
            arity: set.arity(),
        });
    }
    let pro = Distribution::one_hot(Arc::clone(set), 0)?;
    let con = Distribution::one_hot(Arc::clone(set), 1)?;
    Ok(gf(memberships, decay, &pro, kind)? - gf(memberships, decay, &con, kind)?)
}

/// Weighted average of per-attribute-set GF scores: the GFR combination with
/// the relevance weight fixed to zero.
pub fn intersectional_score(gf_scores: &[f64], weights: &[f64]) -> Result<f64> {
    if gf_scores.len() < 2 {
        return Err(Error::Eval(format!(
            "intersectional aggregation needs at least 2 attribute sets, got {}",
            gf_scores.len()
        )));
    }
    let mut full = Vec::with_capacity(weights.len() + 1);
    full.push(0.0);
    full.extend_from_slice(weights);
    gfr(&full, None, gf_scores)
}

/// The top-`cutoff` prefix of one topic list as membership vectors for a set.
pub fn membership_prefix(
    items: &[RankedItem],
    set: &Arc<crate::model::AttributeSet>,
    table: &MembershipTable,
    cutoff: usize,
) -> Vec<Distribution> {
    items
        .iter()
        .take(cutoff)
        .map(|r| table.resolve(&r.item, set))
        .collect()
}

/// Grades of the top-`cutoff` items of one topic list.
pub fn grade_prefix(
    items: &[RankedItem],
    qrels: &crate::model::Qrels,
    topic: &str,
    cutoff: usize,
) -> Vec<u32> {
    items
        .iter()
        .take(cutoff)
        .map(|r| qrels.grade(topic, &r.item))
        .collect()
}
