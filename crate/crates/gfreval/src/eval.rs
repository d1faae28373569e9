//! Per-run scoring drivers behind the `eval`, `polarity`, and `baselines`
//! commands.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::baselines::{
    abr, d_ndcg, dsharp_ndcg, ece, ece_normalized, intent_recall, mean_attention, ndcg, ndkl,
    skew_extremes, AttentionParams,
};
use crate::divergence::DivergenceKind;
use crate::error::{Error, Result};
use crate::formats::ScoreRecord;
use crate::gfr::{delta_gf, gf, gfr, grade_prefix, membership_prefix, relevance_score, TopicScore};
use crate::model::{
    achieved_distribution, AttributeSet, Distribution, IntentSet, MembershipTable, Qrels, Run,
    TargetStore,
};
use crate::user_model::{DecayKind, UtilityKind, DEFAULT_IRBU_PHI, DEFAULT_RBP_PHI};

/// Options for GF/GFR scoring.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub cutoff: usize,
    /// Decay model; `None` selects the cascade when qrels are available and
    /// geometric decay otherwise.
    pub decay: Option<DecayKind>,
    pub rbp_phi: f64,
    pub irbu_phi: f64,
    /// Utility model for the combined GFR measure.
    pub gfr_utility: UtilityChoice,
    /// Divergence per attribute set; sets not listed use JSD.
    pub divergences: BTreeMap<String, DivergenceKind>,
    /// GFR weights `w_0..w_M`; `None` selects equal weights over the
    /// available components (with `w_0 = 0` when no qrels are given).
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtilityChoice {
    Err,
    Irbu,
}

impl Default for EvalOptions {
    fn default() -> EvalOptions {
        EvalOptions {
            cutoff: 10,
            decay: None,
            rbp_phi: DEFAULT_RBP_PHI,
            irbu_phi: DEFAULT_IRBU_PHI,
            gfr_utility: UtilityChoice::Err,
            divergences: BTreeMap::new(),
            weights: None,
        }
    }
}

impl EvalOptions {
    pub fn divergence_for(&self, set: &str) -> DivergenceKind {
        self.divergences
            .get(set)
            .copied()
            .unwrap_or(DivergenceKind::Jsd)
    }

    fn utility_kind(&self) -> UtilityKind {
        match self.gfr_utility {
            UtilityChoice::Err => UtilityKind::Err,
            UtilityChoice::Irbu => UtilityKind::Irbu { phi: self.irbu_phi },
        }
    }

    fn utility_tag(&self) -> &'static str {
        match self.gfr_utility {
            UtilityChoice::Err => "ERR",
            UtilityChoice::Irbu => "iRBU",
        }
    }

    /// Decay for one topic prefix, resolving the automatic choice.
    fn decay_weights(&self, grades: &[u32], have_qrels: bool) -> Result<Vec<f64>> {
        match (self.decay, have_qrels) {
            (Some(DecayKind::Err), false) => Err(Error::Eval(
                "ERR decay requires relevance judgments; pass --qrels or use RBP decay".into(),
            )),
            (Some(kind), _) => Ok(kind.weights(grades)),
            (None, true) => Ok(DecayKind::Err.weights(grades)),
            (None, false) => Ok(DecayKind::Rbp { phi: self.rbp_phi }.weights(grades)),
        }
    }

    /// Effective weight vector `w_0..w_M` for `n_sets` attribute sets.
    fn effective_weights(&self, n_sets: usize, have_qrels: bool) -> Result<Vec<f64>> {
        match &self.weights {
            Some(w) => {
                if w.len() != n_sets + 1 {
                    return Err(Error::BadWeights(format!(
                        "{} weights for 1 relevance component and {n_sets} attribute sets",
                        w.len()
                    )));
                }
                if !have_qrels && w[0] != 0.0 {
                    return Err(Error::BadWeights(
                        "relevance weight must be 0 when no qrels are provided".into(),
                    ));
                }
                Ok(w.clone())
            }
            None if have_qrels => Ok(vec![1.0 / (n_sets + 1) as f64; n_sets + 1]),
            None => {
                let mut w = vec![1.0 / n_sets as f64; n_sets + 1];
                w[0] = 0.0;
                Ok(w)
            }
        }
    }
}

fn gf_measure_name(kind: DivergenceKind, set: &str, cutoff: usize) -> String {
    format!("GF-{}-{}@{}", kind.as_str(), set, cutoff)
}

fn gfr_measure_name(opts: &EvalOptions, sets: &[Arc<AttributeSet>], weights: &[f64]) -> String {
    let mut parts = Vec::new();
    if weights[0] > 0.0 {
        parts.push(opts.utility_tag().to_string());
    }
    for (set, &w) in sets.iter().zip(&weights[1..]) {
        if w > 0.0 {
            parts.push(format!(
                "GF-{}-{}",
                opts.divergence_for(set.name()).as_str(),
                set.name()
            ));
        }
    }
    format!("{}@{}", parts.join("+"), opts.cutoff)
}

fn target_for<'a>(targets: &'a TargetStore, topic: &str, set: &str) -> Result<&'a Distribution> {
    targets.target_for(topic, set).ok_or_else(|| {
        Error::Eval(format!(
            "no target distribution for topic `{topic}`, attribute set `{set}`"
        ))
    })
}

/// Scores one run: GF per attribute set, ERR and iRBU when qrels are given,
/// and the combined GFR measure.
pub fn evaluate_run(
    run: &Run,
    sets: &[Arc<AttributeSet>],
    membership: &MembershipTable,
    targets: &TargetStore,
    qrels: Option<&Qrels>,
    opts: &EvalOptions,
) -> Result<Vec<ScoreRecord>> {
    if sets.is_empty() {
        return Err(Error::Eval("no attribute sets".into()));
    }
    let weights = opts.effective_weights(sets.len(), qrels.is_some())?;
    let gfr_name = gfr_measure_name(opts, sets, &weights);
    let mut records = Vec::new();
    for (topic, items) in run.topics() {
        let grades: Vec<u32> = match qrels {
            Some(q) => grade_prefix(items, q, topic, opts.cutoff),
            None => vec![0; items.len().min(opts.cutoff)],
        };
        let decay = opts.decay_weights(&grades, qrels.is_some())?;

        let mut scores = Vec::new();
        let mut gf_scores = Vec::with_capacity(sets.len());
        for set in sets {
            let kind = opts.divergence_for(set.name());
            let prefix = membership_prefix(items, set, membership, opts.cutoff);
            let pstar = target_for(targets, topic, set.name())?;
            let value = gf(&prefix, &decay, pstar, kind)?;
            gf_scores.push(value);
            scores.push(TopicScore::new(
                topic.clone(),
                gf_measure_name(kind, set.name(), opts.cutoff),
                value,
            )?);
        }
        let relevance = match qrels {
            Some(_) => {
                let err = relevance_score(UtilityKind::Err, &grades);
                let irbu = relevance_score(UtilityKind::Irbu { phi: opts.irbu_phi }, &grades);
                scores.push(TopicScore::new(
                    topic.clone(),
                    format!("ERR@{}", opts.cutoff),
                    err,
                )?);
                scores.push(TopicScore::new(
                    topic.clone(),
                    format!("iRBU@{}", opts.cutoff),
                    irbu,
                )?);
                Some(relevance_score(opts.utility_kind(), &grades))
            }
            None => None,
        };
        // A combined row with a single nonzero component would just repeat
        // that component under another name; emit it only for true mixtures.
        let components =
            usize::from(weights[0] > 0.0) + weights[1..].iter().filter(|w| **w > 0.0).count();
        if components >= 2 {
            let combined = gfr(&weights, relevance, &gf_scores)?;
            scores.push(TopicScore::new(topic.clone(), gfr_name.clone(), combined)?);
        }

        records.extend(
            scores
                .into_iter()
                .map(|s| ScoreRecord::new(run.tag(), s.topic, s.measure, s.value)),
        );
    }
    Ok(records)
}

/// Polarity scoring over a binary attribute set: one signed score per topic.
pub fn polarity_run(
    run: &Run,
    set: &Arc<AttributeSet>,
    membership: &MembershipTable,
    qrels: Option<&Qrels>,
    opts: &EvalOptions,
) -> Result<Vec<ScoreRecord>> {
    if !set.is_binary() {
        return Err(Error::BinaryRequired {
            set: set.name().to_string(),
            arity: set.arity(),
        });
    }
    let kind = opts.divergence_for(set.name());
    let measure = format!("DeltaGF-{}-{}@{}", kind.as_str(), set.name(), opts.cutoff);
    let mut records = Vec::new();
    for (topic, items) in run.topics() {
        let grades: Vec<u32> = match qrels {
            Some(q) => grade_prefix(items, q, topic, opts.cutoff),
            None => vec![0; items.len().min(opts.cutoff)],
        };
        let decay = opts.decay_weights(&grades, qrels.is_some())?;
        let prefix = membership_prefix(items, set, membership, opts.cutoff);
        let value = delta_gf(&prefix, &decay, kind)?;
        records.push(ScoreRecord::new(
            run.tag(),
            topic.clone(),
            measure.clone(),
            value,
        ));
    }
    Ok(records)
}

/// Options for the baseline measures.
#[derive(Debug, Clone)]
pub struct BaselineOptions {
    pub cutoff: usize,
    pub attention: AttentionParams,
    /// Smoothing for zero target cells in Skew and NDKL; 0 disables smoothing
    /// and makes those cases hard errors.
    pub epsilon: f64,
}

impl Default for BaselineOptions {
    fn default() -> BaselineOptions {
        BaselineOptions {
            cutoff: 10,
            attention: AttentionParams::default(),
            epsilon: 1e-6,
        }
    }
}

#[derive(Debug, Default)]
pub struct BaselineOutput {
    pub records: Vec<ScoreRecord>,
    /// Per-topic measures that were undefined and skipped.
    pub skipped: Vec<String>,
}

/// Scores one run with the baseline measures: Skew extremes, NDKL, mean
/// attention, ABR, ECE per attribute set; nDCG when qrels are given; intent
/// recall, D-nDCG, and D#-nDCG when intent data is given.
pub fn baselines_run(
    run: &Run,
    sets: &[Arc<AttributeSet>],
    membership: &MembershipTable,
    targets: &TargetStore,
    qrels: Option<&Qrels>,
    intents: Option<&IntentSet>,
    opts: &BaselineOptions,
) -> Result<BaselineOutput> {
    let mut out = BaselineOutput::default();
    let k = opts.cutoff;
    for (topic, items) in run.topics() {
        let mut push = |topic: &str, measure: String, value: f64| {
            out.records
                .push(ScoreRecord::new(run.tag(), topic, measure, value));
        };
        for set in sets {
            let prefix = membership_prefix(items, set, membership, k);
            let achieved = achieved_distribution(&prefix)?;
            let pstar = target_for(targets, topic, set.name())?;
            let (lo, hi) = skew_extremes(&achieved, pstar, opts.epsilon)?;
            push(topic, format!("SkewMin-{}@{k}", set.name()), lo);
            push(topic, format!("SkewMax-{}@{k}", set.name()), hi);
            push(
                topic,
                format!("NDKL-{}@{k}", set.name()),
                ndkl(&prefix, pstar, opts.epsilon)?,
            );
            for value in set.values() {
                match mean_attention(&prefix, value, opts.attention) {
                    Ok(ma) => push(topic, format!("MA-{}={}@{k}", set.name(), value), ma),
                    Err(Error::AttentionUndefined(_)) => out.skipped.push(format!(
                        "topic `{topic}`: MA undefined for `{}={}`",
                        set.name(),
                        value
                    )),
                    Err(e) => return Err(e),
                }
            }
            push(
                topic,
                format!("ABR-{}@{k}", set.name()),
                abr(&prefix, opts.attention)?,
            );
            let raw = ece(&prefix, opts.attention)?;
            let norm = ece_normalized(&prefix, opts.attention)?;
            for ((value, r), n) in set.values().iter().zip(&raw).zip(&norm) {
                push(topic, format!("ECE-{}={}@{k}", set.name(), value), *r);
                push(topic, format!("ECEN-{}={}@{k}", set.name(), value), *n);
            }
        }
        if let Some(q) = qrels {
            let grades = grade_prefix(items, q, topic, k);
            let pool: Vec<u32> = q
                .judged(topic)
                .map(|m| m.values().copied().collect())
                .unwrap_or_default();
            match ndcg(&grades, &pool, k) {
                Some(v) => push(topic, format!("nDCG@{k}"), v),
                None => out.skipped.push(format!(
                    "topic `{topic}`: nDCG undefined (no relevant items)"
                )),
            }
        }
        if let Some(intent_set) = intents {
            match intent_set.topic(topic) {
                Some(ti) => {
                    let item_ids: Vec<String> =
                        items.iter().take(k).map(|r| r.item.clone()).collect();
                    push(
                        topic,
                        format!("IntentRec@{k}"),
                        intent_recall(&item_ids, ti, k),
                    );
                    match d_ndcg(&item_ids, ti, k) {
                        Some(v) => {
                            push(topic, format!("D-nDCG@{k}"), v);
                            let sharp = dsharp_ndcg(&item_ids, ti, k).expect("D-nDCG defined");
                            push(topic, format!("D#-nDCG@{k}"), sharp);
                        }
                        None => out.skipped.push(format!(
                            "topic `{topic}`: D-nDCG undefined (no positive global gain)"
                        )),
                    }
                }
                None => out.skipped.push(format!("topic `{topic}`: no intent data")),
            }
        }
    }
    Ok(out)
}
