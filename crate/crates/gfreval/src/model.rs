//! Domain types: attribute sets, distributions, memberships, runs, judgments.
//!
//! All types are immutable after construction and safe to share across threads.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Probability sums are accepted within this tolerance at ingest, then
/// renormalized so downstream code always sees an exact simplex point.
pub const PROB_SUM_TOLERANCE: f64 = 1e-6;

/// Relevance grades are capped here before computing `2^g`.
pub const MAX_GRADE: u32 = 15;

/// Measurement scale of an attribute set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Nominal,
    Ordinal,
}

impl Scale {
    pub fn parse(s: &str) -> Option<Scale> {
        match s {
            "nominal" => Some(Scale::Nominal),
            "ordinal" => Some(Scale::Ordinal),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Scale::Nominal => "nominal",
            Scale::Ordinal => "ordinal",
        }
    }
}

/// A named set of attribute values. For ordinal sets, the value order is the
/// ordinal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSet {
    name: String,
    values: Vec<String>,
    scale: Scale,
}

impl AttributeSet {
    pub fn new(
        name: impl Into<String>,
        values: Vec<String>,
        scale: Scale,
    ) -> Result<Arc<AttributeSet>> {
        let name = name.into();
        if values.len() < 2 {
            return Err(Error::InvalidAttributeSet {
                name,
                reason: format!("needs at least 2 values, got {}", values.len()),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::InvalidAttributeSet {
                    name,
                    reason: format!("duplicate value `{v}`"),
                });
            }
        }
        Ok(Arc::new(AttributeSet {
            name,
            values,
            scale,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn arity(&self) -> usize {
        self.values.len()
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn is_binary(&self) -> bool {
        self.values.len() == 2
    }

    /// Ordinal divergences (NMD, RNOD) are legal for ordinal sets and for
    /// binary sets, where the nominal/ordinal distinction vanishes.
    pub fn supports_ordinal_divergence(&self) -> bool {
        self.scale == Scale::Ordinal || self.is_binary()
    }

    pub fn index_of(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }
}

/// Look up an attribute set by name in an ordered collection.
pub fn set_by_name<'a>(sets: &'a [Arc<AttributeSet>], name: &str) -> Option<&'a Arc<AttributeSet>> {
    sets.iter().find(|s| s.name() == name)
}

/// A probability mass function over one attribute set's values.
#[derive(Debug, Clone)]
pub struct Distribution {
    set: Arc<AttributeSet>,
    probs: Vec<f64>,
}

impl Distribution {
    /// Builds a distribution, checking each probability is in [0,1] and the
    /// sum is 1 within [`PROB_SUM_TOLERANCE`], then renormalizing exactly.
    pub fn new(set: Arc<AttributeSet>, probs: Vec<f64>) -> Result<Distribution> {
        if probs.len() != set.arity() {
            return Err(Error::InvalidDistribution {
                set: set.name().to_string(),
                reason: format!("{} probabilities for {} values", probs.len(), set.arity()),
            });
        }
        for &p in &probs {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::InvalidDistribution {
                    set: set.name().to_string(),
                    reason: format!("probability {p} outside [0, 1]"),
                });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution {
                set: set.name().to_string(),
                reason: format!("probabilities sum to {sum}, not 1"),
            });
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Distribution { set, probs })
    }

    /// Internal constructor for vectors already known to lie on the simplex.
    pub(crate) fn from_normalized(set: Arc<AttributeSet>, probs: Vec<f64>) -> Distribution {
        debug_assert_eq!(probs.len(), set.arity());
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Distribution { set, probs }
    }

    pub fn uniform(set: Arc<AttributeSet>) -> Distribution {
        let n = set.arity();
        Distribution {
            set,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn one_hot(set: Arc<AttributeSet>, index: usize) -> Result<Distribution> {
        if index >= set.arity() {
            return Err(Error::InvalidDistribution {
                set: set.name().to_string(),
                reason: format!("one-hot index {index} out of range"),
            });
        }
        let mut probs = vec![0.0; set.arity()];
        probs[index] = 1.0;
        Ok(Distribution { set, probs })
    }

    pub fn set(&self) -> &Arc<AttributeSet> {
        &self.set
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn arity(&self) -> usize {
        self.probs.len()
    }

    pub fn same_set(&self, other: &Distribution) -> bool {
        self.set.name() == other.set.name() && self.set.arity() == other.set.arity()
    }

    pub(crate) fn check_same_set(&self, other: &Distribution) -> Result<()> {
        if self.same_set(other) {
            Ok(())
        } else {
            Err(Error::AttributeSetMismatch {
                left: self.set.name().to_string(),
                right: other.set.name().to_string(),
            })
        }
    }
}

/// Group membership distributions per (item, attribute set). Items without an
/// entry resolve to the uniform distribution.
#[derive(Debug, Default, Clone)]
pub struct MembershipTable {
    entries: BTreeMap<(String, String), Distribution>,
}

impl MembershipTable {
    pub fn new() -> MembershipTable {
        MembershipTable::default()
    }

    pub fn insert(&mut self, item: impl Into<String>, dist: Distribution) {
        let key = (item.into(), dist.set().name().to_string());
        self.entries.insert(key, dist);
    }

    pub fn get(&self, item: &str, set_name: &str) -> Option<&Distribution> {
        self.entries.get(&(item.to_string(), set_name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &Distribution)> {
        self.entries.iter()
    }

    /// Stored membership for the item, or the uniform distribution when the
    /// item carries no attribute value for this set.
    pub fn resolve(&self, item: &str, set: &Arc<AttributeSet>) -> Distribution {
        match self.get(item, set.name()) {
            Some(d) => d.clone(),
            None => Distribution::uniform(Arc::clone(set)),
        }
    }
}

/// See [`MembershipTable::resolve`].
pub fn resolve_membership(
    item: &str,
    set: &Arc<AttributeSet>,
    table: &MembershipTable,
) -> Distribution {
    table.resolve(item, set)
}

/// Mean of the per-rank membership vectors over a ranking prefix.
pub fn achieved_distribution(memberships: &[Distribution]) -> Result<Distribution> {
    let first = memberships.first().ok_or(Error::EmptyPrefix)?;
    let mut acc = vec![0.0; first.arity()];
    for m in memberships {
        first.check_same_set(m)?;
        for (a, &p) in acc.iter_mut().zip(m.probs()) {
            *a += p;
        }
    }
    let inv = 1.0 / memberships.len() as f64;
    for a in &mut acc {
        *a *= inv;
    }
    Ok(Distribution::from_normalized(Arc::clone(first.set()), acc))
}

/// Converts a bias score in [-1, 1] over a binary attribute set into a
/// membership distribution: the first value gets (1+b)/2.
pub fn membership_from_bias(set: &Arc<AttributeSet>, b: f64) -> Result<Distribution> {
    if !set.is_binary() {
        return Err(Error::BinaryRequired {
            set: set.name().to_string(),
            arity: set.arity(),
        });
    }
    if !(-1.0..=1.0).contains(&b) || !b.is_finite() {
        return Err(Error::BiasOutOfRange(b));
    }
    let p1 = (1.0 + b) / 2.0;
    Ok(Distribution::from_normalized(
        Arc::clone(set),
        vec![p1, 1.0 - p1],
    ))
}

/// Derives soft membership from per-intent gain values by normalizing them.
/// All-zero gains fall back to the uniform distribution, mirroring the
/// fallback for items without any attribute value.
pub fn membership_from_intent_gains(
    set: &Arc<AttributeSet>,
    gains: &[f64],
) -> Result<Distribution> {
    if gains.len() != set.arity() {
        return Err(Error::InvalidDistribution {
            set: set.name().to_string(),
            reason: format!("{} gains for {} values", gains.len(), set.arity()),
        });
    }
    for &g in gains {
        if g < 0.0 || !g.is_finite() {
            return Err(Error::NegativeGain(g));
        }
    }
    let sum: f64 = gains.iter().sum();
    if sum == 0.0 {
        return Ok(Distribution::uniform(Arc::clone(set)));
    }
    Ok(Distribution::from_normalized(
        Arc::clone(set),
        gains.iter().map(|g| g / sum).collect(),
    ))
}

/// Exponential gain of a relevance grade: `2^g - 1`.
pub fn exponential_gain(grade: u32) -> f64 {
    let g = grade.min(MAX_GRADE);
    ((1u64 << g) - 1) as f64
}

/// One item of a ranked list.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedItem {
    pub item: String,
    pub score: f64,
}

/// A system's ranked lists, one per topic. Lists are ordered by descending
/// score with ties broken by ascending item id; the order is recomputed from
/// the scores at construction.
#[derive(Debug, Clone)]
pub struct Run {
    tag: String,
    topics: BTreeMap<String, Vec<RankedItem>>,
}

impl Run {
    pub fn from_entries(
        tag: impl Into<String>,
        entries: Vec<(String, String, f64)>,
    ) -> Result<Run> {
        let tag = tag.into();
        let mut topics: BTreeMap<String, Vec<RankedItem>> = BTreeMap::new();
        for (topic, item, score) in entries {
            if !score.is_finite() {
                return Err(Error::InvalidRun {
                    tag,
                    reason: format!("non-finite score for item `{item}` in topic `{topic}`"),
                });
            }
            let list = topics.entry(topic.clone()).or_default();
            if list.iter().any(|r| r.item == item) {
                return Err(Error::InvalidRun {
                    tag,
                    reason: format!("duplicate item `{item}` in topic `{topic}`"),
                });
            }
            list.push(RankedItem { item, score });
        }
        for list in topics.values_mut() {
            list.sort_by(|a, b| {
                b.score
                    .partial_cmp(&a.score)
                    .expect("scores are finite")
                    .then_with(|| a.item.cmp(&b.item))
            });
        }
        Ok(Run { tag, topics })
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn topics(&self) -> impl Iterator<Item = (&String, &Vec<RankedItem>)> {
        self.topics.iter()
    }

    pub fn topic(&self, topic: &str) -> Option<&[RankedItem]> {
        self.topics.get(topic).map(|v| v.as_slice())
    }

    pub fn topic_count(&self) -> usize {
        self.topics.len()
    }
}

/// Graded relevance judgments. Unjudged items implicitly have grade 0;
/// negative input grades are mapped to 0 at ingest.
#[derive(Debug, Default, Clone)]
pub struct Qrels {
    grades: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Qrels {
        Qrels::default()
    }

    pub fn insert(&mut self, topic: impl Into<String>, item: impl Into<String>, grade: i64) {
        let grade = grade.clamp(0, u32::MAX as i64) as u32;
        self.grades
            .entry(topic.into())
            .or_default()
            .insert(item.into(), grade);
    }

    pub fn grade(&self, topic: &str, item: &str) -> u32 {
        self.grades
            .get(topic)
            .and_then(|m| m.get(item))
            .copied()
            .unwrap_or(0)
    }

    pub fn judged(&self, topic: &str) -> Option<&BTreeMap<String, u32>> {
        self.grades.get(topic)
    }

    pub fn topics(&self) -> impl Iterator<Item = (&String, &BTreeMap<String, u32>)> {
        self.grades.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }
}

/// Intents behind one topic with their probabilities and per-intent gain
/// values per item.
#[derive(Debug, Clone)]
pub struct TopicIntents {
    intents: Vec<String>,
    probs: Vec<f64>,
    gains: BTreeMap<String, Vec<f64>>,
}

impl TopicIntents {
    pub fn new(
        intents: Vec<String>,
        probs: Vec<f64>,
        gains: BTreeMap<String, Vec<f64>>,
    ) -> Result<TopicIntents> {
        if intents.is_empty() || intents.len() != probs.len() {
            return Err(Error::Eval(format!(
                "{} intents with {} probabilities",
                intents.len(),
                probs.len()
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE || probs.iter().any(|p| *p < 0.0) {
            return Err(Error::Eval(format!(
                "intent probabilities sum to {sum}, not 1"
            )));
        }
        let probs: Vec<f64> = probs.into_iter().map(|p| p / sum).collect();
        for gs in gains.values() {
            if gs.len() != intents.len() {
                return Err(Error::Eval("per-intent gain vector length mismatch".into()));
            }
            for &g in gs {
                if g < 0.0 || !g.is_finite() {
                    return Err(Error::NegativeGain(g));
                }
            }
        }
        Ok(TopicIntents {
            intents,
            probs,
            gains,
        })
    }

    pub fn intents(&self) -> &[String] {
        &self.intents
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn gains(&self, item: &str) -> Option<&[f64]> {
        self.gains.get(item).map(|v| v.as_slice())
    }

    pub fn items(&self) -> impl Iterator<Item = (&String, &Vec<f64>)> {
        self.gains.iter()
    }
}

/// Per-topic intent data.
#[derive(Debug, Default, Clone)]
pub struct IntentSet {
    topics: BTreeMap<String, TopicIntents>,
}

impl IntentSet {
    pub fn new() -> IntentSet {
        IntentSet::default()
    }

    pub fn insert(&mut self, topic: impl Into<String>, intents: TopicIntents) {
        self.topics.insert(topic.into(), intents);
    }

    pub fn topic(&self, topic: &str) -> Option<&TopicIntents> {
        self.topics.get(topic)
    }

    pub fn topics(&self) -> impl Iterator<Item = (&String, &TopicIntents)> {
        self.topics.iter()
    }

    /// Derives per-topic judgments from per-intent data when the gain values
    /// are integer grades: an item's topic grade is its maximum per-intent
    /// grade, rounded down. This is an approximation for collections that
    /// ship only per-intent assessments.
    pub fn derived_qrels(&self) -> Qrels {
        let mut qrels = Qrels::new();
        for (topic, ti) in &self.topics {
            for (item, gains) in ti.items() {
                let best = gains.iter().fold(0.0f64, |a, &b| a.max(b));
                qrels.insert(topic.clone(), item.clone(), best.floor() as i64);
            }
        }
        qrels
    }
}

/// Per (topic, item) bias scores in [-1, 1].
#[derive(Debug, Default, Clone)]
pub struct BiasScores {
    scores: BTreeMap<(String, String), f64>,
}

impl BiasScores {
    pub fn new() -> BiasScores {
        BiasScores::default()
    }

    pub fn insert(
        &mut self,
        topic: impl Into<String>,
        item: impl Into<String>,
        b: f64,
    ) -> Result<()> {
        if !(-1.0..=1.0).contains(&b) || !b.is_finite() {
            return Err(Error::BiasOutOfRange(b));
        }
        self.scores.insert((topic.into(), item.into()), b);
        Ok(())
    }

    pub fn get(&self, topic: &str, item: &str) -> Option<f64> {
        self.scores
            .get(&(topic.to_string(), item.to_string()))
            .copied()
    }
}

/// Target (gold) distributions, global per attribute set with per-topic
/// overrides.
#[derive(Debug, Default, Clone)]
pub struct TargetStore {
    global: BTreeMap<String, Distribution>,
    per_topic: BTreeMap<(String, String), Distribution>,
}

impl TargetStore {
    pub fn new() -> TargetStore {
        TargetStore::default()
    }

    pub fn insert_global(&mut self, dist: Distribution) {
        self.global.insert(dist.set().name().to_string(), dist);
    }

    pub fn insert_topic(&mut self, topic: impl Into<String>, dist: Distribution) {
        let key = (topic.into(), dist.set().name().to_string());
        self.per_topic.insert(key, dist);
    }

    /// Per-topic targets override global ones.
    pub fn target_for(&self, topic: &str, set_name: &str) -> Option<&Distribution> {
        self.per_topic
            .get(&(topic.to_string(), set_name.to_string()))
            .or_else(|| self.global.get(set_name))
    }

    pub fn globals(&self) -> impl Iterator<Item = (&String, &Distribution)> {
        self.global.iter()
    }

    pub fn per_topic(&self) -> impl Iterator<Item = (&(String, String), &Distribution)> {
        self.per_topic.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set4() -> Arc<AttributeSet> {
        AttributeSet::new(
            "g4",
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            Scale::Ordinal,
        )
        .unwrap()
    }

    fn binary() -> Arc<AttributeSet> {
        AttributeSet::new("pc", vec!["pro".into(), "con".into()], Scale::Nominal).unwrap()
    }

    #[test]
    fn attribute_set_rejects_small_and_duplicate() {
        assert!(AttributeSet::new("x", vec!["a".into()], Scale::Nominal).is_err());
        assert!(AttributeSet::new("x", vec!["a".into(), "a".into()], Scale::Nominal).is_err());
    }

    #[test]
    fn distribution_tolerates_rounding_and_renormalizes() {
        let s = set4();
        let d = Distribution::new(Arc::clone(&s), vec![0.333333, 0.333333, 0.333334, 0.0]).unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(Distribution::new(s, vec![0.4, 0.4, 0.0, 0.0]).is_err());
    }

    #[test]
    fn resolve_membership_falls_back_to_uniform() {
        let s = set4();
        let b = binary();
        let mut table = MembershipTable::new();
        table.insert(
            "d1",
            Distribution::new(Arc::clone(&b), vec![0.9, 0.1]).unwrap(),
        );
        let hit = resolve_membership("d1", &b, &table);
        assert_eq!(hit.probs(), &[0.9, 0.1]);
        let miss = resolve_membership("d2", &s, &table);
        assert_eq!(miss.probs(), &[0.25, 0.25, 0.25, 0.25]);
        let miss2 = resolve_membership("d2", &b, &table);
        assert_eq!(miss2.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn achieved_distribution_means_vectors() {
        let b = binary();
        let d1 = Distribution::new(Arc::clone(&b), vec![0.9, 0.1]).unwrap();
        let d2 = Distribution::new(Arc::clone(&b), vec![0.5, 0.5]).unwrap();
        let got = achieved_distribution(&[d1, d2]).unwrap();
        assert!((got.probs()[0] - 0.7).abs() < 1e-12);
        assert!((got.probs()[1] - 0.3).abs() < 1e-12);

        let hard1 = Distribution::one_hot(Arc::clone(&b), 0).unwrap();
        let hard2 = Distribution::one_hot(Arc::clone(&b), 1).unwrap();
        let got = achieved_distribution(&[hard1.clone(), hard2]).unwrap();
        assert_eq!(got.probs(), &[0.5, 0.5]);

        let got = achieved_distribution(&[hard1]).unwrap();
        assert_eq!(got.probs(), &[1.0, 0.0]);

        assert!(matches!(
            achieved_distribution(&[]),
            Err(Error::EmptyPrefix)
        ));
    }

    #[test]
    fn bias_conversion() {
        let b = binary();
        assert_eq!(membership_from_bias(&b, 0.0).unwrap().probs(), &[0.5, 0.5]);
        assert_eq!(membership_from_bias(&b, 1.0).unwrap().probs(), &[1.0, 0.0]);
        assert_eq!(
            membership_from_bias(&b, -0.5).unwrap().probs(),
            &[0.25, 0.75]
        );
        assert!(membership_from_bias(&b, 1.5).is_err());
        assert!(membership_from_bias(&set4(), 0.0).is_err());
    }

    #[test]
    fn intent_gain_membership() {
        let s = AttributeSet::new(
            "i",
            vec!["i1".into(), "i2".into(), "i3".into()],
            Scale::Nominal,
        )
        .unwrap();
        let d = membership_from_intent_gains(&s, &[3.0, 1.0, 0.0]).unwrap();
        assert_eq!(d.probs(), &[0.75, 0.25, 0.0]);
        let d = membership_from_intent_gains(&s, &[0.0, 0.0, 0.0]).unwrap();
        for &p in d.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(membership_from_intent_gains(&s, &[1.0, -0.1, 0.0]).is_err());
    }

    #[test]
    fn exponential_gain_values() {
        assert_eq!(exponential_gain(0), 0.0);
        assert_eq!(exponential_gain(1), 1.0);
        assert_eq!(exponential_gain(3), 7.0);
        assert_eq!(exponential_gain(40), exponential_gain(15));
    }

    #[test]
    fn run_sorts_by_score_then_item() {
        let run = Run::from_entries(
            "r",
            vec![
                ("t1".into(), "b".into(), 1.0),
                ("t1".into(), "a".into(), 1.0),
                ("t1".into(), "c".into(), 2.0),
            ],
        )
        .unwrap();
        let items: Vec<&str> = run
            .topic("t1")
            .unwrap()
            .iter()
            .map(|r| r.item.as_str())
            .collect();
        assert_eq!(items, vec!["c", "a", "b"]);

        assert!(Run::from_entries(
            "r",
            vec![
                ("t1".into(), "a".into(), 1.0),
                ("t1".into(), "a".into(), 0.5),
            ],
        )
        .is_err());
    }

    #[test]
    fn bias_scores_enforce_range() {
        let mut scores = BiasScores::new();
        scores.insert("t1", "d1", -0.5).unwrap();
        assert_eq!(scores.get("t1", "d1"), Some(-0.5));
        assert_eq!(scores.get("t1", "d2"), None);
        assert!(scores.insert("t1", "d2", 1.01).is_err());
    }

    #[test]
    fn qrels_maps_negative_to_zero() {
        let mut q = Qrels::new();
        q.insert("t1", "d1", -2);
        q.insert("t1", "d2", 5);
        assert_eq!(q.grade("t1", "d1"), 0);
        assert_eq!(q.grade("t1", "d2"), 5);
        assert_eq!(q.grade("t1", "unjudged"), 0);
    }

    #[test]
    fn derived_qrels_take_max_intent_grade() {
        let mut gains = BTreeMap::new();
        gains.insert("d1".to_string(), vec![3.0, 1.0]);
        gains.insert("d2".to_string(), vec![0.0, 0.0]);
        let ti = TopicIntents::new(vec!["i1".into(), "i2".into()], vec![0.5, 0.5], gains).unwrap();
        let mut set = IntentSet::new();
        set.insert("t1", ti);
        let qrels = set.derived_qrels();
        assert_eq!(qrels.grade("t1", "d1"), 3);
        assert_eq!(qrels.grade("t1", "d2"), 0);
    }

    #[test]
    fn targets_per_topic_override_global() {
        let b = binary();
        let mut t = TargetStore::new();
        t.insert_global(Distribution::new(Arc::clone(&b), vec![0.5, 0.5]).unwrap());
        t.insert_topic(
            "t1",
            Distribution::new(Arc::clone(&b), vec![0.9, 0.1]).unwrap(),
        );
        assert_eq!(t.target_for("t1", "pc").unwrap().probs(), &[0.9, 0.1]);
        assert_eq!(t.target_for("t2", "pc").unwrap().probs(), &[0.5, 0.5]);
        assert!(t.target_for("t2", "nope").is_none());
    }
}
