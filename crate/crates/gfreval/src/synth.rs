//! Synthetic corpus generation, the naive GF oracle used for testing, and
//! two rerankers: rating rerank and unique-owner filtering.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::divergence::{divergence, DivergenceKind};
use crate::error::{Error, Result};
use crate::formats;
use crate::model::{
    AttributeSet, Distribution, MembershipTable, Qrels, RankedItem, Run, Scale, TargetStore,
};

#[derive(Debug, Clone)]
pub struct AttributeSetSpec {
    pub name: String,
    pub scale: Scale,
    pub arity: usize,
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub topics: usize,
    pub runs: usize,
    pub list_len: usize,
    pub seed: u64,
    pub soft_membership: bool,
    pub max_grade: u32,
    pub sets: Vec<AttributeSetSpec>,
}

impl Default for SynthConfig {
    fn default() -> SynthConfig {
        SynthConfig {
            topics: 50,
            runs: 4,
            list_len: 20,
            seed: 1,
            soft_membership: false,
            max_grade: 3,
            sets: vec![
                AttributeSetSpec {
                    name: "grp".into(),
                    scale: Scale::Nominal,
                    arity: 3,
                },
                AttributeSetSpec {
                    name: "band".into(),
                    scale: Scale::Ordinal,
                    arity: 4,
                },
            ],
        }
    }
}

#[derive(Debug)]
pub struct SynthCorpus {
    pub sets: Vec<Arc<AttributeSet>>,
    pub runs: Vec<Run>,
    pub qrels: Qrels,
    pub membership: MembershipTable,
    pub targets: TargetStore,
    pub ratings: BTreeMap<String, f64>,
    pub owners: BTreeMap<String, String>,
}

/// Probabilities are generated as integer millionths so every emitted value
/// is an exact six-decimal string and survives emit/parse cycles unchanged.
fn composition(rng: &mut ChaCha8Rng, arity: usize) -> Vec<f64> {
    let mut cuts: Vec<u64> = (0..arity - 1)
        .map(|_| rng.gen_range(0..=1_000_000))
        .collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(arity);
    let mut prev = 0u64;
    for c in cuts {
        parts.push(c - prev);
        prev = c;
    }
    parts.push(1_000_000 - prev);
    parts.into_iter().map(|p| p as f64 / 1e6).collect()
}

/// Rounds a mean vector to millionths that sum to exactly one, absorbing the
/// rounding drift in the largest cell.
fn parity_target(mean: &[f64]) -> Vec<f64> {
    let mut parts: Vec<i64> = mean.iter().map(|m| (m * 1e6).round() as i64).collect();
    let drift: i64 = 1_000_000 - parts.iter().sum::<i64>();
    let argmax = parts
        .iter()
        .enumerate()
        .max_by_key(|(_, v)| **v)
        .map(|(i, _)| i)
        .expect("non-empty");
    parts[argmax] += drift;
    parts.into_iter().map(|p| p.max(0) as f64 / 1e6).collect()
}

/// Generates a deterministic corpus: runs, qrels, memberships, statistical
/// parity targets, plus item ratings and owners for the rerankers.
pub fn gen_synthetic(cfg: &SynthConfig) -> Result<SynthCorpus> {
    if cfg.topics == 0 || cfg.runs == 0 || cfg.list_len == 0 {
        return Err(Error::Eval(
            "synthetic corpus needs topics, runs, and items".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sets: Vec<Arc<AttributeSet>> = cfg
        .sets
        .iter()
        .map(|spec| {
            let values = (1..=spec.arity).map(|i| format!("v{i}")).collect();
            AttributeSet::new(&spec.name, values, spec.scale)
        })
        .collect::<Result<_>>()?;

    let pool_size = (cfg.list_len * 3).max(8);
    let width = pool_size.to_string().len().max(4);
    let items: Vec<String> = (0..pool_size)
        .map(|i| format!("d{:0width$}", i + 1))
        .collect();

    let mut membership = MembershipTable::new();
    for item in &items {
        for set in &sets {
            let dist = if cfg.soft_membership {
                Distribution::new(Arc::clone(set), composition(&mut rng, set.arity()))?
            } else {
                Distribution::one_hot(Arc::clone(set), rng.gen_range(0..set.arity()))?
            };
            membership.insert(item.clone(), dist);
        }
    }

    let mut owners = BTreeMap::new();
    let mut ratings = BTreeMap::new();
    for (idx, item) in items.iter().enumerate() {
        owners.insert(item.clone(), format!("own{:03}", idx / 3));
        // Items without reviews get a zero rating.
        let rating = if rng.gen_bool(0.45) {
            0.0
        } else {
            rng.gen_range(10..=50) as f64 / 10.0
        };
        ratings.insert(item.clone(), rating);
    }

    let topic_ids: Vec<String> = (1..=cfg.topics).map(|i| format!("t{i:04}")).collect();
    let mut runs = Vec::with_capacity(cfg.runs);
    for r in 0..cfg.runs {
        let tag = format!("run{r:02}");
        let mut entries = Vec::new();
        for topic in &topic_ids {
            let chosen = rand::seq::index::sample(&mut rng, pool_size, cfg.list_len);
            for (rank, idx) in chosen.into_iter().enumerate() {
                entries.push((
                    topic.clone(),
                    items[idx].clone(),
                    (cfg.list_len - rank) as f64,
                ));
            }
        }
        runs.push(Run::from_entries(tag, entries)?);
    }

    let mut qrels = Qrels::new();
    for topic in &topic_ids {
        let mut pooled: BTreeSet<&str> = BTreeSet::new();
        for run in &runs {
            if let Some(list) = run.topic(topic) {
                pooled.extend(list.iter().map(|r| r.item.as_str()));
            }
        }
        for item in pooled {
            if rng.gen_bool(0.9) {
                let grade = if rng.gen_bool(0.5) {
                    0
                } else {
                    rng.gen_range(1..=cfg.max_grade) as i64
                };
                qrels.insert(topic.clone(), item, grade);
            }
        }
    }

    let mut targets = TargetStore::new();
    for set in &sets {
        let mut mean = vec![0.0; set.arity()];
        for item in &items {
            let dist = membership.resolve(item, set);
            for (m, &p) in mean.iter_mut().zip(dist.probs()) {
                *m += p;
            }
        }
        for m in &mut mean {
            *m /= items.len() as f64;
        }
        targets.insert_global(Distribution::new(Arc::clone(set), parity_target(&mean))?);
    }

    Ok(SynthCorpus {
        sets,
        runs,
        qrels,
        membership,
        targets,
        ratings,
        owners,
    })
}

/// Emits every corpus file as bytes, keyed by file name.
pub fn corpus_files(corpus: &SynthCorpus) -> Result<BTreeMap<String, Vec<u8>>> {
    let mut files = BTreeMap::new();
    let mut buf = Vec::new();
    formats::emit_attribute_sets(&mut buf, &corpus.sets)?;
    files.insert("attrsets.tsv".to_string(), std::mem::take(&mut buf));
    formats::emit_membership(&mut buf, &corpus.membership)?;
    files.insert("membership.tsv".to_string(), std::mem::take(&mut buf));
    formats::emit_targets(&mut buf, &corpus.targets)?;
    files.insert("targets.tsv".to_string(), std::mem::take(&mut buf));
    formats::emit_qrels(&mut buf, &corpus.qrels)?;
    files.insert("qrels.txt".to_string(), std::mem::take(&mut buf));
    formats::emit_item_scores(&mut buf, &corpus.ratings)?;
    files.insert("ratings.tsv".to_string(), std::mem::take(&mut buf));
    formats::emit_item_owners(&mut buf, &corpus.owners)?;
    files.insert("owners.tsv".to_string(), std::mem::take(&mut buf));
    for run in &corpus.runs {
        formats::emit_run(&mut buf, run)?;
        files.insert(format!("{}.txt", run.tag()), std::mem::take(&mut buf));
    }
    Ok(files)
}

/// Naive GF: recomputes each prefix distribution from scratch and sums the
/// decayed similarities directly, with no shared-prefix optimization. Serves
/// as an independent check of the incremental implementation.
pub fn oracle_gf(
    memberships: &[Distribution],
    decay: &[f64],
    pstar: &Distribution,
    kind: DivergenceKind,
) -> Result<f64> {
    if memberships.is_empty() {
        return Err(Error::EmptyPrefix);
    }
    let mut total = 0.0;
    for k in 1..=memberships.len() {
        let mut probs = vec![0.0; pstar.arity()];
        for m in &memberships[..k] {
            for (p, &g) in probs.iter_mut().zip(m.probs()) {
                *p += g;
            }
        }
        for p in &mut probs {
            *p /= k as f64;
        }
        let achieved = Distribution::new(Arc::clone(pstar.set()), probs)?;
        total += decay[k - 1] * (1.0 - divergence(kind, &achieved, pstar)?);
    }
    Ok(total)
}

/// Keeps the first item per owner within the top-k input, preserving order.
/// Items missing from the owner map count as their own owners.
pub fn unique_entity_filter(
    items: &[RankedItem],
    owners: &BTreeMap<String, String>,
    k: usize,
) -> Vec<RankedItem> {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    items
        .iter()
        .take(k)
        .filter(|r| {
            let owner = owners.get(&r.item).map(|o| o.as_str()).unwrap_or(&r.item);
            seen.insert(owner)
        })
        .cloned()
        .collect()
}

/// Stable-sorts the top-k prefix by an external per-item score, descending;
/// ties keep the incoming order. Items without a score count as 0.
pub fn rerank_by_attribute(
    items: &[RankedItem],
    scores: &BTreeMap<String, f64>,
    k: usize,
) -> Vec<RankedItem> {
    let mut prefix: Vec<RankedItem> = items.iter().take(k).cloned().collect();
    prefix.sort_by(|a, b| {
        let sa = scores.get(&a.item).copied().unwrap_or(0.0);
        let sb = scores.get(&b.item).copied().unwrap_or(0.0);
        sb.partial_cmp(&sa).expect("scores are finite")
    });
    prefix
}
