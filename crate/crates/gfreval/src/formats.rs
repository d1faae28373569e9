//! File formats: TREC-style run and qrels files, TSV tables for attribute
//! sets, memberships, targets, and intents, and the CSV outputs.
//!
//! Parsers reject structural problems with a file/line error; the only repair
//! they perform is renormalizing probability groups that sum to 1 within the
//! ingest tolerance. Input accepts `\n` or `\r\n`; output always uses `\n`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{
    AttributeSet, Distribution, IntentSet, MembershipTable, Qrels, Run, Scale, TargetStore,
    TopicIntents,
};
use crate::stats::{HsdResult, ScoreMatrix};

/// One row of the long scores CSV (`run,topic,measure,value`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub run: String,
    pub topic: String,
    pub measure: String,
    pub value: f64,
}

impl ScoreRecord {
    pub fn new(
        run: impl Into<String>,
        topic: impl Into<String>,
        measure: impl Into<String>,
        value: f64,
    ) -> ScoreRecord {
        ScoreRecord {
            run: run.into(),
            topic: topic.into(),
            measure: measure.into(),
            value,
        }
    }
}

/// Topic id used for the appended per-measure mean rows.
pub const ALL_TOPICS: &str = "ALL";

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

/// Lines with 1-based numbering, `\r` stripped, blank lines skipped.
fn lines(read: impl BufRead, file: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in read.lines().enumerate() {
        let line = line.map_err(|e| Error::format(file, i + 1, e.to_string()))?;
        let line = line.strip_suffix('\r').unwrap_or(&line).to_string();
        if !line.is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

fn split_tsv(line: &str) -> Vec<&str> {
    line.split('\t').collect()
}

fn parse_prob(file: &str, line: usize, s: &str) -> Result<f64> {
    let p: f64 = s
        .parse()
        .map_err(|_| Error::format(file, line, format!("bad probability `{s}`")))?;
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::format(
            file,
            line,
            format!("probability {p} outside [0, 1]"),
        ));
    }
    Ok(p)
}

/// Parses a TREC run file: `topic Q0 item rank score tag`, whitespace
/// separated. The rank column is ignored; lists are re-sorted by descending
/// score with ties broken by ascending item id.
pub fn parse_run(read: impl BufRead, file: &str) -> Result<Run> {
    let mut entries = Vec::new();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut tag: Option<String> = None;
    for (n, line) in lines(read, file)? {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::format(
                file,
                n,
                format!(
                    "expected 6 fields `topic Q0 item rank score tag`, got {}",
                    fields.len()
                ),
            ));
        }
        let (topic, item, score_s, line_tag) = (fields[0], fields[2], fields[4], fields[5]);
        let score: f64 = score_s
            .parse()
            .map_err(|_| Error::format(file, n, format!("bad score `{score_s}`")))?;
        if !score.is_finite() {
            return Err(Error::format(
                file,
                n,
                format!("non-finite score `{score_s}`"),
            ));
        }
        match &tag {
            None => tag = Some(line_tag.to_string()),
            Some(t) if t != line_tag => {
                return Err(Error::format(
                    file,
                    n,
                    format!("run tag changes from `{t}` to `{line_tag}`"),
                ));
            }
            _ => {}
        }
        if !seen.insert((topic.to_string(), item.to_string())) {
            return Err(Error::format(
                file,
                n,
                format!("duplicate item `{item}` for topic `{topic}`"),
            ));
        }
        entries.push((topic.to_string(), item.to_string(), score));
    }
    let tag = tag.ok_or_else(|| Error::format(file, 1, "empty run file"))?;
    Run::from_entries(tag, entries)
}

pub fn emit_run(w: &mut impl Write, run: &Run) -> Result<()> {
    for (topic, items) in run.topics() {
        for (rank, item) in items.iter().enumerate() {
            writeln!(
                w,
                "{} Q0 {} {} {} {}",
                topic,
                item.item,
                rank + 1,
                fmt6(item.score),
                run.tag()
            )?;
        }
    }
    Ok(())
}

/// Parses a qrels file: `topic 0 item grade` with integer grades. Negative
/// grades are stored as 0. A (topic, item) pair judged twice with different
/// grades is an error.
pub fn parse_qrels(read: impl BufRead, file: &str) -> Result<Qrels> {
    let mut qrels = Qrels::new();
    let mut seen: BTreeMap<(String, String), i64> = BTreeMap::new();
    for (n, line) in lines(read, file)? {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::format(
                file,
                n,
                format!(
                    "expected 4 fields `topic 0 item grade`, got {}",
                    fields.len()
                ),
            ));
        }
        let (topic, item, grade_s) = (fields[0], fields[2], fields[3]);
        let grade: i64 = grade_s
            .parse()
            .map_err(|_| Error::format(file, n, format!("bad integer grade `{grade_s}`")))?;
        let key = (topic.to_string(), item.to_string());
        if let Some(&prev) = seen.get(&key) {
            if prev != grade {
                return Err(Error::format(
                    file,
                    n,
                    format!(
                        "conflicting grades {prev} and {grade} for topic `{topic}`, item `{item}`"
                    ),
                ));
            }
            continue;
        }
        seen.insert(key, grade);
        qrels.insert(topic, item, grade);
    }
    Ok(qrels)
}

pub fn emit_qrels(w: &mut impl Write, qrels: &Qrels) -> Result<()> {
    for (topic, items) in qrels.topics() {
        for (item, grade) in items {
            writeln!(w, "{topic} 0 {item} {grade}")?;
        }
    }
    Ok(())
}

/// Parses attribute set definitions: one TSV row `set<TAB>scale<TAB>value`
/// per value, in value order. Sets are returned in first-appearance order.
pub fn parse_attribute_sets(read: impl BufRead, file: &str) -> Result<Vec<Arc<AttributeSet>>> {
    let mut order: Vec<String> = Vec::new();
    let mut parts: BTreeMap<String, (Scale, Vec<String>, usize)> = BTreeMap::new();
    for (n, line) in lines(read, file)? {
        let fields = split_tsv(&line);
        if fields.len() != 3 {
            return Err(Error::format(
                file,
                n,
                format!(
                    "expected 3 tab-separated fields `set scale value`, got {}",
                    fields.len()
                ),
            ));
        }
        let (name, scale_s, value) = (fields[0], fields[1], fields[2]);
        let scale = Scale::parse(scale_s)
            .ok_or_else(|| Error::format(file, n, format!("unknown scale `{scale_s}`")))?;
        match parts.get_mut(name) {
            Some((s, values, _)) => {
                if *s != scale {
                    return Err(Error::format(
                        file,
                        n,
                        format!("scale of set `{name}` changes to `{scale_s}`"),
                    ));
                }
                if values.iter().any(|v| v == value) {
                    return Err(Error::format(
                        file,
                        n,
                        format!("duplicate value `{value}` in set `{name}`"),
                    ));
                }
                values.push(value.to_string());
            }
            None => {
                order.push(name.to_string());
                parts.insert(name.to_string(), (scale, vec![value.to_string()], n));
            }
        }
    }
    let mut sets = Vec::with_capacity(order.len());
    for name in order {
        let (scale, values, first_line) = parts.remove(&name).expect("tracked above");
        let set = AttributeSet::new(&name, values, scale)
            .map_err(|e| Error::format(file, first_line, e.to_string()))?;
        sets.push(set);
    }
    if sets.is_empty() {
        return Err(Error::format(file, 1, "no attribute sets defined"));
    }
    Ok(sets)
}

pub fn emit_attribute_sets(w: &mut impl Write, sets: &[Arc<AttributeSet>]) -> Result<()> {
    for set in sets {
        for value in set.values() {
            writeln!(w, "{}\t{}\t{}", set.name(), set.scale().as_str(), value)?;
        }
    }
    Ok(())
}

/// First line of a group plus its per-value probability cells.
type ProbGroup = (usize, Vec<Option<f64>>);

/// Accumulates `(group key) -> per-value probabilities` for the membership
/// and target formats, then builds validated distributions.
struct DistBuilder<'a> {
    file: &'a str,
    sets: &'a [Arc<AttributeSet>],
    groups: BTreeMap<(String, String), ProbGroup>,
}

impl<'a> DistBuilder<'a> {
    fn new(file: &'a str, sets: &'a [Arc<AttributeSet>]) -> DistBuilder<'a> {
        DistBuilder {
            file,
            sets,
            groups: BTreeMap::new(),
        }
    }

    fn add(&mut self, n: usize, key: &str, set_name: &str, value: &str, prob: f64) -> Result<()> {
        let set = crate::model::set_by_name(self.sets, set_name).ok_or_else(|| {
            Error::format(self.file, n, format!("unknown attribute set `{set_name}`"))
        })?;
        let idx = set.index_of(value).ok_or_else(|| {
            Error::format(
                self.file,
                n,
                format!("unknown attribute value `{value}` in set `{set_name}`"),
            )
        })?;
        let entry = self
            .groups
            .entry((key.to_string(), set_name.to_string()))
            .or_insert_with(|| (n, vec![None; set.arity()]));
        if entry.1[idx].is_some() {
            return Err(Error::format(
                self.file,
                n,
                format!("duplicate row for `{key}`, set `{set_name}`, value `{value}`"),
            ));
        }
        entry.1[idx] = Some(prob);
        Ok(())
    }

    fn build(self) -> Result<Vec<(String, String, Distribution)>> {
        let mut out = Vec::with_capacity(self.groups.len());
        for ((key, set_name), (first_line, cells)) in self.groups {
            let set = crate::model::set_by_name(self.sets, &set_name).expect("validated in add");
            let probs: Vec<f64> = cells.into_iter().map(|c| c.unwrap_or(0.0)).collect();
            let dist = Distribution::new(Arc::clone(set), probs)
                .map_err(|e| Error::format(self.file, first_line, e.to_string()))?;
            out.push((key, set_name, dist));
        }
        Ok(out)
    }
}

/// Parses the membership TSV: `item<TAB>set<TAB>value<TAB>probability`.
/// Values missing from a group default to probability 0; each group must sum
/// to 1 within the ingest tolerance.
pub fn parse_membership(
    read: impl BufRead,
    file: &str,
    sets: &[Arc<AttributeSet>],
) -> Result<MembershipTable> {
    let mut builder = DistBuilder::new(file, sets);
    for (n, line) in lines(read, file)? {
        let fields = split_tsv(&line);
        if fields.len() != 4 {
            return Err(Error::format(
                file,
                n,
                format!(
                    "expected 4 tab-separated fields `item set value prob`, got {}",
                    fields.len()
                ),
            ));
        }
        let prob = parse_prob(file, n, fields[3])?;
        builder.add(n, fields[0], fields[1], fields[2], prob)?;
    }
    let mut table = MembershipTable::new();
    for (item, _, dist) in builder.build()? {
        table.insert(item, dist);
    }
    Ok(table)
}

pub fn emit_membership(w: &mut impl Write, table: &MembershipTable) -> Result<()> {
    for ((item, set_name), dist) in table.iter() {
        for (value, &p) in dist.set().values().iter().zip(dist.probs()) {
            if p > 0.0 {
                writeln!(w, "{item}\t{set_name}\t{value}\t{}", fmt6(p))?;
            }
        }
    }
    Ok(())
}

/// Parses the targets TSV: `topic<TAB>set<TAB>value<TAB>probability`, where
/// topic `*` defines the global default for a set.
pub fn parse_targets(
    read: impl BufRead,
    file: &str,
    sets: &[Arc<AttributeSet>],
) -> Result<TargetStore> {
    let mut builder = DistBuilder::new(file, sets);
    for (n, line) in lines(read, file)? {
        let fields = split_tsv(&line);
        if fields.len() != 4 {
            return Err(Error::format(
                file,
                n,
                format!(
                    "expected 4 tab-separated fields `topic set value prob`, got {}",
                    fields.len()
                ),
            ));
        }
        let prob = parse_prob(file, n, fields[3])?;
        builder.add(n, fields[0], fields[1], fields[2], prob)?;
    }
    let mut store = TargetStore::new();
    for (topic, _, dist) in builder.build()? {
        if topic == "*" {
            store.insert_global(dist);
        } else {
            store.insert_topic(topic, dist);
        }
    }
    Ok(store)
}

pub fn emit_targets(w: &mut impl Write, store: &TargetStore) -> Result<()> {
    let write_dist = |w: &mut dyn Write, topic: &str, dist: &Distribution| -> Result<()> {
        for (value, &p) in dist.set().values().iter().zip(dist.probs()) {
            if p > 0.0 {
                writeln!(w, "{topic}\t{}\t{value}\t{}", dist.set().name(), fmt6(p))?;
            }
        }
        Ok(())
    };
    for (_, dist) in store.globals() {
        write_dist(w, "*", dist)?;
    }
    for ((topic, _), dist) in store.per_topic() {
        write_dist(w, topic, dist)?;
    }
    Ok(())
}

/// Parses the intents TSV. Three-field rows `topic<TAB>intent<TAB>prob`
/// declare an intent and its probability; four-field rows
/// `topic<TAB>intent<TAB>item<TAB>gain` assign per-intent gains.
pub fn parse_intents(read: impl BufRead, file: &str) -> Result<IntentSet> {
    struct Acc {
        first_line: usize,
        intents: Vec<String>,
        probs: Vec<f64>,
        gains: BTreeMap<String, Vec<f64>>,
    }
    let mut topics: BTreeMap<String, Acc> = BTreeMap::new();
    let mut pending_gains: Vec<(usize, String, String, String, f64)> = Vec::new();
    for (n, line) in lines(read, file)? {
        let fields = split_tsv(&line);
        match fields.len() {
            3 => {
                let prob = parse_prob(file, n, fields[2])?;
                let acc = topics.entry(fields[0].to_string()).or_insert_with(|| Acc {
                    first_line: n,
                    intents: Vec::new(),
                    probs: Vec::new(),
                    gains: BTreeMap::new(),
                });
                if acc.intents.iter().any(|i| i == fields[1]) {
                    return Err(Error::format(
                        file,
                        n,
                        format!(
                            "intent `{}` declared twice for topic `{}`",
                            fields[1], fields[0]
                        ),
                    ));
                }
                acc.intents.push(fields[1].to_string());
                acc.probs.push(prob);
            }
            4 => {
                let gain: f64 = fields[3]
                    .parse()
                    .map_err(|_| Error::format(file, n, format!("bad gain `{}`", fields[3])))?;
                if gain < 0.0 || !gain.is_finite() {
                    return Err(Error::format(file, n, format!("negative gain {gain}")));
                }
                pending_gains.push((
                    n,
                    fields[0].to_string(),
                    fields[1].to_string(),
                    fields[2].to_string(),
                    gain,
                ));
            }
            k => {
                return Err(Error::format(
                    file,
                    n,
                    format!("expected 3 fields (intent prob) or 4 fields (item gain), got {k}"),
                ));
            }
        }
    }
    for (n, topic, intent, item, gain) in pending_gains {
        let acc = topics.get_mut(&topic).ok_or_else(|| {
            Error::format(file, n, format!("gain row for undeclared topic `{topic}`"))
        })?;
        let idx = acc
            .intents
            .iter()
            .position(|i| *i == intent)
            .ok_or_else(|| {
                Error::format(
                    file,
                    n,
                    format!("gain row for undeclared intent `{intent}`"),
                )
            })?;
        let n_intents = acc.intents.len();
        let gains = acc
            .gains
            .entry(item)
            .or_insert_with(|| vec![0.0; n_intents]);
        gains.resize(n_intents, 0.0);
        gains[idx] = gain;
    }
    let mut out = IntentSet::new();
    for (topic, acc) in topics {
        let mut gains = acc.gains;
        for g in gains.values_mut() {
            g.resize(acc.intents.len(), 0.0);
        }
        let ti = TopicIntents::new(acc.intents, acc.probs, gains)
            .map_err(|e| Error::format(file, acc.first_line, e.to_string()))?;
        out.insert(topic, ti);
    }
    Ok(out)
}

/// Parses a two-column TSV `item<TAB>score` used for rerank inputs.
pub fn parse_item_scores(read: impl BufRead, file: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (n, line) in lines(read, file)? {
        let fields = split_tsv(&line);
        if fields.len() != 2 {
            return Err(Error::format(
                file,
                n,
                format!(
                    "expected 2 tab-separated fields `item score`, got {}",
                    fields.len()
                ),
            ));
        }
        let score: f64 = fields[1]
            .parse()
            .map_err(|_| Error::format(file, n, format!("bad score `{}`", fields[1])))?;
        if out.insert(fields[0].to_string(), score).is_some() {
            return Err(Error::format(
                file,
                n,
                format!("duplicate item `{}`", fields[0]),
            ));
        }
    }
    Ok(out)
}

/// Parses a two-column TSV `item<TAB>owner` mapping items to owning entities.
pub fn parse_item_owners(read: impl BufRead, file: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in lines(read, file)? {
        let fields = split_tsv(&line);
        if fields.len() != 2 {
            return Err(Error::format(
                file,
                n,
                format!(
                    "expected 2 tab-separated fields `item owner`, got {}",
                    fields.len()
                ),
            ));
        }
        if out
            .insert(fields[0].to_string(), fields[1].to_string())
            .is_some()
        {
            return Err(Error::format(
                file,
                n,
                format!("duplicate item `{}`", fields[0]),
            ));
        }
    }
    Ok(out)
}

pub fn emit_item_scores(w: &mut impl Write, scores: &BTreeMap<String, f64>) -> Result<()> {
    for (item, score) in scores {
        writeln!(w, "{item}\t{}", fmt6(*score))?;
    }
    Ok(())
}

pub fn emit_item_owners(w: &mut impl Write, owners: &BTreeMap<String, String>) -> Result<()> {
    for (item, owner) in owners {
        writeln!(w, "{item}\t{owner}")?;
    }
    Ok(())
}

/// Writes the long scores CSV and appends one mean row per (run, measure)
/// with topic id `ALL`. Rows already carrying the `ALL` topic id are passed
/// through and suppress the recomputed mean for their group, so re-emitting
/// a parsed CSV reproduces it.
pub fn emit_scores(w: &mut impl Write, records: &[ScoreRecord]) -> Result<()> {
    writeln!(w, "run,topic,measure,value")?;
    let mut sums: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    let mut have_mean: BTreeSet<(String, String)> = BTreeSet::new();
    for r in records {
        writeln!(w, "{},{},{},{}", r.run, r.topic, r.measure, fmt6(r.value))?;
        let key = (r.run.clone(), r.measure.clone());
        if r.topic == ALL_TOPICS {
            have_mean.insert(key);
        } else {
            let e = sums.entry(key).or_insert((0.0, 0));
            e.0 += r.value;
            e.1 += 1;
        }
    }
    for ((run, measure), (sum, count)) in sums {
        if !have_mean.contains(&(run.clone(), measure.clone())) {
            writeln!(
                w,
                "{run},{ALL_TOPICS},{measure},{}",
                fmt6(sum / count as f64)
            )?;
        }
    }
    Ok(())
}

/// Parses the long scores CSV back into records (including any `ALL` rows).
pub fn parse_scores_csv(read: impl BufRead, file: &str) -> Result<Vec<ScoreRecord>> {
    let all = lines(read, file)?;
    let mut iter = all.into_iter();
    match iter.next() {
        Some((_, header)) if header == "run,topic,measure,value" => {}
        Some((n, header)) => {
            return Err(Error::format(
                file,
                n,
                format!("expected header `run,topic,measure,value`, got `{header}`"),
            ));
        }
        None => return Err(Error::format(file, 1, "empty scores CSV")),
    }
    let mut out = Vec::new();
    for (n, line) in iter {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::format(
                file,
                n,
                format!("expected 4 comma-separated fields, got {}", fields.len()),
            ));
        }
        let value: f64 = fields[3]
            .parse()
            .map_err(|_| Error::format(file, n, format!("bad value `{}`", fields[3])))?;
        out.push(ScoreRecord::new(fields[0], fields[1], fields[2], value));
    }
    Ok(out)
}

/// Writes the wide matrix CSV: header `topic,<run tags...>`, one row per
/// topic.
pub fn emit_matrix(w: &mut impl Write, matrix: &ScoreMatrix) -> Result<()> {
    writeln!(w, "topic,{}", matrix.systems().join(","))?;
    for (topic, row) in matrix.topics().iter().zip(matrix.rows()) {
        let cells: Vec<String> = row.iter().map(|v| fmt6(*v)).collect();
        writeln!(w, "{topic},{}", cells.join(","))?;
    }
    Ok(())
}

/// Parses the wide matrix CSV written by [`emit_matrix`].
pub fn parse_matrix_csv(read: impl BufRead, file: &str) -> Result<ScoreMatrix> {
    let all = lines(read, file)?;
    let mut iter = all.into_iter();
    let (hn, header) = iter
        .next()
        .ok_or_else(|| Error::format(file, 1, "empty matrix CSV"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 2 || cols[0] != "topic" {
        return Err(Error::format(
            file,
            hn,
            "expected header `topic,<system>,...`",
        ));
    }
    let systems: Vec<String> = cols[1..].iter().map(|s| s.to_string()).collect();
    let mut topics = Vec::new();
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, line) in iter {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != systems.len() + 1 {
            return Err(Error::format(
                file,
                n,
                format!(
                    "expected {} fields, got {}",
                    systems.len() + 1,
                    fields.len()
                ),
            ));
        }
        if !seen.insert(fields[0].to_string()) {
            return Err(Error::format(
                file,
                n,
                format!("duplicate topic `{}`", fields[0]),
            ));
        }
        let mut row = Vec::with_capacity(systems.len());
        for cell in &fields[1..] {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::format(file, n, format!("bad value `{cell}`")))?;
            row.push(v);
        }
        topics.push(fields[0].to_string());
        rows.push(row);
    }
    ScoreMatrix::new(topics, systems, rows).map_err(|e| Error::format(file, hn, e.to_string()))
}

/// Writes the discriminative-power curve CSV: `alpha,fraction`.
pub fn emit_curve(w: &mut impl Write, curve: &[(f64, f64)]) -> Result<()> {
    writeln!(w, "alpha,fraction")?;
    for (alpha, fraction) in curve {
        writeln!(w, "{alpha:.3},{}", fmt6(*fraction))?;
    }
    Ok(())
}

/// Writes the pairwise p-value CSV from a randomised Tukey HSD result.
pub fn emit_pairs(w: &mut impl Write, result: &HsdResult) -> Result<()> {
    writeln!(w, "system_a,system_b,observed_diff,p_value")?;
    for pair in &result.pairs {
        writeln!(
            w,
            "{},{},{},{}",
            pair.system_a,
            pair.system_b,
            fmt6(pair.observed_diff),
            fmt6(pair.p_value)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scale;

    fn sets() -> Vec<Arc<AttributeSet>> {
        vec![
            AttributeSet::new("pc", vec!["pro".into(), "con".into()], Scale::Nominal).unwrap(),
            AttributeSet::new(
                "band",
                vec!["b1".into(), "b2".into(), "b3".into(), "b4".into()],
                Scale::Ordinal,
            )
            .unwrap(),
        ]
    }

    #[test]
    fn run_parse_sorts_and_ties() {
        let text = "t1 Q0 b 1 1.0 sys\nt1 Q0 a 2 1.0 sys\nt1 Q0 c 3 2.0 sys\n";
        let run = parse_run(text.as_bytes(), "run.txt").unwrap();
        let items: Vec<&str> = run
            .topic("t1")
            .unwrap()
            .iter()
            .map(|r| r.item.as_str())
            .collect();
        assert_eq!(items, vec!["c", "a", "b"]);
    }

    #[test]
    fn run_parse_rejects_malformed() {
        let bad = "t1 Q0 a 1 1.0\n";
        match parse_run(bad.as_bytes(), "run.txt") {
            Err(Error::Format { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected format error, got {other:?}"),
        }
        let dup = "t1 Q0 a 1 2.0 sys\nt1 Q0 a 2 1.0 sys\n";
        assert!(matches!(
            parse_run(dup.as_bytes(), "run.txt"),
            Err(Error::Format { line: 2, .. })
        ));
    }

    #[test]
    fn qrels_parse_maps_negative() {
        let text = "t1 0 d1 -2\nt1 0 d2 5\n";
        let q = parse_qrels(text.as_bytes(), "q.txt").unwrap();
        assert_eq!(q.grade("t1", "d1"), 0);
        assert_eq!(q.grade("t1", "d2"), 5);
        let dup = "t1 0 d1 1\nt1 0 d1 2\n";
        assert!(parse_qrels(dup.as_bytes(), "q.txt").is_err());
        let same = "t1 0 d1 1\nt1 0 d1 1\n";
        assert!(parse_qrels(same.as_bytes(), "q.txt").is_ok());
        let float = "t1 0 d1 1.5\n";
        assert!(parse_qrels(float.as_bytes(), "q.txt").is_err());
    }

    #[test]
    fn membership_groups_and_tolerance() {
        let s = sets();
        let text = "d1\tpc\tpro\t1.0\nd2\tband\tb1\t0.333333\nd2\tband\tb2\t0.333333\nd2\tband\tb3\t0.333334\n";
        let table = parse_membership(text.as_bytes(), "m.tsv", &s).unwrap();
        assert_eq!(table.get("d1", "pc").unwrap().probs(), &[1.0, 0.0]);
        let d2 = table.get("d2", "band").unwrap();
        assert!((d2.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(d2.probs()[3], 0.0);

        let bad_sum = "d1\tpc\tpro\t0.6\nd1\tpc\tcon\t0.2\n";
        assert!(parse_membership(bad_sum.as_bytes(), "m.tsv", &s).is_err());
        let bad_value = "d1\tpc\tmaybe\t1.0\n";
        assert!(parse_membership(bad_value.as_bytes(), "m.tsv", &s).is_err());
    }

    #[test]
    fn targets_global_and_override() {
        let s = sets();
        let text = "*\tband\tb1\t0.452239\n*\tband\tb2\t0.220319\n*\tband\tb3\t0.227721\n*\tband\tb4\t0.0997214\nt9\tband\tb1\t1.0\n";
        let store = parse_targets(text.as_bytes(), "t.tsv", &s).unwrap();
        let global = store.target_for("t1", "band").unwrap();
        assert!((global.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(store.target_for("t9", "band").unwrap().probs()[0], 1.0);
        assert!(store.target_for("t1", "pc").is_none());
    }

    #[test]
    fn attribute_sets_roundtrip() {
        let text = "pc\tnominal\tpro\npc\tnominal\tcon\nband\tordinal\tb1\nband\tordinal\tb2\n";
        let sets = parse_attribute_sets(text.as_bytes(), "a.tsv").unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].name(), "pc");
        assert_eq!(sets[1].scale(), Scale::Ordinal);
        let mut buf = Vec::new();
        emit_attribute_sets(&mut buf, &sets).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }

    #[test]
    fn intents_parse() {
        let text = "t1\ttea\t0.5\nt1\tspa\t0.5\nt1\ttea\td1\t3\nt1\tspa\td1\t1\nt1\tspa\td2\t2\n";
        let intents = parse_intents(text.as_bytes(), "i.tsv").unwrap();
        let ti = intents.topic("t1").unwrap();
        assert_eq!(ti.intents(), &["tea".to_string(), "spa".to_string()]);
        assert_eq!(ti.gains("d1").unwrap(), &[3.0, 1.0]);
        assert_eq!(ti.gains("d2").unwrap(), &[0.0, 2.0]);

        let bad = "t1\ttea\t0.5\nt1\tspa\t0.5\nt1\tonsen\td1\t3\n";
        assert!(parse_intents(bad.as_bytes(), "i.tsv").is_err());
    }

    #[test]
    fn scores_csv_appends_means() {
        let records = vec![
            ScoreRecord::new("sys", "t1", "GF", 0.4),
            ScoreRecord::new("sys", "t2", "GF", 0.6),
        ];
        let mut buf = Vec::new();
        emit_scores(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("sys,ALL,GF,0.500000"));
        let parsed = parse_scores_csv(text.as_bytes(), "s.csv").unwrap();
        assert_eq!(parsed.len(), 3);

        // Re-emitting a parsed CSV does not duplicate the mean rows.
        let mut buf = Vec::new();
        emit_scores(&mut buf, &parsed).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }

    #[test]
    fn empty_scores_emit_header_only() {
        let mut buf = Vec::new();
        emit_scores(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "run,topic,measure,value\n");
    }

    #[test]
    fn matrix_roundtrip() {
        let m = ScoreMatrix::new(
            vec!["t1".into(), "t2".into()],
            vec!["s1".into(), "s2".into()],
            vec![vec![0.1, 0.2], vec![0.3, 0.4]],
        )
        .unwrap();
        let mut buf = Vec::new();
        emit_matrix(&mut buf, &m).unwrap();
        let parsed = parse_matrix_csv(buf.as_slice(), "m.csv").unwrap();
        assert_eq!(parsed.topics(), m.topics());
        assert_eq!(parsed.systems(), m.systems());
        assert_eq!(parsed.rows(), m.rows());
    }
}
