//! System-comparison statistics: Kendall's tau with confidence intervals,
//! the randomised Tukey HSD test, and discriminative-power curves.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Topics-by-systems matrix of per-topic measure scores.
#[derive(Debug, Clone)]
pub struct ScoreMatrix {
    topics: Vec<String>,
    systems: Vec<String>,
    rows: Vec<Vec<f64>>,
    filled: Vec<(String, String)>,
}

impl ScoreMatrix {
    pub fn new(
        topics: Vec<String>,
        systems: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<ScoreMatrix> {
        if rows.len() != topics.len() || rows.iter().any(|r| r.len() != systems.len()) {
            return Err(Error::Stats(format!(
                "matrix shape mismatch: {} topics, {} systems",
                topics.len(),
                systems.len()
            )));
        }
        Ok(ScoreMatrix {
            topics,
            systems,
            rows,
            filled: Vec::new(),
        })
    }

    /// Pivots (topic, system, value) cells into a matrix. Topics and systems
    /// are ordered lexicographically; absent cells are filled with 0 and
    /// recorded in [`ScoreMatrix::filled`].
    pub fn from_cells<I>(cells: I) -> Result<ScoreMatrix>
    where
        I: IntoIterator<Item = (String, String, f64)>,
    {
        let mut map: BTreeMap<(String, String), f64> = BTreeMap::new();
        let mut topics: BTreeSet<String> = BTreeSet::new();
        let mut systems: BTreeSet<String> = BTreeSet::new();
        for (topic, system, value) in cells {
            topics.insert(topic.clone());
            systems.insert(system.clone());
            if map.insert((topic.clone(), system.clone()), value).is_some() {
                return Err(Error::Stats(format!(
                    "duplicate score for topic `{topic}`, system `{system}`"
                )));
            }
        }
        let topics: Vec<String> = topics.into_iter().collect();
        let systems: Vec<String> = systems.into_iter().collect();
        let mut rows = Vec::with_capacity(topics.len());
        let mut filled = Vec::new();
        for t in &topics {
            let mut row = Vec::with_capacity(systems.len());
            for s in &systems {
                match map.get(&(t.clone(), s.clone())) {
                    Some(&v) => row.push(v),
                    None => {
                        filled.push((t.clone(), s.clone()));
                        row.push(0.0);
                    }
                }
            }
            rows.push(row);
        }
        Ok(ScoreMatrix {
            topics,
            systems,
            rows,
            filled,
        })
    }

    pub fn topics(&self) -> &[String] {
        &self.topics
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Cells that were absent in the input and defaulted to 0.
    pub fn filled(&self) -> &[(String, String)] {
        &self.filled
    }

    pub fn system_means(&self) -> Vec<f64> {
        let n = self.topics.len() as f64;
        let mut means = vec![0.0; self.systems.len()];
        for row in &self.rows {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        means
    }
}

/// One pair of systems from a randomised Tukey HSD test. `observed_diff` is
/// the signed difference of mean scores (system_a minus system_b); the
/// p-value does not depend on the pair order.
#[derive(Debug, Clone)]
pub struct PairwiseComparison {
    pub system_a: String,
    pub system_b: String,
    pub observed_diff: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone)]
pub struct HsdResult {
    pub pairs: Vec<PairwiseComparison>,
    pub trials: usize,
}

impl HsdResult {
    pub fn p_values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.p_value).collect()
    }
}

/// Kendall's tau-b (tie-corrected) between two paired score vectors.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    kendall_counts(x, y).map(|(p, q, t, u)| {
        let den = (((p + q + t) as f64) * ((p + q + u) as f64)).sqrt();
        (p as f64 - q as f64) / den
    })
}

/// Kendall's tau-a: concordant minus discordant over all pairs, ignoring the
/// tie correction.
pub fn kendall_tau_a(x: &[f64], y: &[f64]) -> Result<f64> {
    kendall_counts(x, y).map(|(p, q, _, _)| {
        let n = x.len() as f64;
        (p as f64 - q as f64) / (n * (n - 1.0) / 2.0)
    })
}

fn kendall_counts(x: &[f64], y: &[f64]) -> Result<(u64, u64, u64, u64)> {
    if x.len() != y.len() {
        return Err(Error::Stats(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Stats("need at least 2 paired observations".into()));
    }
    let (mut p, mut q, mut t, mut u) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = x[i].partial_cmp(&x[j]).ok_or_else(non_finite)?;
            let dy = y[i].partial_cmp(&y[j]).ok_or_else(non_finite)?;
            use std::cmp::Ordering::Equal;
            match (dx, dy) {
                (Equal, Equal) => {}
                (Equal, _) => t += 1,
                (_, Equal) => u += 1,
                (a, b) if a == b => p += 1,
                _ => q += 1,
            }
        }
    }
    if p + q + t == 0 || p + q + u == 0 {
        return Err(Error::Stats(
            "tau undefined: one side is completely tied".into(),
        ));
    }
    Ok((p, q, t, u))
}

fn non_finite() -> Error {
    Error::Stats("non-finite score".into())
}

/// 95% confidence interval for Kendall's tau via the Fisher z-transform with
/// standard error `sqrt(0.437 / (n - 4))`.
pub fn tau_ci(tau: f64, n: usize) -> Result<(f64, f64)> {
    if n < 5 {
        return Err(Error::Stats(format!("tau CI needs n >= 5, got {n}")));
    }
    if tau.abs() >= 1.0 {
        return Err(Error::Stats(format!("tau CI undefined at |tau| = {tau}")));
    }
    let z = tau.atanh();
    let se = (0.437 / (n - 4) as f64).sqrt();
    Ok(((z - 1.96 * se).tanh(), (z + 1.96 * se).tanh()))
}

/// Randomised Tukey HSD test over a score matrix, single-threaded.
pub fn randomised_tukey_hsd(matrix: &ScoreMatrix, trials: usize, seed: u64) -> Result<HsdResult> {
    randomised_tukey_hsd_threads(matrix, trials, seed, 1)
}

/// Randomised Tukey HSD test: each trial permutes every topic row across
/// systems independently and records the trial statistic
/// `max system mean - min system mean`; a pair's p-value is the fraction of
/// trials whose statistic reaches the pair's observed absolute mean
/// difference.
///
/// Each trial draws from its own RNG stream keyed by the trial index, so the
/// p-values are bit-identical for any thread count.
pub fn randomised_tukey_hsd_threads(
    matrix: &ScoreMatrix,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<HsdResult> {
    let n_sys = matrix.systems().len();
    let n_topics = matrix.topics().len();
    if n_sys < 2 {
        return Err(Error::Stats(format!(
            "randomised Tukey HSD needs at least 2 systems, got {n_sys}"
        )));
    }
    if n_topics < 2 {
        return Err(Error::Stats(format!(
            "randomised Tukey HSD needs at least 2 topics, got {n_topics}"
        )));
    }
    if trials == 0 {
        return Err(Error::Stats("trial count must be at least 1".into()));
    }
    let threads = threads.max(1);

    let means = matrix.system_means();
    let mut pair_idx = Vec::new();
    let mut observed_abs = Vec::new();
    for i in 0..n_sys {
        for j in i + 1..n_sys {
            pair_idx.push((i, j));
            observed_abs.push((means[i] - means[j]).abs());
        }
    }

    let count_range = |lo: usize, hi: usize| -> Vec<u64> {
        let mut counts = vec![0u64; pair_idx.len()];
        let mut row = vec![0.0f64; n_sys];
        let mut sums = vec![0.0f64; n_sys];
        for trial in lo..hi {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            sums.iter_mut().for_each(|s| *s = 0.0);
            for topic_row in matrix.rows() {
                row.copy_from_slice(topic_row);
                row.shuffle(&mut rng);
                for (s, v) in sums.iter_mut().zip(&row) {
                    *s += v;
                }
            }
            let inv = 1.0 / n_topics as f64;
            let mut lo_mean = f64::INFINITY;
            let mut hi_mean = f64::NEG_INFINITY;
            for s in &sums {
                let m = s * inv;
                lo_mean = lo_mean.min(m);
                hi_mean = hi_mean.max(m);
            }
            let stat = hi_mean - lo_mean;
            for (c, &obs) in counts.iter_mut().zip(&observed_abs) {
                if stat >= obs {
                    *c += 1;
                }
            }
        }
        counts
    };

    let counts: Vec<u64> = if threads == 1 {
        count_range(0, trials)
    } else {
        let chunk = trials.div_ceil(threads);
        let ranges: Vec<(usize, usize)> = (0..threads)
            .map(|t| (chunk * t, (chunk * (t + 1)).min(trials)))
            .filter(|(lo, hi)| lo < hi)
            .collect();
        let partials: Vec<Vec<u64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .iter()
                .map(|&(lo, hi)| scope.spawn(move || count_range(lo, hi)))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut total = vec![0u64; pair_idx.len()];
        for partial in partials {
            for (t, c) in total.iter_mut().zip(partial) {
                *t += c;
            }
        }
        total
    };

    let pairs = pair_idx
        .iter()
        .zip(&counts)
        .map(|(&(i, j), &c)| PairwiseComparison {
            system_a: matrix.systems()[i].clone(),
            system_b: matrix.systems()[j].clone(),
            observed_diff: means[i] - means[j],
            p_value: c as f64 / trials as f64,
        })
        .collect();
    Ok(HsdResult { pairs, trials })
}

/// Fraction of pairs discriminated (p <= alpha) at each grid point.
pub fn disc_power_curve(p_values: &[f64], alphas: &[f64]) -> Vec<(f64, f64)> {
    let total = p_values.len() as f64;
    alphas
        .iter()
        .map(|&a| {
            let hits = p_values.iter().filter(|p| **p <= a).count() as f64;
            (a, if total > 0.0 { hits / total } else { 0.0 })
        })
        .collect()
}

/// Alpha grid 0.001..=max in steps of 0.001.
pub fn alpha_grid(max: f64) -> Vec<f64> {
    let steps = (max * 1000.0).round() as usize;
    (1..=steps).map(|i| i as f64 / 1000.0).collect()
}
