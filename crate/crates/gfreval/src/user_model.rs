//! Attention-decay and utility functions shared by the fairness and
//! relevance measures.
//!
//! Two decay families are supported: the relevance cascade of ERR, and the
//! geometric decay of RBP for settings without relevance judgments. RBP decay
//! with patience `phi` equals the cascade under a constant per-rank relevance
//! probability of `1 - phi`.

use crate::error::{Error, Result};
use crate::model::MAX_GRADE;

pub const DEFAULT_RBP_PHI: f64 = 0.85;
pub const DEFAULT_IRBU_PHI: f64 = 0.99;

/// Per-rank attention decay model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayKind {
    /// Relevance cascade: needs a grade per rank.
    Err,
    /// Geometric decay `(1-phi) * phi^(k-1)`.
    Rbp { phi: f64 },
}

impl DecayKind {
    pub fn rbp(phi: f64) -> Result<DecayKind> {
        check_phi(phi)?;
        Ok(DecayKind::Rbp { phi })
    }

    /// Decay weights for a list whose per-rank grades are `grades`. The RBP
    /// variant only uses the list length; grades never affect geometric decay.
    pub fn weights(&self, grades: &[u32]) -> Vec<f64> {
        match self {
            DecayKind::Err => err_decay_sequence(grades),
            DecayKind::Rbp { phi } => rbp_decay_sequence(grades.len(), *phi),
        }
    }
}

/// Rank-utility model used by the relevance component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityKind {
    /// `1/k`: ERR.
    Err,
    /// `phi^k`: intentwise Rank-Biased Utility.
    Irbu { phi: f64 },
}

impl UtilityKind {
    pub fn irbu(phi: f64) -> Result<UtilityKind> {
        check_phi(phi)?;
        Ok(UtilityKind::Irbu { phi })
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < 1.0 {
        Ok(())
    } else {
        Err(Error::Eval(format!("patience {phi} outside (0, 1)")))
    }
}

/// Probability that a grade-`g` item satisfies the user: `(2^g - 1) / 2^g`.
pub fn rel_prob(grade: u32) -> f64 {
    let g = grade.min(MAX_GRADE);
    1.0 - 1.0 / (1u64 << g) as f64
}

/// Cascade decay: `Decay@k = P@k * prod_{j<k} (1 - P@j)`.
pub fn err_decay_sequence(grades: &[u32]) -> Vec<f64> {
    let mut remaining = 1.0;
    grades
        .iter()
        .map(|&g| {
            let p = rel_prob(g);
            let w = remaining * p;
            remaining *= 1.0 - p;
            w
        })
        .collect()
}

/// Geometric decay: weight at rank k is `(1-phi) * phi^(k-1)`; the weights
/// over ranks 1..=K sum to `1 - phi^K`.
pub fn rbp_decay_sequence(len: usize, phi: f64) -> Vec<f64> {
    debug_assert!(phi > 0.0 && phi < 1.0);
    let mut w = 1.0 - phi;
    (0..len)
        .map(|_| {
            let out = w;
            w *= phi;
            out
        })
        .collect()
}

/// Rank utility at 1-based rank `k`.
pub fn utility(kind: UtilityKind, k: usize) -> f64 {
    debug_assert!(k >= 1);
    match kind {
        UtilityKind::Err => 1.0 / k as f64,
        UtilityKind::Irbu { phi } => phi.powi(k as i32),
    }
}
