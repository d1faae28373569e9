//! `gfreval` scores ranked lists for group fairness and relevance.
//!
//! The core measure family compares, at every rank, the achieved distribution
//! of group membership against a target distribution, weights the
//! similarities by a user attention decay, and optionally mixes in a
//! cascade-based relevance score. Baseline fairness measures (Skew, NDKL,
//! mean attention, ABR, ECE), adhoc and diversity measures (nDCG, intent
//! recall, D-nDCG, D#-nDCG), and system-comparison statistics (Kendall's tau
//! with confidence intervals, the randomised Tukey HSD test, discriminative
//! power curves) are included for side-by-side evaluation.
//!
//! File parsing and the command-line surface live in [`formats`] and the
//! `gfreval` binary; synthetic corpora and reranking utilities in [`synth`].
//!
//! ```
//! use std::sync::Arc;
//! use gfreval::{gf, rbp_decay_sequence};
//! use gfreval::{AttributeSet, Distribution, DivergenceKind, Scale};
//!
//! let stance = AttributeSet::new("stance", vec!["pro".into(), "con".into()], Scale::Nominal)?;
//! let target = Distribution::new(Arc::clone(&stance), vec![0.5, 0.5])?;
//! let ranking = vec![
//!     Distribution::one_hot(Arc::clone(&stance), 0)?,
//!     Distribution::one_hot(Arc::clone(&stance), 1)?,
//!     Distribution::one_hot(Arc::clone(&stance), 0)?,
//! ];
//! let decay = rbp_decay_sequence(ranking.len(), 0.85);
//! let score = gf(&ranking, &decay, &target, DivergenceKind::Jsd)?;
//! assert!(score > 0.0 && score < 1.0);
//! # Ok::<(), gfreval::Error>(())
//! ```

pub mod baselines;
pub mod divergence;
pub mod error;
pub mod eval;
pub mod formats;
pub mod gfr;
pub mod model;
pub mod stats;
pub mod synth;
pub mod user_model;

pub use error::{Error, Result};

pub use divergence::{distr_sim, jsd, kld, nmd, rnod, DivergenceKind};
pub use gfr::{delta_gf, gf, gfr, gfr_integrated, intersectional_score, relevance_score};
pub use model::{
    achieved_distribution, exponential_gain, membership_from_bias, membership_from_intent_gains,
    resolve_membership, AttributeSet, Distribution, IntentSet, MembershipTable, Qrels, Run, Scale,
    TargetStore,
};
pub use stats::{
    disc_power_curve, kendall_tau, kendall_tau_a, randomised_tukey_hsd,
    randomised_tukey_hsd_threads, tau_ci, ScoreMatrix,
};
pub use user_model::{
    err_decay_sequence, rbp_decay_sequence, rel_prob, utility, DecayKind, UtilityKind,
};
