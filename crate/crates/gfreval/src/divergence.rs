//! Distribution-comparison functions: JSD, NMD, RNOD, plus KLD for the NDKL
//! baseline, and the DistrSim wrapper.
//!
//! JSD uses base-2 logarithms so it is bounded by 1; KLD uses natural logs to
//! match Skew. NMD and RNOD respect the value order and therefore require an
//! ordinal (or binary) attribute set. For binary sets NMD and RNOD coincide.

use crate::error::{Error, Result};
use crate::model::Distribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceKind {
    Jsd,
    Nmd,
    Rnod,
}

impl DivergenceKind {
    pub fn parse(s: &str) -> Option<DivergenceKind> {
        match s.to_ascii_lowercase().as_str() {
            "jsd" => Some(DivergenceKind::Jsd),
            "nmd" => Some(DivergenceKind::Nmd),
            "rnod" => Some(DivergenceKind::Rnod),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DivergenceKind::Jsd => "JSD",
            DivergenceKind::Nmd => "NMD",
            DivergenceKind::Rnod => "RNOD",
        }
    }
}

impl std::fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Jensen-Shannon divergence with base-2 logs: `½KLD(p‖M) + ½KLD(q‖M)` where
/// `M = ½(p+q)`. Symmetric, 0 iff p = q, at most 1.
pub fn jsd(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.check_same_set(q)?;
    Ok(jsd_kernel(p.probs(), q.probs()))
}

pub(crate) fn jsd_kernel(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        let m = 0.5 * (pi + qi);
        // One commutative addition per index keeps jsd(p, q) bit-identical
        // to jsd(q, p).
        let tp = if pi > 0.0 { pi * (pi / m).log2() } else { 0.0 };
        let tq = if qi > 0.0 { qi * (qi / m).log2() } else { 0.0 };
        acc += tp + tq;
    }
    0.5 * acc
}

/// Normalised Match Distance: the L1 distance between cumulative probability
/// vectors, divided by `|A| - 1`.
pub fn nmd(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.check_same_set(q)?;
    require_ordinal("NMD", p)?;
    Ok(nmd_kernel(p.probs(), q.probs()))
}

pub(crate) fn nmd_kernel(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len();
    let mut cp = 0.0;
    let mut cq = 0.0;
    let mut md = 0.0;
    for i in 0..n - 1 {
        cp += p[i];
        cq += q[i];
        md += (cp - cq).abs();
    }
    md / (n - 1) as f64
}

/// Root Normalised Order-aware Divergence, anchored on the gold distribution:
/// distance-weighted squared errors are averaged over the gold support and
/// normalised to [0, 1].
pub fn rnod(p: &Distribution, pstar: &Distribution) -> Result<f64> {
    p.check_same_set(pstar)?;
    require_ordinal("RNOD", p)?;
    Ok(rnod_kernel(p.probs(), pstar.probs()))
}

pub(crate) fn rnod_kernel(p: &[f64], pstar: &[f64]) -> f64 {
    let n = p.len();
    let sq: Vec<f64> = p
        .iter()
        .zip(pstar)
        .map(|(&a, &b)| (a - b) * (a - b))
        .collect();
    let mut dw_sum = 0.0;
    let mut support = 0usize;
    for (i, &gold) in pstar.iter().enumerate() {
        if gold <= 0.0 {
            continue;
        }
        support += 1;
        let mut dw = 0.0;
        for (j, &s) in sq.iter().enumerate() {
            dw += (i as f64 - j as f64).abs() * s;
        }
        dw_sum += dw;
    }
    debug_assert!(support > 0, "gold distribution has empty support");
    let od = dw_sum / support as f64;
    (od / (n - 1) as f64).sqrt()
}

fn require_ordinal(measure: &'static str, p: &Distribution) -> Result<()> {
    if p.set().supports_ordinal_divergence() {
        Ok(())
    } else {
        Err(Error::OrdinalRequired {
            measure,
            set: p.set().name().to_string(),
            arity: p.set().arity(),
        })
    }
}

/// Dispatch on [`DivergenceKind`], checking scale legality.
pub fn divergence(kind: DivergenceKind, p: &Distribution, pstar: &Distribution) -> Result<f64> {
    match kind {
        DivergenceKind::Jsd => jsd(p, pstar),
        DivergenceKind::Nmd => nmd(p, pstar),
        DivergenceKind::Rnod => rnod(p, pstar),
    }
}

pub(crate) fn divergence_kernel(kind: DivergenceKind, p: &[f64], pstar: &[f64]) -> f64 {
    match kind {
        DivergenceKind::Jsd => jsd_kernel(p, pstar),
        DivergenceKind::Nmd => nmd_kernel(p, pstar),
        DivergenceKind::Rnod => rnod_kernel(p, pstar),
    }
}

/// `DistrSim(p ‖ p*) = 1 − Divergence(p ‖ p*)`.
pub fn distr_sim(kind: DivergenceKind, p: &Distribution, pstar: &Distribution) -> Result<f64> {
    Ok(1.0 - divergence(kind, p, pstar)?)
}

/// Kullback-Leibler divergence with natural logs. Zero gold cells that carry
/// achieved mass are replaced by `epsilon`; with `epsilon = 0` such cells make
/// the divergence undefined and an error is returned.
pub fn kld(p: &Distribution, pstar: &Distribution, epsilon: f64) -> Result<f64> {
    p.check_same_set(pstar)?;
    kld_kernel(p.probs(), pstar.probs(), epsilon, |i| {
        p.set().values()[i].clone()
    })
}

pub(crate) fn kld_kernel(
    p: &[f64],
    pstar: &[f64],
    epsilon: f64,
    value_name: impl Fn(usize) -> String,
) -> Result<f64> {
    let mut acc = 0.0;
    for i in 0..p.len() {
        if p[i] <= 0.0 {
            continue;
        }
        let gold = if pstar[i] > 0.0 {
            pstar[i]
        } else if epsilon > 0.0 {
            epsilon
        } else {
            return Err(Error::ZeroTargetCell {
                value: value_name(i),
                achieved: p[i],
            });
        };
        acc += p[i] * (p[i] / gold).ln();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AttributeSet, Scale};
    use std::sync::Arc;

    fn ord4() -> Arc<AttributeSet> {
        AttributeSet::new(
            "o4",
            vec!["g1".into(), "g2".into(), "g3".into(), "g4".into()],
            Scale::Ordinal,
        )
        .unwrap()
    }

    fn nom3() -> Arc<AttributeSet> {
        AttributeSet::new(
            "n3",
            vec!["x".into(), "y".into(), "z".into()],
            Scale::Nominal,
        )
        .unwrap()
    }

    fn bin() -> Arc<AttributeSet> {
        AttributeSet::new("b", vec!["a1".into(), "a2".into()], Scale::Nominal).unwrap()
    }

    fn dist(set: &Arc<AttributeSet>, p: &[f64]) -> Distribution {
        Distribution::new(Arc::clone(set), p.to_vec()).unwrap()
    }

    #[test]
    fn jsd_known_values() {
        let s = ord4();
        let p = dist(&s, &[0.75, 0.25, 0.0, 0.0]);
        assert_eq!(jsd(&p, &p).unwrap(), 0.0);

        let b = bin();
        let one = dist(&b, &[1.0, 0.0]);
        let other = dist(&b, &[0.0, 1.0]);
        let half = dist(&b, &[0.5, 0.5]);
        assert!((jsd(&one, &other).unwrap() - 1.0).abs() < 1e-15);
        assert!((jsd(&one, &half).unwrap() - 0.311278).abs() < 1e-6);
    }

    #[test]
    fn nmd_known_values() {
        let s = ord4();
        let gold = dist(&s, &[0.75, 0.25, 0.0, 0.0]);
        let near = dist(&s, &[0.75, 0.0, 0.25, 0.0]);
        let far = dist(&s, &[0.75, 0.0, 0.0, 0.25]);
        let lo = dist(&s, &[1.0, 0.0, 0.0, 0.0]);
        let hi = dist(&s, &[0.0, 0.0, 0.0, 1.0]);
        assert!((nmd(&lo, &hi).unwrap() - 1.0).abs() < 1e-15);
        assert!((nmd(&near, &gold).unwrap() - 0.083333).abs() < 1e-6);
        assert!((nmd(&far, &gold).unwrap() - 0.166667).abs() < 1e-6);
    }

    #[test]
    fn rnod_known_values() {
        let s = ord4();
        let gold = dist(&s, &[0.75, 0.25, 0.0, 0.0]);
        let near = dist(&s, &[0.75, 0.0, 0.25, 0.0]);
        let far = dist(&s, &[0.75, 0.0, 0.0, 0.25]);
        let same = dist(&s, &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(rnod(&same, &same).unwrap(), 0.0);
        assert!((rnod(&near, &gold).unwrap() - 0.204124).abs() < 1e-6);
        assert!((rnod(&far, &gold).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn ordinal_divergences_reject_nominal_sets() {
        let s = nom3();
        let p = dist(&s, &[0.5, 0.3, 0.2]);
        assert!(matches!(nmd(&p, &p), Err(Error::OrdinalRequired { .. })));
        assert!(matches!(rnod(&p, &p), Err(Error::OrdinalRequired { .. })));
        assert!(jsd(&p, &p).is_ok());
    }

    #[test]
    fn mismatched_sets_rejected() {
        let p = dist(&nom3(), &[0.5, 0.3, 0.2]);
        let q = dist(&bin(), &[0.5, 0.5]);
        assert!(matches!(
            jsd(&p, &q),
            Err(Error::AttributeSetMismatch { .. })
        ));
    }

    #[test]
    fn distr_sim_complements() {
        let s = ord4();
        let gold = dist(&s, &[0.75, 0.25, 0.0, 0.0]);
        let near = dist(&s, &[0.75, 0.0, 0.25, 0.0]);
        assert_eq!(distr_sim(DivergenceKind::Jsd, &gold, &gold).unwrap(), 1.0);
        assert!((distr_sim(DivergenceKind::Rnod, &near, &gold).unwrap() - 0.795876).abs() < 1e-6);
        let lo = dist(&s, &[1.0, 0.0, 0.0, 0.0]);
        let hi = dist(&s, &[0.0, 0.0, 0.0, 1.0]);
        assert!(distr_sim(DivergenceKind::Nmd, &lo, &hi).unwrap().abs() < 1e-15);
    }

    #[test]
    fn kld_known_values_and_zero_cell() {
        let b = bin();
        let p = dist(&b, &[0.5, 0.5]);
        let gold = dist(&b, &[0.25, 0.75]);
        assert_eq!(kld(&p, &p, 0.0).unwrap(), 0.0);
        assert!((kld(&p, &gold, 0.0).unwrap() - 0.143841).abs() < 1e-6);

        let one = dist(&b, &[1.0, 0.0]);
        let other = dist(&b, &[0.0, 1.0]);
        assert!(matches!(
            kld(&one, &other, 0.0),
            Err(Error::ZeroTargetCell { .. })
        ));
        assert!(kld(&one, &other, 1e-6).unwrap() > 0.0);
    }

    #[test]
    fn figure_ordering_jsd_blind_to_order() {
        let s = ord4();
        let gold = dist(&s, &[0.75, 0.25, 0.0, 0.0]);
        let a = dist(&s, &[0.75, 0.0, 0.0, 0.25]);
        let b = dist(&s, &[0.75, 0.0, 0.25, 0.0]);
        assert!((jsd(&a, &gold).unwrap() - jsd(&b, &gold).unwrap()).abs() < 1e-15);
        assert!(nmd(&b, &gold).unwrap() < nmd(&a, &gold).unwrap());
        assert!(rnod(&b, &gold).unwrap() < rnod(&a, &gold).unwrap());
    }
}
