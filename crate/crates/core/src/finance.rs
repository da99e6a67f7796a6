//! The banker gate: preference casting and the minimum threshold of consent.
//!
//! Each entrepreneur selects the single uncertain technology that looks most
//! promising from their own subjective point of view, which orders the pool
//! by a preference index. The banker — the personification of the economy's
//! competition level, not a balance sheet — finances every technology whose
//! index meets the consent threshold θ. θ = 0 means every request is
//! financed; θ above the entrepreneur count shuts financing down entirely.

use std::fmt;

use crate::genesis::UncertainTechnology;
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::types::TechId;

/// The community of entrepreneurs casting preferences each round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntrepreneurPool<S> {
    /// Number of entrepreneurs; each selects exactly one candidate.
    pub n: u32,
    /// How sharply choices concentrate on the subjectively best technology.
    /// Zero makes every candidate equally likely.
    pub concentration: S,
}

/// Preference index per candidate: how many entrepreneurs chose it.
///
/// Sorted descending by count, ties broken by ascending technology id; the
/// counts always sum to the pool size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceTally {
    counts: Vec<(TechId, u32)>,
}

impl PreferenceTally {
    /// Build a tally from raw per-candidate counts, enforcing the ordering.
    pub fn new(mut counts: Vec<(TechId, u32)>) -> Self {
        counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        Self { counts }
    }

    /// `(technology, count)` pairs in descending-count order.
    pub fn counts(&self) -> &[(TechId, u32)] {
        &self.counts
    }

    /// Total votes cast.
    pub fn total(&self) -> u32 {
        self.counts.iter().map(|(_, c)| c).sum()
    }

    /// Highest preference index, 0 for an empty tally.
    pub fn top_count(&self) -> u32 {
        self.counts.first().map(|(_, c)| *c).unwrap_or(0)
    }
}

/// The banker's consent threshold θ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BankerPolicy {
    pub consent_threshold: u32,
}

/// The financing outcome of one round: the mutations of this step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationBatch {
    /// Financed technology ids, each at most once.
    pub financed: Vec<TechId>,
    pub step: u32,
}

impl MutationBatch {
    pub fn empty(step: u32) -> Self {
        Self {
            financed: Vec::new(),
            step,
        }
    }

    /// Number of mutations appearing this round.
    pub fn mutation_count(&self) -> usize {
        self.financed.len()
    }
}

/// Errors raised by the financing operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FinanceError {
    /// No uncertain technology stands for financing this step.
    NoCandidates,
}

impl fmt::Display for FinanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinanceError::NoCandidates => {
                write!(f, "no candidate technologies in this financing round")
            }
        }
    }
}

impl std::error::Error for FinanceError {}

/// Cast each entrepreneur's animal-spirits choice over the candidates.
///
/// Entrepreneur scores are `concentration · appeal + Gumbel noise` and each
/// picks their argmax, which makes every choice an exact draw from the
/// softmax distribution with weights `exp(concentration · appeal)`.
pub fn cast_preferences<S: Scalar>(
    pool: &EntrepreneurPool<S>,
    candidates: &[&UncertainTechnology<S>],
    rng: &mut RngStream,
) -> Result<PreferenceTally, FinanceError> {
    if candidates.is_empty() {
        return Err(FinanceError::NoCandidates);
    }
    let concentration = pool.concentration.to_f64().expect("finite concentration");
    let signals: Vec<f64> = candidates
        .iter()
        .map(|c| concentration * c.appeal.to_f64().expect("finite appeal"))
        .collect();

    let mut votes = vec![0u32; candidates.len()];
    for _ in 0..pool.n {
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (i, signal) in signals.iter().enumerate() {
            let score = signal + rng.gumbel();
            // Ties break toward the lower technology id; candidates are
            // scanned in id order by the caller, so first-wins suffices.
            if score > best_score {
                best = i;
                best_score = score;
            }
        }
        votes[best] += 1;
    }

    Ok(PreferenceTally::new(
        candidates
            .iter()
            .zip(votes)
            .map(|(c, v)| (c.id, v))
            .collect(),
    ))
}

/// Finance every technology whose preference index reaches the threshold.
///
/// The comparison is `count >= θ`: consent exactly at the threshold is
/// enough. Because the tally is sorted, the financed set is a prefix of it.
pub fn apply_threshold(tally: &PreferenceTally, policy: &BankerPolicy, step: u32) -> MutationBatch {
    let financed = tally
        .counts()
        .iter()
        .take_while(|(_, count)| *count >= policy.consent_threshold)
        .map(|(id, _)| *id)
        .collect();
    MutationBatch { financed, step }
}

/// One full financing round; an empty candidate set yields an empty batch.
pub fn finance_round<S: Scalar>(
    pool: &EntrepreneurPool<S>,
    candidates: &[&UncertainTechnology<S>],
    policy: &BankerPolicy,
    step: u32,
    rng: &mut RngStream,
) -> MutationBatch {
    match cast_preferences(pool, candidates, rng) {
        Ok(tally) => apply_threshold(&tally, policy, step),
        Err(FinanceError::NoCandidates) => MutationBatch::empty(step),
    }
}
