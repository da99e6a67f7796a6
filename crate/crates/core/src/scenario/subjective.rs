//! Subjective compensation of raw frequencies.
//!
//! In an evolutionary setting frequencies alone do not define probabilities:
//! recorded data may reflect circumstances that no longer hold (the actuary
//! reading mortality tables distorted by a war). This utility applies an
//! explicit, subjective weight per class and renormalizes, making the
//! compensation auditable instead of implicit.

use super::ScenarioError;
use crate::scalar::Scalar;

/// Labeled non-negative frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable<S> {
    entries: Vec<(String, S)>,
}

impl<S: Scalar> ProbabilityTable<S> {
    pub fn new(entries: Vec<(String, S)>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[(String, S)] {
        &self.entries
    }

    /// Frequencies scaled to sum to one.
    pub fn normalized(&self) -> Self {
        let total: S = self.entries.iter().map(|(_, f)| *f).sum();
        Self {
            entries: self
                .entries
                .iter()
                .map(|(label, f)| (label.clone(), *f / total))
                .collect(),
        }
    }
}

/// Reweight frequencies by per-class compensation weights and renormalize:
/// `p_i = f_i·w_i / Σ_j f_j·w_j`.
pub fn subjective_reweight<S: Scalar>(
    table: &ProbabilityTable<S>,
    compensation: &[S],
) -> Result<ProbabilityTable<S>, ScenarioError> {
    if table.entries.len() != compensation.len() {
        return Err(ScenarioError::LengthMismatch {
            frequencies: table.entries.len(),
            weights: compensation.len(),
        });
    }
    let products: Vec<S> = table
        .entries
        .iter()
        .zip(compensation)
        .map(|((_, f), w)| *f * *w)
        .collect();
    let total: S = products.iter().copied().sum();
    if total <= S::zero() {
        return Err(ScenarioError::AllMassExcluded);
    }
    Ok(ProbabilityTable {
        entries: table
            .entries
            .iter()
            .zip(products)
            .map(|((label, _), p)| (label.clone(), p / total))
            .collect(),
    })
}
