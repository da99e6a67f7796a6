//! Appearance of mutations: idea arrivals and R&D conversion.
//!
//! Innovative ideas are conceived by single individuals at memoryless random
//! times (a Poisson process per region — arrival cannot be predicted or
//! systematized, so no richer structure is assumed). R&D then turns each idea
//! into an *uncertain* technology after a fixed delay: a technique that is
//! ready for a production line but has never produced saleable goods.

use std::fmt;

use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::types::{IdSource, IdeaId, RegionId, TechId};

/// An innovative idea. Atomic: exactly one originator event, never merged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Idea {
    pub id: IdeaId,
    pub conception_step: u32,
    pub region: RegionId,
}

/// Parameters of the latent productivity distribution of a technology.
///
/// The realized productivity at market entry is lognormal around `location`:
/// `location * exp(±spread·|z|)`, with the sign shared with the ex-post
/// profit draw so technologies that beat the market do so because they are
/// genuinely more productive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductivityParams<S> {
    pub location: S,
    pub spread: S,
}

/// Lifecycle of a technology from conception to survival or discard.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lifecycle {
    /// Developed in R&D, awaiting financing.
    Uncertain,
    /// Financed by the banker: a mutation, awaiting ex-post realization.
    Financed { step: u32 },
    /// Realized ex post, awaiting market selection.
    CertainCandidate,
    /// Selected: producing commodities sold on the market.
    InProduction { step: u32 },
    /// Eliminated by selection or expired unfinanced.
    Discarded { step: u32 },
}

/// A technology developed in R&D but never yet used for saleable production.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertainTechnology<S> {
    pub id: TechId,
    pub source_idea: IdeaId,
    /// Probability of beating the average profit rate, identical for every
    /// uncertain technology within one scenario.
    pub ex_ante_success_prob: S,
    pub productivity_params: ProductivityParams<S>,
    /// Step at which R&D completes and the technology can stand for financing.
    pub readiness_step: u32,
    pub region: RegionId,
    /// Latent animal-spirits signal entrepreneurs perceive; drawn once in R&D.
    pub appeal: S,
    pub state: Lifecycle,
}

/// Errors raised by the genesis operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenesisError {
    /// R&D takes at least one step.
    DelayInvalid { requested: u32 },
}

impl fmt::Display for GenesisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenesisError::DelayInvalid { requested } => {
                write!(f, "rd_delay must be at least 1 step, got {requested}")
            }
        }
    }
}

impl std::error::Error for GenesisError {}

/// Sample this step's idea arrivals for one region.
///
/// The count is Poisson with mean `rate`; ids come from the run allocator.
pub fn sample_idea_arrivals<S: Scalar>(
    rate: S,
    region: RegionId,
    step: u32,
    ids: &mut IdSource,
    rng: &mut RngStream,
) -> Vec<Idea> {
    let count = rng.poisson(rate.to_f64().expect("finite idea rate"));
    (0..count)
        .map(|_| Idea {
            id: ids.idea(),
            conception_step: step,
            region,
        })
        .collect()
}

/// Convert one idea into an uncertain technology after `rd_delay` steps.
///
/// Every technology in a scenario carries the same ex-ante success
/// probability; what differs is the appeal signal entrepreneurs will read.
pub fn develop<S: Scalar>(
    idea: &Idea,
    rd_delay: u32,
    ex_ante_p: S,
    productivity_params: ProductivityParams<S>,
    ids: &mut IdSource,
    rng: &mut RngStream,
) -> Result<UncertainTechnology<S>, GenesisError> {
    if rd_delay < 1 {
        return Err(GenesisError::DelayInvalid {
            requested: rd_delay,
        });
    }
    let appeal = S::cast(rng.standard_normal());
    Ok(UncertainTechnology {
        id: ids.tech(),
        source_idea: idea.id,
        ex_ante_success_prob: ex_ante_p,
        productivity_params,
        readiness_step: idea.conception_step + rd_delay,
        region: idea.region,
        appeal,
        state: Lifecycle::Uncertain,
    })
}

/// Technologies whose R&D is complete and which still await financing.
pub fn ready_pool<S: Scalar>(
    all_uncertain: &[UncertainTechnology<S>],
    step: u32,
) -> Vec<&UncertainTechnology<S>> {
    all_uncertain
        .iter()
        .filter(|t| t.readiness_step <= step && t.state == Lifecycle::Uncertain)
        .collect()
}
