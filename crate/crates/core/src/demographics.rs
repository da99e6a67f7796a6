//! Malthusian population dynamics per region.
//!
//! Two opposing forces drive the traditional-agriculture regime: famine
//! mortality whenever population outruns the food supply, and a patriarchal
//! birth-rate push that maximizes reproduction. Industrialization removes the
//! natural ceiling on food production; the patriarchal push then fades with a
//! lag, producing a population surge followed by deceleration.

use crate::scalar::Scalar;
use crate::types::RegionId;

/// Production regime of a region's food economy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductionMode {
    /// Food output is capped by natural conditions (land capacity).
    Traditional,
    /// Food output scales with technology; no natural ceiling.
    Industrial,
}

/// Population of one region. Zero population is absorbing; the mode switches
/// traditional → industrial at most once and never reverts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PopulationState<S> {
    pub region: RegionId,
    /// Millions of persons.
    pub population: S,
    /// Patriarchal multiplier on the baseline birth rate, ≥ 0; 1 is neutral.
    pub birth_factor: S,
    pub mode: ProductionMode,
}

/// Food flow of one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoodAccount<S> {
    /// Food units produced this step.
    pub supply: S,
    /// Food units one person needs per step.
    pub requirement_per_capita: S,
}

/// Per-step vital rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VitalRates<S> {
    pub base_birth: S,
    pub base_death: S,
    /// Mortality applied to the unnourished fraction of the population.
    pub famine_mortality: S,
}

/// Food produced this step.
///
/// Traditional agriculture is capped by the land: `min(productivity·labor,
/// land_capacity)`. Industrial production has no cap.
pub fn food_supply<S: Scalar>(
    productivity: S,
    labor: S,
    land_capacity: S,
    mode: ProductionMode,
) -> S {
    let output = productivity * labor;
    match mode {
        ProductionMode::Traditional => output.min(land_capacity),
        ProductionMode::Industrial => output,
    }
}

/// Advance the population by one step.
///
/// Births scale with the patriarchal factor; whoever cannot be nourished from
/// the supply is exposed to famine mortality on top of natural deaths.
pub fn step_population<S: Scalar>(
    state: &PopulationState<S>,
    food: &FoodAccount<S>,
    rates: &VitalRates<S>,
) -> PopulationState<S> {
    let population = state.population;
    let births = population * rates.base_birth * state.birth_factor;
    let nourished = population.min(food.supply / food.requirement_per_capita);
    let famine_deaths = (population - nourished) * rates.famine_mortality;
    let natural_deaths = population * rates.base_death;
    let next = (population + births - natural_deaths - famine_deaths).max(S::zero());
    PopulationState {
        population: next,
        ..*state
    }
}

/// Switch to the industrial mode at the transition step and let the
/// patriarchal birth push decay geometrically toward 1 afterwards.
///
/// `birth_factor' = 1 + (birth_factor − 1)·(1 − decay)`; a zero decay freezes
/// the patriarchal institutions forever.
pub fn industrialize<S: Scalar>(
    state: &PopulationState<S>,
    transition_step: u32,
    current_step: u32,
    birth_factor_decay: S,
) -> PopulationState<S> {
    let industrial =
        state.mode == ProductionMode::Industrial || current_step >= transition_step;
    if !industrial {
        return *state;
    }
    PopulationState {
        mode: ProductionMode::Industrial,
        birth_factor: S::one() + (state.birth_factor - S::one()) * (S::one() - birth_factor_decay),
        ..*state
    }
}
