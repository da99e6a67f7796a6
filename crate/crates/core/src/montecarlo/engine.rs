//! The per-step simulation loop behind every run.
//!
//! Step order, per region: exogenous shocks → idea arrivals → R&D readiness →
//! financing round → ex-post realization of mutations and diffusion arrivals
//! → selection → replicator drift; then diffusion over the frozen markets,
//! the demographic step and metric recording. Diffusion arrivals realize in
//! the destination on the *next* step.
//!
//! Randomness: one stream per region and purpose (`genesis/<region>`,
//! `finance/<region>`, `expost/<region>`) plus one global `diffusion` stream,
//! all derived from the run's root stream. Regions can therefore be processed
//! in any order without changing a draw.

use super::{
    RegionStepRecord, RegionSummary, RunReport, SimError, StepRecord, TallySummary,
};
use crate::clock::SimulationClock;
use crate::demographics::{
    food_supply, industrialize, step_population, FoodAccount, PopulationState, VitalRates,
};
use crate::finance::{
    apply_threshold, cast_preferences, BankerPolicy, EntrepreneurPool, FinanceError,
    PreferenceTally,
};
use crate::genesis::{develop, ready_pool, sample_idea_arrivals, Lifecycle, ProductivityParams,
    UncertainTechnology};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::scenario::{DemographicsParams, ScenarioConfig, ShockKind};
use crate::selection::{
    diffuse, pace_of_evolution, realize_arrival, realize_ex_post, replicator_step, select_fittest,
    CertainTechnology, DiffusionArrival, Link, MarketState, RegionGraph,
};
use crate::types::{IdSource, RegionId, TechId};

/// Options for a single run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Replaces the scenario's seed.
    pub seed_override: Option<u64>,
    /// Test harness hook: replaces every financing round's cast preferences
    /// with this fixed tally over synthetic candidates.
    pub fixed_tally: Option<Vec<u32>>,
}

/// Engine phase an observer is invoked after.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnginePhase {
    Selection,
    Replicator,
    Diffusion,
}

/// Per-region demographic parameters cast to the run scalar.
struct DemoScalars<S> {
    base_birth: S,
    base_death: S,
    decay: S,
    requirement: S,
    land_capacity: S,
    labor_share: S,
    famine_mortality: S,
    transition_step: u32,
}

impl<S: Scalar> DemoScalars<S> {
    fn new(params: &DemographicsParams) -> Self {
        Self {
            base_birth: S::cast(params.base_birth),
            base_death: S::cast(params.base_death),
            decay: S::cast(params.birth_factor_decay),
            requirement: S::cast(params.requirement_per_capita),
            land_capacity: S::cast(params.land_capacity),
            labor_share: S::cast(params.labor_share),
            famine_mortality: S::cast(params.famine_mortality),
            transition_step: params.transition_step,
        }
    }
}

struct RegionRuntime<S> {
    name: String,
    idea_rate: S,
    pool: Vec<UncertainTechnology<S>>,
    pending_arrivals: Vec<DiffusionArrival<S>>,
    population: PopulationState<S>,
    demo: DemoScalars<S>,
    genesis_rng: RngStream,
    finance_rng: RngStream,
    expost_rng: RngStream,
}

/// Run with the scenario's own seed and default options.
pub fn run_once<S: Scalar>(config: &ScenarioConfig) -> Result<RunReport<S>, SimError> {
    run_once_with(config, &RunOptions::default())
}

/// Run with explicit options.
pub fn run_once_with<S: Scalar>(
    config: &ScenarioConfig,
    options: &RunOptions,
) -> Result<RunReport<S>, SimError> {
    run_once_observed(config, options, |_, _, _: &[MarketState<S>]| {})
}

/// Run invoking `observer` after every selection, replicator and diffusion
/// phase with the step index and all market states.
pub fn run_once_observed<S, F>(
    config: &ScenarioConfig,
    options: &RunOptions,
    observer: F,
) -> Result<RunReport<S>, SimError>
where
    S: Scalar,
    F: FnMut(u32, EnginePhase, &[MarketState<S>]),
{
    let seed = options.seed_override.unwrap_or(config.seed);
    run_internal(
        config,
        RngStream::root(seed),
        seed,
        None,
        options.fixed_tally.as_deref(),
        observer,
    )
}

pub(super) fn run_with_stream<S: Scalar>(
    config: &ScenarioConfig,
    stream: RngStream,
    seed_echo: u64,
    replication: Option<u32>,
    fixed_tally: Option<&[u32]>,
) -> Result<RunReport<S>, SimError> {
    run_internal(config, stream, seed_echo, replication, fixed_tally, |_, _, _: &[MarketState<S>]| {})
}

fn run_internal<S, F>(
    config: &ScenarioConfig,
    stream: RngStream,
    seed_echo: u64,
    replication: Option<u32>,
    fixed_tally: Option<&[u32]>,
    mut observer: F,
) -> Result<RunReport<S>, SimError>
where
    S: Scalar,
    F: FnMut(u32, EnginePhase, &[MarketState<S>]),
{
    let mut clock = SimulationClock::new(config.horizon)?;
    let graph = RegionGraph::new(
        config.regions.len() as u32,
        config
            .edges
            .iter()
            .map(|e| Link {
                from: e.from,
                to: e.to,
                weight: e.weight,
            })
            .collect(),
    )?;

    let mut ids = IdSource::new();
    let mut markets: Vec<MarketState<S>> = Vec::with_capacity(config.regions.len());
    let mut regions: Vec<RegionRuntime<S>> = Vec::with_capacity(config.regions.len());
    for (i, spec) in config.regions.iter().enumerate() {
        let region_id = RegionId(i as u32);
        markets.push(MarketState::with_incumbent(
            region_id,
            ids.tech(),
            S::cast(spec.initial_productivity),
            S::cast(spec.initial_profit_rate),
        ));
        regions.push(RegionRuntime {
            idea_rate: S::cast(spec.idea_rate),
            pool: Vec::new(),
            pending_arrivals: Vec::new(),
            population: PopulationState {
                region: region_id,
                population: S::cast(spec.initial_population),
                birth_factor: S::cast(spec.demographics.birth_factor),
                mode: spec.demographics.initial_mode,
            },
            demo: DemoScalars::new(&spec.demographics),
            genesis_rng: stream.derive("genesis")?.derive(&spec.name)?,
            finance_rng: stream.derive("finance")?.derive(&spec.name)?,
            expost_rng: stream.derive("expost")?.derive(&spec.name)?,
            name: spec.name.clone(),
        });
    }
    let mut diffusion_rng = stream.derive("diffusion")?;

    let entrepreneurs = EntrepreneurPool {
        n: config.finance.entrepreneurs,
        concentration: S::cast(config.finance.concentration),
    };
    let policy = BankerPolicy {
        consent_threshold: config.finance.consent_threshold,
    };
    let ex_ante_p = S::cast(config.genesis.ex_ante_p);
    let productivity_spread = S::cast(config.genesis.productivity_spread);
    let rd_delay = config.genesis.rd_delay;
    let staleness_age = config.finance.staleness_age;
    let entry_share = S::cast(config.selection.entry_share);
    let eta = S::cast(config.selection.eta);
    let extinction_floor = S::cast(config.selection.extinction_floor);
    let ex_post_spread = S::cast(config.selection.ex_post_spread);

    let initial_productivity: Vec<S> = markets.iter().map(|m| m.productivity()).collect();
    let mut steps: Vec<StepRecord<S>> = Vec::with_capacity(config.horizon as usize);

    while !clock.at_horizon() {
        clock = clock.advance()?;
        let step = clock.step();

        // Exogenous shocks scheduled for this step.
        for shock in config.shocks.iter().filter(|s| s.step == step) {
            let r = shock.region.0 as usize;
            match shock.kind {
                ShockKind::Population => {
                    regions[r].population.population =
                        regions[r].population.population * S::cast(shock.magnitude);
                }
                ShockKind::Productivity => {
                    markets[r].scale_productivity(S::cast(shock.magnitude));
                }
            }
        }

        let mut step_mutations: Vec<u32> = vec![0; regions.len()];
        let mut step_tallies: Vec<Option<TallySummary>> = vec![None; regions.len()];

        // Genesis, financing, realization and selection, region by region.
        for (r, region) in regions.iter_mut().enumerate() {
            let market = &mut markets[r];

            // New ideas enter R&D with the current regional productivity as
            // the location of their latent productivity distribution.
            let location = market.productivity();
            let ideas = sample_idea_arrivals(
                region.idea_rate,
                RegionId(r as u32),
                step,
                &mut ids,
                &mut region.genesis_rng,
            );
            for idea in &ideas {
                let tech = develop(
                    idea,
                    rd_delay,
                    ex_ante_p,
                    ProductivityParams {
                        location,
                        spread: productivity_spread,
                    },
                    &mut ids,
                    &mut region.genesis_rng,
                )?;
                region.pool.push(tech);
            }

            // Unfinanced technologies past their staleness age leave the pool.
            if staleness_age > 0 {
                for tech in &mut region.pool {
                    if tech.state == Lifecycle::Uncertain
                        && step > tech.readiness_step + staleness_age
                    {
                        tech.state = Lifecycle::Discarded { step };
                    }
                }
            }

            // Financing round over the ready pool.
            let batch = if let Some(counts) = fixed_tally {
                // Harness hook: synthesize one candidate per fixed count and
                // skip preference casting entirely.
                let synthetic: Vec<TechId> = counts
                    .iter()
                    .map(|_| {
                        let id = ids.tech();
                        region.pool.push(UncertainTechnology {
                            id,
                            source_idea: crate::types::IdeaId(id.0),
                            ex_ante_success_prob: ex_ante_p,
                            productivity_params: ProductivityParams {
                                location,
                                spread: productivity_spread,
                            },
                            readiness_step: step,
                            region: RegionId(r as u32),
                            appeal: S::zero(),
                            state: Lifecycle::Uncertain,
                        });
                        id
                    })
                    .collect();
                let tally = PreferenceTally::new(
                    synthetic.iter().copied().zip(counts.iter().copied()).collect(),
                );
                step_tallies[r] = Some(TallySummary {
                    candidates: counts.len() as u32,
                    top_count: tally.top_count(),
                });
                apply_threshold(&tally, &policy, step)
            } else {
                let ready = ready_pool(&region.pool, step);
                match cast_preferences(&entrepreneurs, &ready, &mut region.finance_rng) {
                    Ok(tally) => {
                        step_tallies[r] = Some(TallySummary {
                            candidates: ready.len() as u32,
                            top_count: tally.top_count(),
                        });
                        apply_threshold(&tally, &policy, step)
                    }
                    Err(FinanceError::NoCandidates) => {
                        crate::finance::MutationBatch::empty(step)
                    }
                }
            };
            step_mutations[r] = batch.mutation_count() as u32;
            for id in &batch.financed {
                let tech = region
                    .pool
                    .iter_mut()
                    .find(|t| t.id == *id)
                    .expect("financed id came from the pool");
                tech.state = Lifecycle::Financed { step };
            }

            // Financed mutations realize their ex-post performance; pending
            // diffusion arrivals from the previous step realize here too.
            let mut candidates: Vec<CertainTechnology<S>> = Vec::new();
            for id in &batch.financed {
                let tech = region
                    .pool
                    .iter_mut()
                    .find(|t| t.id == *id)
                    .expect("financed id came from the pool");
                let realized =
                    realize_ex_post(tech, market, ex_post_spread, step, &mut region.expost_rng)?;
                tech.state = Lifecycle::CertainCandidate;
                candidates.push(realized);
            }
            for arrival in region.pending_arrivals.drain(..) {
                candidates.push(realize_arrival(
                    &arrival,
                    market,
                    ex_ante_p,
                    ex_post_spread,
                    step,
                    &mut region.expost_rng,
                ));
            }

            // Only the fittest survive; the rest leave the system.
            let outcome = select_fittest(market, &candidates, entry_share)?;
            *market = outcome.market;
            for tech in &mut region.pool {
                if tech.state == Lifecycle::CertainCandidate {
                    tech.state = if outcome.entered.contains(&tech.id) {
                        Lifecycle::InProduction { step }
                    } else {
                        Lifecycle::Discarded { step }
                    };
                }
            }
        }
        observer(step, EnginePhase::Selection, &markets);

        // Competitive drive: adoption shares drift toward the profitable.
        for market in &mut markets {
            *market = replicator_step(market, eta, extinction_floor);
        }
        observer(step, EnginePhase::Replicator, &markets);

        // Diffusion reads the frozen post-replicator markets and queues
        // arrivals for the next step.
        let arrivals = diffuse(&markets, &graph, &mut diffusion_rng);
        for arrival in arrivals {
            regions[arrival.to.0 as usize].pending_arrivals.push(arrival);
        }
        observer(step, EnginePhase::Diffusion, &markets);

        // Malthusian step: industrialization first, then food, then vitals.
        for (r, region) in regions.iter_mut().enumerate() {
            region.population = industrialize(
                &region.population,
                region.demo.transition_step,
                step,
                region.demo.decay,
            );
            let labor = region.population.population * region.demo.labor_share;
            let supply = food_supply(
                markets[r].productivity(),
                labor,
                region.demo.land_capacity,
                region.population.mode,
            );
            region.population = step_population(
                &region.population,
                &FoodAccount {
                    supply,
                    requirement_per_capita: region.demo.requirement,
                },
                &VitalRates {
                    base_birth: region.demo.base_birth,
                    base_death: region.demo.base_death,
                    famine_mortality: region.demo.famine_mortality,
                },
            );
        }

        steps.push(StepRecord {
            step,
            regions: (0..regions.len())
                .map(|r| RegionStepRecord {
                    mutations: step_mutations[r],
                    productivity: markets[r].productivity(),
                    average_profit_rate: markets[r].average_profit_rate(),
                    population: regions[r].population.population,
                    tally: step_tallies[r],
                })
                .collect(),
        });
    }

    let summary: Vec<RegionSummary<S>> = (0..regions.len())
        .map(|r| {
            let mut trace = Vec::with_capacity(steps.len() + 1);
            trace.push(initial_productivity[r]);
            trace.extend(steps.iter().map(|s| s.regions[r].productivity));
            Ok(RegionSummary {
                pace_of_evolution: pace_of_evolution(&trace)?,
                total_mutations: steps
                    .iter()
                    .map(|s| u64::from(s.regions[r].mutations))
                    .sum(),
                final_population: steps
                    .last()
                    .map(|s| s.regions[r].population)
                    .expect("horizon is at least one step"),
            })
        })
        .collect::<Result<_, SimError>>()?;

    let report = RunReport {
        scenario: config.name.clone(),
        seed: seed_echo,
        replication,
        horizon: config.horizon,
        region_names: regions.iter().map(|r| r.name.clone()).collect(),
        initial_productivity,
        steps,
        summary,
    };
    report.verify()?;
    Ok(report)
}
