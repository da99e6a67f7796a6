//! Agent-based simulator of Darwinian technological evolution in an economy.
//!
//! The model follows the binomial "appearance of the mutation – selection of
//! the fittest" through an economic lens:
//!
//! - [`genesis`] — innovative ideas arrive stochastically and R&D turns them
//!   into *uncertain* technologies.
//! - [`finance`] — entrepreneurs cast animal-spirits preferences over the
//!   uncertain pool; the banker finances every technology whose preference
//!   index meets a minimum threshold of consent. Financed technologies are
//!   the *mutations* of the system, and the threshold is its competition
//!   control parameter.
//! - [`selection`] — financed technologies realize ex-post profit rates and
//!   enter production only if they beat the incumbent average; adoption
//!   shares then drift toward above-average performers, and technologies
//!   diffuse across a weighted region graph (isolated regions behave as
//!   niches).
//! - [`demographics`] — a Malthusian population sub-model per region: food
//!   shortage culls population under traditional agriculture, patriarchal
//!   institutions maximize the birth rate, and industrialization removes the
//!   food ceiling while the birth push fades with a lag.
//! - [`scenario`] — a plain-text scenario format covering every parameter,
//!   four named presets, and a subjective-probability reweighting utility.
//! - [`montecarlo`] — deterministic replication harness and the
//!   consent-threshold sweep that measures how competition correlates with
//!   the pace of evolution.
//!
//! Every run is driven by a finite-horizon [`clock::SimulationClock`] and a
//! tree of splittable [`rng::RngStream`]s derived from one root seed, so any
//! report is bitwise reproducible from `(scenario, seed)` alone.
//!
//! Numeric kernels and domain types are generic over the [`scalar::Scalar`]
//! floating type; the shipped binaries and the acceptance suite instantiate
//! them at [`Real`] (`f64`).

pub mod clock;
pub mod demographics;
pub mod finance;
pub mod genesis;
pub mod montecarlo;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod scenario;
pub mod selection;
pub mod types;

pub use clock::SimulationClock;
pub use rng::RngStream;
pub use scalar::Scalar;

/// Scalar type used by the shipped CLI and the acceptance suite.
pub type Real = f64;

/// Region market state at the default scalar.
pub type Market = selection::MarketState<Real>;

/// Region population state at the default scalar.
pub type Population = demographics::PopulationState<Real>;

/// Per-run report at the default scalar.
pub type Report = montecarlo::RunReport<Real>;
