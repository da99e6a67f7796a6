//! Scenario configuration: file format, presets and prior elicitation.
//!
//! A scenario is a UTF-8, line-oriented key-value document (`path.to.key =
//! value`, `#` comments). The schema — keys, types, ranges, defaults — lives
//! in one registry that drives the parser, the serializer and the printed
//! schema reference, so the defaults table is normative: changing a default
//! is a breaking change.

mod parse;
mod preset;
mod schema;
mod subjective;

use std::fmt;

pub use preset::{preset, PRESET_NAMES};
pub use schema::{schema_text, serialize};
pub use subjective::{subjective_reweight, ProbabilityTable};

use crate::demographics::ProductionMode;
use crate::types::RegionId;

/// Errors raised while parsing or building scenarios.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScenarioError {
    /// Malformed document text; positions are 1-based.
    Syntax {
        line: u32,
        col: u32,
        message: String,
    },
    /// Well-formed document violating the schema; names the offending path.
    Schema { path: String, message: String },
    /// Unrecognized preset name.
    UnknownPreset { name: String },
    /// Frequency and compensation vectors differ in length.
    LengthMismatch { frequencies: usize, weights: usize },
    /// Every frequency·weight product is zero.
    AllMassExcluded,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Syntax { line, col, message } => {
                write!(f, "syntax error at line {line}, column {col}: {message}")
            }
            ScenarioError::Schema { path, message } => {
                write!(f, "schema error at `{path}`: {message}")
            }
            ScenarioError::UnknownPreset { name } => write!(f, "unknown preset `{name}`"),
            ScenarioError::LengthMismatch {
                frequencies,
                weights,
            } => write!(
                f,
                "compensation length {weights} does not match {frequencies} frequencies"
            ),
            ScenarioError::AllMassExcluded => {
                write!(f, "subjective compensation excludes all probability mass")
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

/// Fully validated parameterization of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub horizon: u32,
    pub seed: u64,
    pub genesis: GenesisParams,
    pub finance: FinanceParams,
    pub selection: SelectionParams,
    /// Demographic defaults inherited by every region block.
    pub demographics: DemographicsParams,
    pub regions: Vec<RegionSpec>,
    pub edges: Vec<EdgeSpec>,
    pub shocks: Vec<ShockSpec>,
    pub sweep: Option<SweepSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenesisParams {
    pub idea_rate: f64,
    pub rd_delay: u32,
    pub ex_ante_p: f64,
    pub productivity_spread: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FinanceParams {
    pub entrepreneurs: u32,
    pub concentration: f64,
    pub consent_threshold: u32,
    /// Steps an unfinanced technology stays in the pool; 0 keeps it forever.
    pub staleness_age: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionParams {
    pub entry_share: f64,
    pub eta: f64,
    pub extinction_floor: f64,
    pub ex_post_spread: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemographicsParams {
    pub base_birth: f64,
    pub base_death: f64,
    pub birth_factor: f64,
    pub birth_factor_decay: f64,
    pub requirement_per_capita: f64,
    pub land_capacity: f64,
    pub labor_share: f64,
    pub famine_mortality: f64,
    pub initial_mode: ProductionMode,
    /// Step at which a traditional region industrializes; a value past the
    /// horizon never fires.
    pub transition_step: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionSpec {
    pub name: String,
    pub initial_productivity: f64,
    pub initial_profit_rate: f64,
    /// Millions of persons.
    pub initial_population: f64,
    pub idea_rate: f64,
    pub demographics: DemographicsParams,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeSpec {
    pub from: RegionId,
    pub to: RegionId,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShockKind {
    Population,
    Productivity,
}

impl ShockKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShockKind::Population => "population",
            ShockKind::Productivity => "productivity",
        }
    }
}

/// Exogenous multiplicative event: at `step`, scale the region's population
/// or productivity by `magnitude`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShockSpec {
    pub step: u32,
    pub region: RegionId,
    pub kind: ShockKind,
    pub magnitude: f64,
}

/// Directive for a consent-threshold sweep instead of a single run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepSpec {
    pub thetas: Vec<u32>,
    pub replications: u32,
}

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let bindings = parse::parse_document(text)?;
    schema::assemble(&bindings)
}

impl ScenarioConfig {
    /// Region index by name.
    pub fn region_index(&self, name: &str) -> Option<RegionId> {
        self.regions
            .iter()
            .position(|r| r.name == name)
            .map(|i| RegionId(i as u32))
    }
}
