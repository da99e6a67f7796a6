//! Named, committed scenario presets.
//!
//! Four stylized futures plus two committed calibration scenarios:
//!
//! - `collapse` — a mid-run exogenous shock annihilates a large share of
//!   population and productivity.
//! - `ancien-regime` — the consent threshold sits above the entrepreneur
//!   count, so no mutation is ever financed and technology freezes.
//! - `everlasting-growth` — the threshold is zero: every request is financed
//!   and competition runs at full intensity.
//! - `panglossian-sweep` — not a single run but a sweep directive over the
//!   consent threshold; picking an "optimal" θ is left to whoever reads the
//!   sweep, deliberately.
//! - `reference` — the scenario the threshold sweep is measured on.
//! - `industrial-transition` — a century-long demographic run calibrated to
//!   a 3.62× population multiple (the 1900→2000 world total).

use super::{
    DemographicsParams, FinanceParams, GenesisParams, RegionSpec, ScenarioConfig, ScenarioError,
    EdgeSpec, SelectionParams, ShockKind, ShockSpec, SweepSpec,
};
use crate::demographics::ProductionMode;
use crate::types::RegionId;

fn industrial_demographics() -> DemographicsParams {
    DemographicsParams {
        base_birth: 0.02,
        base_death: 0.02,
        birth_factor: 1.0,
        birth_factor_decay: 0.0,
        requirement_per_capita: 1.0,
        land_capacity: 1000.0,
        labor_share: 0.6,
        famine_mortality: 0.5,
        initial_mode: ProductionMode::Industrial,
        transition_step: 0,
    }
}

fn region(name: &str, idea_rate: f64, demographics: DemographicsParams) -> RegionSpec {
    RegionSpec {
        name: name.to_owned(),
        initial_productivity: 1.0,
        initial_profit_rate: 0.1,
        initial_population: 10.0,
        idea_rate,
        demographics,
    }
}

/// Two connected regions, moderate financing. Base for the stylized futures.
fn two_region_base(name: &str) -> ScenarioConfig {
    let demographics = industrial_demographics();
    ScenarioConfig {
        name: name.to_owned(),
        horizon: 200,
        seed: 2007,
        genesis: GenesisParams {
            idea_rate: 0.5,
            rd_delay: 2,
            ex_ante_p: 0.3,
            productivity_spread: 0.05,
        },
        finance: FinanceParams {
            entrepreneurs: 100,
            concentration: 1.0,
            consent_threshold: 20,
            staleness_age: 8,
        },
        selection: SelectionParams {
            entry_share: 0.05,
            eta: 0.5,
            extinction_floor: 0.001,
            ex_post_spread: 0.02,
        },
        demographics,
        regions: vec![
            region("heartland", 0.5, demographics),
            region("frontier", 0.3, demographics),
        ],
        edges: vec![
            EdgeSpec {
                from: RegionId(0),
                to: RegionId(1),
                weight: 0.2,
            },
            EdgeSpec {
                from: RegionId(1),
                to: RegionId(0),
                weight: 0.1,
            },
        ],
        shocks: Vec::new(),
        sweep: None,
    }
}

/// Single-region scenario the committed threshold sweep runs on.
fn reference() -> ScenarioConfig {
    let demographics = industrial_demographics();
    ScenarioConfig {
        name: "reference".to_owned(),
        horizon: 40,
        seed: 2007,
        genesis: GenesisParams {
            idea_rate: 1.2,
            rd_delay: 1,
            ex_ante_p: 0.3,
            productivity_spread: 0.05,
        },
        finance: FinanceParams {
            entrepreneurs: 100,
            concentration: 1.0,
            consent_threshold: 20,
            staleness_age: 6,
        },
        selection: SelectionParams {
            entry_share: 0.05,
            eta: 0.5,
            extinction_floor: 0.001,
            ex_post_spread: 0.02,
        },
        demographics,
        regions: vec![region("reference", 1.2, demographics)],
        edges: Vec::new(),
        shocks: Vec::new(),
        sweep: None,
    }
}

fn collapse() -> ScenarioConfig {
    let mut config = two_region_base("collapse");
    // Mid-run global crisis: most of the population and a large part of the
    // productive structure disappear in both regions.
    config.shocks = vec![
        ShockSpec {
            step: 100,
            region: RegionId(0),
            kind: ShockKind::Population,
            magnitude: 0.2,
        },
        ShockSpec {
            step: 100,
            region: RegionId(0),
            kind: ShockKind::Productivity,
            magnitude: 0.4,
        },
        ShockSpec {
            step: 100,
            region: RegionId(1),
            kind: ShockKind::Population,
            magnitude: 0.2,
        },
        ShockSpec {
            step: 100,
            region: RegionId(1),
            kind: ShockKind::Productivity,
            magnitude: 0.4,
        },
    ];
    // Slight natural growth so the aftermath is visible in the trace.
    let grow = |d: &mut DemographicsParams| {
        d.base_birth = 0.025;
        d.base_death = 0.02;
    };
    grow(&mut config.demographics);
    for region in &mut config.regions {
        grow(&mut region.demographics);
    }
    config
}

fn ancien_regime() -> ScenarioConfig {
    let mut config = two_region_base("ancien-regime");
    // Consent above the entrepreneur count: no preference index can ever
    // reach it, so the banker finances nothing and technology freezes.
    config.finance.consent_threshold = config.finance.entrepreneurs + 1;
    config
}

fn everlasting_growth() -> ScenarioConfig {
    let mut config = two_region_base("everlasting-growth");
    // Direct access to loans for everyone: every request is financed.
    config.finance.consent_threshold = 0;
    config
}

fn panglossian_sweep() -> ScenarioConfig {
    let mut config = reference();
    config.name = "panglossian-sweep".to_owned();
    config.sweep = Some(SweepSpec {
        thetas: vec![0, 10, 20, 30, 40, 50, 60],
        replications: 100,
    });
    config
}

/// Calibrated century run: one step is one year, 1900 → 2000.
///
/// The birth factor below was found by bisection (see the
/// `calibrate_malthus` example) so that the population multiple over 100
/// steps is 3.6232, the 1900→2000 world ratio.
fn industrial_transition() -> ScenarioConfig {
    let demographics = DemographicsParams {
        base_birth: 0.022,
        base_death: 0.012,
        birth_factor: 1.6041,
        birth_factor_decay: 0.04,
        requirement_per_capita: 1.0,
        land_capacity: 10_000.0,
        labor_share: 0.6,
        famine_mortality: 0.5,
        initial_mode: ProductionMode::Industrial,
        transition_step: 0,
    };
    ScenarioConfig {
        name: "industrial-transition".to_owned(),
        horizon: 100,
        seed: 1900,
        genesis: GenesisParams {
            idea_rate: 0.0,
            rd_delay: 2,
            ex_ante_p: 0.3,
            productivity_spread: 0.05,
        },
        finance: FinanceParams {
            entrepreneurs: 100,
            concentration: 1.0,
            consent_threshold: 20,
            staleness_age: 0,
        },
        selection: SelectionParams {
            entry_share: 0.05,
            eta: 0.5,
            extinction_floor: 0.001,
            ex_post_spread: 0.02,
        },
        demographics,
        regions: vec![RegionSpec {
            name: "world".to_owned(),
            initial_productivity: 2.0,
            initial_profit_rate: 0.1,
            initial_population: 1656.0,
            idea_rate: 0.0,
            demographics,
        }],
        edges: Vec::new(),
        shocks: Vec::new(),
        sweep: None,
    }
}

/// Look up a committed preset by name.
pub fn preset(name: &str) -> Result<ScenarioConfig, ScenarioError> {
    match name {
        "collapse" => Ok(collapse()),
        "ancien-regime" => Ok(ancien_regime()),
        "everlasting-growth" => Ok(everlasting_growth()),
        "panglossian-sweep" => Ok(panglossian_sweep()),
        "reference" => Ok(reference()),
        "industrial-transition" => Ok(industrial_transition()),
        other => Err(ScenarioError::UnknownPreset {
            name: other.to_owned(),
        }),
    }
}

/// Names accepted by [`preset`], in documentation order.
pub const PRESET_NAMES: &[&str] = &[
    "collapse",
    "ancien-regime",
    "everlasting-growth",
    "panglossian-sweep",
    "reference",
    "industrial-transition",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_scenario, serialize};

    #[test]
    fn unknown_preset_is_rejected() {
        assert_eq!(
            preset("utopia"),
            Err(ScenarioError::UnknownPreset {
                name: "utopia".into()
            })
        );
    }

    #[test]
    fn ancien_regime_threshold_exceeds_the_entrepreneur_count() {
        let config = preset("ancien-regime").unwrap();
        assert!(config.finance.consent_threshold > config.finance.entrepreneurs);
    }

    #[test]
    fn everlasting_growth_threshold_is_zero() {
        assert_eq!(
            preset("everlasting-growth").unwrap().finance.consent_threshold,
            0
        );
    }

    #[test]
    fn panglossian_is_a_sweep_directive_not_a_single_run() {
        let config = preset("panglossian-sweep").unwrap();
        let sweep = config.sweep.expect("sweep directive");
        assert!(sweep.thetas.len() > 1);
        assert!(sweep.thetas.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn collapse_carries_a_mid_run_shock() {
        let config = preset("collapse").unwrap();
        assert!(!config.shocks.is_empty());
        assert!(config
            .shocks
            .iter()
            .all(|s| s.step > 1 && s.step < config.horizon && s.magnitude < 1.0));
    }

    #[test]
    fn every_preset_survives_a_serialize_round_trip() {
        for name in PRESET_NAMES {
            let config = preset(name).unwrap();
            let reparsed = parse_scenario(&serialize(&config)).unwrap();
            assert_eq!(reparsed, config, "round trip failed for {name}");
        }
    }
}
