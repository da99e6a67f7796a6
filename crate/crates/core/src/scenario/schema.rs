//! Key registry, document assembly and canonical serialization.
//!
//! Every key the parser accepts is declared here exactly once, with its type,
//! valid range, default and documentation. `assemble` validates a parsed
//! document against this registry, `serialize` re-emits a config in canonical
//! order, and `schema_text` prints the reference — all from the same table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::LazyLock;

use super::parse::{Binding, Value};
use super::{
    DemographicsParams, EdgeSpec, FinanceParams, GenesisParams, ScenarioConfig, ScenarioError,
    SelectionParams, ShockKind, ShockSpec, SweepSpec, RegionSpec,
};
use crate::demographics::ProductionMode;
use crate::types::RegionId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Kind {
    Str,
    Mode,
    Shock,
    U64,
    Int { min: i64, max: i64 },
    Dec { min: f64, max: f64, min_open: bool, max_open: bool },
    IntList { min: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum DefaultSpec {
    /// Must appear in every document.
    Required,
    /// Must appear whenever its indexed group exists.
    RequiredInGroup,
    /// Canonical default text, parsed by the value grammar.
    Value(&'static str),
    /// Falls back to another key's effective value.
    Inherits(&'static str),
    /// Optional with no default at all.
    Absent,
}

pub(crate) struct KeyDef {
    pub pattern: &'static str,
    pub kind: Kind,
    pub default: DefaultSpec,
    pub doc: &'static str,
}

const DEC_ANY: Kind = Kind::Dec {
    min: f64::NEG_INFINITY,
    max: f64::INFINITY,
    min_open: false,
    max_open: false,
};

const fn dec_min(min: f64) -> Kind {
    Kind::Dec {
        min,
        max: f64::INFINITY,
        min_open: false,
        max_open: false,
    }
}

const fn dec_range(min: f64, max: f64) -> Kind {
    Kind::Dec {
        min,
        max,
        min_open: false,
        max_open: false,
    }
}

const PROBABILITY: Kind = dec_range(0.0, 1.0);

/// Demographic fields shared between the top-level block and region blocks:
/// `(field, kind, default text, doc)`.
const DEMOGRAPHIC_FIELDS: &[(&str, Kind, &str, &str)] = &[
    (
        "base_birth",
        PROBABILITY,
        "0.02",
        "Baseline birth rate per person per step.",
    ),
    (
        "base_death",
        PROBABILITY,
        "0.02",
        "Natural death rate per person per step.",
    ),
    (
        "birth_factor",
        dec_min(0.0),
        "1",
        "Patriarchal multiplier on the baseline birth rate; 1 is neutral.",
    ),
    (
        "birth_factor_decay",
        PROBABILITY,
        "0",
        "Per-step geometric decay of the birth factor toward 1 after industrialization.",
    ),
    (
        "requirement_per_capita",
        Kind::Dec {
            min: 0.0,
            max: f64::INFINITY,
            min_open: true,
            max_open: false,
        },
        "1",
        "Food units one person needs per step.",
    ),
    (
        "land_capacity",
        dec_min(0.0),
        "1000",
        "Natural ceiling on food output in traditional mode, in food units.",
    ),
    (
        "labor_share",
        PROBABILITY,
        "0.6",
        "Fraction of the population working in food production.",
    ),
    (
        "famine_mortality",
        PROBABILITY,
        "0.5",
        "Mortality applied to the unnourished fraction of the population.",
    ),
    (
        "initial_mode",
        Kind::Mode,
        "\"industrial\"",
        "Food regime at step 0: \"traditional\" or \"industrial\".",
    ),
    (
        "transition_step",
        Kind::Int {
            min: 0,
            max: u32::MAX as i64,
        },
        "0",
        "Step at which a traditional region industrializes; beyond the horizon it never fires.",
    ),
];

fn push_demographics(
    defs: &mut Vec<KeyDef>,
    prefix: &'static str,
    inherit_prefix: Option<&'static str>,
) {
    for (field, kind, default, doc) in DEMOGRAPHIC_FIELDS {
        let pattern: &'static str =
            Box::leak(format!("{prefix}.{field}").into_boxed_str());
        let default = match inherit_prefix {
            None => DefaultSpec::Value(default),
            Some(parent) => {
                DefaultSpec::Inherits(Box::leak(format!("{parent}.{field}").into_boxed_str()))
            }
        };
        defs.push(KeyDef {
            pattern,
            kind: *kind,
            default,
            doc,
        });
    }
}

pub(crate) static SCHEMA: LazyLock<Vec<KeyDef>> = LazyLock::new(|| {
    let mut defs = vec![
        KeyDef {
            pattern: "name",
            kind: Kind::Str,
            default: DefaultSpec::Required,
            doc: "Scenario title, echoed verbatim into every report.",
        },
        KeyDef {
            pattern: "horizon",
            kind: Kind::Int {
                min: 1,
                max: i64::from(u32::MAX),
            },
            default: DefaultSpec::Required,
            doc: "Total number of steps; every run is finite and stops exactly here.",
        },
        KeyDef {
            pattern: "seed",
            kind: Kind::U64,
            default: DefaultSpec::Required,
            doc: "Root seed of the run's random stream tree, echoed into reports.",
        },
        KeyDef {
            pattern: "genesis.idea_rate",
            kind: dec_min(0.0),
            default: DefaultSpec::Value("0.5"),
            doc: "Mean innovative ideas per region per step (Poisson).",
        },
        KeyDef {
            pattern: "genesis.rd_delay",
            kind: Kind::Int {
                min: 1,
                max: i64::from(u32::MAX),
            },
            default: DefaultSpec::Value("2"),
            doc: "Steps between an idea's conception and R&D completion.",
        },
        KeyDef {
            pattern: "genesis.ex_ante_p",
            kind: PROBABILITY,
            default: DefaultSpec::Value("0.3"),
            doc: "Ex-ante probability of beating the average profit rate; identical for every uncertain technology.",
        },
        KeyDef {
            pattern: "genesis.productivity_spread",
            kind: dec_min(0.0),
            default: DefaultSpec::Value("0.05"),
            doc: "Lognormal spread of a new technology's productivity around the regional level.",
        },
        KeyDef {
            pattern: "finance.entrepreneurs",
            kind: Kind::Int {
                min: 1,
                max: i64::from(u32::MAX),
            },
            default: DefaultSpec::Value("100"),
            doc: "Number of entrepreneurs casting preferences each round.",
        },
        KeyDef {
            pattern: "finance.concentration",
            kind: dec_min(0.0),
            default: DefaultSpec::Value("1"),
            doc: "How sharply preferences concentrate on the subjectively best technology; 0 spreads votes uniformly.",
        },
        KeyDef {
            pattern: "finance.consent_threshold",
            kind: Kind::Int {
                min: 0,
                max: i64::from(u32::MAX),
            },
            default: DefaultSpec::Value("20"),
            doc: "Banker's minimum preference index θ; 0 finances everything, above the entrepreneur count nothing.",
        },
        KeyDef {
            pattern: "finance.staleness_age",
            kind: Kind::Int {
                min: 0,
                max: i64::from(u32::MAX),
            },
            default: DefaultSpec::Value("0"),
            doc: "Steps an unfinanced technology may wait in the pool; 0 keeps it forever.",
        },
        KeyDef {
            pattern: "selection.entry_share",
            kind: Kind::Dec {
                min: 0.0,
                max: 1.0,
                min_open: true,
                max_open: true,
            },
            default: DefaultSpec::Value("0.05"),
            doc: "Adoption share a surviving entrant receives; incumbents are rescaled.",
        },
        KeyDef {
            pattern: "selection.eta",
            kind: dec_min(0.0),
            default: DefaultSpec::Value("0.5"),
            doc: "Selection intensity of the per-step share drift toward above-average profit rates.",
        },
        KeyDef {
            pattern: "selection.extinction_floor",
            kind: Kind::Dec {
                min: 0.0,
                max: 1.0,
                min_open: false,
                max_open: true,
            },
            default: DefaultSpec::Value("0.001"),
            doc: "Adoption share below which a technology leaves the market.",
        },
        KeyDef {
            pattern: "selection.ex_post_spread",
            kind: dec_min(0.0),
            default: DefaultSpec::Value("0.02"),
            doc: "Scale of the ex-post profit-rate deviation from the market average.",
        },
    ];

    push_demographics(&mut defs, "demographics", None);

    defs.push(KeyDef {
        pattern: "region.<i>.name",
        kind: Kind::Str,
        default: DefaultSpec::RequiredInGroup,
        doc: "Region name; must be unique and is used by edges, shocks and reports.",
    });
    defs.push(KeyDef {
        pattern: "region.<i>.initial_productivity",
        kind: Kind::Dec {
            min: 0.0,
            max: f64::INFINITY,
            min_open: true,
            max_open: false,
        },
        default: DefaultSpec::Value("1"),
        doc: "Productivity of the region's incumbent technology at step 0.",
    });
    defs.push(KeyDef {
        pattern: "region.<i>.initial_profit_rate",
        kind: DEC_ANY,
        default: DefaultSpec::Value("0.1"),
        doc: "Ex-post profit rate of the incumbent technology at step 0.",
    });
    defs.push(KeyDef {
        pattern: "region.<i>.initial_population",
        kind: dec_min(0.0),
        default: DefaultSpec::Value("1"),
        doc: "Population at step 0, in millions of persons.",
    });
    defs.push(KeyDef {
        pattern: "region.<i>.idea_rate",
        kind: dec_min(0.0),
        default: DefaultSpec::Inherits("genesis.idea_rate"),
        doc: "Per-region override of genesis.idea_rate.",
    });
    push_demographics(&mut defs, "region.<i>.demographics", Some("demographics"));

    defs.push(KeyDef {
        pattern: "edge.<i>.from",
        kind: Kind::Str,
        default: DefaultSpec::RequiredInGroup,
        doc: "Source region name of a diffusion edge.",
    });
    defs.push(KeyDef {
        pattern: "edge.<i>.to",
        kind: Kind::Str,
        default: DefaultSpec::RequiredInGroup,
        doc: "Destination region name of a diffusion edge; self-edges are forbidden.",
    });
    defs.push(KeyDef {
        pattern: "edge.<i>.weight",
        kind: dec_range(0.0, 1.0),
        default: DefaultSpec::RequiredInGroup,
        doc: "Per-step probability that the source's best technology is copied.",
    });

    defs.push(KeyDef {
        pattern: "shock.<i>.step",
        kind: Kind::Int {
            min: 1,
            max: i64::from(u32::MAX),
        },
        default: DefaultSpec::RequiredInGroup,
        doc: "Step at which the exogenous shock fires.",
    });
    defs.push(KeyDef {
        pattern: "shock.<i>.region",
        kind: Kind::Str,
        default: DefaultSpec::RequiredInGroup,
        doc: "Region the shock applies to.",
    });
    defs.push(KeyDef {
        pattern: "shock.<i>.kind",
        kind: Kind::Shock,
        default: DefaultSpec::RequiredInGroup,
        doc: "What the shock scales: \"population\" or \"productivity\".",
    });
    defs.push(KeyDef {
        pattern: "shock.<i>.magnitude",
        kind: dec_min(0.0),
        default: DefaultSpec::RequiredInGroup,
        doc: "Multiplicative magnitude; 0.3 destroys seventy percent.",
    });

    defs.push(KeyDef {
        pattern: "sweep.thetas",
        kind: Kind::IntList { min: 0 },
        default: DefaultSpec::Absent,
        doc: "Consent thresholds to sweep, ascending and distinct; turns the scenario into a sweep directive.",
    });
    defs.push(KeyDef {
        pattern: "sweep.replications",
        kind: Kind::Int {
            min: 1,
            max: i64::from(u32::MAX),
        },
        default: DefaultSpec::Value("100"),
        doc: "Replications per swept threshold.",
    });

    defs
});

fn is_index_segment(segment: &str) -> bool {
    !segment.is_empty() && segment.chars().all(|c| c.is_ascii_digit())
}

fn pattern_matches(pattern: &str, segments: &[String]) -> bool {
    let parts: Vec<&str> = pattern.split('.').collect();
    parts.len() == segments.len()
        && parts
            .iter()
            .zip(segments)
            .all(|(p, s)| if *p == "<i>" { is_index_segment(s) } else { p == s })
}

fn find_def(segments: &[String]) -> Option<&'static KeyDef> {
    SCHEMA.iter().find(|def| pattern_matches(def.pattern, segments))
}

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn range_text(kind: &Kind) -> String {
    match kind {
        Kind::Str => "string".into(),
        Kind::Mode => "\"traditional\" | \"industrial\"".into(),
        Kind::Shock => "\"population\" | \"productivity\"".into(),
        Kind::U64 => "integer in [0, 2^64)".into(),
        Kind::Int { min, max } => {
            if *max == i64::from(u32::MAX) {
                format!("integer >= {min}")
            } else {
                format!("integer in [{min}, {max}]")
            }
        }
        Kind::Dec {
            min,
            max,
            min_open,
            max_open,
        } => {
            if min.is_infinite() && max.is_infinite() {
                "decimal".into()
            } else if max.is_infinite() {
                format!("decimal {} {min}", if *min_open { ">" } else { ">=" })
            } else {
                format!(
                    "decimal in {}{min}, {max}{}",
                    if *min_open { "(" } else { "[" },
                    if *max_open { ")" } else { "]" }
                )
            }
        }
        Kind::IntList { min } => format!("list of integers >= {min}"),
    }
}

fn check_value(path: &str, value: &Value, kind: &Kind) -> Result<(), ScenarioError> {
    let fail = || schema_err(path, format!("expected {}", range_text(kind)));
    match kind {
        Kind::Str => matches!(value, Value::Str(_)).then_some(()).ok_or_else(fail),
        Kind::Mode => match value {
            Value::Str(s) if s == "traditional" || s == "industrial" => Ok(()),
            _ => Err(fail()),
        },
        Kind::Shock => match value {
            Value::Str(s) if s == "population" || s == "productivity" => Ok(()),
            _ => Err(fail()),
        },
        Kind::U64 => match value {
            Value::Int(v) if *v >= 0 && *v <= i128::from(u64::MAX) => Ok(()),
            _ => Err(fail()),
        },
        Kind::Int { min, max } => match value {
            Value::Int(v) if *v >= i128::from(*min) && *v <= i128::from(*max) => Ok(()),
            _ => Err(fail()),
        },
        Kind::Dec {
            min,
            max,
            min_open,
            max_open,
        } => {
            let v = match value {
                Value::Dec(v) => *v,
                Value::Int(v) => *v as f64,
                _ => return Err(fail()),
            };
            let lo_ok = if *min_open { v > *min } else { v >= *min };
            let hi_ok = if *max_open { v < *max } else { v <= *max };
            (v.is_finite() && lo_ok && hi_ok).then_some(()).ok_or_else(fail)
        }
        Kind::IntList { min } => match value {
            Value::List(items)
                if items
                    .iter()
                    .all(|i| matches!(i, Value::Int(v) if *v >= i128::from(*min))) =>
            {
                Ok(())
            }
            _ => Err(fail()),
        },
    }
}

/// A validated document: every binding matched and type-checked.
struct Doc<'a> {
    map: BTreeMap<String, &'a Binding>,
}

impl Doc<'_> {
    fn effective(&self, path: &str) -> Result<Option<Value>, ScenarioError> {
        if let Some(binding) = self.map.get(path) {
            return Ok(Some(binding.value.clone()));
        }
        let segments: Vec<String> = path.split('.').map(str::to_owned).collect();
        let def = find_def(&segments).expect("assemble queries declared keys only");
        match def.default {
            DefaultSpec::Required | DefaultSpec::RequiredInGroup => {
                Err(schema_err(path, "required key is missing"))
            }
            DefaultSpec::Value(text) => Ok(Some(parse_default(text))),
            DefaultSpec::Inherits(parent) => self.effective(parent),
            DefaultSpec::Absent => Ok(None),
        }
    }

    fn required(&self, path: &str) -> Result<Value, ScenarioError> {
        self.effective(path)?
            .ok_or_else(|| schema_err(path, "required key is missing"))
    }

    fn dec(&self, path: &str) -> Result<f64, ScenarioError> {
        match self.required(path)? {
            Value::Dec(v) => Ok(v),
            Value::Int(v) => Ok(v as f64),
            other => Err(schema_err(path, format!("expected decimal, got {}", other.type_name()))),
        }
    }

    fn u32_of(&self, path: &str) -> Result<u32, ScenarioError> {
        match self.required(path)? {
            Value::Int(v) => Ok(v as u32),
            other => Err(schema_err(path, format!("expected integer, got {}", other.type_name()))),
        }
    }

    fn u64_of(&self, path: &str) -> Result<u64, ScenarioError> {
        match self.required(path)? {
            Value::Int(v) => Ok(v as u64),
            other => Err(schema_err(path, format!("expected integer, got {}", other.type_name()))),
        }
    }

    fn string(&self, path: &str) -> Result<String, ScenarioError> {
        match self.required(path)? {
            Value::Str(s) => Ok(s),
            other => Err(schema_err(path, format!("expected string, got {}", other.type_name()))),
        }
    }

    fn mode(&self, path: &str) -> Result<ProductionMode, ScenarioError> {
        Ok(match self.string(path)?.as_str() {
            "traditional" => ProductionMode::Traditional,
            _ => ProductionMode::Industrial,
        })
    }

    fn demographics(&self, prefix: &str) -> Result<DemographicsParams, ScenarioError> {
        Ok(DemographicsParams {
            base_birth: self.dec(&format!("{prefix}.base_birth"))?,
            base_death: self.dec(&format!("{prefix}.base_death"))?,
            birth_factor: self.dec(&format!("{prefix}.birth_factor"))?,
            birth_factor_decay: self.dec(&format!("{prefix}.birth_factor_decay"))?,
            requirement_per_capita: self.dec(&format!("{prefix}.requirement_per_capita"))?,
            land_capacity: self.dec(&format!("{prefix}.land_capacity"))?,
            labor_share: self.dec(&format!("{prefix}.labor_share"))?,
            famine_mortality: self.dec(&format!("{prefix}.famine_mortality"))?,
            initial_mode: self.mode(&format!("{prefix}.initial_mode"))?,
            transition_step: self.u32_of(&format!("{prefix}.transition_step"))?,
        })
    }

    /// Contiguous 0-based index count for a group such as `region` or `edge`.
    fn group_count(&self, group: &str) -> Result<usize, ScenarioError> {
        let mut indices: Vec<u64> = Vec::new();
        for path in self.map.keys() {
            let mut segs = path.split('.');
            if segs.next() == Some(group) {
                if let Some(index) = segs.next() {
                    if is_index_segment(index) {
                        indices.push(index.parse().expect("digits"));
                    }
                }
            }
        }
        indices.sort_unstable();
        indices.dedup();
        for (expected, got) in indices.iter().enumerate() {
            if *got != expected as u64 {
                return Err(schema_err(
                    format!("{group}.{expected}"),
                    format!("{group} indices must be contiguous from 0; found {group}.{got}"),
                ));
            }
        }
        Ok(indices.len())
    }
}

fn parse_default(text: &str) -> Value {
    let bindings = super::parse::parse_document(&format!("default = {text}"))
        .expect("schema defaults are well-formed");
    bindings.into_iter().next().expect("one binding").value
}

/// Validate bindings against the registry and build the config.
pub(crate) fn assemble(bindings: &[Binding]) -> Result<ScenarioConfig, ScenarioError> {
    let mut map: BTreeMap<String, &Binding> = BTreeMap::new();
    for binding in bindings {
        let def = find_def(&binding.segments).ok_or_else(|| {
            schema_err(&binding.path, "unknown key (see `scenario-schema` for the full list)")
        })?;
        for segment in &binding.segments {
            if is_index_segment(segment) && segment.len() > 1 && segment.starts_with('0') {
                return Err(schema_err(
                    &binding.path,
                    "index segments must not have leading zeros",
                ));
            }
        }
        check_value(&binding.path, &binding.value, &def.kind)?;
        if map.insert(binding.path.clone(), binding).is_some() {
            return Err(schema_err(&binding.path, "duplicate key"));
        }
    }
    let doc = Doc { map };

    let region_count = doc.group_count("region")?;
    if region_count == 0 {
        return Err(schema_err("region.0.name", "at least one region is required"));
    }

    let mut regions = Vec::with_capacity(region_count);
    for i in 0..region_count {
        let name = doc.string(&format!("region.{i}.name"))?;
        if regions.iter().any(|r: &RegionSpec| r.name == name) {
            return Err(schema_err(
                format!("region.{i}.name"),
                format!("duplicate region name `{name}`"),
            ));
        }
        regions.push(RegionSpec {
            name,
            initial_productivity: doc.dec(&format!("region.{i}.initial_productivity"))?,
            initial_profit_rate: doc.dec(&format!("region.{i}.initial_profit_rate"))?,
            initial_population: doc.dec(&format!("region.{i}.initial_population"))?,
            idea_rate: doc.dec(&format!("region.{i}.idea_rate"))?,
            demographics: doc.demographics(&format!("region.{i}.demographics"))?,
        });
    }

    let resolve = |path: String, name: &str| -> Result<RegionId, ScenarioError> {
        regions
            .iter()
            .position(|r| r.name == name)
            .map(|i| RegionId(i as u32))
            .ok_or_else(|| schema_err(path, format!("references undeclared region `{name}`")))
    };

    let edge_count = doc.group_count("edge")?;
    let mut edges = Vec::with_capacity(edge_count);
    for i in 0..edge_count {
        let from_name = doc.string(&format!("edge.{i}.from"))?;
        let to_name = doc.string(&format!("edge.{i}.to"))?;
        let from = resolve(format!("edge.{i}.from"), &from_name)?;
        let to = resolve(format!("edge.{i}.to"), &to_name)?;
        if from == to {
            return Err(schema_err(
                format!("edge.{i}.to"),
                "self-edges are forbidden",
            ));
        }
        edges.push(EdgeSpec {
            from,
            to,
            weight: doc.dec(&format!("edge.{i}.weight"))?,
        });
    }

    let shock_count = doc.group_count("shock")?;
    let mut shocks = Vec::with_capacity(shock_count);
    for i in 0..shock_count {
        let region_name = doc.string(&format!("shock.{i}.region"))?;
        let kind = match doc.string(&format!("shock.{i}.kind"))?.as_str() {
            "population" => ShockKind::Population,
            _ => ShockKind::Productivity,
        };
        shocks.push(ShockSpec {
            step: doc.u32_of(&format!("shock.{i}.step"))?,
            region: resolve(format!("shock.{i}.region"), &region_name)?,
            kind,
            magnitude: doc.dec(&format!("shock.{i}.magnitude"))?,
        });
    }

    let sweep = match doc.effective("sweep.thetas")? {
        None => {
            if doc.map.contains_key("sweep.replications") {
                return Err(schema_err(
                    "sweep.thetas",
                    "sweep.replications is set but sweep.thetas is missing",
                ));
            }
            None
        }
        Some(Value::List(items)) => {
            let thetas: Vec<u32> = items
                .iter()
                .map(|v| match v {
                    Value::Int(i) => *i as u32,
                    _ => unreachable!("checked by kind"),
                })
                .collect();
            if thetas.is_empty() {
                return Err(schema_err("sweep.thetas", "theta list must be non-empty"));
            }
            if !thetas.windows(2).all(|w| w[0] < w[1]) {
                return Err(schema_err(
                    "sweep.thetas",
                    "thetas must be ascending and distinct",
                ));
            }
            Some(SweepSpec {
                thetas,
                replications: doc.u32_of("sweep.replications")?,
            })
        }
        Some(other) => {
            return Err(schema_err(
                "sweep.thetas",
                format!("expected list of integers, got {}", other.type_name()),
            ))
        }
    };

    Ok(ScenarioConfig {
        name: doc.string("name")?,
        horizon: doc.u32_of("horizon")?,
        seed: doc.u64_of("seed")?,
        genesis: GenesisParams {
            idea_rate: doc.dec("genesis.idea_rate")?,
            rd_delay: doc.u32_of("genesis.rd_delay")?,
            ex_ante_p: doc.dec("genesis.ex_ante_p")?,
            productivity_spread: doc.dec("genesis.productivity_spread")?,
        },
        finance: FinanceParams {
            entrepreneurs: doc.u32_of("finance.entrepreneurs")?,
            concentration: doc.dec("finance.concentration")?,
            consent_threshold: doc.u32_of("finance.consent_threshold")?,
            staleness_age: doc.u32_of("finance.staleness_age")?,
        },
        selection: SelectionParams {
            entry_share: doc.dec("selection.entry_share")?,
            eta: doc.dec("selection.eta")?,
            extinction_floor: doc.dec("selection.extinction_floor")?,
            ex_post_spread: doc.dec("selection.ex_post_spread")?,
        },
        demographics: doc.demographics("demographics")?,
        regions,
        edges,
        shocks,
        sweep,
    })
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn mode_text(mode: ProductionMode) -> &'static str {
    match mode {
        ProductionMode::Traditional => "\"traditional\"",
        ProductionMode::Industrial => "\"industrial\"",
    }
}

fn write_demographics(out: &mut String, prefix: &str, d: &DemographicsParams) {
    let _ = writeln!(out, "{prefix}.base_birth = {}", d.base_birth);
    let _ = writeln!(out, "{prefix}.base_death = {}", d.base_death);
    let _ = writeln!(out, "{prefix}.birth_factor = {}", d.birth_factor);
    let _ = writeln!(out, "{prefix}.birth_factor_decay = {}", d.birth_factor_decay);
    let _ = writeln!(
        out,
        "{prefix}.requirement_per_capita = {}",
        d.requirement_per_capita
    );
    let _ = writeln!(out, "{prefix}.land_capacity = {}", d.land_capacity);
    let _ = writeln!(out, "{prefix}.labor_share = {}", d.labor_share);
    let _ = writeln!(out, "{prefix}.famine_mortality = {}", d.famine_mortality);
    let _ = writeln!(out, "{prefix}.initial_mode = {}", mode_text(d.initial_mode));
    let _ = writeln!(out, "{prefix}.transition_step = {}", d.transition_step);
}

/// Canonical document for a config; `parse_scenario(serialize(c)) == c`.
pub fn serialize(config: &ScenarioConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name = {}", quote(&config.name));
    let _ = writeln!(out, "horizon = {}", config.horizon);
    let _ = writeln!(out, "seed = {}", config.seed);

    let g = &config.genesis;
    let _ = writeln!(out, "genesis.idea_rate = {}", g.idea_rate);
    let _ = writeln!(out, "genesis.rd_delay = {}", g.rd_delay);
    let _ = writeln!(out, "genesis.ex_ante_p = {}", g.ex_ante_p);
    let _ = writeln!(out, "genesis.productivity_spread = {}", g.productivity_spread);

    let f = &config.finance;
    let _ = writeln!(out, "finance.entrepreneurs = {}", f.entrepreneurs);
    let _ = writeln!(out, "finance.concentration = {}", f.concentration);
    let _ = writeln!(out, "finance.consent_threshold = {}", f.consent_threshold);
    let _ = writeln!(out, "finance.staleness_age = {}", f.staleness_age);

    let s = &config.selection;
    let _ = writeln!(out, "selection.entry_share = {}", s.entry_share);
    let _ = writeln!(out, "selection.eta = {}", s.eta);
    let _ = writeln!(out, "selection.extinction_floor = {}", s.extinction_floor);
    let _ = writeln!(out, "selection.ex_post_spread = {}", s.ex_post_spread);

    write_demographics(&mut out, "demographics", &config.demographics);

    for (i, region) in config.regions.iter().enumerate() {
        let _ = writeln!(out, "region.{i}.name = {}", quote(&region.name));
        let _ = writeln!(
            out,
            "region.{i}.initial_productivity = {}",
            region.initial_productivity
        );
        let _ = writeln!(
            out,
            "region.{i}.initial_profit_rate = {}",
            region.initial_profit_rate
        );
        let _ = writeln!(
            out,
            "region.{i}.initial_population = {}",
            region.initial_population
        );
        let _ = writeln!(out, "region.{i}.idea_rate = {}", region.idea_rate);
        write_demographics(&mut out, &format!("region.{i}.demographics"), &region.demographics);
    }

    for (i, edge) in config.edges.iter().enumerate() {
        let from = &config.regions[edge.from.0 as usize].name;
        let to = &config.regions[edge.to.0 as usize].name;
        let _ = writeln!(out, "edge.{i}.from = {}", quote(from));
        let _ = writeln!(out, "edge.{i}.to = {}", quote(to));
        let _ = writeln!(out, "edge.{i}.weight = {}", edge.weight);
    }

    for (i, shock) in config.shocks.iter().enumerate() {
        let region = &config.regions[shock.region.0 as usize].name;
        let _ = writeln!(out, "shock.{i}.step = {}", shock.step);
        let _ = writeln!(out, "shock.{i}.region = {}", quote(region));
        let _ = writeln!(out, "shock.{i}.kind = {}", quote(shock.kind.as_str()));
        let _ = writeln!(out, "shock.{i}.magnitude = {}", shock.magnitude);
    }

    if let Some(sweep) = &config.sweep {
        let thetas: Vec<String> = sweep.thetas.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(out, "sweep.thetas = [{}]", thetas.join(", "));
        let _ = writeln!(out, "sweep.replications = {}", sweep.replications);
    }

    out
}

/// Human-readable schema reference, generated from the registry.
pub fn schema_text() -> String {
    let mut out = String::new();
    out.push_str("Scenario file schema (`*.scn`, UTF-8)\n");
    out.push_str("Grammar: one `path.to.key = value` per line; `#` starts a comment;\n");
    out.push_str("values are integers, decimals, booleans, quoted strings or [a, b, c] lists.\n");
    out.push_str("`<i>` marks a 0-based contiguous group index (region.0, region.1, ...).\n\n");

    let width = SCHEMA.iter().map(|d| d.pattern.len()).max().unwrap_or(0);
    for def in SCHEMA.iter() {
        let default = match def.default {
            DefaultSpec::Required => "required".to_string(),
            DefaultSpec::RequiredInGroup => "required in group".to_string(),
            DefaultSpec::Value(v) => format!("default {v}"),
            DefaultSpec::Inherits(parent) => format!("default: value of {parent}"),
            DefaultSpec::Absent => "optional".to_string(),
        };
        let _ = writeln!(
            out,
            "{:width$}  {} ({})\n{:width$}  {}\n",
            def.pattern,
            range_text(&def.kind),
            default,
            "",
            def.doc,
            width = width,
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    const MINIMAL: &str = "name = \"tiny\"\nhorizon = 10\nseed = 7\nregion.0.name = \"alpha\"\n";

    #[test]
    fn minimal_document_gets_all_defaults() {
        let config = parse_scenario(MINIMAL).unwrap();
        assert_eq!(config.name, "tiny");
        assert_eq!(config.horizon, 10);
        assert_eq!(config.seed, 7);
        assert_eq!(config.genesis.idea_rate, 0.5);
        assert_eq!(config.genesis.rd_delay, 2);
        assert_eq!(config.genesis.ex_ante_p, 0.3);
        assert_eq!(config.finance.entrepreneurs, 100);
        assert_eq!(config.finance.consent_threshold, 20);
        assert_eq!(config.selection.entry_share, 0.05);
        assert_eq!(config.selection.extinction_floor, 0.001);
        assert_eq!(config.demographics.famine_mortality, 0.5);
        assert_eq!(config.regions.len(), 1);
        let region = &config.regions[0];
        assert_eq!(region.initial_productivity, 1.0);
        assert_eq!(region.initial_profit_rate, 0.1);
        assert_eq!(region.idea_rate, 0.5);
        assert_eq!(region.demographics, config.demographics);
        assert!(config.edges.is_empty());
        assert!(config.sweep.is_none());
    }

    #[test]
    fn missing_horizon_names_the_path() {
        let err = parse_scenario("name = \"x\"\nseed = 1\nregion.0.name = \"a\"\n").unwrap_err();
        assert_eq!(
            err,
            ScenarioError::Schema {
                path: "horizon".into(),
                message: "required key is missing".into()
            }
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_scenario(&format!("{MINIMAL}bogus.key = 3\n")).unwrap_err();
        match err {
            ScenarioError::Schema { path, .. } => assert_eq!(path, "bogus.key"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_values_name_the_path() {
        let err =
            parse_scenario(&format!("{MINIMAL}genesis.ex_ante_p = 1.5\n")).unwrap_err();
        match err {
            ScenarioError::Schema { path, message } => {
                assert_eq!(path, "genesis.ex_ante_p");
                assert!(message.contains("[0, 1]"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse_scenario(&format!("{MINIMAL}seed = 8\n")).unwrap_err();
        match err {
            ScenarioError::Schema { path, message } => {
                assert_eq!(path, "seed");
                assert_eq!(message, "duplicate key");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn region_overrides_inherit_from_the_defaults_block() {
        let text = format!(
            "{MINIMAL}demographics.base_birth = 0.04\nregion.0.demographics.base_death = 0.01\n"
        );
        let config = parse_scenario(&text).unwrap();
        assert_eq!(config.regions[0].demographics.base_birth, 0.04);
        assert_eq!(config.regions[0].demographics.base_death, 0.01);
        assert_eq!(config.demographics.base_death, 0.02);
    }

    #[test]
    fn dangling_edge_reference_is_an_error() {
        let text = format!(
            "{MINIMAL}edge.0.from = \"alpha\"\nedge.0.to = \"nowhere\"\nedge.0.weight = 0.5\n"
        );
        let err = parse_scenario(&text).unwrap_err();
        match err {
            ScenarioError::Schema { path, message } => {
                assert_eq!(path, "edge.0.to");
                assert!(message.contains("nowhere"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_contiguous_group_indices_are_rejected() {
        let text = format!("{MINIMAL}region.2.name = \"beta\"\n");
        let err = parse_scenario(&text).unwrap_err();
        match err {
            ScenarioError::Schema { path, .. } => assert_eq!(path, "region.1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sweep_thetas_must_ascend() {
        let err = parse_scenario(&format!("{MINIMAL}sweep.thetas = [5, 3]\n")).unwrap_err();
        match err {
            ScenarioError::Schema { path, .. } => assert_eq!(path, "sweep.thetas"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_identity_on_the_config() {
        let text = format!(
            "{MINIMAL}\
             region.1.name = \"beta\"\n\
             region.1.initial_productivity = 2.5\n\
             region.1.demographics.initial_mode = \"traditional\"\n\
             edge.0.from = \"alpha\"\nedge.0.to = \"beta\"\nedge.0.weight = 0.25\n\
             shock.0.step = 5\nshock.0.region = \"beta\"\nshock.0.kind = \"population\"\n\
             shock.0.magnitude = 0.3\n\
             sweep.thetas = [0, 10, 20]\n"
        );
        let config = parse_scenario(&text).unwrap();
        let emitted = serialize(&config);
        let reparsed = parse_scenario(&emitted).unwrap();
        assert_eq!(reparsed, config);
        // And serialization itself is a fixed point.
        assert_eq!(serialize(&reparsed), emitted);
    }

    #[test]
    fn schema_text_lists_every_registered_key() {
        let text = schema_text();
        for def in SCHEMA.iter() {
            assert!(text.contains(def.pattern), "missing {}", def.pattern);
        }
        assert_eq!(text, schema_text());
    }

    #[test]
    fn leading_zero_indices_are_rejected() {
        let err = parse_scenario(&format!("{MINIMAL}region.01.name = \"beta\"\n")).unwrap_err();
        match err {
            ScenarioError::Schema { message, .. } => {
                assert!(message.contains("leading zeros"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
