//! Selection of the fittest: market entry, share dynamics, and diffusion.
//!
//! A financed technology realizes its ex-post profit rate against the
//! incumbent average and enters production only if it beats that average;
//! everything else is discarded, leaving the market unchanged. Adoption
//! shares then drift toward above-average performers each step, and the best
//! technology of a region can diffuse along weighted graph edges. A region
//! with no inbound edges is a niche: it evolves only through local genesis.

use std::fmt;

use crate::genesis::{Lifecycle, UncertainTechnology};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::types::{RegionId, TechId};

/// A technology in use, producing commodities sold on the market.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertainTechnology<S> {
    pub id: TechId,
    /// Output per labor unit per step; constant after entry.
    pub productivity: S,
    /// Realized profit rate, set exactly once at market entry.
    pub ex_post_profit_rate: S,
    /// Fraction of the region's production run on this technology.
    pub adoption_share: S,
    pub region: RegionId,
    pub born_step: u32,
}

/// All certain technologies of one region plus their average profit rate.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketState<S> {
    region: RegionId,
    technologies: Vec<CertainTechnology<S>>,
    average_profit_rate: S,
}

/// A weighted directed region graph; weights are per-step copy probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGraph {
    region_count: u32,
    links: Vec<Link>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Link {
    pub from: RegionId,
    pub to: RegionId,
    /// Probability per step that the source's best technology is copied.
    pub weight: f64,
}

/// A technology copied into another region, pending that region's selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionArrival<S> {
    pub to: RegionId,
    pub from: RegionId,
    pub tech: TechId,
    pub productivity: S,
}

/// Errors raised by the selection operations.
#[derive(Clone, Debug, PartialEq)]
pub enum SelectionError {
    /// Ex-post realization requires a financed technology.
    NotFinanced { tech: TechId },
    /// Candidate and market belong to different regions.
    RegionMismatch { market: RegionId, candidate: RegionId },
    /// Pace of evolution needs at least two trace points.
    TraceTooShort { len: usize },
    /// Pace of evolution is undefined for non-positive productivity.
    NonPositiveProductivity,
    /// Graph validation: bad weight or self-link.
    InvalidLink { from: RegionId, to: RegionId, reason: &'static str },
}

impl fmt::Display for SelectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionError::NotFinanced { tech } => {
                write!(f, "{tech} is not in the financed state")
            }
            SelectionError::RegionMismatch { market, candidate } => {
                write!(f, "candidate from {candidate} offered to market of {market}")
            }
            SelectionError::TraceTooShort { len } => {
                write!(f, "productivity trace needs at least 2 points, got {len}")
            }
            SelectionError::NonPositiveProductivity => {
                write!(f, "productivity trace must be strictly positive")
            }
            SelectionError::InvalidLink { from, to, reason } => {
                write!(f, "invalid link {from} -> {to}: {reason}")
            }
        }
    }
}

impl std::error::Error for SelectionError {}

impl<S: Scalar> MarketState<S> {
    /// Market with a single incumbent holding the whole adoption share.
    pub fn with_incumbent(
        region: RegionId,
        id: TechId,
        productivity: S,
        profit_rate: S,
    ) -> Self {
        Self {
            region,
            technologies: vec![CertainTechnology {
                id,
                productivity,
                ex_post_profit_rate: profit_rate,
                adoption_share: S::one(),
                region,
                born_step: 0,
            }],
            average_profit_rate: profit_rate,
        }
    }

    /// Market from explicit technologies; shares must already sum to one.
    pub fn new(region: RegionId, technologies: Vec<CertainTechnology<S>>) -> Self {
        let average_profit_rate = share_weighted_rate(&technologies);
        Self {
            region,
            technologies,
            average_profit_rate,
        }
    }

    pub fn region(&self) -> RegionId {
        self.region
    }

    pub fn technologies(&self) -> &[CertainTechnology<S>] {
        &self.technologies
    }

    /// Share-weighted mean of the ex-post profit rates.
    pub fn average_profit_rate(&self) -> S {
        self.average_profit_rate
    }

    /// Share-weighted productivity of the region.
    pub fn productivity(&self) -> S {
        self.technologies
            .iter()
            .map(|t| t.adoption_share * t.productivity)
            .sum()
    }

    /// Sum of adoption shares; one up to rounding.
    pub fn share_sum(&self) -> S {
        self.technologies.iter().map(|t| t.adoption_share).sum()
    }

    pub fn contains(&self, id: TechId) -> bool {
        self.technologies.iter().any(|t| t.id == id)
    }

    /// Highest-productivity technology, ties broken by the lower id.
    pub fn best_technology(&self) -> Option<&CertainTechnology<S>> {
        self.technologies.iter().min_by(|a, b| {
            b.productivity
                .partial_cmp(&a.productivity)
                .expect("finite productivity")
                .then(a.id.cmp(&b.id))
        })
    }

    /// Scale every technology's productivity, e.g. for an exogenous shock.
    pub fn scale_productivity(&mut self, factor: S) {
        for tech in &mut self.technologies {
            tech.productivity = tech.productivity * factor;
        }
    }
}

fn share_weighted_rate<S: Scalar>(technologies: &[CertainTechnology<S>]) -> S {
    technologies
        .iter()
        .map(|t| t.adoption_share * t.ex_post_profit_rate)
        .sum()
}

impl RegionGraph {
    /// Validate weights and self-links; region ids must index the table.
    pub fn new(region_count: u32, links: Vec<Link>) -> Result<Self, SelectionError> {
        for link in &links {
            if link.from == link.to {
                return Err(SelectionError::InvalidLink {
                    from: link.from,
                    to: link.to,
                    reason: "self-links are forbidden",
                });
            }
            if !(0.0..=1.0).contains(&link.weight) {
                return Err(SelectionError::InvalidLink {
                    from: link.from,
                    to: link.to,
                    reason: "weight must lie in [0, 1]",
                });
            }
            if link.from.0 >= region_count || link.to.0 >= region_count {
                return Err(SelectionError::InvalidLink {
                    from: link.from,
                    to: link.to,
                    reason: "link references an undeclared region",
                });
            }
        }
        Ok(Self {
            region_count,
            links,
        })
    }

    pub fn region_count(&self) -> u32 {
        self.region_count
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// True if no edge points into `region` — the niche condition.
    pub fn is_isolated(&self, region: RegionId) -> bool {
        !self.links.iter().any(|l| l.to == region)
    }
}

/// Draw an ex-post profit rate against the market average.
///
/// The rate lands above the average with probability `ex_ante_p` and below it
/// otherwise, at distance `spread·|z|` with `z` standard normal.
pub fn draw_ex_post_rate<S: Scalar>(
    average_rate: S,
    ex_ante_p: S,
    spread: S,
    rng: &mut RngStream,
) -> (S, S) {
    let beat = rng.chance(ex_ante_p.to_f64().expect("probability"));
    let magnitude = S::cast(rng.standard_normal().abs());
    let signed = if beat { magnitude } else { -magnitude };
    (average_rate + spread * signed, signed)
}

/// Put a financed technology into production and measure it ex post.
///
/// The realized productivity moves with the same signed draw as the profit
/// rate: technologies that beat the market do so because they produce more
/// per labor unit. Ex ante, animal spirits and the ex-post outcome all remain
/// distinct quantities.
pub fn realize_ex_post<S: Scalar>(
    tech: &UncertainTechnology<S>,
    market: &MarketState<S>,
    ex_post_spread: S,
    step: u32,
    rng: &mut RngStream,
) -> Result<CertainTechnology<S>, SelectionError> {
    if !matches!(tech.state, Lifecycle::Financed { .. }) {
        return Err(SelectionError::NotFinanced { tech: tech.id });
    }
    let (rate, signed) = draw_ex_post_rate(
        market.average_profit_rate(),
        tech.ex_ante_success_prob,
        ex_post_spread,
        rng,
    );
    let params = tech.productivity_params;
    let productivity = params.location * (params.spread * signed).exp();
    Ok(CertainTechnology {
        id: tech.id,
        productivity,
        ex_post_profit_rate: rate,
        adoption_share: S::zero(),
        region: tech.region,
        born_step: step,
    })
}

/// Realize a diffused arrival: productivity is copied from the source region
/// but the profit rate is redrawn against the destination's own average.
pub fn realize_arrival<S: Scalar>(
    arrival: &DiffusionArrival<S>,
    market: &MarketState<S>,
    ex_ante_p: S,
    ex_post_spread: S,
    step: u32,
    rng: &mut RngStream,
) -> CertainTechnology<S> {
    let (rate, _) = draw_ex_post_rate(market.average_profit_rate(), ex_ante_p, ex_post_spread, rng);
    CertainTechnology {
        id: arrival.tech,
        productivity: arrival.productivity,
        ex_post_profit_rate: rate,
        adoption_share: S::zero(),
        region: arrival.to,
        born_step: step,
    }
}

/// Outcome of one selection round.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionOutcome<S> {
    pub market: MarketState<S>,
    pub entered: Vec<TechId>,
    pub discarded: Vec<TechId>,
}

/// Admit the candidates that beat the running average profit rate.
///
/// Candidates are tried in descending rate order (ties by id); each admission
/// takes `entry_share` of the market, rescales the incumbents and raises the
/// average the next candidate must beat. Candidates at or below the average
/// are discarded. With no admission the input market is returned unchanged.
pub fn select_fittest<S: Scalar>(
    market: &MarketState<S>,
    candidates: &[CertainTechnology<S>],
    entry_share: S,
) -> Result<SelectionOutcome<S>, SelectionError> {
    for candidate in candidates {
        if candidate.region != market.region {
            return Err(SelectionError::RegionMismatch {
                market: market.region,
                candidate: candidate.region,
            });
        }
    }

    let mut order: Vec<&CertainTechnology<S>> = candidates.iter().collect();
    order.sort_by(|a, b| {
        b.ex_post_profit_rate
            .partial_cmp(&a.ex_post_profit_rate)
            .expect("finite profit rate")
            .then(a.id.cmp(&b.id))
    });

    let mut outcome = SelectionOutcome {
        market: market.clone(),
        entered: Vec::new(),
        discarded: Vec::new(),
    };
    for candidate in order {
        // A technology already adopted here (a repeated diffusion copy)
        // cannot enter twice.
        if outcome.market.contains(candidate.id) {
            outcome.discarded.push(candidate.id);
            continue;
        }
        if candidate.ex_post_profit_rate > outcome.market.average_profit_rate {
            let keep = S::one() - entry_share;
            for tech in &mut outcome.market.technologies {
                tech.adoption_share = tech.adoption_share * keep;
            }
            let mut entrant = *candidate;
            entrant.adoption_share = entry_share;
            outcome.market.technologies.push(entrant);
            outcome.market.average_profit_rate =
                share_weighted_rate(&outcome.market.technologies);
            outcome.entered.push(candidate.id);
        } else {
            outcome.discarded.push(candidate.id);
        }
    }
    Ok(outcome)
}

/// One step of share drift toward above-average-profit technologies.
///
/// `share' ∝ share · (1 + η·(rate − average))`, renormalized; shares that fall
/// below the extinction floor are removed and the rest rescaled. Update
/// factors are clamped at zero so extreme spreads cannot produce negative
/// shares.
pub fn replicator_step<S: Scalar>(
    market: &MarketState<S>,
    eta: S,
    extinction_floor: S,
) -> MarketState<S> {
    if market.technologies.len() <= 1 {
        return market.clone();
    }
    let average = market.average_profit_rate;
    let mut weighted: Vec<CertainTechnology<S>> = market
        .technologies
        .iter()
        .map(|t| {
            let factor = (S::one() + eta * (t.ex_post_profit_rate - average)).max(S::zero());
            CertainTechnology {
                adoption_share: t.adoption_share * factor,
                ..*t
            }
        })
        .collect();

    let total: S = weighted.iter().map(|t| t.adoption_share).sum();
    if total <= S::zero() {
        // Degenerate spread: keep the largest incumbent rather than a void.
        let best = market
            .technologies
            .iter()
            .max_by(|a, b| {
                a.adoption_share
                    .partial_cmp(&b.adoption_share)
                    .expect("finite share")
                    .then(b.id.cmp(&a.id))
            })
            .expect("non-empty market");
        let mut survivor = *best;
        survivor.adoption_share = S::one();
        return MarketState {
            region: market.region,
            technologies: vec![survivor],
            average_profit_rate: survivor.ex_post_profit_rate,
        };
    }
    for tech in &mut weighted {
        tech.adoption_share = tech.adoption_share / total;
    }

    let survivors: Vec<CertainTechnology<S>> = weighted
        .iter()
        .filter(|t| t.adoption_share >= extinction_floor)
        .copied()
        .collect();
    let mut technologies = if survivors.is_empty() {
        weighted
    } else {
        survivors
    };
    let remaining: S = technologies.iter().map(|t| t.adoption_share).sum();
    for tech in &mut technologies {
        tech.adoption_share = tech.adoption_share / remaining;
    }

    let average_profit_rate = share_weighted_rate(&technologies);
    MarketState {
        region: market.region,
        technologies,
        average_profit_rate,
    }
}

/// Try every edge once: with probability `weight` the source's best
/// technology is copied toward the destination.
///
/// One uniform draw is consumed per edge in declared order regardless of the
/// outcome, so the stream layout never depends on market contents. An edge
/// whose technology is already adopted at the destination delivers nothing.
pub fn diffuse<S: Scalar>(
    markets: &[MarketState<S>],
    graph: &RegionGraph,
    rng: &mut RngStream,
) -> Vec<DiffusionArrival<S>> {
    let mut arrivals = Vec::new();
    for link in graph.links() {
        let fired = rng.chance(link.weight);
        if !fired {
            continue;
        }
        let source = &markets[link.from.0 as usize];
        let destination = &markets[link.to.0 as usize];
        if let Some(best) = source.best_technology() {
            if !destination.contains(best.id) {
                arrivals.push(DiffusionArrival {
                    to: link.to,
                    from: link.from,
                    tech: best.id,
                    productivity: best.productivity,
                });
            }
        }
    }
    arrivals
}

/// Mean log-growth of a productivity trace: `(ln P_end − ln P_start)/(n−1)`.
pub fn pace_of_evolution<S: Scalar>(trace: &[S]) -> Result<S, SelectionError> {
    if trace.len() < 2 {
        return Err(SelectionError::TraceTooShort { len: trace.len() });
    }
    if trace.iter().any(|p| *p <= S::zero()) {
        return Err(SelectionError::NonPositiveProductivity);
    }
    let first = trace.first().expect("non-empty");
    let last = trace.last().expect("non-empty");
    let steps = S::cast(trace.len() - 1);
    Ok((last.ln() - first.ln()) / steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genesis::ProductivityParams;
    use crate::types::IdeaId;

    fn certain(id: u64, productivity: f64, rate: f64, share: f64) -> CertainTechnology<f64> {
        CertainTechnology {
            id: TechId(id),
            productivity,
            ex_post_profit_rate: rate,
            adoption_share: share,
            region: RegionId(0),
            born_step: 0,
        }
    }

    fn financed(id: u64, p: f64) -> UncertainTechnology<f64> {
        UncertainTechnology {
            id: TechId(id),
            source_idea: IdeaId(id),
            ex_ante_success_prob: p,
            productivity_params: ProductivityParams {
                location: 1.0,
                spread: 0.05,
            },
            readiness_step: 0,
            region: RegionId(0),
            appeal: 0.0,
            state: Lifecycle::Financed { step: 0 },
        }
    }

    fn incumbent_market() -> MarketState<f64> {
        MarketState::with_incumbent(RegionId(0), TechId(1000), 1.0, 0.10)
    }

    #[test]
    fn ex_ante_zero_always_lands_below_average() {
        let market = incumbent_market();
        let mut rng = RngStream::root(1);
        for _ in 0..200 {
            let tech = financed(0, 0.0);
            let realized = realize_ex_post(&tech, &market, 0.02, 1, &mut rng).unwrap();
            assert!(realized.ex_post_profit_rate < market.average_profit_rate());
        }
    }

    #[test]
    fn ex_ante_one_always_lands_above_average() {
        let market = incumbent_market();
        let mut rng = RngStream::root(2);
        for _ in 0..200 {
            let tech = financed(0, 1.0);
            let realized = realize_ex_post(&tech, &market, 0.02, 1, &mut rng).unwrap();
            assert!(realized.ex_post_profit_rate > market.average_profit_rate());
        }
    }

    #[test]
    fn beat_frequency_tracks_the_ex_ante_probability() {
        // Frequency oracle: at p = 0.3 the beat-the-average frequency over
        // 1e5 draws must land in [0.29, 0.31].
        let market = incumbent_market();
        let mut rng = RngStream::root(42).derive("expost").unwrap();
        let trials = 100_000;
        let mut beats = 0u32;
        for _ in 0..trials {
            let tech = financed(0, 0.3);
            let realized = realize_ex_post(&tech, &market, 0.02, 1, &mut rng).unwrap();
            if realized.ex_post_profit_rate > market.average_profit_rate() {
                beats += 1;
            }
        }
        let freq = f64::from(beats) / f64::from(trials as u32);
        assert!((0.29..=0.31).contains(&freq), "beat frequency {freq}");
    }

    #[test]
    fn unfinanced_technology_cannot_realize() {
        let market = incumbent_market();
        let mut rng = RngStream::root(3);
        let mut tech = financed(7, 0.3);
        tech.state = Lifecycle::Uncertain;
        assert_eq!(
            realize_ex_post(&tech, &market, 0.02, 1, &mut rng),
            Err(SelectionError::NotFinanced { tech: TechId(7) })
        );
    }

    #[test]
    fn productivity_moves_with_the_profit_outcome() {
        let market = incumbent_market();
        let mut rng = RngStream::root(4);
        for _ in 0..200 {
            let tech = financed(0, 0.5);
            let realized = realize_ex_post(&tech, &market, 0.02, 1, &mut rng).unwrap();
            let beat = realized.ex_post_profit_rate > market.average_profit_rate();
            assert_eq!(realized.productivity > 1.0, beat);
        }
    }

    #[test]
    fn no_candidates_leaves_the_market_bitwise_unchanged() {
        let market = incumbent_market();
        let outcome = select_fittest(&market, &[], 0.05).unwrap();
        assert_eq!(outcome.market, market);
        assert!(outcome.entered.is_empty());
    }

    #[test]
    fn candidates_at_or_below_average_change_nothing() {
        let market = incumbent_market();
        let candidates = vec![
            certain(1, 1.2, 0.10, 0.0), // exactly the average: discarded
            certain(2, 1.3, 0.05, 0.0),
        ];
        let outcome = select_fittest(&market, &candidates, 0.05).unwrap();
        assert_eq!(outcome.market, market);
        assert_eq!(outcome.discarded, vec![TechId(1), TechId(2)]);
    }

    #[test]
    fn single_entry_rescales_shares_and_average() {
        // Hand-computed two-technology case: shares become [0.9, 0.1] and the
        // new average is 0.9·r_inc + 0.1·r_new.
        let market = incumbent_market();
        let candidate = certain(1, 1.5, 0.20, 0.0);
        let outcome = select_fittest(&market, &[candidate], 0.1).unwrap();
        let shares: Vec<f64> = outcome
            .market
            .technologies()
            .iter()
            .map(|t| t.adoption_share)
            .collect();
        assert_eq!(shares, vec![0.9, 0.1]);
        let expected_avg = 0.9 * 0.10 + 0.1 * 0.20;
        assert!((outcome.market.average_profit_rate() - expected_avg).abs() < 1e-15);
        assert_eq!(outcome.entered, vec![TechId(1)]);
    }

    #[test]
    fn each_entry_raises_the_average() {
        let market = incumbent_market();
        let candidates = vec![
            certain(1, 1.1, 0.12, 0.0),
            certain(2, 1.2, 0.18, 0.0),
            certain(3, 1.3, 0.11, 0.0),
        ];
        let outcome = select_fittest(&market, &candidates, 0.05).unwrap();
        assert!(outcome.market.average_profit_rate() > market.average_profit_rate());
        // Admission order is by descending rate, each against the raised bar.
        assert_eq!(outcome.entered.first(), Some(&TechId(2)));
    }

    #[test]
    fn region_mismatch_is_rejected() {
        let market = incumbent_market();
        let mut candidate = certain(1, 1.5, 0.2, 0.0);
        candidate.region = RegionId(3);
        assert_eq!(
            select_fittest(&market, &[candidate], 0.05),
            Err(SelectionError::RegionMismatch {
                market: RegionId(0),
                candidate: RegionId(3),
            })
        );
    }

    #[test]
    fn equal_rates_leave_replicator_shares_unchanged() {
        let market = MarketState::new(
            RegionId(0),
            vec![certain(0, 1.0, 0.1, 0.5), certain(1, 1.2, 0.1, 0.5)],
        );
        let next = replicator_step(&market, 0.5, 1e-3);
        assert_eq!(next, market);
    }

    #[test]
    fn replicator_update_matches_hand_arithmetic() {
        // shares [0.5, 0.5], rates [0.2, 0.1], η = 1:
        // average 0.15, factors [1.05, 0.95], shares [0.525, 0.475].
        let market = MarketState::new(
            RegionId(0),
            vec![certain(0, 1.0, 0.2, 0.5), certain(1, 1.0, 0.1, 0.5)],
        );
        let next = replicator_step(&market, 1.0, 1e-6);
        let shares: Vec<f64> = next.technologies().iter().map(|t| t.adoption_share).collect();
        assert!((shares[0] - 0.525).abs() < 1e-12, "{shares:?}");
        assert!((shares[1] - 0.475).abs() < 1e-12, "{shares:?}");
    }

    #[test]
    fn replicator_conserves_share_mass() {
        // Conservation oracle over randomized markets.
        let mut rng = RngStream::root(12);
        for _ in 0..1000 {
            let n = 2 + (rng.next_unit() * 6.0) as usize;
            let mut raw: Vec<f64> = (0..n).map(|_| rng.next_unit() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            for w in &mut raw {
                *w /= total;
            }
            let market = MarketState::new(
                RegionId(0),
                raw.iter()
                    .enumerate()
                    .map(|(i, &share)| {
                        certain(i as u64, 0.5 + rng.next_unit(), rng.next_unit() * 0.3, share)
                    })
                    .collect(),
            );
            let next = replicator_step(&market, 0.5, 1e-3);
            assert!((next.share_sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn extinct_shares_are_removed_and_mass_renormalized() {
        let market = MarketState::new(
            RegionId(0),
            vec![
                certain(0, 1.0, 0.30, 0.999),
                certain(1, 1.0, 0.00, 0.001),
            ],
        );
        // The laggard's share drops below the floor and is culled.
        let next = replicator_step(&market, 1.0, 1e-3);
        assert_eq!(next.technologies().len(), 1);
        assert_eq!(next.technologies()[0].id, TechId(0));
        assert!((next.share_sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_weight_edges_never_fire() {
        let graph = RegionGraph::new(
            2,
            vec![Link {
                from: RegionId(0),
                to: RegionId(1),
                weight: 0.0,
            }],
        )
        .unwrap();
        let markets = vec![
            MarketState::with_incumbent(RegionId(0), TechId(0), 2.0, 0.1),
            MarketState::with_incumbent(RegionId(1), TechId(1), 1.0, 0.1),
        ];
        let mut rng = RngStream::root(5);
        for _ in 0..500 {
            assert!(diffuse(&markets, &graph, &mut rng).is_empty());
        }
    }

    #[test]
    fn unit_weight_edge_fires_every_step() {
        let graph = RegionGraph::new(
            2,
            vec![Link {
                from: RegionId(0),
                to: RegionId(1),
                weight: 1.0,
            }],
        )
        .unwrap();
        let markets = vec![
            MarketState::with_incumbent(RegionId(0), TechId(0), 2.0, 0.1),
            MarketState::with_incumbent(RegionId(1), TechId(1), 1.0, 0.1),
        ];
        let mut rng = RngStream::root(6);
        for _ in 0..100 {
            let arrivals = diffuse(&markets, &graph, &mut rng);
            assert_eq!(
                arrivals,
                vec![DiffusionArrival {
                    to: RegionId(1),
                    from: RegionId(0),
                    tech: TechId(0),
                    productivity: 2.0,
                }]
            );
        }
    }

    #[test]
    fn already_adopted_technology_does_not_rediffuse() {
        let graph = RegionGraph::new(
            2,
            vec![Link {
                from: RegionId(0),
                to: RegionId(1),
                weight: 1.0,
            }],
        )
        .unwrap();
        let shared = certain(0, 2.0, 0.1, 1.0);
        let markets = vec![
            MarketState::new(RegionId(0), vec![shared]),
            MarketState::new(RegionId(1), vec![{
                let mut t = shared;
                t.region = RegionId(1);
                t
            }]),
        ];
        let mut rng = RngStream::root(7);
        assert!(diffuse(&markets, &graph, &mut rng).is_empty());
    }

    #[test]
    fn self_links_and_bad_weights_are_rejected() {
        let self_link = RegionGraph::new(
            1,
            vec![Link {
                from: RegionId(0),
                to: RegionId(0),
                weight: 0.5,
            }],
        );
        assert!(matches!(
            self_link,
            Err(SelectionError::InvalidLink { .. })
        ));
        let heavy = RegionGraph::new(
            2,
            vec![Link {
                from: RegionId(0),
                to: RegionId(1),
                weight: 1.5,
            }],
        );
        assert!(matches!(heavy, Err(SelectionError::InvalidLink { .. })));
    }

    #[test]
    fn constant_trace_has_zero_pace() {
        let trace = vec![1.7_f64; 40];
        assert_eq!(pace_of_evolution(&trace).unwrap(), 0.0);
    }

    #[test]
    fn doubling_over_ten_steps_paces_at_ln2_over_10() {
        let trace: Vec<f64> = (0..11).map(|k| 3.0 * 2.0_f64.powf(k as f64 / 10.0)).collect();
        let pace = pace_of_evolution(&trace).unwrap();
        assert!((pace - 2.0_f64.ln() / 10.0).abs() < 1e-12);
    }

    #[test]
    fn pace_matches_direct_formula_on_random_traces() {
        let mut rng = RngStream::root(9);
        for _ in 0..200 {
            let len = 2 + (rng.next_unit() * 40.0) as usize;
            let trace: Vec<f64> = (0..len).map(|_| 0.1 + rng.next_unit() * 5.0).collect();
            let expected = (trace[len - 1].ln() - trace[0].ln()) / (len as f64 - 1.0);
            assert_eq!(pace_of_evolution(&trace).unwrap(), expected);
        }
    }

    #[test]
    fn short_and_non_positive_traces_are_rejected() {
        assert_eq!(
            pace_of_evolution(&[1.0_f64]),
            Err(SelectionError::TraceTooShort { len: 1 })
        );
        assert_eq!(
            pace_of_evolution(&[1.0_f64, 0.0]),
            Err(SelectionError::NonPositiveProductivity)
        );
    }

    #[test]
    fn kernels_accept_f32_scalars() {
        let market = MarketState::<f32>::with_incumbent(RegionId(0), TechId(0), 1.0, 0.1);
        let next = replicator_step(&market, 0.5_f32, 1e-3);
        assert_eq!(next.share_sum(), 1.0_f32);
        let trace = [1.0_f32, 2.0];
        assert!((pace_of_evolution(&trace).unwrap() - 2.0_f32.ln()).abs() < 1e-6);
    }
}
