//! The three-doors game: configuration, the two sides' behavioral strategies
//! and the assembled model.
//!
//! The team (car placement plus host) chooses the car door `c` and, after
//! seeing the player's pick `p`, opens a set `O` of `k` goat doors avoiding
//! both `c` and `p`. The player picks `p`, sees `O`, and names a final door
//! `f` outside `O`. The car and the pick are independent by construction.

mod presets;
mod pure;
mod validate;

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::doors::{k_subsets, DoorDistribution, DoorSet, Observation};
use crate::error::{Error, Result};

pub use presets::{make_preset, Preset, PresetParams};
pub use pure::{
    enumerate_player_pure, enumerate_team_pure, player_pure_count, team_pure_count,
    PurePlayerStrategy, PureTeamStrategy, DEFAULT_ENUMERATION_CAP,
};
pub use validate::{validate_model, FinalIssue, OpenIssue, ValidationReport, Violation};

/// Number of doors and number of goat doors the host opens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GameConfig {
    n_doors: usize,
    k_opened: usize,
}

impl GameConfig {
    pub fn new(n_doors: usize, k_opened: usize) -> Result<Self> {
        if n_doors < 3 {
            return Err(Error::Config(format!("need at least 3 doors, got {n_doors}")));
        }
        if k_opened < 1 || k_opened > n_doors - 2 {
            return Err(Error::Config(format!(
                "host must open between 1 and {} doors, got {k_opened}",
                n_doors - 2
            )));
        }
        Ok(GameConfig { n_doors, k_opened })
    }

    /// Three doors, one opened.
    pub fn classic() -> Self {
        GameConfig { n_doors: 3, k_opened: 1 }
    }

    pub fn n_doors(&self) -> usize {
        self.n_doors
    }

    pub fn k_opened(&self) -> usize {
        self.k_opened
    }

    pub fn doors(&self) -> RangeInclusive<usize> {
        1..=self.n_doors
    }

    pub fn contains(&self, door: usize) -> bool {
        (1..=self.n_doors).contains(&door)
    }

    /// Sets the host may open when the car is at `car` and the pick is `pick`.
    pub fn open_sets(&self, car: usize, pick: usize) -> Vec<DoorSet> {
        let universe: Vec<usize> = self.doors().filter(|&d| d != car && d != pick).collect();
        k_subsets(&universe, self.k_opened).collect()
    }

    /// Sets the player may see opened after picking `pick`.
    pub fn observable_sets(&self, pick: usize) -> Vec<DoorSet> {
        let universe: Vec<usize> = self.doors().filter(|&d| d != pick).collect();
        k_subsets(&universe, self.k_opened).collect()
    }

    /// Every legal `(p, O)` pair, ordered by pick then lexicographically by set.
    pub fn observations(&self) -> Vec<Observation> {
        self.doors()
            .flat_map(|p| {
                self.observable_sets(p)
                    .into_iter()
                    .map(move |o| Observation::new(p, o))
            })
            .collect()
    }

    pub fn is_legal_observation(&self, obs: &Observation) -> bool {
        self.contains(obs.pick)
            && obs.opened.len() == self.k_opened
            && !obs.opened.contains(obs.pick)
            && obs.opened.iter().all(|d| self.contains(d))
    }

    /// Unopened doors after `obs`, the pick included.
    pub fn unopened(&self, obs: &Observation) -> Vec<usize> {
        self.doors().filter(|&d| !obs.opened.contains(d)).collect()
    }

    fn cell(&self, car: usize, pick: usize) -> usize {
        (car - 1) * self.n_doors + (pick - 1)
    }
}

/// Car placement plus the host's door-opening rule.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamStrategy {
    car: DoorDistribution,
    // Indexed by (c - 1) * N + (p - 1).
    open_rule: Vec<Vec<(DoorSet, f64)>>,
}

impl TeamStrategy {
    /// Builds the open rule cell by cell from `rule(car, pick)`.
    pub fn from_fn(
        config: &GameConfig,
        car: DoorDistribution,
        mut rule: impl FnMut(usize, usize) -> Vec<(DoorSet, f64)>,
    ) -> Self {
        let mut open_rule = Vec::with_capacity(config.n_doors * config.n_doors);
        for c in config.doors() {
            for p in config.doors() {
                open_rule.push(rule(c, p));
            }
        }
        TeamStrategy { car, open_rule }
    }

    /// Host opens uniformly at random among the legal sets.
    pub fn uniform_host(config: &GameConfig, car: DoorDistribution) -> Self {
        Self::from_fn(config, car, |c, p| uniform_over(config.open_sets(c, p)))
    }

    /// Three-door host who, when the car is behind the pick, opens the
    /// higher-numbered goat door with probability `q`.
    pub fn biased_host(config: &GameConfig, car: DoorDistribution, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Parameter(format!("host bias q must lie in [0, 1], got {q}")));
        }
        if config.observable_sets(1).len() != 2 {
            return Err(Error::Parameter(
                "host bias needs exactly two openable sets when the car is behind the pick".into(),
            ));
        }
        Ok(Self::from_fn(config, car, |c, p| {
            let sets = config.open_sets(c, p);
            if sets.len() == 2 {
                vec![(sets[0].clone(), 1.0 - q), (sets[1].clone(), q)]
            } else {
                uniform_over(sets)
            }
        }))
    }

    /// Embeds a pure team strategy as a degenerate behavioral one.
    pub fn from_pure(config: &GameConfig, pure: &PureTeamStrategy) -> Self {
        let car = DoorDistribution::point(config.n_doors, pure.car);
        Self::from_fn(config, car, |c, p| {
            if c == pure.car {
                vec![(pure.opened_for(p).clone(), 1.0)]
            } else {
                let first = config.open_sets(c, p).swap_remove(0);
                vec![(first, 1.0)]
            }
        })
    }

    /// Assembles raw parts without checks; the rule must hold `N * N` cells.
    pub fn from_parts(car: DoorDistribution, open_rule: Vec<Vec<(DoorSet, f64)>>) -> Self {
        TeamStrategy { car, open_rule }
    }

    pub fn car(&self) -> &DoorDistribution {
        &self.car
    }

    pub fn open_dist(&self, config: &GameConfig, car: usize, pick: usize) -> &[(DoorSet, f64)] {
        &self.open_rule[config.cell(car, pick)]
    }

    /// Pr(O = `opened` | C = `car`, P = `pick`).
    pub fn open_prob(&self, config: &GameConfig, car: usize, pick: usize, opened: &DoorSet) -> f64 {
        self.open_dist(config, car, pick)
            .iter()
            .filter(|(s, _)| s == opened)
            .map(|(_, w)| w)
            .sum()
    }

    pub(crate) fn cells(&self) -> &[Vec<(DoorSet, f64)>] {
        &self.open_rule
    }
}

/// How the player's final choice treats each observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinalPolicy {
    /// Move to an unopened door other than the pick, uniformly if several.
    Switch,
    /// Keep the initial pick.
    Stay,
    /// Uniform over every unopened door, the pick included.
    Uniform,
}

impl FinalPolicy {
    pub fn final_dist(self, config: &GameConfig, obs: &Observation) -> Vec<(usize, f64)> {
        match self {
            FinalPolicy::Stay => vec![(obs.pick, 1.0)],
            FinalPolicy::Switch => {
                let targets: Vec<usize> = config
                    .unopened(obs)
                    .into_iter()
                    .filter(|&d| d != obs.pick)
                    .collect();
                uniform_over(targets)
            }
            FinalPolicy::Uniform => uniform_over(config.unopened(obs)),
        }
    }
}

/// Initial-pick law plus the final-choice rule.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerStrategy {
    pick: DoorDistribution,
    final_choice: BTreeMap<Observation, Vec<(usize, f64)>>,
}

impl PlayerStrategy {
    pub fn from_fn(
        config: &GameConfig,
        pick: DoorDistribution,
        mut rule: impl FnMut(&Observation) -> Vec<(usize, f64)>,
    ) -> Self {
        let final_choice = config
            .observations()
            .into_iter()
            .map(|obs| {
                let dist = rule(&obs);
                (obs, dist)
            })
            .collect();
        PlayerStrategy { pick, final_choice }
    }

    pub fn with_policy(config: &GameConfig, pick: DoorDistribution, policy: FinalPolicy) -> Self {
        Self::from_fn(config, pick, |obs| policy.final_dist(config, obs))
    }

    /// Embeds a pure player strategy; cells for other picks stay put.
    pub fn from_pure(config: &GameConfig, pure: &PurePlayerStrategy) -> Self {
        let pick = DoorDistribution::point(config.n_doors, pure.pick);
        Self::from_fn(config, pick, |obs| {
            let f = if obs.pick == pure.pick {
                pure.final_door(&obs.opened).unwrap_or(obs.pick)
            } else {
                obs.pick
            };
            vec![(f, 1.0)]
        })
    }

    /// Assembles raw parts without checks.
    pub fn from_parts(pick: DoorDistribution, final_choice: BTreeMap<Observation, Vec<(usize, f64)>>) -> Self {
        PlayerStrategy { pick, final_choice }
    }

    pub fn pick(&self) -> &DoorDistribution {
        &self.pick
    }

    pub fn final_dist(&self, obs: &Observation) -> Option<&[(usize, f64)]> {
        self.final_choice.get(obs).map(Vec::as_slice)
    }

    /// Pr(F = `door` | P, O); zero for a missing cell.
    pub fn final_prob(&self, obs: &Observation, door: usize) -> f64 {
        self.final_dist(obs)
            .map(|d| d.iter().filter(|(f, _)| *f == door).map(|(_, w)| w).sum())
            .unwrap_or(0.0)
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Observation, &[(usize, f64)])> {
        self.final_choice.iter().map(|(o, d)| (o, d.as_slice()))
    }
}

/// A complete game: configuration and both sides' strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct GameModel {
    config: GameConfig,
    team: TeamStrategy,
    player: PlayerStrategy,
}

impl GameModel {
    /// Assembles and validates.
    pub fn new(config: GameConfig, team: TeamStrategy, player: PlayerStrategy) -> Result<Self> {
        let model = Self::unchecked(config, team, player);
        let report = model.validate();
        if report.is_valid() {
            Ok(model)
        } else {
            Err(Error::InvalidModel(report))
        }
    }

    /// Assembles without validation. Everything downstream assumes a model
    /// that passes [`GameModel::validate`].
    pub fn unchecked(config: GameConfig, team: TeamStrategy, player: PlayerStrategy) -> Self {
        GameModel { config, team, player }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_model(self)
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn team(&self) -> &TeamStrategy {
        &self.team
    }

    pub fn player(&self) -> &PlayerStrategy {
        &self.player
    }

    pub fn with_player(&self, player: PlayerStrategy) -> Result<Self> {
        Self::new(self.config, self.team.clone(), player)
    }

    pub fn with_team(&self, team: TeamStrategy) -> Result<Self> {
        Self::new(self.config, team, self.player.clone())
    }

    /// Same team and pick law, different final-choice policy.
    pub fn with_policy(&self, policy: FinalPolicy) -> Result<Self> {
        let player = PlayerStrategy::with_policy(&self.config, self.player.pick.clone(), policy);
        self.with_player(player)
    }
}

fn uniform_over<T>(items: Vec<T>) -> Vec<(T, f64)> {
    let w = 1.0 / items.len() as f64;
    items.into_iter().map(|x| (x, w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_bounds() {
        assert!(GameConfig::new(2, 1).is_err());
        assert!(GameConfig::new(3, 0).is_err());
        assert!(GameConfig::new(3, 2).is_err());
        assert!(GameConfig::new(100, 98).is_ok());
        assert!(GameConfig::new(100, 99).is_err());
    }

    #[test]
    fn open_sets_avoid_car_and_pick() {
        let cfg = GameConfig::new(4, 2).unwrap();
        assert_eq!(cfg.open_sets(1, 2), vec![DoorSet::new([3, 4])]);
        assert_eq!(cfg.open_sets(1, 1).len(), 3);
        assert_eq!(cfg.observations().len(), 4 * 3);
    }

    #[test]
    fn switch_policy_targets_the_remaining_door() {
        let cfg = GameConfig::classic();
        let obs = Observation::new(1, DoorSet::single(3));
        assert_eq!(FinalPolicy::Switch.final_dist(&cfg, &obs), vec![(2, 1.0)]);
        assert_eq!(FinalPolicy::Stay.final_dist(&cfg, &obs), vec![(1, 1.0)]);
        assert_eq!(FinalPolicy::Uniform.final_dist(&cfg, &obs).len(), 2);
    }

    #[test]
    fn biased_host_puts_q_on_higher_door() {
        let cfg = GameConfig::classic();
        let team = TeamStrategy::biased_host(&cfg, DoorDistribution::uniform(3), 0.3).unwrap();
        assert_eq!(team.open_prob(&cfg, 1, 1, &DoorSet::single(3)), 0.3);
        assert!((team.open_prob(&cfg, 1, 1, &DoorSet::single(2)) - 0.7).abs() < 1e-15);
        assert_eq!(team.open_prob(&cfg, 2, 1, &DoorSet::single(3)), 1.0);
        assert!(TeamStrategy::biased_host(&cfg, DoorDistribution::uniform(3), 1.5).is_err());
        let big = GameConfig::new(4, 1).unwrap();
        assert!(TeamStrategy::biased_host(&big, DoorDistribution::uniform(4), 0.5).is_err());
    }
}
