//! Exact probabilities over the full joint law of car, pick, opened set and
//! final door.
//!
//! Everything is computed by tabulating the product
//! `car(c) · pick(p) · open(O | c, p) · final(f | p, O)` over the cells with
//! positive mass, then summing. Models are assumed valid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::doors::{DoorDistribution, DoorSet, Observation};
use crate::error::{Error, Result};
use crate::model::{GameConfig, GameModel};

/// One cell of the joint table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointEntry {
    pub car: usize,
    pub pick: usize,
    pub opened: DoorSet,
    pub final_door: usize,
    pub mass: f64,
}

impl JointEntry {
    pub fn wins(&self) -> bool {
        self.final_door == self.car
    }

    pub fn observation(&self) -> Observation {
        Observation::new(self.pick, self.opened.clone())
    }
}

/// The joint law of `(C, P, O, F)`, restricted to positive-mass cells.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    config: GameConfig,
    entries: Vec<JointEntry>,
}

impl JointDistribution {
    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn entries(&self) -> &[JointEntry] {
        &self.entries
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.mass).sum()
    }

    /// Pr(F = C).
    pub fn win_prob(&self) -> f64 {
        self.entries.iter().filter(|e| e.wins()).map(|e| e.mass).sum()
    }

    pub fn car_marginal(&self) -> DoorDistribution {
        self.marginal(|e| e.car)
    }

    pub fn pick_marginal(&self) -> DoorDistribution {
        self.marginal(|e| e.pick)
    }

    pub fn final_marginal(&self) -> DoorDistribution {
        self.marginal(|e| e.final_door)
    }

    fn marginal(&self, door: impl Fn(&JointEntry) -> usize) -> DoorDistribution {
        let mut w = vec![0.0; self.config.n_doors()];
        for e in &self.entries {
            w[door(e) - 1] += e.mass;
        }
        DoorDistribution::from_weights(w)
    }

    /// Conditions on one observation; `None` when it has zero probability.
    pub fn condition(&self, obs: &Observation) -> Option<Conditional> {
        let mut mass = 0.0;
        let mut win = 0.0;
        let mut posterior = vec![0.0; self.config.n_doors()];
        for e in self.entries.iter().filter(|e| e.pick == obs.pick && e.opened == obs.opened) {
            mass += e.mass;
            posterior[e.car - 1] += e.mass;
            if e.wins() {
                win += e.mass;
            }
        }
        if mass <= 0.0 {
            return None;
        }
        posterior.iter_mut().for_each(|w| *w /= mass);
        Some(Conditional {
            mass,
            win_prob: win / mass,
            posterior: DoorDistribution::from_weights(posterior),
        })
    }

    /// Pr(P = p, O) and the win mass for every reachable observation.
    pub fn observation_masses(&self) -> BTreeMap<Observation, (f64, f64)> {
        let mut out: BTreeMap<Observation, (f64, f64)> = BTreeMap::new();
        for e in &self.entries {
            let slot = out.entry(e.observation()).or_default();
            slot.0 += e.mass;
            if e.wins() {
                slot.1 += e.mass;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conditional {
    /// Pr(P = p, O).
    pub mass: f64,
    pub win_prob: f64,
    pub posterior: DoorDistribution,
}

/// Tabulates the joint law of a valid model.
pub fn joint_distribution(model: &GameModel) -> JointDistribution {
    let config = *model.config();
    let team = model.team();
    let player = model.player();
    let mut entries = Vec::new();
    for c in config.doors() {
        let pc = team.car().prob(c);
        if pc <= 0.0 {
            continue;
        }
        for p in config.doors() {
            let pp = player.pick().prob(p);
            if pp <= 0.0 {
                continue;
            }
            for (opened, po) in team.open_dist(&config, c, p) {
                if *po <= 0.0 {
                    continue;
                }
                let obs = Observation::new(p, opened.clone());
                for &(f, pf) in player.final_dist(&obs).unwrap_or(&[]) {
                    if pf <= 0.0 {
                        continue;
                    }
                    entries.push(JointEntry {
                        car: c,
                        pick: p,
                        opened: opened.clone(),
                        final_door: f,
                        mass: pc * pp * po * pf,
                    });
                }
            }
        }
    }
    JointDistribution { config, entries }
}

/// Pr(F = C) for the model.
pub fn unconditional_win_prob(model: &GameModel) -> f64 {
    joint_distribution(model).win_prob()
}

/// What the player knows after one observation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalReport {
    pub observation: Observation,
    pub reachable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub win_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior: Option<DoorDistribution>,
}

fn check_observation(model: &GameModel, obs: &Observation) -> Result<()> {
    if model.config().is_legal_observation(obs) {
        Ok(())
    } else {
        Err(Error::IllegalObservation(obs.clone()))
    }
}

/// Pr(F = C | P = p, O) with the posterior over the car.
///
/// An observation of probability zero yields `reachable: false` and no numbers.
pub fn conditional_win_prob(model: &GameModel, obs: &Observation) -> Result<ConditionalReport> {
    check_observation(model, obs)?;
    let cond = joint_distribution(model).condition(obs);
    Ok(ConditionalReport {
        observation: obs.clone(),
        reachable: cond.is_some(),
        win_prob: cond.as_ref().map(|c| c.win_prob),
        posterior: cond.map(|c| c.posterior),
    })
}

/// Pr(C = c | P = p, O) for every door.
pub fn posterior_car_distribution(model: &GameModel, obs: &Observation) -> Result<DoorDistribution> {
    check_observation(model, obs)?;
    joint_distribution(model)
        .condition(obs)
        .map(|c| c.posterior)
        .ok_or_else(|| Error::Unreachable(obs.clone()))
}

/// Pr(O | C = c, P = p) for each door `c`: the likelihood of the observation.
pub fn observation_likelihoods(model: &GameModel, obs: &Observation) -> Vec<f64> {
    let config = model.config();
    config
        .doors()
        .map(|c| model.team().open_prob(config, c, obs.pick, &obs.opened))
        .collect()
}

/// Posterior odds = prior odds × likelihoods, normalized to probabilities.
///
/// Both vectors may be given at any scale.
pub fn bayes_posterior_from_odds(prior_odds: &[f64], likelihoods: &[f64]) -> Result<Vec<f64>> {
    if prior_odds.len() != likelihoods.len() {
        return Err(Error::Dimension { expected: prior_odds.len(), found: likelihoods.len() });
    }
    if let Some(bad) = prior_odds.iter().chain(likelihoods).find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::Parameter(format!("odds and likelihoods must be finite and non-negative, got {bad}")));
    }
    let product: Vec<f64> = prior_odds.iter().zip(likelihoods).map(|(a, b)| a * b).collect();
    let total: f64 = product.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroPosteriorMass);
    }
    Ok(product.into_iter().map(|x| x / total).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryRow {
    pub observation: Observation,
    /// Pr(P = p, O).
    pub weight: f64,
    pub win_prob: f64,
}

/// Conditional win probabilities over every reachable observation, and their
/// average weighted by the observation probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryTable {
    pub rows: Vec<SymmetryRow>,
    pub weighted_average: f64,
    pub unconditional: f64,
}

impl SymmetryTable {
    /// Largest pairwise spread among the conditionals.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self.rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.win_prob), hi.max(r.win_prob))
        });
        if self.rows.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

pub fn symmetry_conditionals(model: &GameModel) -> SymmetryTable {
    let joint = joint_distribution(model);
    let rows: Vec<SymmetryRow> = joint
        .observation_masses()
        .into_iter()
        .map(|(observation, (mass, win))| SymmetryRow { observation, weight: mass, win_prob: win / mass })
        .collect();
    let weighted_average = rows.iter().map(|r| r.weight * r.win_prob).sum();
    SymmetryTable { rows, weighted_average, unconditional: joint.win_prob() }
}
