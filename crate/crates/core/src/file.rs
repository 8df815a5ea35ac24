//! JSON model files. The schema ships as `schemas/model.schema.json`.
//!
//! ```json
//! {
//!   "n_doors": 3,
//!   "k_opened": 1,
//!   "car_placement": [0.9, 0.05, 0.05],
//!   "pick": [1, 0, 0],
//!   "open_rule": { "1,1": { "2": 0.5, "3": 0.5 } },
//!   "final_choice": { "1|3": { "2": 1 } },
//!   "final_policy": "switch"
//! }
//! ```
//!
//! `open_rule` keys are `"c,p"` and map opened sets (`"2"`, `"2+3"`) to
//! probabilities. `final_choice` keys are `"p|O"` and map final doors to
//! probabilities. Omitted host cells are uniform over the legal sets. Omitted
//! final-choice cells follow `final_policy`, or are uniform over the unopened
//! doors when no policy is given.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::doors::{DoorDistribution, DoorSet, Observation};
use crate::error::{Error, Result};
use crate::model::{FinalPolicy, GameConfig, GameModel, PlayerStrategy, TeamStrategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n_doors: usize,
    pub k_opened: usize,
    pub car_placement: Vec<f64>,
    pub pick: Vec<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub open_rule: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub final_choice: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_policy: Option<FinalPolicy>,
}

fn parse_door(s: &str, context: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad door `{s}` in {context}")))
}

fn parse_cell_key(key: &str) -> Result<(usize, usize)> {
    let (c, p) = key
        .split_once(',')
        .ok_or_else(|| Error::Format(format!("open_rule key `{key}` is not \"c,p\"")))?;
    Ok((parse_door(c, "open_rule key")?, parse_door(p, "open_rule key")?))
}

fn parse_observation_key(key: &str) -> Result<Observation> {
    let (p, o) = key
        .split_once('|')
        .ok_or_else(|| Error::Format(format!("final_choice key `{key}` is not \"p|O\"")))?;
    Ok(Observation::new(parse_door(p, "final_choice key")?, o.trim().parse()?))
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Builds the model without validating it; syntax problems are errors,
    /// semantic ones are left to [`GameModel::validate`].
    pub fn to_model(&self) -> Result<GameModel> {
        let config = GameConfig::new(self.n_doors, self.k_opened)?;
        let n = config.n_doors();

        let mut host: BTreeMap<(usize, usize), Vec<(DoorSet, f64)>> = BTreeMap::new();
        for (key, dist) in &self.open_rule {
            let (c, p) = parse_cell_key(key)?;
            if !config.contains(c) || !config.contains(p) {
                return Err(Error::Format(format!("open_rule cell `{key}` is outside 1..={n}")));
            }
            let cell = dist
                .iter()
                .map(|(set, w)| Ok((set.parse::<DoorSet>()?, *w)))
                .collect::<Result<Vec<_>>>()?;
            if host.insert((c, p), cell).is_some() {
                return Err(Error::Format(format!("open_rule cell `{key}` given twice")));
            }
        }
        let car = DoorDistribution::from_weights(self.car_placement.clone());
        let team = TeamStrategy::from_fn(&config, car, |c, p| {
            host.remove(&(c, p)).unwrap_or_else(|| {
                let sets = config.open_sets(c, p);
                let w = 1.0 / sets.len() as f64;
                sets.into_iter().map(|s| (s, w)).collect()
            })
        });

        let mut finals: BTreeMap<Observation, Vec<(usize, f64)>> = BTreeMap::new();
        for (key, dist) in &self.final_choice {
            let obs = parse_observation_key(key)?;
            let cell = dist
                .iter()
                .map(|(door, w)| Ok((parse_door(door, "final_choice")?, *w)))
                .collect::<Result<Vec<_>>>()?;
            if finals.insert(obs, cell).is_some() {
                return Err(Error::Format(format!("final_choice cell `{key}` given twice")));
            }
        }
        let policy = self.final_policy.unwrap_or(FinalPolicy::Uniform);
        for obs in config.observations() {
            finals.entry(obs).or_insert_with_key(|o| policy.final_dist(&config, o));
        }
        let player = PlayerStrategy::from_parts(DoorDistribution::from_weights(self.pick.clone()), finals);

        Ok(GameModel::unchecked(config, team, player))
    }

    /// Writes every cell explicitly, dropping zero-mass entries.
    pub fn from_model(model: &GameModel) -> Self {
        let config = model.config();
        let mut open_rule = BTreeMap::new();
        for c in config.doors() {
            for p in config.doors() {
                let cell: BTreeMap<String, f64> = model
                    .team()
                    .open_dist(config, c, p)
                    .iter()
                    .filter(|(_, w)| *w > 0.0)
                    .map(|(s, w)| (s.to_string(), *w))
                    .collect();
                open_rule.insert(format!("{c},{p}"), cell);
            }
        }
        let final_choice = model
            .player()
            .cells()
            .map(|(obs, dist)| {
                let cell = dist
                    .iter()
                    .filter(|(_, w)| *w > 0.0)
                    .map(|(f, w)| (f.to_string(), *w))
                    .collect();
                (format!("{}|{}", obs.pick, obs.opened), cell)
            })
            .collect();
        ModelFile {
            n_doors: config.n_doors(),
            k_opened: config.k_opened(),
            car_placement: model.team().car().weights().to_vec(),
            pick: model.player().pick().weights().to_vec(),
            open_rule,
            final_choice,
            final_policy: None,
        }
    }
}

/// Reads, builds and validates a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<GameModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    let model = ModelFile::from_json(&text)?.to_model()?;
    let report = model.validate();
    if report.is_valid() {
        Ok(model)
    } else {
        Err(Error::InvalidModel(report))
    }
}
