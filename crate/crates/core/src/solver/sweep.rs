//! Conditional winning chances of a switcher against a biased host.
//!
//! Three doors, car uniform, pick fixed at door 1, and a host who opens the
//! higher-numbered goat door with probability `q` when he has a choice.

use serde::{Deserialize, Serialize};

use crate::doors::{DoorDistribution, Observation};
use crate::error::{Error, Result};
use crate::exact::symmetry_conditionals;
use crate::model::{FinalPolicy, GameConfig, GameModel, PlayerStrategy, TeamStrategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub observation: Observation,
    pub win_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub q: f64,
    pub conditionals: Vec<SweepCell>,
    pub min_conditional: f64,
    /// `1/(1+q)`, the switcher's chance after seeing door 3 opened.
    pub closed_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub global_min: f64,
    /// Grid points attaining the global minimum.
    pub argmin: Vec<f64>,
}

/// `steps` evenly spaced points from `from` to `to`, both included.
pub fn q_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    let in_unit = |x: f64| (0.0..=1.0).contains(&x);
    if !in_unit(from) || !in_unit(to) {
        return Err(Error::Parameter(format!("q grid [{from}, {to}] must lie within [0, 1]")));
    }
    if from > to {
        return Err(Error::Parameter(format!("q grid runs backwards: {from} > {to}")));
    }
    match steps {
        0 => Err(Error::Parameter("q grid needs at least one step".into())),
        1 if from != to => Err(Error::Parameter("a single-step q grid needs q-from = q-to".into())),
        1 => Ok(vec![from]),
        _ => {
            let last = (steps - 1) as f64;
            Ok((0..steps)
                .map(|i| if i + 1 == steps { to } else { from + (to - from) * i as f64 / last })
                .collect())
        }
    }
}

fn biased_fixed_pick(q: f64) -> Result<GameModel> {
    let cfg = GameConfig::classic();
    let team = TeamStrategy::biased_host(&cfg, DoorDistribution::uniform(3), q)?;
    let player = PlayerStrategy::with_policy(&cfg, DoorDistribution::point(3, 1), FinalPolicy::Switch);
    GameModel::new(cfg, team, player)
}

/// Minimum conditional switching chance over reachable observations, per q.
pub fn conditional_lower_bound_sweep(q_grid: &[f64]) -> Result<SweepTable> {
    if q_grid.is_empty() {
        return Err(Error::Parameter("empty q grid".into()));
    }
    let mut rows = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let table = symmetry_conditionals(&biased_fixed_pick(q)?);
        let conditionals: Vec<SweepCell> = table
            .rows
            .into_iter()
            .map(|r| SweepCell { observation: r.observation, win_prob: r.win_prob })
            .collect();
        let min_conditional = conditionals.iter().map(|c| c.win_prob).fold(f64::INFINITY, f64::min);
        rows.push(SweepRow { q, conditionals, min_conditional, closed_form: 1.0 / (1.0 + q) });
    }
    let global_min = rows.iter().map(|r| r.min_conditional).fold(f64::INFINITY, f64::min);
    let argmin = rows
        .iter()
        .filter(|r| r.min_conditional <= global_min + 1e-12)
        .map(|r| r.q)
        .collect();
    Ok(SweepTable { rows, global_min, argmin })
}
