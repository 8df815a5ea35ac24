use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::doors::DoorDistribution;
use crate::error::{Error, Result};

use super::{FinalPolicy, GameConfig, GameModel, PlayerStrategy, TeamStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    ClassicSymmetric,
    HostBiased,
    HundredDoors,
    FixedPick,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::ClassicSymmetric,
        Preset::HostBiased,
        Preset::HundredDoors,
        Preset::FixedPick,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::ClassicSymmetric => "classic-symmetric",
            Preset::HostBiased => "host-biased",
            Preset::HundredDoors => "hundred-doors",
            Preset::FixedPick => "fixed-pick",
        }
    }

    pub fn parameters(self) -> &'static str {
        match self {
            Preset::ClassicSymmetric | Preset::FixedPick => "",
            Preset::HostBiased => "q in [0,1] (default 0.5)",
            Preset::HundredDoors => "N >= 3 (default 100); k = N-2",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::ClassicSymmetric => {
                "3 doors, uniform car and pick, host tosses a fair coin when it has a choice, player always switches"
            }
            Preset::HostBiased => {
                "classic, but when the car is behind the pick the host opens the higher-numbered door with probability q"
            }
            Preset::HundredDoors => "N doors, host opens all but one of the others, player always switches",
            Preset::FixedPick => "classic, but the player always picks door 1",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic-symmetric" | "classic" => Ok(Preset::ClassicSymmetric),
            "host-biased" | "biased" => Ok(Preset::HostBiased),
            "hundred-doors" | "hundred" => Ok(Preset::HundredDoors),
            "fixed-pick" => Ok(Preset::FixedPick),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

/// Optional scalars a preset may take.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    pub q: Option<f64>,
    pub n_doors: Option<usize>,
}

impl Preset {
    pub fn build(self, params: &PresetParams) -> Result<GameModel> {
        if params.q.is_some() && self != Preset::HostBiased {
            return Err(Error::Parameter(format!("preset {self} does not take q")));
        }
        if params.n_doors.is_some() && self != Preset::HundredDoors {
            return Err(Error::Parameter(format!("preset {self} does not take a door count")));
        }
        match self {
            Preset::ClassicSymmetric => Ok(classic_with_pick(DoorDistribution::uniform(3))),
            Preset::FixedPick => Ok(classic_with_pick(DoorDistribution::point(3, 1))),
            Preset::HostBiased => {
                let q = params.q.unwrap_or(0.5);
                let cfg = GameConfig::classic();
                let team = TeamStrategy::biased_host(&cfg, DoorDistribution::uniform(3), q)?;
                let player = PlayerStrategy::with_policy(&cfg, DoorDistribution::uniform(3), FinalPolicy::Switch);
                GameModel::new(cfg, team, player)
            }
            Preset::HundredDoors => {
                let n = params.n_doors.unwrap_or(100);
                if n < 3 {
                    return Err(Error::Parameter(format!("hundred-doors needs N >= 3, got {n}")));
                }
                let cfg = GameConfig::new(n, n - 2)?;
                let team = TeamStrategy::uniform_host(&cfg, DoorDistribution::uniform(n));
                let player = PlayerStrategy::with_policy(&cfg, DoorDistribution::uniform(n), FinalPolicy::Switch);
                GameModel::new(cfg, team, player)
            }
        }
    }
}

/// Looks a preset up by name and builds it.
pub fn make_preset(name: &str, params: &PresetParams) -> Result<GameModel> {
    name.parse::<Preset>()?.build(params)
}

fn classic_with_pick(pick: DoorDistribution) -> GameModel {
    let cfg = GameConfig::classic();
    let team = TeamStrategy::uniform_host(&cfg, DoorDistribution::uniform(3));
    let player = PlayerStrategy::with_policy(&cfg, pick, FinalPolicy::Switch);
    GameModel::unchecked(cfg, team, player)
}
