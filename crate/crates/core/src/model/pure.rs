use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::doors::{binomial, DoorSet};
use crate::error::{Error, Result};

use super::GameConfig;

/// Default ceiling on the number of pure strategies one side may enumerate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// A deterministic player plan: pick `pick`, then answer each possible opened
/// set with a fixed final door.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PurePlayerStrategy {
    pub pick: usize,
    /// Sorted by opened set; one entry per set the host could open.
    pub f_map: Vec<(DoorSet, usize)>,
}

impl PurePlayerStrategy {
    pub fn final_door(&self, opened: &DoorSet) -> Option<usize> {
        self.f_map
            .binary_search_by(|(s, _)| s.cmp(opened))
            .ok()
            .map(|i| self.f_map[i].1)
    }

    /// Number of observations answered by keeping the pick.
    pub fn stay_count(&self) -> usize {
        self.f_map.iter().filter(|(_, f)| *f == self.pick).count()
    }

    pub fn always_switches(&self) -> bool {
        self.stay_count() == 0
    }

    pub fn always_stays(&self) -> bool {
        self.stay_count() == self.f_map.len()
    }
}

impl fmt::Display for PurePlayerStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pick {};", self.pick)?;
        for (i, (set, door)) in self.f_map.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{{{set}}}->{door}")?;
        }
        Ok(())
    }
}

/// A deterministic team plan: car behind `car`, and for every pick a fixed
/// set of goat doors to open.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PureTeamStrategy {
    pub car: usize,
    /// `g_map[p - 1]` is opened when the player picks `p`.
    pub g_map: Vec<DoorSet>,
}

impl PureTeamStrategy {
    pub fn opened_for(&self, pick: usize) -> &DoorSet {
        &self.g_map[pick - 1]
    }
}

impl fmt::Display for PureTeamStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "car {};", self.car)?;
        for (i, set) in self.g_map.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{}->{{{set}}}", i + 1)?;
        }
        Ok(())
    }
}

fn count_parts(config: &GameConfig) -> (u64, u64, u64) {
    let n = config.n_doors() as u64;
    let k = config.k_opened() as u64;
    (n, k, n - k)
}

/// `N · (N−k)^C(N−1,k)`, or `None` on overflow.
pub fn player_pure_count(config: &GameConfig) -> Option<u128> {
    let (n, k, remaining) = count_parts(config);
    let cells = u32::try_from(binomial(n - 1, k)?).ok()?;
    (remaining as u128).checked_pow(cells)?.checked_mul(n as u128)
}

/// `N · C(N−1,k) · C(N−2,k)^(N−1)`, or `None` on overflow.
pub fn team_pure_count(config: &GameConfig) -> Option<u128> {
    let (n, k, _) = count_parts(config);
    let forced = binomial(n - 2, k)?.checked_pow(u32::try_from(n - 1).ok()?)?;
    binomial(n - 1, k)?.checked_mul(forced)?.checked_mul(n as u128)
}

fn check_cap(count: Option<u128>, cap: u64) -> Result<()> {
    match count {
        Some(c) if c <= cap as u128 => Ok(()),
        Some(c) => Err(Error::CapExceeded { count: c.to_string(), cap }),
        None => Err(Error::CapExceeded { count: "more than 2^128".into(), cap }),
    }
}

/// Every pure player strategy, ordered by pick then by final doors.
pub fn enumerate_player_pure(config: &GameConfig, cap: u64) -> Result<Vec<PurePlayerStrategy>> {
    check_cap(player_pure_count(config), cap)?;
    let mut out = Vec::new();
    for pick in config.doors() {
        let sets = config.observable_sets(pick);
        let choices: Vec<Vec<usize>> = sets
            .iter()
            .map(|s| config.doors().filter(|&d| !s.contains(d)).collect())
            .collect();
        for finals in choices.iter().map(|c| c.iter().copied()).multi_cartesian_product() {
            let f_map = sets.iter().cloned().zip(finals).collect();
            out.push(PurePlayerStrategy { pick, f_map });
        }
    }
    Ok(out)
}

/// Every pure team strategy, ordered by car then by the opened sets.
pub fn enumerate_team_pure(config: &GameConfig, cap: u64) -> Result<Vec<PureTeamStrategy>> {
    check_cap(team_pure_count(config), cap)?;
    let mut out = Vec::new();
    for car in config.doors() {
        let options: Vec<Vec<DoorSet>> = config.doors().map(|p| config.open_sets(car, p)).collect();
        for g_map in options.iter().map(|o| o.iter().cloned()).multi_cartesian_product() {
            out.push(PureTeamStrategy { car, g_map });
        }
    }
    Ok(out)
}
