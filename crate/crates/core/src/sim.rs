//! Seeded Monte Carlo plays of a [`GameModel`].
//!
//! Generator: ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. A single run uses stream 0; shard `i` of a sharded
//! run uses stream `i + 1` of the same seed. Uniforms are the top 53 bits of
//! `next_u64()` scaled by 2⁻⁵³. Each play draws, in order, the car, the pick,
//! the opened set and the final door, each by inverse CDF over the
//! positive-mass outcomes in ascending door (or set) order.

use std::collections::{BTreeMap, HashMap};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::doors::{DoorSet, Observation};
use crate::error::{Error, Result};
use crate::exact::symmetry_conditionals;
use crate::model::GameModel;

pub const GENERATOR: &str = "chacha8/rand_chacha-0.3/seed_from_u64/u53";

/// |z| above this raises a flag.
pub const FLAG_Z: f64 = 4.0;

/// Tallies with fewer plays are reported but never flagged.
pub const LOW_SAMPLE_PLAYS: u64 = 30;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub plays: u64,
    pub wins: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub generator: String,
    pub seed: u64,
    pub shards: usize,
    pub n_plays: u64,
    pub wins: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub tallies: BTreeMap<Observation, Tally>,
}

impl SimResult {
    fn from_tallies(seed: u64, shards: usize, tallies: BTreeMap<Observation, Tally>) -> Self {
        let n_plays: u64 = tallies.values().map(|t| t.plays).sum();
        let wins: u64 = tallies.values().map(|t| t.wins).sum();
        let estimate = wins as f64 / n_plays as f64;
        SimResult {
            generator: GENERATOR.to_string(),
            seed,
            shards,
            n_plays,
            wins,
            estimate,
            std_error: (estimate * (1.0 - estimate) / n_plays as f64).sqrt(),
            tallies,
        }
    }
}

struct Cdf<T> {
    items: Vec<T>,
    cumulative: Vec<f64>,
}

impl<T> Cdf<T> {
    fn new(pairs: impl IntoIterator<Item = (T, f64)>) -> Self {
        let mut items = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (item, w) in pairs {
            if w > 0.0 {
                acc += w;
                items.push(item);
                cumulative.push(acc);
            }
        }
        Cdf { items, cumulative }
    }

    fn sample(&self, u: f64) -> &T {
        let total = self.cumulative.last().copied().unwrap_or(0.0);
        let target = u * total;
        let i = self.cumulative.iter().position(|&c| target < c).unwrap_or(self.items.len() - 1);
        &self.items[i]
    }
}

struct Sampler {
    n: usize,
    car: Cdf<usize>,
    pick: Cdf<usize>,
    // Per (c, p) cell: opened sets paired with their observation index.
    open: Vec<Cdf<(DoorSet, usize)>>,
    finals: Vec<Cdf<usize>>,
    observations: Vec<Observation>,
}

impl Sampler {
    fn new(model: &GameModel) -> Self {
        let config = model.config();
        let n = config.n_doors();
        let observations = config.observations();
        let index: HashMap<&Observation, usize> = observations.iter().enumerate().map(|(i, o)| (o, i)).collect();
        let mut open = Vec::with_capacity(n * n);
        for c in config.doors() {
            for p in config.doors() {
                open.push(Cdf::new(model.team().open_dist(config, c, p).iter().map(|(set, w)| {
                    let idx = index.get(&Observation::new(p, set.clone())).copied().unwrap_or(usize::MAX);
                    ((set.clone(), idx), *w)
                })));
            }
        }
        let finals = observations
            .iter()
            .map(|o| Cdf::new(model.player().final_dist(o).unwrap_or(&[]).iter().copied()))
            .collect();
        let doors = |d: &crate::doors::DoorDistribution| Cdf::new(config.doors().map(|x| (x, d.prob(x))));
        Sampler {
            n,
            car: doors(model.team().car()),
            pick: doors(model.player().pick()),
            open,
            finals,
            observations,
        }
    }

    fn run(&self, n_plays: u64, seed: u64, stream: u64) -> Vec<Tally> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut uniform = move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let mut tallies = vec![Tally::default(); self.observations.len()];
        for _ in 0..n_plays {
            let car = *self.car.sample(uniform());
            let pick = *self.pick.sample(uniform());
            let (opened, obs) = self.open[(car - 1) * self.n + (pick - 1)].sample(uniform());
            assert!(
                *obs != usize::MAX && !opened.contains(car) && !opened.contains(pick),
                "sampled illegal opening {opened} for car {car}, pick {pick}"
            );
            let f = *self.finals[*obs].sample(uniform());
            assert!(!opened.contains(f), "sampled opened door {f} as final choice");
            let t = &mut tallies[*obs];
            t.plays += 1;
            t.wins += u64::from(f == car);
        }
        tallies
    }

    fn collect(&self, tallies: &[Tally]) -> BTreeMap<Observation, Tally> {
        self.observations
            .iter()
            .zip(tallies)
            .filter(|(_, t)| t.plays > 0)
            .map(|(o, t)| (o.clone(), *t))
            .collect()
    }
}

fn check_plays(n_plays: u64) -> Result<()> {
    if n_plays == 0 {
        Err(Error::Parameter("need at least one play".into()))
    } else {
        Ok(())
    }
}

/// Plays the model `n_plays` times. Identical inputs give identical results.
pub fn simulate(model: &GameModel, n_plays: u64, seed: u64) -> Result<SimResult> {
    check_plays(n_plays)?;
    let sampler = Sampler::new(model);
    let tallies = sampler.run(n_plays, seed, 0);
    Ok(SimResult::from_tallies(seed, 1, sampler.collect(&tallies)))
}

/// Splits the plays over `shards` independent streams run on separate
/// threads, then merges. Reproducible for fixed `(n_plays, seed, shards)`,
/// but not bit-identical to [`simulate`].
pub fn simulate_sharded(model: &GameModel, n_plays: u64, seed: u64, shards: usize) -> Result<SimResult> {
    check_plays(n_plays)?;
    if shards == 0 {
        return Err(Error::Parameter("need at least one shard".into()));
    }
    let sampler = Sampler::new(model);
    let per = n_plays / shards as u64;
    let extra = n_plays % shards as u64;
    let parts: Vec<Vec<Tally>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards as u64)
            .map(|i| {
                let plays = per + u64::from(i < extra);
                let sampler = &sampler;
                scope.spawn(move || sampler.run(plays, seed, i + 1))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard panicked")).collect()
    });
    let mut merged = vec![Tally::default(); sampler.observations.len()];
    for part in &parts {
        for (m, t) in merged.iter_mut().zip(part) {
            m.plays += t.plays;
            m.wins += t.wins;
        }
    }
    Ok(SimResult::from_tallies(seed, shards, sampler.collect(&merged)))
}

/// One estimate compared with its exact value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZCheck {
    /// `None` when the engine calls the observation unreachable.
    pub exact: Option<f64>,
    pub plays: u64,
    pub wins: u64,
    pub estimate: Option<f64>,
    /// `(estimate − exact) / sqrt(exact · (1 − exact) / plays)`.
    pub z: Option<f64>,
    pub low_sample: bool,
    pub flagged: bool,
}

impl ZCheck {
    fn new(exact: Option<f64>, tally: Tally) -> Self {
        let estimate = (tally.plays > 0).then(|| tally.wins as f64 / tally.plays as f64);
        let z = match (exact, estimate) {
            (Some(p), Some(est)) => {
                let se = (p * (1.0 - p) / tally.plays as f64).sqrt();
                if se > 0.0 {
                    Some((est - p) / se)
                } else if (est - p).abs() <= 1e-12 {
                    Some(0.0)
                } else {
                    None
                }
            }
            _ => None,
        };
        let low_sample = tally.plays < LOW_SAMPLE_PLAYS;
        let flagged = match (exact, estimate) {
            // Sampled something the engine says cannot happen.
            (None, Some(_)) => true,
            (Some(_), Some(_)) => !low_sample && z.is_none_or(|z| z.abs() > FLAG_Z),
            _ => false,
        };
        ZCheck { exact, plays: tally.plays, wins: tally.wins, estimate, z, low_sample, flagged }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationCheck {
    pub observation: Observation,
    #[serde(flatten)]
    pub check: ZCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub sim: SimResult,
    pub overall: ZCheck,
    pub per_observation: Vec<ObservationCheck>,
    pub flags: usize,
}

impl ComparisonReport {
    pub fn any_flag(&self) -> bool {
        self.flags > 0
    }
}

/// Compares a finished simulation with the exact engine.
pub fn compare_result(model: &GameModel, sim: SimResult) -> ComparisonReport {
    let table = symmetry_conditionals(model);
    let overall = ZCheck::new(Some(table.unconditional), Tally { plays: sim.n_plays, wins: sim.wins });
    let exact: BTreeMap<&Observation, f64> = table.rows.iter().map(|r| (&r.observation, r.win_prob)).collect();

    let mut per_observation: Vec<ObservationCheck> = table
        .rows
        .iter()
        .map(|r| ObservationCheck {
            observation: r.observation.clone(),
            check: ZCheck::new(Some(r.win_prob), sim.tallies.get(&r.observation).copied().unwrap_or_default()),
        })
        .collect();
    for (obs, tally) in &sim.tallies {
        if !exact.contains_key(obs) {
            per_observation.push(ObservationCheck { observation: obs.clone(), check: ZCheck::new(None, *tally) });
        }
    }
    let flags = usize::from(overall.flagged) + per_observation.iter().filter(|c| c.check.flagged).count();
    ComparisonReport { sim, overall, per_observation, flags }
}

/// Simulates and compares against the exact engine.
pub fn compare_exact(model: &GameModel, n_plays: u64, seed: u64) -> Result<ComparisonReport> {
    let sim = simulate(model, n_plays, seed)?;
    Ok(compare_result(model, sim))
}
