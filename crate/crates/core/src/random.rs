//! Random valid models, for fuzzing the engine and its invariants.

use rand::Rng;

use crate::doors::DoorDistribution;
use crate::model::{GameConfig, GameModel, PlayerStrategy, TeamStrategy};

/// Random weights over `len` outcomes; about a fifth of them are zeroed.
fn random_weights<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len)
        .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..len)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// A random valid model with `3..=max_doors` doors and any legal `k`.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, max_doors: usize) -> GameModel {
    let n = rng.gen_range(3..=max_doors.max(3));
    let k = rng.gen_range(1..=n - 2);
    random_model_for(rng, GameConfig::new(n, k).expect("n >= 3 and 1 <= k <= n-2"))
}

pub fn random_model_for<R: Rng + ?Sized>(rng: &mut R, config: GameConfig) -> GameModel {
    let n = config.n_doors();
    let car = DoorDistribution::from_weights(random_weights(rng, n));
    let pick = DoorDistribution::from_weights(random_weights(rng, n));
    let team = TeamStrategy::from_fn(&config, car, |c, p| {
        let sets = config.open_sets(c, p);
        let w = random_weights(rng, sets.len());
        sets.into_iter().zip(w).collect()
    });
    let player = PlayerStrategy::from_fn(&config, pick, |obs| {
        let doors = config.unopened(obs);
        let w = random_weights(rng, doors.len());
        doors.into_iter().zip(w).collect()
    });
    GameModel::new(config, team, player).expect("random model is valid by construction")
}
