//! The three-doors (Monty Hall) problem as a finite two-party zero-sum game.
//!
//! * [`model`]: game configuration, both sides' strategies, presets and
//!   pure-strategy enumeration.
//! * [`exact`]: exact unconditional and conditional winning probabilities,
//!   posteriors over the car, and odds-form Bayes.
//! * [`solver`]: the normal-form game, its minimax value and optimal mixed
//!   strategies, security levels, and the biased-host sweep.
//! * [`sim`]: seeded Monte Carlo plays checked against the exact engine.
//! * [`file`]: the JSON model file format.
//!
//! ```
//! use threedoors::{exact, model};
//!
//! let classic = model::make_preset("classic-symmetric", &Default::default()).unwrap();
//! let p = exact::unconditional_win_prob(&classic);
//! assert!((p - 2.0 / 3.0).abs() < 1e-12);
//! ```

pub mod doors;
pub mod error;
pub mod exact;
pub mod file;
pub mod model;
pub mod random;
pub mod sim;
pub mod solver;

pub use doors::{DoorDistribution, DoorSet, Observation};
pub use error::{Error, Result};
pub use model::{GameConfig, GameModel, PlayerStrategy, TeamStrategy};
