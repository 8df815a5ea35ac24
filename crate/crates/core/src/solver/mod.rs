//! The player-versus-team game in normal form.
//!
//! Rows are the player's pure plans, columns the team's; an entry is 1 when
//! the row's final door hides the column's car. The player maximizes, the
//! team minimizes, and the value is the winning probability both sides can
//! guarantee.

mod simplex;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::doors::{check_weights, Observation, INPUT_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{
    enumerate_player_pure, enumerate_team_pure, GameConfig, PlayerStrategy, PurePlayerStrategy,
    PureTeamStrategy, TeamStrategy,
};

pub use sweep::{conditional_lower_bound_sweep, q_grid, SweepCell, SweepRow, SweepTable};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Dense real matrix, row-major. Payoffs are the row player's.
#[derive(Debug, Clone, PartialEq)]
pub struct GameMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl GameMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::Parameter("empty payoff matrix".into()));
        }
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::Dimension { expected: n_cols, found: row.len() });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parameter("non-finite payoff".into()));
            }
            data.extend(row);
        }
        Ok(GameMatrix { n_rows, n_cols, data })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// `xᵀA`: the player's expected payoff against each column.
    pub fn column_payoffs(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }

    /// `Ay`: each row's expected payoff against the column mixture.
    pub fn row_payoffs(&self, y: &[f64]) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.row(i).iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `xᵀAy`.
    pub fn expected(&self, x: &[f64], y: &[f64]) -> f64 {
        self.column_payoffs(x).iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// `out[i][j] = self[rows[i]][cols[j]]`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> GameMatrix {
        let data = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j)))
            .collect();
        GameMatrix { n_rows: rows.len(), n_cols: cols.len(), data }
    }

    fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn shifted(&self, by: f64) -> GameMatrix {
        GameMatrix { data: self.data.iter().map(|x| x + by).collect(), ..*self }
    }
}

/// A probability distribution over one side's pure strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MixedStrategy {
    weights: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_weights(weights.iter().copied(), INPUT_TOLERANCE)
            .map_err(|e| Error::Parameter(format!("mixed strategy: {e}")))?;
        Ok(MixedStrategy { weights })
    }

    /// Rescales non-negative weights to unit sum.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        // Infinite tolerance: only sign, finiteness and emptiness are checked.
        if let Err(issue) = check_weights(weights.iter().copied(), f64::INFINITY) {
            return Err(Error::Parameter(format!("mixed strategy: {issue}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Parameter("mixed strategy: zero total weight".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(MixedStrategy { weights })
    }

    pub fn uniform(n: usize) -> Self {
        MixedStrategy { weights: vec![1.0 / n as f64; n] }
    }

    pub fn pure(n: usize, index: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[index] = 1.0;
        MixedStrategy { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Indices and weights above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<(usize, f64)> {
        self.weights
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, w)| *w > threshold)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Player,
    Team,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub value: f64,
    pub player_optimal: MixedStrategy,
    pub team_optimal: MixedStrategy,
    /// Security level of `player_optimal` (the maximin side).
    pub lower: f64,
    /// Security level of `team_optimal` (the minimax side).
    pub upper: f64,
    pub duality_gap: f64,
    pub pivots: usize,
}

/// Minimax value and optimal mixed strategies of a finite zero-sum game.
///
/// The answer is certified: both strategies are evaluated against every
/// opposing pure strategy and the two security levels must agree within `tol`.
pub fn solve_minimax(a: &GameMatrix, tol: f64) -> Result<SolveResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    // Shift so every entry is at least 1; the value shifts by the same amount.
    let shift = 1.0 - a.min_entry();
    let sol = simplex::solve_packing(&a.shifted(shift))?;

    let clean = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|w| w.max(0.0)).collect() };
    let fail = |lower: f64, upper: f64| Error::NonConvergence {
        iterations: sol.pivots,
        lower,
        upper,
        gap: (upper - lower).abs(),
    };
    let player = MixedStrategy::normalized(clean(sol.dual)).map_err(|_| fail(f64::NAN, f64::NAN))?;
    let team = MixedStrategy::normalized(clean(sol.primal)).map_err(|_| fail(f64::NAN, f64::NAN))?;

    let lower = security_level(a, &player, Side::Player)?;
    let upper = security_level(a, &team, Side::Team)?;
    let gap = (upper - lower).abs();
    if gap.is_nan() || gap > tol {
        return Err(fail(lower, upper));
    }
    debug_assert!((1.0 / sol.objective - shift - lower).abs() <= 1e-6);
    Ok(SolveResult {
        value: 0.5 * (lower + upper),
        player_optimal: player,
        team_optimal: team,
        lower,
        upper,
        duality_gap: gap,
        pivots: sol.pivots,
    })
}

fn check_len(strategy: &MixedStrategy, expected: usize) -> Result<()> {
    if strategy.len() == expected {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found: strategy.len() })
    }
}

/// Worst-case expected payoff of a fixed mixed strategy.
///
/// For the player this is the minimum over columns; for the team the maximum
/// over rows (payoffs stay the player's).
pub fn security_level(a: &GameMatrix, strategy: &MixedStrategy, side: Side) -> Result<f64> {
    match side {
        Side::Player => {
            check_len(strategy, a.n_rows())?;
            Ok(a.column_payoffs(strategy.weights()).into_iter().fold(f64::INFINITY, f64::min))
        }
        Side::Team => {
            check_len(strategy, a.n_cols())?;
            Ok(a.row_payoffs(strategy.weights()).into_iter().fold(f64::NEG_INFINITY, f64::max))
        }
    }
}

/// Best pure reply of `side` to the opponent's mixed strategy, with the
/// player's expected payoff. Ties go to the lowest index.
pub fn best_response(a: &GameMatrix, opponent: &MixedStrategy, side: Side) -> Result<(usize, f64)> {
    let (payoffs, better): (Vec<f64>, fn(f64, f64) -> bool) = match side {
        Side::Player => {
            check_len(opponent, a.n_cols())?;
            (a.row_payoffs(opponent.weights()), |x, best| x > best)
        }
        Side::Team => {
            check_len(opponent, a.n_rows())?;
            (a.column_payoffs(opponent.weights()), |x, best| x < best)
        }
    };
    let mut best = 0;
    for (i, &v) in payoffs.iter().enumerate() {
        if better(v, payoffs[best]) {
            best = i;
        }
    }
    Ok((best, payoffs[best]))
}

/// What the optimal player strategy says about the final choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recommendation {
    Switch,
    Stay,
    Mixed,
}

impl std::fmt::Display for Recommendation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Recommendation::Switch => "switch",
            Recommendation::Stay => "stay",
            Recommendation::Mixed => "mixed",
        })
    }
}

/// The enumerated game for one configuration.
#[derive(Debug, Clone)]
pub struct PayoffMatrix {
    config: GameConfig,
    rows: Vec<PurePlayerStrategy>,
    cols: Vec<PureTeamStrategy>,
    payoffs: GameMatrix,
}

/// Player wins iff the final door chosen after the team's opened set hides the car.
pub fn pure_payoff(row: &PurePlayerStrategy, col: &PureTeamStrategy) -> f64 {
    let opened = col.opened_for(row.pick);
    match row.final_door(opened) {
        Some(f) if f == col.car => 1.0,
        _ => 0.0,
    }
}

/// Enumerates both sides (subject to `cap`) and fills the win-indicator matrix.
pub fn build_payoff_matrix(config: &GameConfig, cap: u64) -> Result<PayoffMatrix> {
    let rows = enumerate_player_pure(config, cap)?;
    let cols = enumerate_team_pure(config, cap)?;
    let entries = rows
        .iter()
        .map(|r| cols.iter().map(|c| pure_payoff(r, c)).collect())
        .collect();
    let payoffs = GameMatrix::from_rows(entries)?;
    Ok(PayoffMatrix { config: *config, rows, cols, payoffs })
}

impl PayoffMatrix {
    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn rows(&self) -> &[PurePlayerStrategy] {
        &self.rows
    }

    pub fn cols(&self) -> &[PureTeamStrategy] {
        &self.cols
    }

    pub fn payoffs(&self) -> &GameMatrix {
        &self.payoffs
    }

    pub fn solve(&self, tol: f64) -> Result<SolveResult> {
        solve_minimax(&self.payoffs, tol)
    }

    pub fn row_index(&self, row: &PurePlayerStrategy) -> Option<usize> {
        self.rows.binary_search(row).ok()
    }

    pub fn col_index(&self, col: &PureTeamStrategy) -> Option<usize> {
        self.cols.binary_search(col).ok()
    }

    /// Mixed strategy realizing the same play as a behavioral player strategy:
    /// each plan gets `pick(p) · Π_O final(f_map(O) | p, O)`.
    pub fn player_mixed(&self, player: &PlayerStrategy) -> Result<MixedStrategy> {
        let weights = self
            .rows
            .iter()
            .map(|r| {
                r.f_map.iter().fold(player.pick().prob(r.pick), |acc, (set, f)| {
                    acc * player.final_prob(&Observation::new(r.pick, set.clone()), *f)
                })
            })
            .collect();
        MixedStrategy::normalized(weights)
    }

    /// Mixed strategy realizing a behavioral team strategy:
    /// each plan gets `car(c) · Π_p open(g_map(p) | c, p)`.
    pub fn team_mixed(&self, team: &TeamStrategy) -> Result<MixedStrategy> {
        let weights = self
            .cols
            .iter()
            .map(|col| {
                col.g_map.iter().enumerate().fold(team.car().prob(col.car), |acc, (i, set)| {
                    acc * team.open_prob(&self.config, col.car, i + 1, set)
                })
            })
            .collect();
        MixedStrategy::normalized(weights)
    }

    /// Share of the strategy's policy mass spent on keeping the pick,
    /// averaged over each plan's observation cells.
    pub fn stay_mass(&self, player: &MixedStrategy) -> f64 {
        self.rows
            .iter()
            .zip(player.weights())
            .map(|(r, w)| w * r.stay_count() as f64 / r.f_map.len() as f64)
            .sum()
    }

    pub fn recommendation(&self, player: &MixedStrategy) -> Recommendation {
        let stay = self.stay_mass(player);
        if stay <= 1e-12 {
            Recommendation::Switch
        } else if stay >= 1.0 - 1e-12 {
            Recommendation::Stay
        } else {
            Recommendation::Mixed
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doors::{DoorDistribution, DoorSet};
    use crate::model::{FinalPolicy, DEFAULT_ENUMERATION_CAP};

    fn classic() -> PayoffMatrix {
        build_payoff_matrix(&GameConfig::classic(), DEFAULT_ENUMERATION_CAP).unwrap()
    }

    fn m(rows: Vec<Vec<f64>>) -> GameMatrix {
        GameMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn classic_dimensions() {
        let pm = classic();
        assert_eq!((pm.payoffs().n_rows(), pm.payoffs().n_cols()), (12, 6));
    }

    #[test]
    fn stayer_holds_car_door() {
        let pm = classic();
        let stay = pm.rows().iter().position(|r| r.pick == 1 && r.always_stays()).unwrap();
        for (j, col) in pm.cols().iter().enumerate() {
            if col.car == 1 {
                assert_eq!(pm.payoffs().get(stay, j), 1.0);
            }
        }
    }

    #[test]
    fn switcher_abandons_car() {
        let pm = classic();
        let switch = pm.rows().iter().position(|r| r.pick == 1 && r.always_switches()).unwrap();
        let col = PureTeamStrategy {
            car: 1,
            g_map: vec![DoorSet::single(2), DoorSet::single(3), DoorSet::single(2)],
        };
        let j = pm.col_index(&col).unwrap();
        assert_eq!(pm.payoffs().get(switch, j), 0.0);
    }

    #[test]
    fn trivial_games() {
        let one = solve_minimax(&m(vec![vec![1.0]]), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(one.value, 1.0);
        assert_eq!(one.player_optimal.weights(), &[1.0]);
        assert_eq!(one.team_optimal.weights(), &[1.0]);

        let pennies = solve_minimax(&m(vec![vec![1.0, 0.0], vec![0.0, 1.0]]), DEFAULT_TOLERANCE).unwrap();
        assert!((pennies.value - 0.5).abs() < 1e-12);
        for w in pennies.player_optimal.weights().iter().chain(pennies.team_optimal.weights()) {
            assert!((w - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_payoffs_and_saddle_point() {
        // Pure saddle at (0, 1) with value -1.
        let a = m(vec![vec![2.0, -1.0, 3.0], vec![-2.0, -3.0, 4.0]]);
        let s = solve_minimax(&a, DEFAULT_TOLERANCE).unwrap();
        assert!((s.value + 1.0).abs() < 1e-12);
        assert!(s.duality_gap <= DEFAULT_TOLERANCE);
    }

    #[test]
    fn classic_value_and_recommendation() {
        let pm = classic();
        let s = pm.solve(DEFAULT_TOLERANCE).unwrap();
        assert!((s.value - 2.0 / 3.0).abs() < 1e-12);
        assert!(s.duality_gap <= 1e-12);
        assert_eq!(pm.recommendation(&s.player_optimal), Recommendation::Switch);
    }

    #[test]
    fn security_levels_of_named_strategies() {
        let pm = classic();
        let a = pm.payoffs();
        let cfg = GameConfig::classic();
        let switch = pm
            .player_mixed(&PlayerStrategy::with_policy(&cfg, DoorDistribution::uniform(3), FinalPolicy::Switch))
            .unwrap();
        assert_eq!(switch.support(0.0).len(), 3);
        assert!((security_level(a, &switch, Side::Player).unwrap() - 2.0 / 3.0).abs() < 1e-12);

        let stay = pm
            .player_mixed(&PlayerStrategy::with_policy(&cfg, DoorDistribution::uniform(3), FinalPolicy::Stay))
            .unwrap();
        // Stayers win 1/3 against every column.
        assert!(a.column_payoffs(stay.weights()).iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
        assert!((security_level(a, &stay, Side::Player).unwrap() - 1.0 / 3.0).abs() < 1e-12);

        let team = pm.team_mixed(&TeamStrategy::uniform_host(&cfg, DoorDistribution::uniform(3))).unwrap();
        assert_eq!(team.support(0.0).len(), 6);
        assert!((security_level(a, &team, Side::Team).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn best_responses() {
        let pm = classic();
        let a = pm.payoffs();
        let cfg = GameConfig::classic();
        let team = pm.team_mixed(&TeamStrategy::uniform_host(&cfg, DoorDistribution::uniform(3))).unwrap();
        let (i, v) = best_response(a, &team, Side::Player).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        assert!(a.row_payoffs(team.weights())[..i].iter().all(|x| *x < v - 1e-12));

        let stay = pm.rows().iter().position(|r| r.pick == 1 && r.always_stays()).unwrap();
        let (j, v) = best_response(a, &MixedStrategy::pure(12, stay), Side::Team).unwrap();
        assert_ne!(pm.cols()[j].car, 1);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn dimension_errors() {
        let a = m(vec![vec![1.0, 0.0]]);
        assert!(matches!(security_level(&a, &MixedStrategy::uniform(2), Side::Player), Err(Error::Dimension { .. })));
        assert!(matches!(best_response(&a, &MixedStrategy::uniform(1), Side::Player), Err(Error::Dimension { .. })));
        assert!(solve_minimax(&a, 0.0).is_err());
        assert!(GameMatrix::from_rows(vec![]).is_err());
        assert!(GameMatrix::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn mixed_strategy_checks() {
        assert!(MixedStrategy::new(vec![0.5, 0.6]).is_err());
        assert!(MixedStrategy::new(vec![0.5, 0.5]).is_ok());
        assert!(MixedStrategy::normalized(vec![0.0, 0.0]).is_err());
        assert!(MixedStrategy::normalized(vec![-1.0, 2.0]).is_err());
        assert_eq!(MixedStrategy::normalized(vec![1.0, 3.0]).unwrap().weights(), &[0.25, 0.75]);
    }
}
