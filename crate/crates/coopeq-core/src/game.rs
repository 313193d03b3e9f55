//! Data model for finite games in explicit form: labeled strategy sets,
//! exact rational gains, altruism and fairness handles, and mixed profiles.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cpt;
use crate::error::{CoopError, Result};

/// Exact rational number used for all expected-utility arithmetic.
pub type Rational = BigRational;

/// Builds a rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds the rational `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Lossy conversion to `f64` (used only at prospect-theory boundaries).
pub fn to_f64(x: &Rational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

/// Gain storage. Gains are integers at a fixed per-game `scale`: the gain of
/// a profile is `raw / scale` units of the abstract good.
#[derive(Clone)]
pub enum Gains {
    /// Fully tabulated gains, indexed `[player][flat profile index]` with the
    /// last player's strategy varying fastest.
    Dense(Vec<Vec<i64>>),
    /// Gains computed on demand; used for generated games too large to
    /// tabulate. The closure receives `(pure profile, player)`.
    Lazy(Arc<dyn Fn(&[usize], usize) -> i64 + Send + Sync>),
}

/// The altruism function `a_ij(k, y, z)`: how much a dictator with sure gain
/// `y` transfers to a recipient sitting at `z` when the exchange rate is `k`.
#[derive(Clone, Debug, PartialEq)]
pub enum Altruism {
    /// `a(k, y, z) = clamp(round(theta * y), 0, max(y, 0))`.
    Proportional { theta: Rational },
    /// Explicit `(k, y, z) -> a` entries; lookups must match exactly.
    Table(Vec<(Rational, Rational, Rational, Rational)>),
}

impl Altruism {
    /// Default altruism with `theta = 1/5`.
    pub fn default_proportional() -> Self {
        Altruism::Proportional { theta: ratio(1, 5) }
    }

    /// Evaluates the altruism function.
    pub fn value(&self, k: &Rational, y: &Rational, z: &Rational) -> Result<Rational> {
        match self {
            Altruism::Proportional { theta } => {
                let raw = (theta * y).round();
                let hi = if y.is_negative() { Rational::zero() } else { y.clone() };
                let lo = Rational::zero();
                Ok(if raw < lo {
                    lo
                } else if raw > hi {
                    hi
                } else {
                    raw
                })
            }
            Altruism::Table(entries) => entries
                .iter()
                .find(|(tk, ty, tz, _)| tk == k && ty == y && tz == z)
                .map(|(_, _, _, a)| a.clone())
                .ok_or_else(|| CoopError::InvalidParameter {
                    detail: format!("no altruism table entry for ({k}, {y}, {z})"),
                }),
        }
    }
}

/// Per-player fairness function `f_i(x, y)` measuring how much the player
/// dislikes renouncing a gain of `x` to accept `y <= x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Fairness {
    /// `f(x, y) = v(x) - v(y)` through the prospect-theory value function
    /// (strictly increasing, concave over gains), evaluated in `f64`.
    CptValue { alpha: f64, beta: f64, lambda: f64 },
}

impl Fairness {
    /// Default fairness with the standard value-function estimates.
    pub fn default_cpt() -> Self {
        Fairness::CptValue { alpha: 0.88, beta: 0.88, lambda: 2.25 }
    }

    /// Evaluates the disagreement between a renounced gain `x` and an
    /// accepted gain `y`.
    pub fn eval(&self, x: &Rational, y: &Rational) -> f64 {
        match self {
            Fairness::CptValue { alpha, beta, lambda } => {
                cpt::value_fn_raw(to_f64(x), *alpha, *beta, *lambda)
                    - cpt::value_fn_raw(to_f64(y), *alpha, *beta, *lambda)
            }
        }
    }
}

/// A finite game in explicit form.
#[derive(Clone)]
pub struct ExplicitGame {
    /// Ordered strategy labels, one list per player.
    pub strategy_labels: Vec<Vec<String>>,
    gains: Gains,
    /// Common denominator of the gain table: gain = raw / scale.
    scale: i64,
    /// Altruism function shared by all ordered player pairs.
    pub altruism: Altruism,
    /// Fairness function shared by all players.
    pub fairness: Fairness,
    /// True when the game is symmetric under any simultaneous relabeling of
    /// players (all strategy sets equal, gains permutation-equivariant).
    /// Enables multiset-based fast paths; purely an optimization hint.
    pub exchangeable: bool,
    /// True when every `g_i` is nondecreasing in each *opponent's* strategy
    /// index. Enables exact large-`N` worst-case searches; set only by
    /// generators whose payoffs provably have this shape.
    pub monotone_opponents: bool,
}

impl ExplicitGame {
    /// Builds a game from dense per-player gain tables (flat, last player's
    /// strategy varying fastest) at the given scale.
    pub fn from_tables(
        strategy_labels: Vec<Vec<String>>,
        tables: Vec<Vec<i64>>,
        scale: i64,
    ) -> Result<Self> {
        let shape: Vec<usize> = strategy_labels.iter().map(|s| s.len()).collect();
        if shape.iter().any(|&n| n == 0) {
            return Err(CoopError::InvalidParameter {
                detail: "every strategy set must be non-empty".to_string(),
            });
        }
        if scale <= 0 {
            return Err(CoopError::InvalidParameter {
                detail: "gain scale must be positive".to_string(),
            });
        }
        let cells: usize = shape.iter().product();
        if tables.len() != shape.len() || tables.iter().any(|t| t.len() != cells) {
            return Err(CoopError::DimensionMismatch {
                player: tables.iter().position(|t| t.len() != cells).unwrap_or(0),
                detail: format!("expected {cells} gain entries per player"),
            });
        }
        Ok(ExplicitGame {
            strategy_labels,
            gains: Gains::Dense(tables),
            scale,
            altruism: Altruism::default_proportional(),
            fairness: Fairness::default_cpt(),
            exchangeable: false,
            monotone_opponents: false,
        })
    }

    /// Builds a game whose gains are evaluated on demand.
    pub fn from_fn(
        strategy_labels: Vec<Vec<String>>,
        scale: i64,
        gains: Arc<dyn Fn(&[usize], usize) -> i64 + Send + Sync>,
    ) -> Result<Self> {
        if strategy_labels.iter().any(|s| s.is_empty()) {
            return Err(CoopError::InvalidParameter {
                detail: "every strategy set must be non-empty".to_string(),
            });
        }
        if scale <= 0 {
            return Err(CoopError::InvalidParameter {
                detail: "gain scale must be positive".to_string(),
            });
        }
        Ok(ExplicitGame {
            strategy_labels,
            gains: Gains::Lazy(gains),
            scale,
            altruism: Altruism::default_proportional(),
            fairness: Fairness::default_cpt(),
            exchangeable: false,
            monotone_opponents: false,
        })
    }

    /// Number of players.
    pub fn num_players(&self) -> usize {
        self.strategy_labels.len()
    }

    /// Number of pure strategies of `player`.
    pub fn num_strategies(&self, player: usize) -> usize {
        self.strategy_labels[player].len()
    }

    /// Strategy-count vector.
    pub fn shape(&self) -> Vec<usize> {
        self.strategy_labels.iter().map(|s| s.len()).collect()
    }

    /// The common denominator of the gain table.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Raw (integer) gain of `player` at a pure profile.
    pub fn gain_raw(&self, profile: &[usize], player: usize) -> i64 {
        match &self.gains {
            Gains::Dense(tables) => {
                let mut idx = 0usize;
                for (p, &s) in profile.iter().enumerate() {
                    idx = idx * self.strategy_labels[p].len() + s;
                }
                tables[player][idx]
            }
            Gains::Lazy(f) => f(profile, player),
        }
    }

    /// Exact gain of `player` at a pure profile.
    pub fn gain(&self, profile: &[usize], player: usize) -> Rational {
        ratio(self.gain_raw(profile, player), self.scale)
    }

    /// Returns true when the gain table is stored densely.
    pub fn is_dense(&self) -> bool {
        matches!(self.gains, Gains::Dense(_))
    }

    /// Multilinear expected gain of `player` under a mixed profile.
    pub fn expected_gain(&self, profile: &MixedProfile, player: usize) -> Result<Rational> {
        profile.check_shape(self)?;
        let n = self.num_players();
        let mut pure = vec![0usize; n];
        let mut total = Rational::zero();
        expected_rec(self, profile, player, 0, Rational::one(), &mut pure, &mut total);
        Ok(total)
    }

    /// The subgame keeping only the listed strategies per player (indices
    /// into the current sets, strictly increasing). Gains are retabulated
    /// when small enough, otherwise remapped lazily.
    pub fn restrict(&self, keep: &[Vec<usize>]) -> Result<Self> {
        if keep.len() != self.num_players() {
            return Err(CoopError::InvalidPartition {
                detail: "restriction must list every player".to_string(),
            });
        }
        for (p, ks) in keep.iter().enumerate() {
            if ks.is_empty() {
                return Err(CoopError::InvalidParameter {
                    detail: format!("restriction empties player {}'s strategy set", p + 1),
                });
            }
            if ks.iter().any(|&s| s >= self.num_strategies(p)) {
                return Err(CoopError::UnknownStrategy {
                    player: p,
                    detail: "restriction index out of range".to_string(),
                });
            }
        }
        let labels: Vec<Vec<String>> = keep
            .iter()
            .enumerate()
            .map(|(p, ks)| ks.iter().map(|&s| self.strategy_labels[p][s].clone()).collect())
            .collect();
        let cells: usize = labels.iter().map(|l| l.len()).product();
        let n = self.num_players();
        let mut out = if cells.saturating_mul(n) <= 4_000_000 {
            // Materialize densely.
            let shape: Vec<usize> = labels.iter().map(|l| l.len()).collect();
            let mut tables = vec![vec![0i64; cells]; n];
            let mut profile = vec![0usize; n];
            let mut orig = vec![0usize; n];
            for idx in 0..cells {
                unflatten(idx, &shape, &mut profile);
                for p in 0..n {
                    orig[p] = keep[p][profile[p]];
                }
                for (pl, table) in tables.iter_mut().enumerate() {
                    table[idx] = self.gain_raw(&orig, pl);
                }
            }
            ExplicitGame::from_tables(labels, tables, self.scale)?
        } else {
            let base = self.clone();
            let maps: Vec<Vec<usize>> = keep.to_vec();
            ExplicitGame::from_fn(
                labels,
                self.scale,
                Arc::new(move |profile: &[usize], player: usize| {
                    let orig: Vec<usize> =
                        profile.iter().enumerate().map(|(p, &s)| maps[p][s]).collect();
                    base.gain_raw(&orig, player)
                }),
            )?
        };
        out.altruism = self.altruism.clone();
        out.fairness = self.fairness.clone();
        // A restriction can break player symmetry unless it keeps the same
        // strategies for everyone.
        out.exchangeable = self.exchangeable && keep.windows(2).all(|w| w[0] == w[1]);
        out.monotone_opponents = self.monotone_opponents;
        Ok(out)
    }

    /// The `(N-1)`-player game obtained by freezing `player` to `strategy`.
    /// Remaining players keep their original relative order.
    pub fn fiber_game(&self, player: usize, strategy: usize) -> Result<Self> {
        if player >= self.num_players() {
            return Err(CoopError::DimensionMismatch {
                player,
                detail: "no such player".to_string(),
            });
        }
        if strategy >= self.num_strategies(player) {
            return Err(CoopError::UnknownStrategy {
                player,
                detail: format!("strategy index {strategy} out of range"),
            });
        }
        if self.num_players() == 1 {
            return Err(CoopError::InvalidParameter {
                detail: "cannot take a fiber of a one-player game".to_string(),
            });
        }
        let labels: Vec<Vec<String>> = self
            .strategy_labels
            .iter()
            .enumerate()
            .filter(|(p, _)| *p != player)
            .map(|(_, l)| l.clone())
            .collect();
        let cells: usize = labels.iter().map(|l| l.len()).product();
        let n = labels.len();
        let mut out = if cells.saturating_mul(n) <= 4_000_000 {
            let shape: Vec<usize> = labels.iter().map(|l| l.len()).collect();
            let mut tables = vec![vec![0i64; cells]; n];
            let mut sub = vec![0usize; n];
            let mut full = vec![0usize; n + 1];
            for idx in 0..cells {
                unflatten(idx, &shape, &mut sub);
                splice(&sub, player, strategy, &mut full);
                for (q, table) in tables.iter_mut().enumerate() {
                    let orig_player = if q < player { q } else { q + 1 };
                    table[idx] = self.gain_raw(&full, orig_player);
                }
            }
            ExplicitGame::from_tables(labels, tables, self.scale)?
        } else {
            let base = self.clone();
            ExplicitGame::from_fn(
                labels,
                self.scale,
                Arc::new(move |profile: &[usize], q: usize| {
                    let mut full = vec![0usize; profile.len() + 1];
                    splice(profile, player, strategy, &mut full);
                    let orig_player = if q < player { q } else { q + 1 };
                    base.gain_raw(&full, orig_player)
                }),
            )?
        };
        out.altruism = self.altruism.clone();
        out.fairness = self.fairness.clone();
        out.exchangeable = self.exchangeable && self.num_players() > 2;
        out.monotone_opponents = self.monotone_opponents;
        Ok(out)
    }
}

/// Inserts `strategy` for `player` into a reduced profile, producing a full
/// pure profile.
pub(crate) fn splice(sub: &[usize], player: usize, strategy: usize, full: &mut [usize]) {
    for (q, &s) in sub.iter().enumerate() {
        let orig = if q < player { q } else { q + 1 };
        full[orig] = s;
    }
    full[player] = strategy;
}

/// Decodes a flat profile index (last axis fastest) into `out`.
pub(crate) fn unflatten(mut idx: usize, shape: &[usize], out: &mut [usize]) {
    for p in (0..shape.len()).rev() {
        out[p] = idx % shape[p];
        idx /= shape[p];
    }
}

/// Calls `f` on every pure profile of the given shape.
pub(crate) fn for_each_profile<F: FnMut(&[usize])>(shape: &[usize], mut f: F) {
    let mut profile = vec![0usize; shape.len()];
    loop {
        f(&profile);
        let mut p = shape.len();
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            profile[p] += 1;
            if profile[p] < shape[p] {
                break;
            }
            profile[p] = 0;
        }
    }
}

fn expected_rec(
    game: &ExplicitGame,
    profile: &MixedProfile,
    player: usize,
    depth: usize,
    weight: Rational,
    pure: &mut [usize],
    total: &mut Rational,
) {
    if depth == game.num_players() {
        *total += weight * game.gain(pure, player);
        return;
    }
    for (s, prob) in &profile.strategies[depth].support {
        pure[depth] = *s;
        expected_rec(game, profile, player, depth + 1, weight.clone() * prob, pure, total);
    }
}

/// Free-function form of [`ExplicitGame::expected_gain`].
pub fn expected_gain(game: &ExplicitGame, profile: &MixedProfile, player: usize) -> Result<Rational> {
    game.expected_gain(profile, player)
}

/// A mixed strategy stored sparsely as `(strategy index, probability)` pairs
/// with strictly increasing indices and probabilities summing to one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MixedStrategy {
    pub support: Vec<(usize, Rational)>,
}

impl MixedStrategy {
    /// The degenerate measure on one pure strategy.
    pub fn pure(strategy: usize) -> Self {
        MixedStrategy { support: vec![(strategy, Rational::one())] }
    }

    /// The uniform measure on the given (sorted, distinct) strategies.
    pub fn uniform(strategies: &[usize]) -> Self {
        let p = ratio(1, strategies.len() as i64);
        MixedStrategy { support: strategies.iter().map(|&s| (s, p.clone())).collect() }
    }

    /// Builds from explicit pairs, dropping zeros, sorting and validating.
    pub fn from_pairs(mut pairs: Vec<(usize, Rational)>) -> Result<Self> {
        pairs.retain(|(_, p)| !p.is_zero());
        pairs.sort_by_key(|(s, _)| *s);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(CoopError::InvalidParameter {
                detail: "duplicate strategy in mixed-strategy support".to_string(),
            });
        }
        let sum: Rational = pairs.iter().map(|(_, p)| p.clone()).sum();
        if pairs.iter().any(|(_, p)| p.is_negative()) || !sum.is_one() {
            return Err(CoopError::InvalidParameter {
                detail: "mixed-strategy probabilities must be nonnegative and sum to 1"
                    .to_string(),
            });
        }
        Ok(MixedStrategy { support: pairs })
    }

    /// Probability of a pure strategy.
    pub fn prob(&self, strategy: usize) -> Rational {
        self.support
            .iter()
            .find(|(s, _)| *s == strategy)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// `Some(s)` when the measure is degenerate on `s`.
    pub fn as_pure(&self) -> Option<usize> {
        if self.support.len() == 1 && self.support[0].1.is_one() {
            Some(self.support[0].0)
        } else {
            None
        }
    }
}

/// One mixed strategy per player.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MixedProfile {
    pub strategies: Vec<MixedStrategy>,
}

impl MixedProfile {
    /// The degenerate profile on a pure profile.
    pub fn pure(profile: &[usize]) -> Self {
        MixedProfile { strategies: profile.iter().map(|&s| MixedStrategy::pure(s)).collect() }
    }

    /// `Some(pure profile)` when every player's measure is degenerate.
    pub fn as_pure(&self) -> Option<Vec<usize>> {
        self.strategies.iter().map(|m| m.as_pure()).collect()
    }

    /// Checks that the profile fits the game shape.
    pub fn check_shape(&self, game: &ExplicitGame) -> Result<()> {
        if self.strategies.len() != game.num_players() {
            return Err(CoopError::DimensionMismatch {
                player: self.strategies.len().min(game.num_players()),
                detail: format!(
                    "profile has {} strategies for a {}-player game",
                    self.strategies.len(),
                    game.num_players()
                ),
            });
        }
        for (p, m) in self.strategies.iter().enumerate() {
            if m.support.iter().any(|(s, _)| *s >= game.num_strategies(p)) {
                return Err(CoopError::UnknownStrategy {
                    player: p,
                    detail: "support index out of range".to_string(),
                });
            }
        }
        Ok(())
    }

    /// The profile with player `j`'s strategy replaced.
    pub fn with_strategy(&self, j: usize, m: MixedStrategy) -> Self {
        let mut out = self.clone();
        out.strategies[j] = m;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn expected_gain_pure_profile_is_gain() {
        let g = generators::prisoner(rat(1)).unwrap();
        // mu = 1: (C, C) pays 1 + mu = 2 to each player.
        let profile = MixedProfile::pure(&[0, 0]);
        assert_eq!(g.expected_gain(&profile, 0).unwrap(), rat(2));
        assert_eq!(g.expected_gain(&profile, 1).unwrap(), rat(2));
    }

    #[test]
    fn expected_gain_dejr_half_half() {
        // T=0.20, R=0.15, P=0.05, S=0; both playing (C+D)/2 expect 0.10.
        let g = generators::prisoner_from_payoffs(20, 15, 5, 0, 100).unwrap();
        let half = MixedStrategy::uniform(&[0, 1]);
        let profile = MixedProfile { strategies: vec![half.clone(), half] };
        assert_eq!(g.expected_gain(&profile, 0).unwrap(), ratio(1, 10));
        assert_eq!(g.expected_gain(&profile, 1).unwrap(), ratio(1, 10));
    }

    #[test]
    fn expected_gain_rejects_bad_shape() {
        let g = generators::prisoner(rat(0)).unwrap();
        let profile = MixedProfile::pure(&[0]);
        assert!(matches!(
            g.expected_gain(&profile, 0),
            Err(CoopError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn expected_gain_is_multilinear() {
        // Fixing the opponent, the map sigma_1 -> expected gain is affine:
        // check the midpoint of two mixes at three interpolation points.
        let g = generators::prisoner(ratio(3, 2)).unwrap();
        let opp = MixedStrategy::from_pairs(vec![(0, ratio(1, 3)), (1, ratio(2, 3))]).unwrap();
        let a = MixedStrategy::pure(0);
        let b = MixedStrategy::uniform(&[0, 1]);
        for (num, den) in [(1i64, 4i64), (1, 2), (3, 4)] {
            let t = ratio(num, den);
            let mix = MixedStrategy::from_pairs(vec![
                (0, t.clone() * a.prob(0) + (rat(1) - t.clone()) * b.prob(0)),
                (1, t.clone() * a.prob(1) + (rat(1) - t.clone()) * b.prob(1)),
            ])
            .unwrap();
            let pa = MixedProfile { strategies: vec![a.clone(), opp.clone()] };
            let pb = MixedProfile { strategies: vec![b.clone(), opp.clone()] };
            let pm = MixedProfile { strategies: vec![mix, opp.clone()] };
            let lhs = g.expected_gain(&pm, 0).unwrap();
            let rhs = t.clone() * g.expected_gain(&pa, 0).unwrap()
                + (rat(1) - t) * g.expected_gain(&pb, 0).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn fiber_matches_spliced_profile() {
        let g = generators::traveler(5, 180, 300).unwrap();
        let fiber = g.fiber_game(1, 120).unwrap(); // opponent fixed to 300
        assert_eq!(fiber.num_players(), 1);
        // g_1(200, 300) = 200 + 5.
        assert_eq!(fiber.gain(&[20], 0), rat(205));
        assert_eq!(g.gain(&[20, 120], 0), rat(205));
    }

    #[test]
    fn altruism_default_clamps_and_rounds() {
        let a = Altruism::default_proportional();
        // a(1, 10, 0) = round(2) = 2.
        assert_eq!(a.value(&rat(1), &rat(10), &rat(0)).unwrap(), rat(2));
        // a(1, 1, -1) = round(0.2) = 0 < 1.
        assert_eq!(a.value(&rat(1), &rat(1), &rat(-1)).unwrap(), rat(0));
        // Never exceeds the endowment.
        assert_eq!(a.value(&rat(1), &rat(2), &rat(0)).unwrap() <= rat(2), true);
    }

    #[test]
    fn fairness_is_zero_on_diagonal_and_positive_below() {
        let f = Fairness::default_cpt();
        assert_eq!(f.eval(&rat(100), &rat(100)), 0.0);
        assert!(f.eval(&rat(100), &rat(50)) > 0.0);
        assert!(f.eval(&rat(0), &rat(-1)) > 0.0);
    }

    #[test]
    fn restriction_keeps_gains() {
        let g = generators::traveler(2, 2, 100).unwrap();
        let keep: Vec<usize> = (0..30).collect();
        let r = g.restrict(&[keep.clone(), keep]).unwrap();
        assert_eq!(r.gain(&[3, 7], 0), g.gain(&[3, 7], 0));
        assert!(r.exchangeable);
    }
}
