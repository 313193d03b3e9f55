//! Built-in game families: the classic benchmark games the solver is
//! exercised on, each in explicit form with exact gains.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, ToPrimitive};

use crate::error::{CoopError, Result};
use crate::game::{rat, ratio, ExplicitGame, Rational};

/// Parameter record for [`make_standard_game`].
#[derive(Clone, Debug, PartialEq)]
pub enum StandardGame {
    /// Traveler's dilemma with bonus-penalty `bonus` on claims `lo..=hi`.
    Traveler { bonus: i64, lo: i64, hi: i64 },
    /// Parametrized prisoner's dilemma with cooperation reward `mu`.
    Prisoner { mu: Rational },
    /// Prisoner's dilemma from raw temptation/reward/punishment/sucker
    /// payoffs at the given scale (payoffs are `value / scale`).
    PrisonerPayoffs { t: i64, r: i64, p: i64, s: i64, scale: i64 },
    /// Bertrand competition: `n` players bid integers in `lo..=hi`.
    Bertrand { n: usize, lo: i64, hi: i64 },
    /// Public-goods game: `n` players contribute on a grid of `steps + 1`
    /// points in `[0, endowment]`, marginal return `alpha`.
    PublicGoods { n: usize, alpha: Rational, endowment: i64, steps: i64 },
    /// Finite Nash bargaining over `total` units.
    Bargaining { total: i64 },
    /// Ultimatum game: offers on a grid of `steps + 1` points in
    /// `[0, total]`; the responder accepts or rejects uniformly.
    Ultimatum { total: i64, steps: i64 },
    /// Generalized dictator game `Dict(k, endowment, recipient)`.
    Dictator { k: Rational, endowment: i64, recipient: i64 },
    /// Traveler's dilemma on `{2..100}` with `b = 2` plus a punish action.
    PunishTravelers,
    /// Two-player coordination game on `{a, b, c}` with `x > y > 0`.
    HalpernCoordination { x: i64, y: i64 },
    /// The 2x2 zero-sum game whose column strategy R is super-dominated.
    SureGainZeroSum,
    /// Prisoner's dilemma with strict domination but no super-domination.
    StrictPrisoner,
    /// Matching pennies.
    MatchingPennies,
    /// Goeree-Holt asymmetric matching pennies.
    AsymMatchingPennies,
    /// Battle of the sexes (2,1 / 0,0 / 0,0 / 1,2).
    BattleOfSexes,
}

/// Builds a built-in game family from its parameter record.
pub fn make_standard_game(spec: &StandardGame) -> Result<ExplicitGame> {
    match spec {
        StandardGame::Traveler { bonus, lo, hi } => traveler(*bonus, *lo, *hi),
        StandardGame::Prisoner { mu } => prisoner(mu.clone()),
        StandardGame::PrisonerPayoffs { t, r, p, s, scale } => {
            prisoner_from_payoffs(*t, *r, *p, *s, *scale)
        }
        StandardGame::Bertrand { n, lo, hi } => bertrand(*n, *lo, *hi),
        StandardGame::PublicGoods { n, alpha, endowment, steps } => {
            public_goods(*n, alpha.clone(), *endowment, *steps)
        }
        StandardGame::Bargaining { total } => bargaining(*total),
        StandardGame::Ultimatum { total, steps } => ultimatum(*total, *steps),
        StandardGame::Dictator { k, endowment, recipient } => {
            dictator(k.clone(), *endowment, *recipient)
        }
        StandardGame::PunishTravelers => punish_travelers(),
        StandardGame::HalpernCoordination { x, y } => halpern_coordination(*x, *y),
        StandardGame::SureGainZeroSum => sure_gain_zero_sum(),
        StandardGame::StrictPrisoner => strict_prisoner(),
        StandardGame::MatchingPennies => matching_pennies(),
        StandardGame::AsymMatchingPennies => asym_matching_pennies(),
        StandardGame::BattleOfSexes => battle_of_sexes(),
    }
}

fn int_labels(lo: i64, hi: i64) -> Vec<String> {
    (lo..=hi).map(|v| v.to_string()).collect()
}

fn grid_label(value: &Rational) -> String {
    if value.is_integer() {
        format!("{}", value.numer())
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn dense_2p(
    labels1: Vec<String>,
    labels2: Vec<String>,
    scale: i64,
    gain: impl Fn(usize, usize, usize) -> i64,
) -> Result<ExplicitGame> {
    let (n1, n2) = (labels1.len(), labels2.len());
    let mut tables = vec![vec![0i64; n1 * n2]; 2];
    for s1 in 0..n1 {
        for s2 in 0..n2 {
            tables[0][s1 * n2 + s2] = gain(s1, s2, 0);
            tables[1][s1 * n2 + s2] = gain(s1, s2, 1);
        }
    }
    ExplicitGame::from_tables(vec![labels1, labels2], tables, scale)
}

/// Traveler's dilemma: claims in `lo..=hi`; the lower claim wins the bonus.
pub fn traveler(bonus: i64, lo: i64, hi: i64) -> Result<ExplicitGame> {
    if bonus < 1 {
        return Err(CoopError::InvalidParameter {
            detail: format!("traveler bonus must be at least 1, got {bonus}"),
        });
    }
    if lo >= hi {
        return Err(CoopError::InvalidParameter {
            detail: format!("traveler range must satisfy lo < hi, got {lo}..{hi}"),
        });
    }
    let labels = int_labels(lo, hi);
    let mut g = dense_2p(labels.clone(), labels, 1, |s1, s2, player| {
        let (x, y) = (lo + s1 as i64, lo + s2 as i64);
        let (own, other) = if player == 0 { (x, y) } else { (y, x) };
        if own < other {
            own + bonus
        } else if own == other {
            own
        } else {
            other - bonus
        }
    })?;
    g.exchangeable = true;
    Ok(g)
}

/// Parametrized prisoner's dilemma with cooperation reward `mu >= 0`:
/// (C,C) pays `1+mu`, unilateral defection pays `2+mu` against 0, (D,D)
/// pays 1.
pub fn prisoner(mu: Rational) -> Result<ExplicitGame> {
    if mu.is_negative() {
        return Err(CoopError::InvalidParameter {
            detail: "prisoner reward mu must be nonnegative".to_string(),
        });
    }
    let scale = mu.denom().to_i64().ok_or_else(|| CoopError::InvalidParameter {
        detail: "prisoner reward mu is too large".to_string(),
    })?;
    let m = mu.numer().to_i64().ok_or_else(|| CoopError::InvalidParameter {
        detail: "prisoner reward mu is too large".to_string(),
    })?;
    // Raw payoffs at denominator `scale`: T = 2+mu, R = 1+mu, P = 1, S = 0.
    prisoner_from_payoffs(2 * scale + m, scale + m, scale, 0, scale)
}

/// Prisoner's dilemma from raw payoffs `T > R > P > S` (at `value/scale`).
pub fn prisoner_from_payoffs(t: i64, r: i64, p: i64, s: i64, scale: i64) -> Result<ExplicitGame> {
    if !(t >= r && r >= p && p >= s) {
        return Err(CoopError::InvalidParameter {
            detail: format!("prisoner payoffs must satisfy T >= R >= P >= S, got {t},{r},{p},{s}"),
        });
    }
    let labels = vec!["C".to_string(), "D".to_string()];
    let mut g = dense_2p(labels.clone(), labels, scale, move |s1, s2, player| {
        let (own, other) = if player == 0 { (s1, s2) } else { (s2, s1) };
        match (own, other) {
            (0, 0) => r,
            (0, 1) => s,
            (1, 0) => t,
            _ => p,
        }
    })?;
    g.exchangeable = true;
    Ok(g)
}

/// Bertrand competition: lowest bid wins its own amount; a tie pays each
/// tied winner half of the bid; everyone else gets zero.
pub fn bertrand(n: usize, lo: i64, hi: i64) -> Result<ExplicitGame> {
    if n < 2 {
        return Err(CoopError::InvalidParameter {
            detail: "bertrand needs at least two players".to_string(),
        });
    }
    if lo >= hi || lo < 0 {
        return Err(CoopError::InvalidParameter {
            detail: format!("bertrand range must satisfy 0 <= lo < hi, got {lo}..{hi}"),
        });
    }
    let labels: Vec<Vec<String>> = (0..n).map(|_| int_labels(lo, hi)).collect();
    // Scale 2 keeps half-bid tie payoffs integral.
    let mut g = ExplicitGame::from_fn(
        labels,
        2,
        Arc::new(move |profile: &[usize], player: usize| {
            let bid = |s: usize| lo + s as i64;
            let min = profile.iter().map(|&s| bid(s)).min().unwrap();
            if bid(profile[player]) != min {
                return 0;
            }
            let winners = profile.iter().filter(|&&s| bid(s) == min).count();
            if winners == 1 {
                2 * min
            } else {
                min
            }
        }),
    )?;
    g.exchangeable = true;
    g.monotone_opponents = true;
    Ok(g)
}

/// Public-goods game: contribution grid `endowment * k / steps`, payoff
/// `endowment - x_i + alpha * sum(x)`, with `1/n <= alpha < 1`.
pub fn public_goods(n: usize, alpha: Rational, endowment: i64, steps: i64) -> Result<ExplicitGame> {
    if n < 2 {
        return Err(CoopError::InvalidParameter {
            detail: "public goods needs at least two players".to_string(),
        });
    }
    if endowment <= 0 || steps <= 0 {
        return Err(CoopError::InvalidParameter {
            detail: "public goods endowment and grid steps must be positive".to_string(),
        });
    }
    if alpha < ratio(1, n as i64) || alpha >= Rational::one() {
        return Err(CoopError::InvalidParameter {
            detail: format!(
                "public goods marginal return must satisfy 1/{n} <= alpha < 1, got {alpha}"
            ),
        });
    }
    let a = alpha.numer().to_i64().ok_or_else(|| CoopError::InvalidParameter {
        detail: "public goods alpha is too large".to_string(),
    })?;
    let d = alpha.denom().to_i64().ok_or_else(|| CoopError::InvalidParameter {
        detail: "public goods alpha is too large".to_string(),
    })?;
    let labels: Vec<String> =
        (0..=steps).map(|k| grid_label(&(rat(endowment * k) / rat(steps)))).collect();
    let scale = d
        .checked_mul(steps)
        .ok_or_else(|| CoopError::InvalidParameter { detail: "grid too fine".to_string() })?;
    // g_i * d * steps = d*steps*y - d*y*k_i + a*y*sum(k).
    let y = endowment;
    let mut g = ExplicitGame::from_fn(
        (0..n).map(|_| labels.clone()).collect(),
        scale,
        Arc::new(move |profile: &[usize], player: usize| {
            let sum: i64 = profile.iter().map(|&k| k as i64).sum();
            d * steps * y - d * y * profile[player] as i64 + a * y * sum
        }),
    )?;
    g.exchangeable = true;
    g.monotone_opponents = true;
    Ok(g)
}

/// Finite Nash bargaining: demands in `0..=total`; compatible demands are
/// paid, incompatible demands pay zero.
pub fn bargaining(total: i64) -> Result<ExplicitGame> {
    if total < 2 {
        return Err(CoopError::InvalidParameter {
            detail: "bargaining total must be at least 2".to_string(),
        });
    }
    let labels = int_labels(0, total);
    let mut g = dense_2p(labels.clone(), labels, 1, move |s1, s2, player| {
        let (x, y) = (s1 as i64, s2 as i64);
        if x + y <= total {
            if player == 0 {
                x
            } else {
                y
            }
        } else {
            0
        }
    })?;
    g.exchangeable = true;
    Ok(g)
}

/// Ultimatum game: the proposer offers `total * k / steps`; the responder
/// accepts (A) or rejects (R) any offer uniformly.
pub fn ultimatum(total: i64, steps: i64) -> Result<ExplicitGame> {
    if total <= 0 || steps <= 0 {
        return Err(CoopError::InvalidParameter {
            detail: "ultimatum total and grid steps must be positive".to_string(),
        });
    }
    let offers: Vec<String> =
        (0..=steps).map(|k| grid_label(&(rat(total * k) / rat(steps)))).collect();
    let responder = vec!["A".to_string(), "R".to_string()];
    dense_2p(offers, responder, steps, move |k, resp, player| {
        if resp == 1 {
            return 0;
        }
        // Offer raw value at scale `steps` is total * k.
        if player == 0 {
            total * (steps - k as i64)
        } else {
            total * k as i64
        }
    })
}

/// Generalized dictator game `Dict(k, y, z)`: the proposer keeps `y - x`
/// and the recipient (single strategy A) gets `z + k * x`.
pub fn dictator(k: Rational, endowment: i64, recipient: i64) -> Result<ExplicitGame> {
    if endowment <= 0 {
        return Err(CoopError::InvalidParameter {
            detail: "dictator endowment must be positive".to_string(),
        });
    }
    if !k.is_positive() {
        return Err(CoopError::InvalidParameter {
            detail: "dictator exchange rate k must be positive".to_string(),
        });
    }
    let kn = k.numer().to_i64().unwrap_or(i64::MAX);
    let kd = k.denom().to_i64().unwrap_or(i64::MAX);
    if kn == i64::MAX || kd == i64::MAX {
        return Err(CoopError::InvalidParameter {
            detail: "dictator exchange rate k is too large".to_string(),
        });
    }
    let offers = int_labels(0, endowment);
    let responder = vec!["A".to_string()];
    dense_2p(offers, responder, kd, move |x, _resp, player| {
        let x = x as i64;
        if player == 0 {
            kd * (endowment - x)
        } else {
            kd * recipient + kn * x
        }
    })
}

/// Traveler's dilemma on `{2..100}` with `b = 2`, plus a punish action P:
/// (P,P) pays (2,2); P against any claim pays 2 to the punisher and -96 to
/// the claimant.
pub fn punish_travelers() -> Result<ExplicitGame> {
    let mut labels = int_labels(2, 100);
    labels.push("P".to_string());
    let punish = labels.len() - 1;
    let mut g = dense_2p(labels.clone(), labels, 1, move |s1, s2, player| {
        let (own, other) = if player == 0 { (s1, s2) } else { (s2, s1) };
        match (own == punish, other == punish) {
            (true, _) => 2,
            (false, true) => -96,
            (false, false) => {
                let (x, y) = (2 + own as i64, 2 + other as i64);
                if x < y {
                    x + 2
                } else if x == y {
                    x
                } else {
                    y - 2
                }
            }
        }
    })?;
    g.exchangeable = true;
    Ok(g)
}

/// Two-player coordination game on `{a, b, c}` with `x > y > 0`:
/// coordinating on a or b pays `x` each, c is safe and pays `y`.
pub fn halpern_coordination(x: i64, y: i64) -> Result<ExplicitGame> {
    if !(x > y && y > 0) {
        return Err(CoopError::InvalidParameter {
            detail: format!("coordination payoffs must satisfy x > y > 0, got x={x}, y={y}"),
        });
    }
    let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
    let mut g = dense_2p(labels.clone(), labels, 1, move |s1, s2, player| {
        let (own, other) = if player == 0 { (s1, s2) } else { (s2, s1) };
        match (own, other) {
            (0, 0) | (1, 1) => x,
            (2, _) => y,
            _ => 0,
        }
    })?;
    g.exchangeable = true;
    Ok(g)
}

/// The 2x2 zero-sum game (U,L)=(0,0), (U,R)=(10,-10), (D,L)=(D,R)=(1,-1):
/// L super-dominates R for the column player.
pub fn sure_gain_zero_sum() -> Result<ExplicitGame> {
    dense_2p(
        vec!["U".to_string(), "D".to_string()],
        vec!["L".to_string(), "R".to_string()],
        1,
        |s1, s2, player| {
            let g1 = match (s1, s2) {
                (0, 0) => 0,
                (0, 1) => 10,
                _ => 1,
            };
            if player == 0 {
                g1
            } else {
                -g1
            }
        },
    )
}

/// Prisoner's dilemma (2,2 / 0,3 / 3,0 / 1,1): strictly dominated
/// strategies exist but no super-dominated ones.
pub fn strict_prisoner() -> Result<ExplicitGame> {
    prisoner_from_payoffs(3, 2, 1, 0, 1)
}

/// Matching pennies.
pub fn matching_pennies() -> Result<ExplicitGame> {
    dense_2p(
        vec!["H".to_string(), "T".to_string()],
        vec!["H".to_string(), "T".to_string()],
        1,
        |s1, s2, player| {
            let g1 = if s1 == s2 { 1 } else { -1 };
            if player == 0 {
                g1
            } else {
                -g1
            }
        },
    )
}

/// Goeree-Holt asymmetric matching pennies:
/// (U,L)=(320,40), (U,R)=(40,80), (D,L)=(40,80), (D,R)=(80,40).
pub fn asym_matching_pennies() -> Result<ExplicitGame> {
    dense_2p(
        vec!["U".to_string(), "D".to_string()],
        vec!["L".to_string(), "R".to_string()],
        1,
        |s1, s2, player| match (s1, s2, player) {
            (0, 0, 0) => 320,
            (0, 0, 1) => 40,
            (0, 1, 0) | (1, 0, 0) => 40,
            (0, 1, 1) | (1, 0, 1) => 80,
            (1, 1, 0) => 80,
            _ => 40,
        },
    )
}

/// Battle of the sexes (2,1 / 0,0 / 0,0 / 1,2).
pub fn battle_of_sexes() -> Result<ExplicitGame> {
    dense_2p(
        vec!["A".to_string(), "B".to_string()],
        vec!["A".to_string(), "B".to_string()],
        1,
        |s1, s2, player| match (s1, s2) {
            (0, 0) => {
                if player == 0 {
                    2
                } else {
                    1
                }
            }
            (1, 1) => {
                if player == 0 {
                    1
                } else {
                    2
                }
            }
            _ => 0,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traveler_payoffs_match_rule() {
        let g = traveler(5, 180, 300).unwrap();
        // g_1(200, 250) = 200 + 5 (lower claim wins the bonus).
        assert_eq!(g.gain(&[20, 70], 0), rat(205));
        assert_eq!(g.gain(&[20, 70], 1), rat(195));
        assert_eq!(g.gain(&[20, 20], 0), rat(200));
    }

    #[test]
    fn prisoner_mu_zero_matches_classic_matrix() {
        let g = prisoner(rat(0)).unwrap();
        assert_eq!(g.gain(&[0, 0], 0), rat(1));
        assert_eq!(g.gain(&[0, 1], 0), rat(0));
        assert_eq!(g.gain(&[0, 1], 1), rat(2));
        assert_eq!(g.gain(&[1, 1], 0), rat(1));
    }

    #[test]
    fn bertrand_tie_pays_half_bid() {
        let g = bertrand(2, 2, 100).unwrap();
        // Both bid 100 -> 50 each.
        assert_eq!(g.gain(&[98, 98], 0), rat(50));
        assert_eq!(g.gain(&[98, 98], 1), rat(50));
        // Sole winner takes the full bid.
        assert_eq!(g.gain(&[97, 98], 0), rat(99));
        assert_eq!(g.gain(&[97, 98], 1), rat(0));
    }

    #[test]
    fn public_goods_payoff_formula() {
        let g = public_goods(2, ratio(4, 5), 1, 100).unwrap();
        // Full contribution by both: 1 - 1 + 0.8 * 2 = 1.6.
        assert_eq!(g.gain(&[100, 100], 0), ratio(8, 5));
        // Free ride against a full contributor: 1 + 0.8 = 1.8.
        assert_eq!(g.gain(&[0, 100], 0), ratio(9, 5));
        assert_eq!(g.gain(&[0, 100], 1), ratio(4, 5));
    }

    #[test]
    fn bargaining_incompatible_demands_pay_zero() {
        let g = bargaining(100).unwrap();
        assert_eq!(g.gain(&[50, 50], 0), rat(50));
        assert_eq!(g.gain(&[60, 60], 0), rat(0));
        assert_eq!(g.gain(&[60, 40], 1), rat(40));
    }

    #[test]
    fn ultimatum_rejection_pays_zero() {
        let g = ultimatum(10, 10).unwrap();
        assert_eq!(g.gain(&[5, 0], 0), rat(5));
        assert_eq!(g.gain(&[5, 0], 1), rat(5));
        assert_eq!(g.gain(&[5, 1], 0), rat(0));
    }

    #[test]
    fn dictator_standard_instance() {
        let g = dictator(rat(1), 10, 0).unwrap();
        assert_eq!(g.gain(&[3, 0], 0), rat(7));
        assert_eq!(g.gain(&[3, 0], 1), rat(3));
        assert_eq!(g.num_strategies(1), 1);
    }

    #[test]
    fn punish_travelers_payoffs() {
        let g = punish_travelers().unwrap();
        let p = g.num_strategies(0) - 1;
        assert_eq!(g.gain(&[p, p], 0), rat(2));
        assert_eq!(g.gain(&[p, 0], 0), rat(2));
        assert_eq!(g.gain(&[p, 0], 1), rat(-96));
        // Plain claims follow the b = 2 traveler rule.
        assert_eq!(g.gain(&[0, 5], 0), rat(4));
    }

    #[test]
    fn coordination_matrix() {
        let g = halpern_coordination(10, 9).unwrap();
        assert_eq!(g.gain(&[0, 0], 0), rat(10));
        assert_eq!(g.gain(&[2, 0], 0), rat(9));
        assert_eq!(g.gain(&[0, 2], 1), rat(9));
        assert_eq!(g.gain(&[0, 1], 0), rat(0));
    }

    #[test]
    fn parameter_validation() {
        assert!(traveler(0, 180, 300).is_err());
        assert!(public_goods(2, ratio(1, 3), 1, 100).is_err());
        assert!(public_goods(2, rat(1), 1, 100).is_err());
        assert!(halpern_coordination(9, 10).is_err());
        // The alpha = 1/N boundary itself is allowed.
        assert!(public_goods(2, ratio(1, 2), 1, 10).is_ok());
    }
}
