//! Cumulative prospect theory: value function, probability weighting,
//! rank-dependent decision weights, prospect evaluation, and the two-stage
//! mixed extension of gain functions.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{CoopError, Result};
use crate::game::{to_f64, ExplicitGame, MixedProfile, Rational};

/// Parameters of the prospect-theory transforms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CptParams {
    /// Exponent of the value function over gains, in (0, 1].
    pub alpha: f64,
    /// Exponent of the value function over losses, in (0, 1].
    pub beta: f64,
    /// Loss-aversion coefficient, at least 1.
    pub lambda: f64,
    /// Probability-weighting exponent. Values below ~0.28 make the
    /// weighting function non-monotone and are rejected.
    pub gamma: f64,
}

/// Smallest admissible weighting exponent (keeps `w` strictly increasing).
pub const MIN_GAMMA: f64 = 0.28;

impl CptParams {
    /// The standard experimental estimates.
    pub fn standard() -> Self {
        CptParams { alpha: 0.88, beta: 0.88, lambda: 2.25, gamma: 0.61 }
    }

    /// Identity parameters: CPT collapses to expected value.
    pub fn identity() -> Self {
        CptParams { alpha: 1.0, beta: 1.0, lambda: 1.0, gamma: 1.0 }
    }

    /// Validates the parameter ranges.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0 && self.beta > 0.0 && self.beta <= 1.0) {
            return Err(CoopError::InvalidParameter {
                detail: "value-function exponents must lie in (0, 1]".to_string(),
            });
        }
        if self.lambda < 1.0 {
            return Err(CoopError::InvalidParameter {
                detail: "loss aversion must be at least 1".to_string(),
            });
        }
        if !(self.gamma >= MIN_GAMMA && self.gamma <= 1.0) {
            return Err(CoopError::InvalidParameter {
                detail: format!(
                    "weighting exponent must lie in [{MIN_GAMMA}, 1] to keep w monotone"
                ),
            });
        }
        Ok(())
    }
}

/// The value function on raw floats.
pub(crate) fn value_fn_raw(x: f64, alpha: f64, beta: f64, lambda: f64) -> f64 {
    if x >= 0.0 {
        libm::pow(x, alpha)
    } else {
        -lambda * libm::pow(-x, beta)
    }
}

/// The value function `v(x) = x^alpha` for gains, `-lambda (-x)^beta` for
/// losses.
pub fn value_fn(x: &Rational, params: &CptParams) -> f64 {
    value_fn_raw(to_f64(x), params.alpha, params.beta, params.lambda)
}

/// The probability-weighting function
/// `w(p) = p^gamma / (p^gamma + (1-p)^gamma)^(1/gamma)`.
pub fn weight_fn(p: f64, params: &CptParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CoopError::InvalidParameter {
            detail: format!("probability {p} outside [0, 1]"),
        });
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let g = params.gamma;
    let num = libm::pow(p, g);
    Ok(num / libm::pow(num + libm::pow(1.0 - p, g), 1.0 / g))
}

/// A prospect: distinct outcomes sorted strictly ascending with positive
/// probabilities (the zero outcome may carry probability zero).
#[derive(Clone, Debug, PartialEq)]
pub struct Prospect {
    /// `(outcome, probability)`, ascending in outcome.
    pub outcomes: Vec<(f64, f64)>,
}

impl Prospect {
    /// Builds a prospect from float pairs: drops zero-probability entries,
    /// merges equal outcomes, sorts ascending, and inserts the zero outcome
    /// with probability zero when absent.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        let mut entries: Vec<(f64, f64)> = Vec::new();
        let mut total = 0.0;
        for (x, p) in pairs {
            if p < -1e-12 {
                return Err(CoopError::InvalidParameter {
                    detail: "prospect probabilities must be nonnegative".to_string(),
                });
            }
            if p <= 0.0 {
                continue;
            }
            total += p;
            match entries.iter_mut().find(|(ox, _)| *ox == x) {
                Some((_, op)) => *op += p,
                None => entries.push((x, p)),
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(CoopError::InvalidParameter {
                detail: format!("prospect probabilities sum to {total}, expected 1"),
            });
        }
        if !entries.iter().any(|(x, _)| *x == 0.0) {
            entries.push((0.0, 0.0));
        }
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite outcomes"));
        Ok(Prospect { outcomes: entries })
    }

    /// Builds a prospect from exact pairs, merging equal outcomes exactly
    /// before the float conversion.
    pub fn from_rationals(pairs: Vec<(Rational, Rational)>) -> Result<Self> {
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        for (x, p) in pairs {
            if p.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(ox, _)| *ox == x) {
                Some((_, op)) => *op += p,
                None => merged.push((x, p)),
            }
        }
        Prospect::new(merged.into_iter().map(|(x, p)| (to_f64(&x), to_f64(&p))).collect())
    }
}

/// Rank-dependent decision weights, aligned with the prospect's outcomes.
///
/// Gains are weighted by cumulative probability from the top outcome down,
/// losses from the bottom outcome up; the zero outcome gets weight zero.
pub fn decision_weights(prospect: &Prospect, params: &CptParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n = prospect.outcomes.len();
    let mut weights = vec![0.0; n];
    // Gains: pi_j = w(p_j + ... + p_n) - w(p_{j+1} + ... + p_n).
    let mut tail = 0.0;
    let mut w_tail = 0.0;
    for j in (0..n).rev() {
        let (x, p) = prospect.outcomes[j];
        if x <= 0.0 {
            continue;
        }
        let w_new = weight_fn((tail + p).min(1.0), params)?;
        weights[j] = w_new - w_tail;
        tail += p;
        w_tail = w_new;
    }
    // Losses: pi_j = w(p_{-m} + ... + p_j) - w(p_{-m} + ... + p_{j-1}).
    let mut head = 0.0;
    let mut w_head = 0.0;
    for j in 0..n {
        let (x, p) = prospect.outcomes[j];
        if x >= 0.0 {
            continue;
        }
        let w_new = weight_fn((head + p).min(1.0), params)?;
        weights[j] = w_new - w_head;
        head += p;
        w_head = w_new;
    }
    Ok(weights)
}

/// `V(p) = sum_j pi_j v(x_j)`.
pub fn prospect_value(prospect: &Prospect, params: &CptParams) -> Result<f64> {
    let weights = decision_weights(prospect, params)?;
    Ok(prospect
        .outcomes
        .iter()
        .zip(&weights)
        .map(|((x, _), w)| w * value_fn_raw(*x, params.alpha, params.beta, params.lambda))
        .sum())
}

/// The prospect-theoretic mixed extension `V_i(sigma)`.
///
/// Stage 1: for each own pure strategy, opponent assemblies are grouped by
/// equal gain, yielding a prospect evaluated under CPT. Stage 2: own
/// strategies are grouped by equal stage-1 value into an outer prospect,
/// evaluated under CPT again. Grouping by value classes makes the result
/// independent of transversal choices.
pub fn cpt_mixed_extension(
    game: &ExplicitGame,
    profile: &MixedProfile,
    player: usize,
    params: &CptParams,
) -> Result<f64> {
    params.validate()?;
    profile.check_shape(game)?;
    let stage1 = stage_one_values(game, profile, player, params)?;
    let outer: Vec<(f64, f64)> = profile.strategies[player]
        .support
        .iter()
        .map(|(s, p)| (stage1[*s], to_f64(p)))
        .collect();
    // Stage-1 values are already on the value scale; the outer stage only
    // applies the rank-dependent probability weighting.
    let prospect = Prospect::new(outer)?;
    let weights = decision_weights(&prospect, params)?;
    Ok(prospect
        .outcomes
        .iter()
        .zip(&weights)
        .map(|((x, _), w)| w * x)
        .sum())
}

/// Stage-1 values `V_i(s_i, sigma_{-i})` for every own pure strategy.
pub fn stage_one_values(
    game: &ExplicitGame,
    profile: &MixedProfile,
    player: usize,
    params: &CptParams,
) -> Result<Vec<f64>> {
    let n = game.num_players();
    let mut values = Vec::with_capacity(game.num_strategies(player));
    for s_i in 0..game.num_strategies(player) {
        // Group opponent assemblies by equal gain.
        let mut groups: Vec<(Rational, Rational)> = Vec::new();
        let mut pure = vec![0usize; n];
        pure[player] = s_i;
        collect_opponent_groups(game, profile, player, 0, Rational::from_integer(1.into()), &mut pure, &mut groups);
        values.push(prospect_value(&Prospect::from_rationals(groups)?, params)?);
    }
    Ok(values)
}

fn collect_opponent_groups(
    game: &ExplicitGame,
    profile: &MixedProfile,
    player: usize,
    depth: usize,
    weight: Rational,
    pure: &mut [usize],
    groups: &mut Vec<(Rational, Rational)>,
) {
    if depth == game.num_players() {
        let gain = game.gain(pure, player);
        match groups.iter_mut().find(|(x, _)| *x == gain) {
            Some((_, p)) => *p += weight,
            None => groups.push((gain, weight)),
        }
        return;
    }
    if depth == player {
        collect_opponent_groups(game, profile, player, depth + 1, weight, pure, groups);
        return;
    }
    for (s, prob) in profile.strategies[depth].support.clone() {
        pure[depth] = s;
        collect_opponent_groups(game, profile, player, depth + 1, weight.clone() * &prob, pure, groups);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{rat, ratio, MixedStrategy};
    use crate::generators;

    const TOL: f64 = 1e-12;

    #[test]
    fn value_fn_basics() {
        let p = CptParams::standard();
        assert_eq!(value_fn(&rat(0), &p), 0.0);
        assert_eq!(value_fn(&rat(1), &p), 1.0);
        assert!((value_fn(&rat(-1), &p) + 2.25).abs() < TOL);
    }

    #[test]
    fn weight_fn_boundaries_and_overweighting() {
        let p = CptParams::standard();
        assert_eq!(weight_fn(0.0, &p).unwrap(), 0.0);
        assert_eq!(weight_fn(1.0, &p).unwrap(), 1.0);
        // Small probabilities are overweighted.
        let w01 = weight_fn(0.1, &p).unwrap();
        assert!(w01 > 0.1);
        assert!((w01 - 0.186).abs() < 5e-3);
        // Identity exponent is the identity map.
        let id = CptParams::identity();
        assert!((weight_fn(0.5, &id).unwrap() - 0.5).abs() < TOL);
    }

    #[test]
    fn weight_fn_strictly_increasing_on_grid() {
        for gamma in [MIN_GAMMA, 0.4, 0.61, 0.8, 1.0] {
            let p = CptParams { gamma, ..CptParams::standard() };
            let mut prev = -1.0;
            for k in 0..=1000 {
                let w = weight_fn(k as f64 / 1000.0, &p).unwrap();
                assert!(w > prev, "gamma {gamma} not increasing at {k}");
                prev = w;
            }
        }
    }

    #[test]
    fn gamma_below_bound_rejected() {
        let p = CptParams { gamma: 0.2, ..CptParams::standard() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn decision_weights_telescope() {
        let params = CptParams::standard();
        let prospect = Prospect::new(vec![(6.0, 0.2), (2.0, 0.3), (-3.0, 0.25), (-1.0, 0.25)])
            .unwrap();
        let weights = decision_weights(&prospect, &params).unwrap();
        let gain_sum: f64 = prospect
            .outcomes
            .iter()
            .zip(&weights)
            .filter(|((x, _), _)| *x > 0.0)
            .map(|(_, w)| w)
            .sum();
        let loss_sum: f64 = prospect
            .outcomes
            .iter()
            .zip(&weights)
            .filter(|((x, _), _)| *x < 0.0)
            .map(|(_, w)| w)
            .sum();
        assert!((gain_sum - weight_fn(0.5, &params).unwrap()).abs() < TOL);
        assert!((loss_sum - weight_fn(0.5, &params).unwrap()).abs() < TOL);
    }

    #[test]
    fn identity_params_give_expectation() {
        let params = CptParams::identity();
        let prospect = Prospect::new(vec![(4.0, 0.25), (-2.0, 0.5), (1.0, 0.25)]).unwrap();
        let v = prospect_value(&prospect, &params).unwrap();
        assert!((v - (4.0 * 0.25 - 2.0 * 0.5 + 1.0 * 0.25)).abs() < TOL);
    }

    #[test]
    fn certain_moderate_gain_preferred_to_risky_larger_one() {
        // V(3000 sure) > V(4000 with probability 0.8) under the standard
        // parameters: the classic certainty-effect ordering.
        let params = CptParams::standard();
        let sure = Prospect::new(vec![(3000.0, 1.0)]).unwrap();
        let risky = Prospect::new(vec![(4000.0, 0.8), (0.0, 0.2)]).unwrap();
        assert!(
            prospect_value(&sure, &params).unwrap() > prospect_value(&risky, &params).unwrap()
        );
    }

    #[test]
    fn mixed_extension_stage_one_prospects() {
        // Gains (2,2 / 0,3 / 3,0 / 1,1) with sigma_2 = C/4 + 3D/4:
        // p^(C, sigma_2) = (2, 1/4; 0, 3/4) and p^(D, sigma_2) = (3, 1/4; 1, 3/4).
        let g = generators::strict_prisoner().unwrap();
        let sigma2 = MixedStrategy::from_pairs(vec![(0, ratio(1, 4)), (1, ratio(3, 4))]).unwrap();
        let profile =
            MixedProfile { strategies: vec![MixedStrategy::pure(0), sigma2] };
        let id = CptParams::identity();
        let stage1 = stage_one_values(&g, &profile, 0, &id).unwrap();
        assert!((stage1[0] - 0.5).abs() < TOL);
        assert!((stage1[1] - 1.5).abs() < TOL);
    }

    #[test]
    fn mixed_extension_identity_equals_expected_gain() {
        let g = generators::strict_prisoner().unwrap();
        let sigma1 = MixedStrategy::from_pairs(vec![(0, ratio(1, 8)), (1, ratio(7, 8))]).unwrap();
        let sigma2 = MixedStrategy::from_pairs(vec![(0, ratio(1, 4)), (1, ratio(3, 4))]).unwrap();
        let profile = MixedProfile { strategies: vec![sigma1, sigma2] };
        let id = CptParams::identity();
        for player in 0..2 {
            let v = cpt_mixed_extension(&g, &profile, player, &id).unwrap();
            let e = to_f64(&g.expected_gain(&profile, player).unwrap());
            assert!((v - e).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_profile_gives_value_of_gain() {
        let g = generators::strict_prisoner().unwrap();
        let profile = MixedProfile::pure(&[1, 0]);
        let params = CptParams::standard();
        let v = cpt_mixed_extension(&g, &profile, 0, &params).unwrap();
        assert!((v - value_fn(&rat(3), &params)).abs() < TOL);
    }
}
