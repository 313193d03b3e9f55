//! Coalition values: deviation incentives, deviation risks, deviation
//! probabilities, conditional worst cases, and the resulting exact value of
//! a coalition structure to each player.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::cpt::{self, CptParams};
use crate::equilibrium::{self, MaxJointSet};
use crate::error::{CoopError, Result};
use crate::game::{ratio, to_f64, ExplicitGame, MixedProfile, MixedStrategy, Rational};
use crate::partition::CoalitionStructure;

/// Cap on the number of deviation assemblies enumerated per reference
/// profile in [`conditional_infimum`] when the profile is pure.
const ASSEMBLY_CAP: usize = 1 << 21;
/// Cap on the assembly count against a genuinely mixed reference profile
/// (each assembly costs a full expected-gain evaluation).
const MIXED_ASSEMBLY_CAP: usize = 1 << 12;
/// Cap on the number of best-response tie combinations explored per
/// punishing set in [`risk`].
const RETALIATION_CAP: usize = 20_000;
/// Player-count cap for exhaustive subset enumeration (risk sets and the
/// deviating-set sum); beyond it only the exchangeable shortcut applies.
const SUBSET_PLAYER_CAP: usize = 12;

/// True when the pure strategy `s` is a qualifying deviation for player `j`
/// at `sigma`: deviating cannot lose, `g_j(s, sigma_{-j}) >= g_j(sigma)`.
pub fn is_k_deviation(
    game: &ExplicitGame,
    sigma: &MixedProfile,
    j: usize,
    s: usize,
) -> Result<bool> {
    let base = game.expected_gain(sigma, j)?;
    let dev = game.expected_gain(&sigma.with_strategy(j, MixedStrategy::pure(s)), j)?;
    Ok(dev >= base)
}

/// The deviation incentive of player `j` against the profile set `m`:
/// the largest gain improvement available through a qualifying pure
/// deviation at any profile of `m`. Returns the incentive together with the
/// attaining witnesses `(profile index, pure strategy)`; witnesses are
/// reported only for a strictly positive incentive.
pub fn incentive(
    game: &ExplicitGame,
    m: &[MixedProfile],
    j: usize,
) -> Result<(Rational, Vec<(usize, usize)>)> {
    let mut best = Rational::zero();
    let mut witnesses: Vec<(usize, usize)> = Vec::new();
    for (mi, sigma) in m.iter().enumerate() {
        let base = game.expected_gain(sigma, j)?;
        for s in 0..game.num_strategies(j) {
            let dev = game.expected_gain(&sigma.with_strategy(j, MixedStrategy::pure(s)), j)?;
            if dev < base {
                continue;
            }
            let diff = dev - &base;
            if diff > best {
                best = diff.clone();
                witnesses.clear();
            }
            if diff == best {
                witnesses.push((mi, s));
            }
        }
    }
    if best.is_zero() {
        witnesses.clear();
    }
    Ok((best, witnesses))
}

/// The deviation risk of player `j`: the largest strict loss (relative to
/// the reference profile) that punishing opponents can inflict after `j`
/// plays an incentive witness. Every non-empty set of opponents may punish;
/// each punisher switches to a best response against the deviation profile
/// (all ties explored), the rest stay put.
pub fn risk(
    game: &ExplicitGame,
    m: &[MixedProfile],
    j: usize,
    witnesses: &[(usize, usize)],
) -> Result<Rational> {
    let n = game.num_players();
    let mut best = Rational::zero();
    for &(mi, s) in witnesses {
        let sigma = &m[mi];
        let base = game.expected_gain(sigma, j)?;
        let delta = sigma.with_strategy(j, MixedStrategy::pure(s));
        let punisher_sets = punishing_sets(game, sigma, j, n)?;
        for set in punisher_sets {
            // Best-response sets against the deviation profile.
            let mut br: Vec<Vec<usize>> = Vec::with_capacity(set.len());
            for &k in &set {
                let mut best_gain: Option<Rational> = None;
                let mut ties = Vec::new();
                for t in 0..game.num_strategies(k) {
                    let g =
                        game.expected_gain(&delta.with_strategy(k, MixedStrategy::pure(t)), k)?;
                    match &best_gain {
                        Some(b) if g < *b => {}
                        Some(b) if g == *b => ties.push(t),
                        _ => {
                            best_gain = Some(g);
                            ties = vec![t];
                        }
                    }
                }
                br.push(ties);
            }
            let combos = br.iter().try_fold(1usize, |acc, t| {
                let next = acc.checked_mul(t.len())?;
                (next <= RETALIATION_CAP).then_some(next)
            });
            if combos.is_none() {
                return Err(CoopError::Capacity {
                    detail: "too many tied best responses while computing the risk".to_string(),
                });
            }
            let mut choice = vec![0usize; set.len()];
            loop {
                let mut assembly = delta.clone();
                for (pos, &k) in set.iter().enumerate() {
                    assembly = assembly.with_strategy(k, MixedStrategy::pure(br[pos][choice[pos]]));
                }
                let loss = base.clone() - game.expected_gain(&assembly, j)?;
                if loss > best {
                    best = loss;
                }
                let mut p = set.len();
                loop {
                    if p == 0 {
                        break;
                    }
                    p -= 1;
                    choice[p] += 1;
                    if choice[p] < br[p].len() {
                        break;
                    }
                    choice[p] = 0;
                }
                if choice.iter().all(|&c| c == 0) {
                    break;
                }
            }
        }
    }
    Ok(best)
}

/// The punishing sets explored by [`risk`]: all non-empty subsets of the
/// opponents, or one representative per size for exchangeable games at
/// symmetric reference profiles.
fn punishing_sets(
    game: &ExplicitGame,
    sigma: &MixedProfile,
    j: usize,
    n: usize,
) -> Result<Vec<Vec<usize>>> {
    let others: Vec<usize> = (0..n).filter(|&k| k != j).collect();
    if game.exchangeable && is_symmetric(sigma) {
        return Ok((1..=others.len()).map(|m| others[..m].to_vec()).collect());
    }
    if n > SUBSET_PLAYER_CAP {
        return Err(CoopError::Capacity {
            detail: format!(
                "risk subsets for {n} players need the exchangeable shortcut, which \
                 requires an exchangeable game and a symmetric profile"
            ),
        });
    }
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << others.len()) {
        out.push(
            others
                .iter()
                .enumerate()
                .filter(|(pos, _)| mask & (1 << pos) != 0)
                .map(|(_, &k)| k)
                .collect(),
        );
    }
    Ok(out)
}

fn is_symmetric(p: &MixedProfile) -> bool {
    p.strategies.windows(2).all(|w| w[0] == w[1])
}

/// The probability that a single player deviates: `D / (D + R)`, with the
/// conventions `tau = 0` when there is no incentive and `tau = 1` when a
/// positive incentive carries no risk.
pub fn tau_singleton(d: &Rational, r: &Rational) -> Rational {
    if d.is_zero() {
        Rational::zero()
    } else if r.is_zero() {
        Rational::one()
    } else {
        d.clone() / (d + r)
    }
}

/// The probability, from player `i`'s viewpoint, that exactly the players in
/// `subset` deviate: deviations are independent across players.
pub fn tau_subset(taus: &[Rational], i: usize, subset: &[usize]) -> Rational {
    let mut p = Rational::one();
    for (j, tau) in taus.iter().enumerate() {
        if j == i {
            continue;
        }
        if subset.contains(&j) {
            p *= tau;
        } else {
            p *= Rational::one() - tau;
        }
    }
    p
}

/// Deviation analysis of one coalition structure: the profile set M(p) and
/// the per-player incentives, risks, and deviation probabilities.
#[derive(Clone)]
pub struct DeviationReport {
    /// The analyzed structure.
    pub structure: CoalitionStructure,
    /// The reassembled joint-optimum profile set M(p).
    pub profiles: Vec<MixedProfile>,
    /// Whether the underlying equilibrium enumeration was complete.
    pub complete: bool,
    /// Per-player deviation incentives D_j.
    pub incentives: Vec<Rational>,
    /// Per-player deviation risks R_j.
    pub risks: Vec<Rational>,
    /// Per-player deviation probabilities tau_j.
    pub taus: Vec<Rational>,
    /// Per-player incentive witnesses `(profile index, pure strategy)`.
    pub witnesses: Vec<Vec<(usize, usize)>>,
}

/// Runs the full deviation analysis for one coalition structure. Returns
/// `None` when the merged game's equilibrium search comes back empty (the
/// structure is then skipped by the solver).
pub fn deviation_report(
    game: &ExplicitGame,
    structure: &CoalitionStructure,
) -> Result<Option<DeviationReport>> {
    let cg = equilibrium::coalition_game(game, structure)?;
    let set = equilibrium::equilibria(&cg)?;
    if set.profiles.is_empty() {
        return Ok(None);
    }
    let MaxJointSet { profiles, complete, .. } = equilibrium::max_joint_profiles(&cg, &set)?;
    let n = game.num_players();
    let symmetric_shortcut =
        game.exchangeable && profiles.iter().all(is_symmetric) && !profiles.is_empty();
    let mut incentives: Vec<Rational> = Vec::with_capacity(n);
    let mut risks: Vec<Rational> = Vec::with_capacity(n);
    let mut taus: Vec<Rational> = Vec::with_capacity(n);
    let mut witnesses: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n);
    for j in 0..n {
        if symmetric_shortcut && j > 0 {
            incentives.push(incentives[0].clone());
            risks.push(risks[0].clone());
            taus.push(taus[0].clone());
            witnesses.push(witnesses[0].clone());
            continue;
        }
        let (d, w) = incentive(game, &profiles, j)?;
        let r = risk(game, &profiles, j, &w)?;
        taus.push(tau_singleton(&d, &r));
        incentives.push(d);
        risks.push(r);
        witnesses.push(w);
    }
    Ok(Some(DeviationReport {
        structure: structure.clone(),
        profiles,
        complete,
        incentives,
        risks,
        taus,
        witnesses,
    }))
}

/// The worst gain player `i` can face when exactly the players of `subset`
/// deviate: the infimum of `g_i` over the profiles of `m` with the subset's
/// strategies replaced by any pure assembly in which at least one member
/// plays a qualifying deviation. An empty subset yields the infimum of `g_i`
/// over `m` itself.
pub fn conditional_infimum(
    game: &ExplicitGame,
    m: &[MixedProfile],
    i: usize,
    subset: &[usize],
) -> Result<Rational> {
    if subset.contains(&i) {
        return Err(CoopError::InvalidParameter {
            detail: "conditional infimum is taken over the other players' deviations"
                .to_string(),
        });
    }
    if m.is_empty() {
        return Err(CoopError::Internal {
            detail: "conditional infimum over an empty profile set".to_string(),
        });
    }
    let mut best: Option<Rational> = None;
    let mut consider = |v: Rational| {
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    };
    if subset.is_empty() {
        for sigma in m {
            consider(game.expected_gain(sigma, i)?);
        }
        return Ok(best.expect("non-empty set"));
    }
    for sigma in m {
        // Qualifying pure deviations per subset member.
        let mut qual: Vec<Vec<bool>> = Vec::with_capacity(subset.len());
        for &j in subset {
            let mut q = vec![false; game.num_strategies(j)];
            for (s, flag) in q.iter_mut().enumerate() {
                *flag = is_k_deviation(game, sigma, j, s)?;
            }
            qual.push(q);
        }
        let sizes: Vec<usize> = subset.iter().map(|&j| game.num_strategies(j)).collect();
        let count = sizes.iter().try_fold(1usize, |a, &s| a.checked_mul(s));
        if let Some(pure) = sigma.as_pure() {
            if game.monotone_opponents {
                // Gains are nondecreasing in the opponents' strategy indices,
                // so per choice of qualifying member the worst assembly puts
                // that member at its lowest qualifying index and the rest of
                // the subset at index zero.
                for (pos, &j0) in subset.iter().enumerate() {
                    let Some(min_q) = qual[pos].iter().position(|&q| q) else {
                        continue;
                    };
                    let mut assembly = pure.clone();
                    for &j in subset {
                        assembly[j] = 0;
                    }
                    assembly[j0] = min_q;
                    consider(ratio(game.gain_raw(&assembly, i), game.scale()));
                }
                continue;
            }
            if count.is_none_or(|c| c > ASSEMBLY_CAP) {
                return Err(CoopError::Capacity {
                    detail: format!(
                        "deviating-set assemblies for {} players exceed the enumeration cap",
                        subset.len()
                    ),
                });
            }
            let mut assembly = pure.clone();
            crate::game::for_each_profile(&sizes, |choice| {
                if !choice.iter().zip(&qual).any(|(&s, q)| q[s]) {
                    return;
                }
                for (pos, &j) in subset.iter().enumerate() {
                    assembly[j] = choice[pos];
                }
                consider(ratio(game.gain_raw(&assembly, i), game.scale()));
            });
            continue;
        }
        // Mixed reference profile: every assembly costs an expected-gain
        // evaluation, so the cap is much tighter.
        if count.is_none_or(|c| c > MIXED_ASSEMBLY_CAP) {
            return Err(CoopError::Capacity {
                detail: "deviating-set assemblies against a mixed profile exceed the cap"
                    .to_string(),
            });
        }
        let mut err: Option<CoopError> = None;
        crate::game::for_each_profile(&sizes, |choice| {
            if err.is_some() || !choice.iter().zip(&qual).any(|(&s, q)| q[s]) {
                return;
            }
            let mut p = sigma.clone();
            for (pos, &j) in subset.iter().enumerate() {
                p = p.with_strategy(j, MixedStrategy::pure(choice[pos]));
            }
            match game.expected_gain(&p, i) {
                Ok(v) => consider(v),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    best.ok_or_else(|| CoopError::Internal {
        detail: "no qualifying deviation assembly found".to_string(),
    })
}

/// One term of a player's coalition value: a set of deviating opponents,
/// the worst conditional gain, and the probability weight of the event.
#[derive(Clone, Debug)]
pub struct ValueEvent {
    /// The deviating opponents (a representative when `count > 1`).
    pub subset: Vec<usize>,
    /// The conditional worst-case gain.
    pub e: Rational,
    /// Total probability of the event (summed over all `count` subsets).
    pub tau: Rational,
    /// Number of equally likely subsets this event stands for.
    pub count: usize,
}

/// The exact value of one coalition structure to one player, with the
/// per-event breakdown.
#[derive(Clone)]
pub struct CoalitionValueReport {
    /// The player the value belongs to.
    pub player: usize,
    /// The valued structure.
    pub structure: CoalitionStructure,
    /// The deviation events; their weights sum to one.
    pub events: Vec<ValueEvent>,
    /// The expected worst-case value `sum e * tau` (exact).
    pub value: Rational,
    /// True when events aggregate subsets by size (exchangeable shortcut).
    pub aggregated: bool,
}

/// Computes the exact value of the analyzed structure to player `i`:
/// the expectation, over independent deviation events, of the conditional
/// worst-case gains.
pub fn coalition_value(
    game: &ExplicitGame,
    report: &DeviationReport,
    i: usize,
) -> Result<CoalitionValueReport> {
    let n = game.num_players();
    let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let mut events = Vec::new();
    let mut aggregated = false;
    if n <= SUBSET_PLAYER_CAP {
        for mask in 0u32..(1u32 << others.len()) {
            let subset: Vec<usize> = others
                .iter()
                .enumerate()
                .filter(|(pos, _)| mask & (1 << pos) != 0)
                .map(|(_, &k)| k)
                .collect();
            let tau = tau_subset(&report.taus, i, &subset);
            if tau.is_zero() {
                continue;
            }
            let e = conditional_infimum(game, &report.profiles, i, &subset)?;
            events.push(ValueEvent { subset, e, tau, count: 1 });
        }
    } else {
        let symmetric = game.exchangeable
            && report.profiles.iter().all(is_symmetric)
            && report.taus.windows(2).all(|w| w[0] == w[1]);
        if !symmetric {
            return Err(CoopError::Capacity {
                detail: format!(
                    "coalition values for {n} players need the exchangeable shortcut, \
                     which requires an exchangeable game and symmetric profiles"
                ),
            });
        }
        aggregated = true;
        let tau = report.taus[usize::from(i == 0)].clone(); // any opponent's tau
        for size in 0..=others.len() {
            let multiplicity = binomial(others.len(), size);
            let weight = multiplicity.clone()
                * pow_rat(&tau, size)
                * pow_rat(&(Rational::one() - &tau), others.len() - size);
            if weight.is_zero() {
                continue;
            }
            let subset = others[..size].to_vec();
            let e = conditional_infimum(game, &report.profiles, i, &subset)?;
            let count = usize::try_from(&multiplicity.to_integer()).unwrap_or(usize::MAX);
            events.push(ValueEvent { subset, e, tau: weight, count });
        }
    }
    let value: Rational = events.iter().map(|ev| ev.e.clone() * &ev.tau).sum();
    Ok(CoalitionValueReport {
        player: i,
        structure: report.structure.clone(),
        events,
        value,
        aggregated,
    })
}

/// The perceived (cumulative-prospect-theory) value of the structure to
/// player `i`: deviation probabilities below `floor` are discarded before
/// the independence products, the resulting events form a prospect, and the
/// prospect is valued under `params`.
pub fn coalition_value_cpt(
    report: &DeviationReport,
    value_report: &CoalitionValueReport,
    params: &CptParams,
    floor: f64,
) -> Result<f64> {
    params.validate()?;
    if !(0.0..1.0).contains(&floor) {
        return Err(CoopError::InvalidParameter {
            detail: format!("probability floor must lie in [0, 1), got {floor}"),
        });
    }
    let i = value_report.player;
    let floored: Vec<Rational> = report
        .taus
        .iter()
        .map(|t| if to_f64(t) < floor { Rational::zero() } else { t.clone() })
        .collect();
    let mut pairs: Vec<(Rational, Rational)> = Vec::with_capacity(value_report.events.len());
    if value_report.aggregated {
        let tau = floored[usize::from(i == 0)].clone();
        let total = report.taus.len() - 1;
        for ev in &value_report.events {
            let size = ev.subset.len();
            let weight = binomial(total, size)
                * pow_rat(&tau, size)
                * pow_rat(&(Rational::one() - &tau), total - size);
            pairs.push((ev.e.clone(), weight));
        }
    } else {
        for ev in &value_report.events {
            pairs.push((ev.e.clone(), tau_subset(&floored, i, &ev.subset)));
        }
    }
    let prospect = cpt::Prospect::from_rationals(pairs)?;
    cpt::prospect_value(&prospect, params)
}

fn binomial(n: usize, k: usize) -> Rational {
    Rational::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(k)))
}

fn pow_rat(x: &Rational, e: usize) -> Rational {
    let mut out = Rational::one();
    for _ in 0..e {
        out *= x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::rat;
    use crate::generators;

    fn grand_report(game: &ExplicitGame) -> DeviationReport {
        deviation_report(game, &CoalitionStructure::grand(game.num_players()))
            .unwrap()
            .unwrap()
    }

    fn selfish_report(game: &ExplicitGame) -> DeviationReport {
        deviation_report(game, &CoalitionStructure::selfish(game.num_players()))
            .unwrap()
            .unwrap()
    }

    #[test]
    fn traveler_bonus_five_deviation_numbers() {
        let g = generators::traveler(5, 180, 300).unwrap();
        let r = grand_report(&g);
        assert_eq!(r.incentives, vec![rat(4), rat(4)]);
        assert_eq!(r.risks, vec![rat(7), rat(7)]);
        assert_eq!(r.taus, vec![ratio(4, 11), ratio(4, 11)]);
        let v = coalition_value(&g, &r, 0).unwrap();
        assert_eq!(v.value, ratio(3260, 11));
        // Event breakdown: 300 when nobody deviates, 290 when the other does.
        let e_dev = v.events.iter().find(|ev| ev.subset == vec![1]).unwrap();
        assert_eq!(e_dev.e, rat(290));
    }

    #[test]
    fn traveler_bonus_two_value() {
        let g = generators::traveler(2, 2, 100).unwrap();
        let r = grand_report(&g);
        assert_eq!(r.taus, vec![ratio(1, 5), ratio(1, 5)]);
        let v = coalition_value(&g, &r, 0).unwrap();
        assert_eq!(v.value, ratio(496, 5)); // 99.2
    }

    #[test]
    fn prisoner_grand_value_is_mu() {
        for mu in [0i64, 1, 2, 4, 10] {
            let g = generators::prisoner(rat(mu)).unwrap();
            let r = grand_report(&g);
            let v = coalition_value(&g, &r, 0).unwrap();
            assert_eq!(v.value, rat(mu), "mu = {mu}");
        }
    }

    #[test]
    fn bertrand_two_player_value() {
        let g = generators::bertrand(2, 2, 100).unwrap();
        let r = grand_report(&g);
        assert_eq!(r.taus[0], ratio(49, 99));
        let v = coalition_value(&g, &r, 0).unwrap();
        assert_eq!(v.value, ratio(2500, 99));
    }

    #[test]
    fn public_goods_two_player_value() {
        // alpha = 4/5, endowment 10: value (3 * 4/5 - 1) * 10 = 14.
        let g = generators::public_goods(2, ratio(4, 5), 10, 10).unwrap();
        let r = grand_report(&g);
        let v = coalition_value(&g, &r, 0).unwrap();
        assert_eq!(v.value, rat(14));
    }

    #[test]
    fn ultimatum_grand_values() {
        let g = generators::ultimatum(10, 10).unwrap();
        let r = grand_report(&g);
        assert_eq!(r.taus, vec![ratio(1, 2), rat(0)]);
        let v1 = coalition_value(&g, &r, 0).unwrap();
        let v2 = coalition_value(&g, &r, 1).unwrap();
        assert_eq!(v1.value, rat(5));
        assert_eq!(v2.value, ratio(5, 2));
    }

    #[test]
    fn bargaining_structure_values() {
        let g = generators::bargaining(100).unwrap();
        let grand = grand_report(&g);
        let selfish = selfish_report(&g);
        assert_eq!(coalition_value(&g, &grand, 0).unwrap().value, rat(50));
        assert_eq!(coalition_value(&g, &selfish, 0).unwrap().value, rat(0));
    }

    #[test]
    fn asym_matching_pennies_riskless_deviation() {
        let g = generators::asym_matching_pennies().unwrap();
        let r = grand_report(&g);
        // One player's best optimum deviation carries no risk: tau = 1.
        assert!(r.taus.contains(&Rational::one()));
        let v0 = coalition_value(&g, &r, 0).unwrap();
        let v1 = coalition_value(&g, &r, 1).unwrap();
        assert_eq!(v0.value, rat(40));
        assert_eq!(v1.value, rat(40));
    }

    #[test]
    fn coordination_grand_and_selfish_values_vanish() {
        let g = generators::halpern_coordination(10, 9).unwrap();
        let grand = grand_report(&g);
        let selfish = selfish_report(&g);
        for r in [&grand, &selfish] {
            for i in 0..2 {
                assert_eq!(coalition_value(&g, r, i).unwrap().value, rat(0));
            }
        }
    }

    #[test]
    fn event_weights_sum_to_one() {
        let g = generators::traveler(5, 180, 300).unwrap();
        let r = grand_report(&g);
        let v = coalition_value(&g, &r, 0).unwrap();
        let total: Rational = v.events.iter().map(|ev| ev.tau.clone()).sum();
        assert_eq!(total, Rational::one());
    }

    #[test]
    fn identity_cpt_matches_exact_value() {
        let g = generators::traveler(5, 180, 300).unwrap();
        let r = grand_report(&g);
        let v = coalition_value(&g, &r, 0).unwrap();
        let cptv = coalition_value_cpt(&r, &v, &CptParams::identity(), 0.0).unwrap();
        assert!((cptv - to_f64(&v.value)).abs() < 1e-9);
    }

    #[test]
    fn floor_discards_small_deviation_probabilities() {
        let g = generators::traveler(5, 180, 300).unwrap();
        let r = grand_report(&g);
        let v = coalition_value(&g, &r, 0).unwrap();
        // tau = 4/11 < 0.5: flooring at 0.5 leaves the no-deviation event.
        let cptv = coalition_value_cpt(&r, &v, &CptParams::identity(), 0.5).unwrap();
        assert!((cptv - 300.0).abs() < 1e-9);
    }
}
