//! Iterated strategy deletion driven by super-domination and altruism:
//! fiber-game recursion, losers sets, the P/Q/A quantities, unplayable
//! strategies of both types, and the fixed-point iteration yielding the
//! playable strategy sets.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Signed;

use crate::error::{CoopError, Result};
use crate::game::{ExplicitGame, MixedProfile, MixedStrategy, Rational};

/// Cap on `strategies x opponent assemblies` for the gain-bound scan.
const BOUNDS_SCAN_CAP: usize = 4_000_000;

/// Per-player super-domination pairs `(s, t)` with `s` super-dominated by
/// `t`.
#[derive(Clone, Debug)]
pub struct DominanceRelation {
    /// Per player: the ordered pairs.
    pub pairs: Vec<Vec<(usize, usize)>>,
}

/// True when strategy `s` of player `i` is super-dominated by `t`: `t`'s
/// worst outcome is at least `s`'s best outcome, with at least one strict
/// comparison.
pub fn super_dominates(game: &ExplicitGame, i: usize, s: usize, t: usize) -> Result<bool> {
    if s == t {
        return Ok(false);
    }
    let bounds = gain_bounds(game, i)?;
    Ok(dominated_by_bounds(&bounds, s, t))
}

fn dominated_by_bounds(bounds: &[(i64, i64)], s: usize, t: usize) -> bool {
    let (s_min, s_max) = bounds[s];
    let (t_min, t_max) = bounds[t];
    // All comparisons hold iff max(s) <= min(t); strictness fails only when
    // both strategies are constant at the same value.
    s != t && s_max <= t_min && s_min != t_max
}

/// The per-player super-domination relation.
pub fn dominance_relation(game: &ExplicitGame) -> Result<DominanceRelation> {
    let mut pairs = Vec::with_capacity(game.num_players());
    for i in 0..game.num_players() {
        let bounds = gain_bounds(game, i)?;
        let k = bounds.len();
        let mut p = Vec::new();
        for s in 0..k {
            for t in 0..k {
                if dominated_by_bounds(&bounds, s, t) {
                    p.push((s, t));
                }
            }
        }
        pairs.push(p);
    }
    Ok(DominanceRelation { pairs })
}

/// Per-strategy `(min, max)` raw gains of player `i` over all opponent
/// assemblies. Monotone games need only the two extreme assemblies; dense
/// games are scanned within the cap.
fn gain_bounds(game: &ExplicitGame, i: usize) -> Result<Vec<(i64, i64)>> {
    let n = game.num_players();
    let shape = game.shape();
    let si = shape[i];
    if game.monotone_opponents {
        let mut lo = vec![0usize; n];
        let mut hi: Vec<usize> = shape.iter().map(|&s| s - 1).collect();
        let mut out = Vec::with_capacity(si);
        for s in 0..si {
            lo[i] = s;
            hi[i] = s;
            out.push((game.gain_raw(&lo, i), game.gain_raw(&hi, i)));
        }
        return Ok(out);
    }
    let opp_shape: Vec<usize> = (0..n).filter(|&j| j != i).map(|j| shape[j]).collect();
    let total = opp_shape
        .iter()
        .try_fold(si, |a, &s| a.checked_mul(s))
        .filter(|&t| t <= BOUNDS_SCAN_CAP);
    if total.is_none() {
        return Err(CoopError::Capacity {
            detail: format!("gain-bound scan for player {} exceeds the cap", i + 1),
        });
    }
    let mut out = vec![(i64::MAX, i64::MIN); si];
    let mut full = vec![0usize; n];
    crate::game::for_each_profile(&opp_shape, |opp| {
        let mut pos = 0;
        for j in 0..n {
            if j != i {
                full[j] = opp[pos];
                pos += 1;
            }
        }
        for (s, entry) in out.iter_mut().enumerate() {
            full[i] = s;
            let g = game.gain_raw(&full, i);
            entry.0 = entry.0.min(g);
            entry.1 = entry.1.max(g);
        }
    });
    Ok(out)
}

/// The cooperative solution of a one-player game: the pure strategies
/// maximizing the gain.
pub fn coop_base(game: &ExplicitGame) -> Result<Vec<usize>> {
    if game.num_players() != 1 {
        return Err(CoopError::InvalidParameter {
            detail: "coop_base requires a one-player game".to_string(),
        });
    }
    let k = game.num_strategies(0);
    let mut best = i64::MIN;
    let mut out = Vec::new();
    for s in 0..k {
        let g = game.gain_raw(&[s], 0);
        if g > best {
            best = g;
            out.clear();
        }
        if g == best {
            out.push(s);
        }
    }
    Ok(out)
}

/// Cooperative profiles of the fiber game at `(i, s)`, embedded as full
/// profiles of the original game (player `i` fixed to the pure strategy).
fn coop_profiles(
    game: &ExplicitGame,
    i: usize,
    s: usize,
    cache: &mut BTreeMap<(usize, usize), Vec<MixedProfile>>,
) -> Result<Vec<MixedProfile>> {
    if let Some(hit) = cache.get(&(i, s)) {
        return Ok(hit.clone());
    }
    let fiber = game.fiber_game(i, s)?;
    let inner: Vec<MixedProfile> = if fiber.num_players() == 1 {
        coop_base(&fiber)?.into_iter().map(|t| MixedProfile::pure(&[t])).collect()
    } else {
        // Fiber games have one player fewer; the recursion is bounded.
        crate::solver::exact_cooperative_equilibrium(&fiber)?.profiles
    };
    let embedded: Vec<MixedProfile> = inner
        .into_iter()
        .map(|p| {
            let mut strategies = p.strategies;
            strategies.insert(i, MixedStrategy::pure(s));
            MixedProfile { strategies }
        })
        .collect();
    cache.insert((i, s), embedded.clone());
    Ok(embedded)
}

/// One loser's quantities for a super-dominated pair.
#[derive(Clone, Debug)]
pub struct LoserQuantity {
    /// The losing player.
    pub player: usize,
    /// Q: the best the loser keeps when `i` stays at the worse strategy.
    pub q: Rational,
    /// Q': the loser's certain gain under the worse strategy.
    pub q_prime: Rational,
    /// The altruism amount A_ij the loser could claim from `i`.
    pub a: Rational,
}

/// The losers set and decision quantities for a pair `s <_i t`.
#[derive(Clone, Debug)]
pub struct LoserQuantities {
    /// The losers.
    pub losers: Vec<usize>,
    /// P: player `i`'s maximal loss from renouncing `t`.
    pub p: Rational,
    /// P': player `i`'s certain gain under `t`.
    pub p_prime: Rational,
    /// Quantities for each loser.
    pub per_loser: Vec<LoserQuantity>,
}

/// Computes the losers set and the P/Q/A quantities for `s <_i t`, given
/// the embedded cooperative profile sets of the two fiber games. Returns
/// `None` when the pair has losers but a non-positive renouncement loss,
/// in which case the altruism quantities are undefined and the pair is
/// ineligible for deletion.
pub fn losers_and_quantities(
    game: &ExplicitGame,
    i: usize,
    s: usize,
    t: usize,
    coop_s: &[MixedProfile],
    coop_t: &[MixedProfile],
) -> Result<Option<LoserQuantities>> {
    let _ = (s, t);
    let gains = |profiles: &[MixedProfile], j: usize| -> Result<Vec<Rational>> {
        profiles.iter().map(|p| game.expected_gain(p, j)).collect()
    };
    let gi_s = gains(coop_s, i)?;
    let gi_t = gains(coop_t, i)?;
    let p_prime = gi_t.iter().min().cloned().expect("non-empty coop set");
    let p = p_prime.clone() - gi_s.iter().min().cloned().expect("non-empty coop set");
    let mut losers = Vec::new();
    for j in 0..game.num_players() {
        if j == i {
            continue;
        }
        let gj_s = gains(coop_s, j)?;
        let gj_t = gains(coop_t, j)?;
        // Certain disadvantage: every gain under s beats every gain under t.
        let certain_loss = gj_s.iter().min() > gj_t.iter().max();
        // Weaker than i under t, at every cooperative profile of the t-fiber.
        let weaker = gj_t.iter().zip(&gi_t).all(|(gj, gi)| gj < gi);
        if certain_loss && weaker {
            losers.push(j);
        }
    }
    if losers.is_empty() {
        // Nobody is hurt; the quantities are irrelevant.
        return Ok(Some(LoserQuantities { losers, p, p_prime, per_loser: Vec::new() }));
    }
    if !p.is_positive() {
        return Ok(None);
    }
    let mut per_loser = Vec::with_capacity(losers.len());
    for &j in &losers {
        let gj_s = gains(coop_s, j)?;
        let gj_t = gains(coop_t, j)?;
        let z = gj_t.iter().min().cloned().expect("non-empty coop set");
        let q = gj_s.iter().max().cloned().expect("non-empty coop set") - &z;
        let q_prime = gj_s.iter().min().cloned().expect("non-empty coop set");
        let a = game.altruism.value(&(q.clone() / &p), &p_prime, &z)?;
        per_loser.push(LoserQuantity { player: j, q, q_prime, a });
    }
    Ok(Some(LoserQuantities { losers, p, p_prime, per_loser }))
}

/// Evidence attached to one removed strategy.
#[derive(Clone, Debug)]
pub struct Removal {
    /// The removed strategy.
    pub strategy: usize,
    /// The witnessing alternative strategy.
    pub witness: usize,
    /// The losers set of the witnessing pair.
    pub losers: Vec<usize>,
    /// The loss P of the witnessing pair.
    pub p: Rational,
}

/// Strategies of player `i` unplayable of the first type (controlled
/// selfishness): a super-dominating `t` exists whose losers could all claim
/// less altruism than `i` would renounce. An empty losers set admits the
/// removal vacuously.
pub fn unplayable_first_type(game: &ExplicitGame, i: usize) -> Result<Vec<Removal>> {
    let bounds = gain_bounds(game, i)?;
    let k = bounds.len();
    let mut cache = BTreeMap::new();
    let mut out = Vec::new();
    'strategies: for s in 0..k {
        for t in 0..k {
            if !dominated_by_bounds(&bounds, s, t) {
                continue;
            }
            let coop_s = coop_profiles(game, i, s, &mut cache)?;
            let coop_t = coop_profiles(game, i, t, &mut cache)?;
            let Some(lq) = losers_and_quantities(game, i, s, t, &coop_s, &coop_t)? else {
                continue;
            };
            if lq.per_loser.iter().all(|l| lq.p > l.a) {
                out.push(Removal { strategy: s, witness: t, losers: lq.losers, p: lq.p });
                continue 'strategies;
            }
        }
    }
    Ok(out)
}

/// Strategies of player `i` unplayable of the second type (pure altruism):
/// the better member `t` of a super-dominated pair is surrendered when some
/// loser could claim at least the loss P.
pub fn unplayable_second_type(
    game: &ExplicitGame,
    i: usize,
    playable_after_first: &[usize],
) -> Result<Vec<Removal>> {
    let bounds = gain_bounds(game, i)?;
    let mut cache = BTreeMap::new();
    let mut out = Vec::new();
    'strategies: for &t in playable_after_first {
        for &s in playable_after_first {
            if !dominated_by_bounds(&bounds, s, t) {
                continue;
            }
            let coop_s = coop_profiles(game, i, s, &mut cache)?;
            let coop_t = coop_profiles(game, i, t, &mut cache)?;
            let Some(lq) = losers_and_quantities(game, i, s, t, &coop_s, &coop_t)? else {
                continue;
            };
            if lq.per_loser.iter().any(|l| lq.p <= l.a) {
                out.push(Removal { strategy: t, witness: s, losers: lq.losers, p: lq.p });
                continue 'strategies;
            }
        }
    }
    Ok(out)
}

/// Which of the two deletion principles removed a strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeletionKind {
    /// Controlled selfishness (worse strategy dropped).
    First,
    /// Pure altruism (better strategy surrendered).
    Second,
}

/// One player's batch of removals within a round.
#[derive(Clone, Debug)]
pub struct DeletionStep {
    /// 1-based round number.
    pub round: usize,
    /// The deletion principle applied.
    pub kind: DeletionKind,
    /// The player whose strategies were removed.
    pub player: usize,
    /// Removed strategies with evidence, in original-game indices.
    pub removed: Vec<Removal>,
}

/// The full deletion history and the final playable sets.
#[derive(Clone, Debug)]
pub struct DeletionTrace {
    /// All removal batches in order.
    pub steps: Vec<DeletionStep>,
    /// Per player: the surviving strategies, in original-game indices.
    pub playable: Vec<Vec<usize>>,
}

impl DeletionTrace {
    /// Number of rounds that removed at least one strategy.
    pub fn rounds(&self) -> usize {
        self.steps.iter().map(|s| s.round).max().unwrap_or(0)
    }
}

/// Runs the alternating first-type / second-type deletion to its fixed
/// point. Within each sub-round players are processed in canonical order
/// and the game is re-restricted after every player's batch.
pub fn iterate_deletion(game: &ExplicitGame) -> Result<DeletionTrace> {
    let n = game.num_players();
    let mut keep: Vec<Vec<usize>> =
        (0..n).map(|i| (0..game.num_strategies(i)).collect()).collect();
    let mut current = game.clone();
    let mut steps = Vec::new();
    let mut round = 0usize;
    loop {
        round += 1;
        let mut changed = false;
        for kind in [DeletionKind::First, DeletionKind::Second] {
            for i in 0..n {
                let removals = match kind {
                    DeletionKind::First => unplayable_first_type(&current, i)?,
                    DeletionKind::Second => {
                        let all: Vec<usize> = (0..current.num_strategies(i)).collect();
                        unplayable_second_type(&current, i, &all)?
                    }
                };
                if removals.is_empty() {
                    continue;
                }
                if removals.len() >= current.num_strategies(i) {
                    return Err(CoopError::Internal {
                        detail: format!(
                            "deletion would empty player {}'s strategy set",
                            i + 1
                        ),
                    });
                }
                // Translate to original indices and shrink the keep list.
                let translated: Vec<Removal> = removals
                    .iter()
                    .map(|r| Removal {
                        strategy: keep[i][r.strategy],
                        witness: keep[i][r.witness],
                        losers: r.losers.clone(),
                        p: r.p.clone(),
                    })
                    .collect();
                let gone: Vec<usize> = removals.iter().map(|r| r.strategy).collect();
                keep[i] = keep[i]
                    .iter()
                    .enumerate()
                    .filter(|(local, _)| !gone.contains(local))
                    .map(|(_, &orig)| orig)
                    .collect();
                current = game.restrict(&keep)?;
                steps.push(DeletionStep { round, kind, player: i, removed: translated });
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(DeletionTrace { steps, playable: keep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{rat, ratio};
    use crate::generators;

    fn game_2x2(cells: [(i64, i64); 4]) -> ExplicitGame {
        let labels = vec![
            vec!["U".to_string(), "D".to_string()],
            vec!["L".to_string(), "R".to_string()],
        ];
        let t1 = vec![cells[0].0, cells[1].0, cells[2].0, cells[3].0];
        let t2 = vec![cells[0].1, cells[1].1, cells[2].1, cells[3].1];
        ExplicitGame::from_tables(labels, vec![t1, t2], 1).unwrap()
    }

    #[test]
    fn zero_sum_column_domination() {
        // (U,L)=(0,0) (U,R)=(10,-10) (D,L)=(1,-1) (D,R)=(1,-1).
        let g = generators::sure_gain_zero_sum().unwrap();
        assert!(super_dominates(&g, 1, 1, 0).unwrap()); // R dominated by L
        assert!(!super_dominates(&g, 1, 0, 1).unwrap());
        assert!(!super_dominates(&g, 0, 0, 1).unwrap()); // U, D unordered
        assert!(!super_dominates(&g, 0, 1, 0).unwrap());
    }

    #[test]
    fn strict_dominance_without_super_domination() {
        // Classic strict PD: D strictly dominates C but never super-dominates.
        let g = generators::strict_prisoner().unwrap();
        let rel = dominance_relation(&g).unwrap();
        assert!(rel.pairs.iter().all(|p| p.is_empty()));
    }

    #[test]
    fn vacuous_losers_admit_first_type() {
        // (U,L)=(1,1) (U,R)=(1,1) (D,L)=(1,1) (D,R)=(2,1): U goes vacuously.
        let g = game_2x2([(1, 1), (1, 1), (1, 1), (2, 1)]);
        let removals = unplayable_first_type(&g, 0).unwrap();
        assert_eq!(removals.len(), 1);
        assert_eq!(removals[0].strategy, 0);
        assert!(removals[0].losers.is_empty());
    }

    #[test]
    fn small_altruism_keeps_first_type() {
        // (U,·)=(0,0), (D,·)=(1,-1): the loser's claim a(1,1,-1)=0 < P=1.
        let g = game_2x2([(0, 0), (0, 0), (1, -1), (1, -1)]);
        let removals = unplayable_first_type(&g, 0).unwrap();
        assert_eq!(removals.len(), 1);
        assert_eq!(removals[0].strategy, 0);
        assert_eq!(removals[0].losers, vec![1]);
        assert_eq!(removals[0].p, rat(1));
    }

    #[test]
    fn loser_quantities_match_worked_pair() {
        let g = game_2x2([(0, 0), (0, 0), (1, -1), (1, -1)]);
        let coop_u: Vec<MixedProfile> =
            vec![MixedProfile::pure(&[0, 0]), MixedProfile::pure(&[0, 1])];
        let coop_d: Vec<MixedProfile> =
            vec![MixedProfile::pure(&[1, 0]), MixedProfile::pure(&[1, 1])];
        let lq = losers_and_quantities(&g, 0, 0, 1, &coop_u, &coop_d).unwrap().unwrap();
        assert_eq!(lq.losers, vec![1]);
        assert_eq!(lq.p, rat(1));
        assert_eq!(lq.p_prime, rat(1));
        assert_eq!(lq.per_loser[0].q, rat(1));
        assert_eq!(lq.per_loser[0].a, rat(0)); // a(1, 1, -1) with theta 1/5
    }

    #[test]
    fn zero_sum_game_reduces_in_two_rounds() {
        let g = generators::sure_gain_zero_sum().unwrap();
        let trace = iterate_deletion(&g).unwrap();
        assert_eq!(trace.playable, vec![vec![1], vec![0]]); // {D} x {L}
        assert_eq!(trace.rounds(), 2);
    }

    #[test]
    fn altruism_flips_second_type_outcome() {
        // With theta = 0.6, a(1,1,-1) = 1 >= P: D is surrendered instead.
        let mut g = generators::sure_gain_zero_sum().unwrap();
        g.altruism = crate::game::Altruism::Proportional { theta: ratio(3, 5) };
        let trace = iterate_deletion(&g).unwrap();
        assert_eq!(trace.playable, vec![vec![0], vec![0]]); // {U} x {L}
    }

    #[test]
    fn dictator_reduces_to_the_altruism_offer() {
        let g = generators::dictator(rat(1), 10, 0).unwrap();
        let trace = iterate_deletion(&g).unwrap();
        assert_eq!(trace.playable[0], vec![2]); // offer a(1,10,0) = 2
        assert!(trace
            .steps
            .iter()
            .any(|s| s.kind == DeletionKind::Second && s.player == 0));
    }

    #[test]
    fn degenerate_prisoner_reduces_to_defection() {
        let g = generators::prisoner(rat(0)).unwrap();
        let trace = iterate_deletion(&g).unwrap();
        assert_eq!(trace.playable, vec![vec![1], vec![1]]);
    }

    #[test]
    fn traveler_and_punishment_games_are_untouched() {
        for g in [
            generators::traveler(2, 2, 100).unwrap(),
            generators::traveler(5, 180, 300).unwrap(),
            generators::punish_travelers().unwrap(),
        ] {
            let trace = iterate_deletion(&g).unwrap();
            assert!(trace.steps.is_empty());
        }
    }

    #[test]
    fn deletion_is_idempotent() {
        let g = generators::sure_gain_zero_sum().unwrap();
        let trace = iterate_deletion(&g).unwrap();
        let reduced = g.restrict(&trace.playable).unwrap();
        let again = iterate_deletion(&reduced).unwrap();
        assert!(again.steps.is_empty());
    }

    #[test]
    fn monotone_bounds_agree_with_dense_scan() {
        let g = generators::bertrand(2, 2, 10).unwrap();
        assert!(g.monotone_opponents);
        let fast = gain_bounds(&g, 0).unwrap();
        let mut slow = vec![(i64::MAX, i64::MIN); g.num_strategies(0)];
        for s in 0..g.num_strategies(0) {
            for o in 0..g.num_strategies(1) {
                let v = g.gain_raw(&[s, o], 0);
                slow[s].0 = slow[s].0.min(v);
                slow[s].1 = slow[s].1.max(v);
            }
        }
        assert_eq!(fast, slow);
    }
}
