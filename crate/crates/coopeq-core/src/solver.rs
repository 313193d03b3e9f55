//! End-to-end solving: strategy deletion, per-structure values, the induced
//! game of the maximizing structure, and the resulting cooperative
//! equilibria — exact (expected-gain) and perceived (cumulative prospect
//! theory) modes, plus the quantal distribution over structures.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::cpt::{self, CptParams};
use crate::deletion::{self, DeletionTrace};
use crate::equilibrium;
use crate::error::{CoopError, Result};
use crate::game::{rat, to_f64, ExplicitGame, MixedProfile, MixedStrategy, Rational};
use crate::partition::{enumerate_coalition_structures, CoalitionStructure};
use crate::valuation::{self, CoalitionValueReport, DeviationReport};

/// Cap on pure-profile scans when assembling induced games.
const INDUCED_SCAN_CAP: usize = 2_000_000;
/// Cap on the total grid size of the beliefs-equilibrium search.
const BELIEF_GRID_CAP: usize = 200_000;
/// Improvement tolerance of the beliefs-equilibrium grid test.
const BELIEF_EPS: f64 = 1e-3;
/// Tie tolerance for perceived-value structure comparison.
const CPT_TIE_TOL: f64 = 1e-9;
/// Denominator used when an irrational boundary weight is approximated.
const APPROX_DENOM: i64 = 1_000_000_000;

/// Solution mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    /// Exact expected-gain valuation.
    Eut,
    /// Cumulative-prospect-theory valuation.
    Cpt,
}

/// Diagnostic record of one structure's valuation.
#[derive(Clone)]
pub struct StructureValue {
    /// The structure.
    pub structure: CoalitionStructure,
    /// Per-player exact values; `None` when the structure was skipped.
    pub values: Option<Vec<Rational>>,
    /// Per-player perceived values (CPT mode only).
    pub cpt_values: Option<Vec<f64>>,
    /// True when the merged game's equilibrium search came back empty.
    pub skipped: bool,
    /// Whether the underlying equilibrium enumeration was complete.
    pub complete: bool,
}

/// A cooperative solution of a game.
#[derive(Clone)]
pub struct CooperativeSolution {
    /// The valuation mode used.
    pub mode: SolveMode,
    /// The structure whose induced game was solved.
    pub structure: CoalitionStructure,
    /// Per-player exact value thresholds at the chosen structure.
    pub thresholds: Vec<Rational>,
    /// Per-player perceived thresholds (CPT mode).
    pub cpt_thresholds: Option<Vec<f64>>,
    /// The cooperative equilibria, in original-game strategy indices.
    pub profiles: Vec<MixedProfile>,
    /// Whether `profiles` is known to be the full equilibrium set.
    pub complete: bool,
    /// Per player: indices into `structure_values` of the maximizing
    /// structures.
    pub maximizers: Vec<Vec<usize>>,
    /// Per-player value breakdown at the chosen structure.
    pub value_reports: Vec<CoalitionValueReport>,
    /// Values of every enumerated structure (diagnostics).
    pub structure_values: Vec<StructureValue>,
    /// The strategy-deletion history.
    pub deletion: DeletionTrace,
    /// Human-readable notes about fallbacks and approximations.
    pub diagnostics: Vec<String>,
}

/// The induced game of a value-threshold vector: the certified feasible
/// profiles and the pure strategies they exercise.
#[derive(Clone)]
pub struct InducedGame {
    /// Per-player thresholds.
    pub thresholds: Vec<Rational>,
    /// Feasible profiles generating the induced strategy sets.
    pub generators: Vec<MixedProfile>,
    /// Per player: pure strategies appearing in some generator.
    pub allowed: Vec<Vec<usize>>,
}

/// Builds the induced game for a threshold vector: pure profiles meeting
/// every threshold, feasible reference-set witnesses, the symmetric
/// boundary profile when available, and (for tiny games with no other
/// generator) a grid sample of feasible mixed profiles.
pub fn induced_game(
    game: &ExplicitGame,
    thresholds: &[Rational],
    witnesses: &[MixedProfile],
    resolution: usize,
) -> Result<InducedGame> {
    let n = game.num_players();
    let shape = game.shape();
    let mut generators: Vec<MixedProfile> = Vec::new();
    let cells = shape.iter().try_fold(1usize, |a, &s| a.checked_mul(s));
    if cells.is_some_and(|c| c <= INDUCED_SCAN_CAP) {
        crate::game::for_each_profile(&shape, |profile| {
            let ok = (0..n)
                .all(|i| Rational::from(BigInt::from(game.gain_raw(profile, i)))
                    >= thresholds[i].clone() * rat(game.scale()));
            if ok {
                generators.push(MixedProfile::pure(profile));
            }
        });
    }
    for w in witnesses {
        let ok = (0..n)
            .map(|i| game.expected_gain(w, i).map(|g| g >= thresholds[i]))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|b| b);
        if ok && !generators.contains(w) {
            generators.push(w.clone());
        }
    }
    if game.exchangeable && thresholds.windows(2).all(|w| w[0] == w[1]) {
        if let Ok((profile, _exact)) = symmetric_boundary(game, &thresholds[0]) {
            if !generators.contains(&profile) {
                generators.push(profile);
            }
        }
    }
    if generators.is_empty() && n == 2 && shape.iter().all(|&s| s <= 3) {
        // Last resort for tiny games: grid-sample mixed profiles.
        let res = resolution.clamp(2, 20);
        let grids: Vec<Vec<MixedStrategy>> =
            (0..n).map(|i| simplex_grid(shape[i], res)).collect();
        'outer: for a in &grids[0] {
            for b in &grids[1] {
                let p = MixedProfile { strategies: vec![a.clone(), b.clone()] };
                let ok = (0..n)
                    .map(|i| game.expected_gain(&p, i).map(|g| g >= thresholds[i]))
                    .collect::<Result<Vec<bool>>>()?
                    .into_iter()
                    .all(|x| x);
                if ok {
                    generators.push(p);
                    break 'outer;
                }
            }
        }
    }
    if generators.is_empty() {
        return Err(CoopError::InfeasibleThresholds {
            detail: "no profile meets every value threshold".to_string(),
        });
    }
    let mut allowed: Vec<Vec<usize>> = vec![Vec::new(); n];
    for g in &generators {
        for (i, s) in g.strategies.iter().enumerate() {
            for (idx, _) in &s.support {
                if !allowed[i].contains(idx) {
                    allowed[i].push(*idx);
                }
            }
        }
    }
    for a in allowed.iter_mut() {
        a.sort_unstable();
    }
    Ok(InducedGame { thresholds: thresholds.to_vec(), generators, allowed })
}

/// The minimal symmetric profile of an exchangeable game meeting a common
/// threshold: a pure diagonal hit when one exists, otherwise the two-point
/// mixture on the bracketing diagonal pair whose common expected gain
/// equals the threshold. The boolean reports exactness (irrational weights
/// are rounded to denominator 10^9).
pub fn symmetric_boundary(game: &ExplicitGame, v: &Rational) -> Result<(MixedProfile, bool)> {
    let k = game.num_strategies(0);
    let n = game.num_players();
    if !game.exchangeable {
        return Err(CoopError::InvalidParameter {
            detail: "the symmetric boundary method needs an exchangeable game".to_string(),
        });
    }
    let diag = |s: usize| game.gain(&vec![s; n], 0);
    // Exact diagonal hit.
    if let Some(s) = (0..k).find(|&s| diag(s) == *v) {
        return Ok((MixedProfile::pure(&vec![s; n]), true));
    }
    // Bracket the threshold on the diagonal-sorted strategies.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| diag(a).cmp(&diag(b)).then(a.cmp(&b)));
    let below = order.iter().rev().find(|&&s| diag(s) < *v).copied();
    let above = order.iter().find(|&&s| diag(s) > *v).copied();
    let Some(b) = above else {
        return Err(CoopError::InfeasibleThresholds {
            detail: "threshold exceeds every symmetric pure gain".to_string(),
        });
    };
    let Some(a) = below else {
        // Threshold is below every diagonal gain: the lowest diagonal is
        // the minimal feasible symmetric profile.
        return Ok((MixedProfile::pure(&vec![b; n]), true));
    };
    if n != 2 {
        return Err(CoopError::Capacity {
            detail: "the two-point boundary mixture is implemented for two players"
                .to_string(),
        });
    }
    // Both players put weight w on b: E(w) = A2 w^2 + A1 w + A0.
    let (gaa, gbb) = (diag(a), diag(b));
    let gab = game.gain(&[a, b], 0);
    let gba = game.gain(&[b, a], 0);
    let a2 = gaa.clone() + &gbb - &gab - &gba;
    let a1 = gab + gba - rat(2) * &gaa;
    let c = gaa - v;
    let (w, exact) = if a2.is_zero() {
        if a1.is_zero() {
            return Err(CoopError::Internal {
                detail: "degenerate boundary equation".to_string(),
            });
        }
        ((-c) / a1, true)
    } else {
        let disc = a1.clone() * &a1 - rat(4) * &a2 * &c;
        if disc.is_negative() {
            return Err(CoopError::InfeasibleThresholds {
                detail: "no symmetric boundary mixture exists on the bracketing pair"
                    .to_string(),
            });
        }
        if let Some(root) = rational_sqrt(&disc) {
            let two_a2 = rat(2) * &a2;
            let w1 = ((-a1.clone()) + &root) / &two_a2;
            let w2 = ((-a1) - &root) / two_a2;
            let zero = Rational::zero();
            let one = Rational::one();
            let mut candidates: Vec<Rational> = [w1, w2]
                .into_iter()
                .filter(|w| *w >= zero && *w <= one)
                .collect();
            candidates.sort();
            let Some(w) = candidates.into_iter().next() else {
                return Err(CoopError::InfeasibleThresholds {
                    detail: "boundary roots fall outside the unit interval".to_string(),
                });
            };
            (w, true)
        } else {
            let (fa2, fa1, fc) = (to_f64(&a2), to_f64(&a1), to_f64(&c));
            let sq = libm::sqrt(fa1 * fa1 - 4.0 * fa2 * fc);
            let r1 = (-fa1 + sq) / (2.0 * fa2);
            let r2 = (-fa1 - sq) / (2.0 * fa2);
            let mut candidates: Vec<f64> = [r1, r2]
                .into_iter()
                .filter(|w| (-1e-12..=1.0 + 1e-12).contains(w))
                .collect();
            candidates.sort_by(f64::total_cmp);
            let Some(w) = candidates.into_iter().next() else {
                return Err(CoopError::InfeasibleThresholds {
                    detail: "boundary roots fall outside the unit interval".to_string(),
                });
            };
            (approx_rational(w.clamp(0.0, 1.0)), false)
        }
    };
    if w < Rational::zero() || w > Rational::one() {
        return Err(CoopError::InfeasibleThresholds {
            detail: "boundary weight falls outside the unit interval".to_string(),
        });
    }
    let mix = MixedStrategy::from_pairs(vec![(a, Rational::one() - &w), (b, w)])?;
    Ok((MixedProfile { strategies: vec![mix; n] }, exact))
}

/// Exact square root of a non-negative rational, when it exists.
fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let nr = num_integer::Roots::sqrt(x.numer());
    let dr = num_integer::Roots::sqrt(x.denom());
    (&nr * &nr == *x.numer() && &dr * &dr == *x.denom())
        .then(|| Rational::new(nr, dr))
}

/// Rounds a float in [0, 1] to a rational with denominator 10^9.
fn approx_rational(x: f64) -> Rational {
    let num = libm::round(x * APPROX_DENOM as f64) as i64;
    Rational::new(BigInt::from(num.clamp(0, APPROX_DENOM)), BigInt::from(APPROX_DENOM))
}

/// All grid points of the probability simplex over `k` strategies with the
/// given resolution (weights are multiples of `1/resolution`).
fn simplex_grid(k: usize, resolution: usize) -> Vec<MixedStrategy> {
    let mut out = Vec::new();
    let mut weights = vec![0usize; k];
    fn rec(
        weights: &mut Vec<usize>,
        pos: usize,
        remaining: usize,
        resolution: usize,
        out: &mut Vec<MixedStrategy>,
    ) {
        if pos + 1 == weights.len() {
            weights[pos] = remaining;
            let pairs: Vec<(usize, Rational)> = weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0)
                .map(|(s, &w)| {
                    (s, Rational::new(BigInt::from(w as i64), BigInt::from(resolution as i64)))
                })
                .collect();
            out.push(MixedStrategy::from_pairs(pairs).expect("valid grid point"));
            return;
        }
        for w in 0..=remaining {
            weights[pos] = w;
            rec(weights, pos + 1, remaining - w, resolution, out);
        }
    }
    rec(&mut weights, 0, resolution, resolution, &mut out);
    out
}

/// The Nash equilibria of a game (selfish-structure equilibria of the
/// merged game machinery) and the completeness flag.
fn nash_profiles(game: &ExplicitGame) -> Result<(Vec<MixedProfile>, bool)> {
    let n = game.num_players();
    let cg = equilibrium::coalition_game(game, &CoalitionStructure::selfish(n))?;
    let set = equilibrium::equilibria(&cg)?;
    let mut profiles: Vec<MixedProfile> =
        set.profiles.iter().map(|p| p.to_profile(&cg)).collect();
    profiles.sort();
    profiles.dedup();
    Ok((profiles, set.complete))
}

/// Re-expresses a profile of a restricted game in the parent game's
/// strategy indices.
fn lift_profile(p: &MixedProfile, keep: &[Vec<usize>]) -> Result<MixedProfile> {
    let strategies = p
        .strategies
        .iter()
        .enumerate()
        .map(|(i, s)| {
            MixedStrategy::from_pairs(
                s.support.iter().map(|(idx, q)| (keep[i][*idx], q.clone())).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MixedProfile { strategies })
}

fn lift_profiles(ps: &[MixedProfile], keep: &[Vec<usize>]) -> Result<Vec<MixedProfile>> {
    ps.iter().map(|p| lift_profile(p, keep)).collect()
}

/// Per-structure analysis shared by the solving modes.
struct Analysis {
    structures: Vec<CoalitionStructure>,
    reports: Vec<Option<(DeviationReport, Vec<CoalitionValueReport>)>>,
    svals: Vec<StructureValue>,
}

fn analyze_structures(reduced: &ExplicitGame) -> Result<Analysis> {
    let n = reduced.num_players();
    let structures = enumerate_coalition_structures(n)?;
    let mut reports = Vec::with_capacity(structures.len());
    let mut svals = Vec::with_capacity(structures.len());
    for p in &structures {
        match valuation::deviation_report(reduced, p)? {
            None => {
                reports.push(None);
                svals.push(StructureValue {
                    structure: p.clone(),
                    values: None,
                    cpt_values: None,
                    skipped: true,
                    complete: false,
                });
            }
            Some(rep) => {
                let vreps: Vec<CoalitionValueReport> = (0..n)
                    .map(|i| valuation::coalition_value(reduced, &rep, i))
                    .collect::<Result<_>>()?;
                svals.push(StructureValue {
                    structure: p.clone(),
                    values: Some(vreps.iter().map(|r| r.value.clone()).collect()),
                    cpt_values: None,
                    skipped: false,
                    complete: rep.complete,
                });
                reports.push(Some((rep, vreps)));
            }
        }
    }
    if svals.iter().all(|s| s.skipped) {
        return Err(CoopError::Internal {
            detail: "no coalition structure admitted an equilibrium analysis".to_string(),
        });
    }
    Ok(Analysis { structures, reports, svals })
}

/// Per-player argmax structure indices for a per-structure value table.
fn argmax_structures<T: PartialOrd>(table: &[Option<Vec<T>>], n: usize) -> Vec<Vec<usize>>
where
    T: Clone,
{
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut best: Option<&T> = None;
        for v in table.iter().flatten() {
            if best.is_none_or(|b| v[i] > *b) {
                best = Some(&v[i]);
            }
        }
        let best = best.expect("some structure analyzed");
        out.push(
            table
                .iter()
                .enumerate()
                .filter(|(_, v)| v.as_ref().is_some_and(|v| !(v[i] < *best || v[i] > *best)))
                .map(|(idx, _)| idx)
                .collect(),
        );
    }
    out
}

/// Chooses the structure to solve: a common maximizer (preferring the
/// selfish structure on ties), else the meet of the players' first
/// maximizers with a diagnostic.
fn choose_structure(
    analysis: &Analysis,
    maximizers: &[Vec<usize>],
    diagnostics: &mut Vec<String>,
) -> usize {
    let selfish_idx = analysis
        .structures
        .iter()
        .position(|p| p.is_selfish())
        .expect("selfish structure enumerated");
    let common: Vec<usize> = maximizers
        .iter()
        .fold(None::<Vec<usize>>, |acc, m| {
            Some(match acc {
                None => m.clone(),
                Some(a) => a.into_iter().filter(|i| m.contains(i)).collect(),
            })
        })
        .unwrap_or_default();
    if common.contains(&selfish_idx) {
        return selfish_idx;
    }
    if let Some(&idx) = common.first() {
        return idx;
    }
    diagnostics.push(
        "players disagree on the maximizing structure; solving the meet of their choices"
            .to_string(),
    );
    let meet = maximizers
        .iter()
        .map(|m| analysis.structures[m[0]].clone())
        .reduce(|a, b| a.meet(&b))
        .expect("at least one player");
    let idx = analysis
        .structures
        .iter()
        .position(|p| *p == meet)
        .expect("meet is a coalition structure of the same players");
    if analysis.svals[idx].skipped {
        let fallback = if analysis.svals[selfish_idx].skipped {
            // analyze_structures guarantees at least one analyzed structure.
            analysis.svals.iter().position(|s| !s.skipped).expect("some structure analyzed")
        } else {
            selfish_idx
        };
        diagnostics.push(format!(
            "the meet structure was skipped; falling back to {}",
            analysis.structures[fallback].display()
        ));
        return fallback;
    }
    idx
}

/// Computes the exact cooperative equilibrium: deletion, per-structure
/// exact values, and a Nash equilibrium of the induced game of the
/// maximizing structure. Profiles are reported in original-game indices.
pub fn exact_cooperative_equilibrium(game: &ExplicitGame) -> Result<CooperativeSolution> {
    let trace = deletion::iterate_deletion(game)?;
    let reduced = game.restrict(&trace.playable)?;
    let analysis = analyze_structures(&reduced)?;
    let n = reduced.num_players();
    let table: Vec<Option<Vec<Rational>>> =
        analysis.svals.iter().map(|s| s.values.clone()).collect();
    let maximizers = argmax_structures(&table, n);
    let mut diagnostics = Vec::new();
    let chosen = choose_structure(&analysis, &maximizers, &mut diagnostics);
    let (rep, vreports) = analysis.reports[chosen]
        .as_ref()
        .expect("chosen structure analyzed");
    let thresholds: Vec<Rational> = vreports.iter().map(|r| r.value.clone()).collect();
    let selfish = analysis.structures[chosen].is_selfish();
    let (profiles, complete) = if selfish {
        nash_profiles(&reduced)?
    } else {
        induced_equilibrium(&reduced, &thresholds, &rep.profiles, &mut diagnostics)?
    };
    Ok(CooperativeSolution {
        mode: SolveMode::Eut,
        structure: analysis.structures[chosen].clone(),
        thresholds,
        cpt_thresholds: None,
        profiles: lift_profiles(&profiles, &trace.playable)?,
        complete,
        maximizers,
        value_reports: vreports.clone(),
        structure_values: analysis.svals,
        deletion: trace,
        diagnostics,
    })
}

/// Equilibrium of the induced game for a non-selfish maximizer: the
/// symmetric boundary profile when the game is exchangeable with equal
/// thresholds, else the Nash set of the game restricted to the induced
/// pure strategy sets.
fn induced_equilibrium(
    reduced: &ExplicitGame,
    thresholds: &[Rational],
    witnesses: &[MixedProfile],
    diagnostics: &mut Vec<String>,
) -> Result<(Vec<MixedProfile>, bool)> {
    if reduced.exchangeable && thresholds.windows(2).all(|w| w[0] == w[1]) {
        match symmetric_boundary(reduced, &thresholds[0]) {
            Ok((profile, exact)) => {
                if !exact {
                    diagnostics.push(
                        "boundary mixture weight is irrational; reported to 1e-9".to_string(),
                    );
                }
                return Ok((vec![profile], exact));
            }
            Err(CoopError::Capacity { .. }) | Err(CoopError::InfeasibleThresholds { .. }) => {
                diagnostics
                    .push("symmetric boundary unavailable; using the induced Nash set".to_string());
            }
            Err(e) => return Err(e),
        }
    }
    let ig = match induced_game(reduced, thresholds, witnesses, 10) {
        Ok(ig) => ig,
        Err(CoopError::InfeasibleThresholds { .. }) if !witnesses.is_empty() => {
            // No profile pays every player their structure value at once
            // (the values bound different worst cases). The disagreement
            // -minimizing equilibria that produced the values stand in.
            diagnostics.push(
                "structure values are jointly infeasible; reporting the valuation equilibria"
                    .to_string(),
            );
            return Ok((witnesses.to_vec(), false));
        }
        Err(e) => return Err(e),
    };
    let restricted = reduced.restrict(&ig.allowed)?;
    let (inner, complete) = nash_profiles(&restricted)?;
    if inner.is_empty() {
        diagnostics.push(
            "induced restriction has no enumerated equilibrium; reporting its generators"
                .to_string(),
        );
        return Ok((ig.generators, false));
    }
    Ok((lift_profiles(&inner, &ig.allowed)?, complete))
}

/// Computes the cooperative equilibrium under cumulative prospect theory:
/// perceived per-structure values (deviation probabilities below `floor`
/// are dropped) and an equilibrium in beliefs of the induced game. Identity
/// parameters delegate to the exact pipeline.
pub fn cooperative_equilibrium_cpt(
    game: &ExplicitGame,
    params: &CptParams,
    floor: f64,
) -> Result<CooperativeSolution> {
    params.validate()?;
    let identity = CptParams::identity();
    if params.alpha == identity.alpha
        && params.beta == identity.beta
        && params.lambda == identity.lambda
        && params.gamma == identity.gamma
        && floor == 0.0
    {
        let mut sol = exact_cooperative_equilibrium(game)?;
        sol.mode = SolveMode::Cpt;
        sol.cpt_thresholds = Some(sol.thresholds.iter().map(to_f64).collect());
        return Ok(sol);
    }
    check_cpt_caps(game)?;
    let trace = deletion::iterate_deletion(game)?;
    let reduced = game.restrict(&trace.playable)?;
    let mut analysis = analyze_structures(&reduced)?;
    let n = reduced.num_players();
    // Perceived values per structure.
    for (sv, report) in analysis.svals.iter_mut().zip(&analysis.reports) {
        if let Some((rep, vreps)) = report {
            let per_player: Vec<f64> = vreps
                .iter()
                .map(|vr| valuation::coalition_value_cpt(rep, vr, params, floor))
                .collect::<Result<_>>()?;
            sv.cpt_values = Some(per_player);
        }
    }
    // Tolerance-based argmax on the perceived values.
    let mut maximizers: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let best = analysis
            .svals
            .iter()
            .filter_map(|s| s.cpt_values.as_ref().map(|v| v[i]))
            .fold(f64::NEG_INFINITY, f64::max);
        maximizers.push(
            analysis
                .svals
                .iter()
                .enumerate()
                .filter(|(_, s)| {
                    s.cpt_values.as_ref().is_some_and(|v| v[i] >= best - CPT_TIE_TOL)
                })
                .map(|(idx, _)| idx)
                .collect(),
        );
    }
    let mut diagnostics = Vec::new();
    let chosen = choose_structure(&analysis, &maximizers, &mut diagnostics);
    let (rep, vreports) = analysis.reports[chosen].as_ref().expect("analyzed");
    let cpt_thresholds = analysis.svals[chosen].cpt_values.clone().expect("analyzed");
    let thresholds: Vec<Rational> = vreports.iter().map(|r| r.value.clone()).collect();
    let profiles = if analysis.structures[chosen].is_selfish() {
        equilibrium_in_beliefs(&reduced, Some(params), None)?
    } else {
        // Induced restriction under the perceived valuation of pure gains.
        let shape = reduced.shape();
        let mut allowed: Vec<Vec<usize>> = vec![Vec::new(); n];
        crate::game::for_each_profile(&shape, |profile| {
            let ok = (0..n).all(|i| {
                cpt::value_fn(&reduced.gain(profile, i), params) >= cpt_thresholds[i] - CPT_TIE_TOL
            });
            if ok {
                for (i, &s) in profile.iter().enumerate() {
                    if !allowed[i].contains(&s) {
                        allowed[i].push(s);
                    }
                }
            }
        });
        for w in &rep.profiles {
            let mut vals = Vec::with_capacity(n);
            for i in 0..n {
                vals.push(cpt::cpt_mixed_extension(&reduced, w, i, params)?);
            }
            if vals.iter().zip(&cpt_thresholds) .all(|(v, t)| *v >= t - CPT_TIE_TOL) {
                for (i, s) in w.strategies.iter().enumerate() {
                    for (idx, _) in &s.support {
                        if !allowed[i].contains(idx) {
                            allowed[i].push(*idx);
                        }
                    }
                }
            }
        }
        if allowed.iter().any(|a| a.is_empty()) {
            return Err(CoopError::InfeasibleThresholds {
                detail: "no profile meets every perceived threshold".to_string(),
            });
        }
        for a in allowed.iter_mut() {
            a.sort_unstable();
        }
        let restricted = reduced.restrict(&allowed)?;
        let inner = equilibrium_in_beliefs(&restricted, Some(params), None)?;
        lift_profiles(&inner, &allowed)?
    };
    diagnostics.push("beliefs equilibria located on a finite grid".to_string());
    Ok(CooperativeSolution {
        mode: SolveMode::Cpt,
        structure: analysis.structures[chosen].clone(),
        thresholds,
        cpt_thresholds: Some(cpt_thresholds),
        profiles: lift_profiles(&profiles, &trace.playable)?,
        complete: false,
        maximizers,
        value_reports: vreports.clone(),
        structure_values: analysis.svals,
        deletion: trace,
        diagnostics,
    })
}

fn check_cpt_caps(game: &ExplicitGame) -> Result<()> {
    let n = game.num_players();
    if n > 3 || (0..n).any(|i| game.num_strategies(i) > 6) {
        return Err(CoopError::CptUnavailable {
            detail: format!(
                "perceived mode supports up to 3 players with 6 strategies each; \
                 this game has {n} players"
            ),
        });
    }
    Ok(())
}

/// Equilibria in beliefs. Under the linear (expected-gain) valuation —
/// `params` absent — the convexified game coincides with the original one
/// and the exact Nash set is returned. Under a prospect-theory valuation
/// the profiles of a simplex grid survive when no player can improve her
/// prospect value by more than a small tolerance through any grid mixture
/// of her own strategies.
pub fn equilibrium_in_beliefs(
    game: &ExplicitGame,
    params: Option<&CptParams>,
    resolution: Option<usize>,
) -> Result<Vec<MixedProfile>> {
    let Some(params) = params else {
        return Ok(nash_profiles(game)?.0);
    };
    check_cpt_caps(game)?;
    let n = game.num_players();
    let max_strats = (0..n).map(|i| game.num_strategies(i)).max().unwrap_or(1);
    let mut res = resolution.unwrap_or(match max_strats {
        0..=2 => 100,
        3 => 40,
        _ => 20,
    });
    // Shrink the grid until the profile count fits the cap.
    let grid_size = |res: usize| -> usize {
        (0..n)
            .map(|i| simplex_grid_len(game.num_strategies(i), res))
            .try_fold(1usize, |a, b| a.checked_mul(b))
            .unwrap_or(usize::MAX)
    };
    while res > 4 && grid_size(res) > BELIEF_GRID_CAP {
        res /= 2;
    }
    let grids: Vec<Vec<MixedStrategy>> =
        (0..n).map(|i| simplex_grid(game.num_strategies(i), res)).collect();
    let mut out = Vec::new();
    let mut indices = vec![0usize; n];
    loop {
        let profile = MixedProfile {
            strategies: indices.iter().enumerate().map(|(i, &g)| grids[i][g].clone()).collect(),
        };
        let mut ok = true;
        'players: for i in 0..n {
            let base = cpt::cpt_mixed_extension(game, &profile, i, params)?;
            for alt in &grids[i] {
                let dev = profile.with_strategy(i, alt.clone());
                if cpt::cpt_mixed_extension(game, &dev, i, params)? > base + BELIEF_EPS {
                    ok = false;
                    break 'players;
                }
            }
        }
        if ok {
            out.push(profile);
        }
        let mut p = n;
        loop {
            if p == 0 {
                return Ok(out);
            }
            p -= 1;
            indices[p] += 1;
            if indices[p] < grids[p].len() {
                break;
            }
            indices[p] = 0;
        }
    }
}

/// Number of simplex grid points over `k` strategies at a resolution.
fn simplex_grid_len(k: usize, res: usize) -> usize {
    // C(res + k - 1, k - 1)
    let mut num = 1usize;
    for j in 1..k {
        num = num.saturating_mul(res + j) / j;
    }
    num
}

/// The quantal distribution over coalition structures: each player adopts
/// structure `p` with probability proportional to `exp(lambda * v_i(p))`.
/// `lambda = 0` yields the uniform distribution; an infinite `lambda`
/// concentrates on the maximizers.
pub fn quantal_coalition_distribution(
    game: &ExplicitGame,
    lambda: f64,
) -> Result<Vec<Vec<(CoalitionStructure, f64)>>> {
    if lambda < 0.0 || lambda.is_nan() {
        return Err(CoopError::InvalidParameter {
            detail: format!("quantal parameter must be a nonnegative number, got {lambda}"),
        });
    }
    let trace = deletion::iterate_deletion(game)?;
    let reduced = game.restrict(&trace.playable)?;
    let analysis = analyze_structures(&reduced)?;
    let n = reduced.num_players();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let entries: Vec<(CoalitionStructure, f64)> = analysis
            .svals
            .iter()
            .filter(|s| !s.skipped)
            .map(|s| {
                (s.structure.clone(), to_f64(&s.values.as_ref().expect("not skipped")[i]))
            })
            .collect();
        let best = entries.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = if lambda.is_infinite() {
            entries.iter().map(|(_, v)| f64::from(u8::from(*v >= best))).collect()
        } else {
            entries.iter().map(|(_, v)| libm::exp(lambda * (v - best))).collect()
        };
        let total: f64 = weights.iter().sum();
        out.push(
            entries
                .into_iter()
                .zip(weights)
                .map(|((p, _), w)| (p, w / total))
                .collect(),
        );
    }
    Ok(out)
}
