//! Acceptance battery: every headline result the solver is expected to
//! reproduce, one test (and one pass/fail line) per claim, with runtime
//! budgets enforced.

use std::time::{Duration, Instant};

use coopeq_core::cpt::{decision_weights, weight_fn, Prospect};
use coopeq_core::deletion::iterate_deletion;
use coopeq_core::game::{rat, ratio, to_f64};
use coopeq_core::partition::enumerate_coalition_structures;
use coopeq_core::solver::exact_cooperative_equilibrium;
use coopeq_core::valuation::{coalition_value, coalition_value_cpt, deviation_report};
use coopeq_core::{generators, CoalitionStructure, CptParams, ExplicitGame, MixedProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn timed<T>(budget: Duration, label: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    assert!(
        elapsed <= budget,
        "{label} took {:.2}s, over the {:.0}s budget",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    out
}

fn grand_report(game: &ExplicitGame) -> coopeq_core::valuation::DeviationReport {
    deviation_report(game, &CoalitionStructure::grand(game.num_players()))
        .unwrap()
        .expect("acceptable equilibrium exists")
}

fn pure_profile(profiles: &[MixedProfile]) -> Option<Vec<usize>> {
    (profiles.len() == 1).then(|| profiles[0].as_pure()).flatten()
}

/// The worked games shared by the property checks below.
fn example_games() -> Vec<(&'static str, ExplicitGame)> {
    vec![
        ("traveler-5", generators::traveler(5, 180, 300).unwrap()),
        ("prisoner-4", generators::prisoner(rat(4)).unwrap()),
        ("prisoner-scaled", generators::prisoner_from_payoffs(20, 15, 5, 0, 100).unwrap()),
        ("bargaining", generators::bargaining(100).unwrap()),
        ("ultimatum", generators::ultimatum(10, 10).unwrap()),
        ("public-goods", generators::public_goods(2, ratio(4, 5), 10, 10).unwrap()),
        ("bertrand-2", generators::bertrand(2, 2, 100).unwrap()),
        ("dictator", generators::dictator(rat(1), 10, 0).unwrap()),
        ("coordination", generators::halpern_coordination(10, 9).unwrap()),
        ("sure-gain-zero-sum", generators::sure_gain_zero_sum().unwrap()),
        ("strict-prisoner", generators::strict_prisoner().unwrap()),
        ("matching-pennies", generators::matching_pennies().unwrap()),
        ("asym-matching-pennies", generators::asym_matching_pennies().unwrap()),
        ("battle-of-sexes", generators::battle_of_sexes().unwrap()),
    ]
}

#[test]
fn traveler_bonus_five_full_cooperation_numbers() {
    timed(Duration::from_secs(1), "traveler bonus 5", || {
        let g = generators::traveler(5, 180, 300).unwrap();
        let r = grand_report(&g);
        assert_eq!(r.incentives, vec![rat(4), rat(4)]);
        assert_eq!(r.risks, vec![rat(7), rat(7)]);
        assert_eq!(r.taus, vec![ratio(4, 11), ratio(4, 11)]);
        let v = coalition_value(&g, &r, 0).unwrap();
        assert_eq!(v.value, ratio(3260, 11));
        let dev = v.events.iter().find(|ev| ev.subset == vec![1]).unwrap();
        assert_eq!(dev.e, rat(290));
    });
}

#[test]
fn traveler_bonus_two_full_cooperation_value() {
    timed(Duration::from_secs(1), "traveler bonus 2", || {
        let g = generators::traveler(2, 2, 100).unwrap();
        let v = coalition_value(&g, &grand_report(&g), 0).unwrap();
        assert_eq!(v.value, ratio(496, 5)); // 99.2
    });
}

#[test]
fn traveler_large_bonus_prefers_the_nash_point() {
    timed(Duration::from_secs(1), "traveler bonus 180", || {
        let g = generators::traveler(180, 180, 300).unwrap();
        let sol = exact_cooperative_equilibrium(&g).unwrap();
        assert!(sol.structure.is_selfish());
        assert_eq!(sol.thresholds, vec![rat(180), rat(180)]);
        let grand = sol.structure_values.iter().find(|s| s.structure.is_grand()).unwrap();
        assert!(grand.values.as_ref().unwrap()[0] < rat(180));
        assert_eq!(pure_profile(&sol.profiles), Some(vec![0, 0])); // claims (180, 180)
    });
}

#[test]
fn prisoner_family_closed_form_solutions() {
    timed(Duration::from_secs(1), "prisoner family", || {
        for mu_num in [0i64, 1, 2] {
            // mu in {0, 1/2, 1}: mutual defection.
            let g = generators::prisoner(ratio(mu_num, 2)).unwrap();
            let sol = exact_cooperative_equilibrium(&g).unwrap();
            assert_eq!(pure_profile(&sol.profiles), Some(vec![1, 1]), "mu = {mu_num}/2");
        }
        for mu_num in [2i64, 4, 10] {
            // mu > 1: cooperate with probability (mu - 1) / mu, exactly.
            let g = generators::prisoner(rat(mu_num)).unwrap();
            let sol = exact_cooperative_equilibrium(&g).unwrap();
            assert!(sol.structure.is_grand(), "mu = {mu_num}");
            assert_eq!(
                sol.profiles[0].strategies[0].prob(0),
                ratio(mu_num - 1, mu_num),
                "mu = {mu_num}"
            );
        }
    });
}

#[test]
fn scaled_prisoner_values_and_half_mixture() {
    timed(Duration::from_secs(1), "scaled prisoner", || {
        let g = generators::prisoner_from_payoffs(20, 15, 5, 0, 100).unwrap();
        let sol = exact_cooperative_equilibrium(&g).unwrap();
        assert_eq!(sol.thresholds, vec![ratio(1, 10), ratio(1, 10)]); // 0.10
        let selfish = sol.structure_values.iter().find(|s| s.structure.is_selfish()).unwrap();
        assert_eq!(selfish.values.as_ref().unwrap()[0], ratio(1, 20)); // 0.05
        assert_eq!(sol.profiles[0].strategies[0].prob(0), ratio(1, 2));
    });
}

#[test]
fn price_competition_values_for_two_and_four_sellers() {
    timed(Duration::from_secs(5), "price competition", || {
        let g2 = generators::bertrand(2, 2, 100).unwrap();
        let v2 = coalition_value(&g2, &grand_report(&g2), 0).unwrap();
        assert_eq!(v2.value, ratio(2500, 99));
        let g4 = generators::bertrand(4, 2, 100).unwrap();
        let v4 = coalition_value(&g4, &grand_report(&g4), 0).unwrap();
        assert_eq!(v4.value, ratio(6_250_000, 970_299)); // 50 * (50/99)^3
    });
}

#[test]
fn public_goods_values_and_crossover() {
    timed(Duration::from_secs(5), "public goods", || {
        // Cooperative value (3a - 1) * y across the return rates.
        for (num, den) in [(1i64, 2i64), (2, 3), (4, 5), (19, 20)] {
            let alpha = ratio(num, den);
            let g = generators::public_goods(2, alpha.clone(), 60, 20).unwrap();
            let v = coalition_value(&g, &grand_report(&g), 0).unwrap();
            assert_eq!(v.value, (rat(3) * &alpha - rat(1)) * rat(60), "alpha = {num}/{den}");
        }
        // At alpha = 2/3 the cooperative and selfish values tie.
        let g = generators::public_goods(2, ratio(2, 3), 3, 3).unwrap();
        let sol = exact_cooperative_equilibrium(&g).unwrap();
        let grand = sol.structure_values.iter().find(|s| s.structure.is_grand()).unwrap();
        let selfish = sol.structure_values.iter().find(|s| s.structure.is_selfish()).unwrap();
        assert_eq!(grand.values, selfish.values);
        // On a percent grid at alpha = 0.8 contributions mix on {0.66, 0.67}
        // with mean exactly 2/3.
        let g = generators::public_goods(2, ratio(4, 5), 1, 100).unwrap();
        let sol = exact_cooperative_equilibrium(&g).unwrap();
        let m = &sol.profiles[0].strategies[0];
        assert_eq!(m.prob(66), ratio(1, 3));
        assert_eq!(m.prob(67), ratio(2, 3));
        let mean = ratio(66, 100) * m.prob(66) + ratio(67, 100) * m.prob(67);
        assert_eq!(mean, ratio(2, 3));
    });
}

#[test]
fn bargaining_reaches_the_even_split() {
    timed(Duration::from_secs(10), "bargaining", || {
        let g = generators::bargaining(100).unwrap();
        let sol = exact_cooperative_equilibrium(&g).unwrap();
        assert!(sol.structure.is_grand());
        assert_eq!(sol.thresholds, vec![rat(50), rat(50)]);
        let selfish = sol.structure_values.iter().find(|s| s.structure.is_selfish()).unwrap();
        assert_eq!(selfish.values.as_ref().unwrap()[0], rat(0));
        assert_eq!(pure_profile(&sol.profiles), Some(vec![50, 50]));
    });
}

#[test]
fn ultimatum_responder_values() {
    timed(Duration::from_secs(2), "ultimatum", || {
        let g = generators::ultimatum(10, 10).unwrap();
        let r = grand_report(&g);
        assert_eq!(coalition_value(&g, &r, 1).unwrap().value, ratio(5, 2));
        // Normalized to a unit pie.
        let g = generators::ultimatum(1, 10).unwrap();
        let r = grand_report(&g);
        assert_eq!(coalition_value(&g, &r, 0).unwrap().value, ratio(1, 2));
        assert_eq!(coalition_value(&g, &r, 1).unwrap().value, ratio(1, 4));
    });
}

#[test]
fn iterated_deletion_depth_and_solution_invariance() {
    timed(Duration::from_secs(5), "iterated deletion", || {
        // The sure-gain zero-sum game needs a second round to finish.
        let g = generators::sure_gain_zero_sum().unwrap();
        let trace = iterate_deletion(&g).unwrap();
        assert_eq!(trace.rounds(), 2);
        assert_eq!(trace.playable, vec![vec![1], vec![0]]); // {D} x {L}
        // Adding a removable punish action leaves the solution unchanged.
        let plain =
            exact_cooperative_equilibrium(&generators::traveler(2, 2, 100).unwrap()).unwrap();
        let punish =
            exact_cooperative_equilibrium(&generators::punish_travelers().unwrap()).unwrap();
        assert_eq!(plain.thresholds, punish.thresholds);
        assert_eq!(plain.profiles, punish.profiles);
    });
}

#[test]
fn riskless_deviation_forces_full_weight() {
    timed(Duration::from_secs(1), "riskless deviation", || {
        let g = generators::asym_matching_pennies().unwrap();
        let r = grand_report(&g);
        assert!(r.taus.contains(&rat(1))); // zero risk means certain deviation
        assert_eq!(coalition_value(&g, &r, 0).unwrap().value, rat(40));
        assert_eq!(coalition_value(&g, &r, 1).unwrap().value, rat(40));
    });
}

#[test]
fn property_suite() {
    timed(Duration::from_secs(120), "property suite", || {
        identity_prospect_valuation_matches_exact_values();
        decision_weights_telescope();
        random_small_games_have_solutions();
        deletion_is_idempotent_on_the_examples();
        event_weights_sum_to_one_exactly();
    });
}

/// With identity transforms the prospect-theoretic value of every structure
/// equals the exact expected value, to 1e-9.
fn identity_prospect_valuation_matches_exact_values() {
    let identity = CptParams::identity();
    for (name, g) in example_games() {
        for s in enumerate_coalition_structures(g.num_players()).unwrap() {
            let Some(report) = deviation_report(&g, &s).unwrap() else { continue };
            for i in 0..g.num_players() {
                let v = coalition_value(&g, &report, i).unwrap();
                let v_cpt = coalition_value_cpt(&report, &v, &identity, 0.0).unwrap();
                assert!(
                    (v_cpt - to_f64(&v.value)).abs() <= 1e-9,
                    "{name}, {}, player {i}: {v_cpt} vs {}",
                    s.display(),
                    to_f64(&v.value)
                );
            }
        }
    }
}

/// Decision weights over gains telescope to the weighted probability of
/// gaining, and symmetrically for losses, to 1e-12.
fn decision_weights_telescope() {
    let params = CptParams::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        // Probabilities are multiples of 1/64, so partial sums are exact in
        // floating point and the comparison isolates the telescoping itself
        // (the weighting function has unbounded slope at 0 and 1).
        let k = rng.gen_range(2..=6);
        let mut parts = vec![1u32; k];
        for _ in 0..(64 - k as u32) {
            let at = rng.gen_range(0..k);
            parts[at] += 1;
        }
        let pairs: Vec<(f64, f64)> = parts
            .iter()
            .map(|&p| (rng.gen_range(-50i64..=50) as f64, f64::from(p) / 64.0))
            .collect();
        let prospect = Prospect::new(pairs).unwrap();
        let weights = decision_weights(&prospect, &params).unwrap();
        let gain_p: f64 =
            prospect.outcomes.iter().filter(|(x, _)| *x > 0.0).map(|(_, p)| p).sum();
        let loss_p: f64 =
            prospect.outcomes.iter().filter(|(x, _)| *x < 0.0).map(|(_, p)| p).sum();
        let gain_w: f64 = prospect
            .outcomes
            .iter()
            .zip(&weights)
            .filter(|((x, _), _)| *x > 0.0)
            .map(|(_, w)| w)
            .sum();
        let loss_w: f64 = prospect
            .outcomes
            .iter()
            .zip(&weights)
            .filter(|((x, _), _)| *x < 0.0)
            .map(|(_, w)| w)
            .sum();
        assert!((gain_w - weight_fn(gain_p.min(1.0), &params).unwrap()).abs() <= 1e-12);
        assert!((loss_w - weight_fn(loss_p.min(1.0), &params).unwrap()).abs() <= 1e-12);
    }
}

/// Every random small game has a solution: the solver returns a structure
/// choice and a nonempty profile set.
fn random_small_games_have_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(20260824);
    for case in 0..200 {
        let n = rng.gen_range(2..=3);
        let shape: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=4)).collect();
        let labels: Vec<Vec<String>> = shape
            .iter()
            .map(|&k| (0..k).map(|s| format!("s{s}")).collect())
            .collect();
        let cells: usize = shape.iter().product();
        let tables: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..cells).map(|_| rng.gen_range(-20..=20)).collect())
            .collect();
        let g = ExplicitGame::from_tables(labels, tables, 1).unwrap();
        let sol = exact_cooperative_equilibrium(&g)
            .unwrap_or_else(|e| panic!("random game {case}: {e}"));
        assert!(!sol.profiles.is_empty(), "random game {case} has no equilibrium");
    }
}

/// Re-running deletion on an already reduced game removes nothing.
fn deletion_is_idempotent_on_the_examples() {
    for (name, g) in example_games() {
        let trace = iterate_deletion(&g).unwrap();
        let reduced = g.restrict(&trace.playable).unwrap();
        let again = iterate_deletion(&reduced).unwrap();
        assert!(again.steps.is_empty(), "{name} is not a deletion fixed point");
    }
}

/// The event weights in every per-player value report sum to one, exactly.
fn event_weights_sum_to_one_exactly() {
    for (name, g) in example_games() {
        for s in enumerate_coalition_structures(g.num_players()).unwrap() {
            let Some(report) = deviation_report(&g, &s).unwrap() else { continue };
            for i in 0..g.num_players() {
                let v = coalition_value(&g, &report, i).unwrap();
                let total: coopeq_core::Rational =
                    v.events.iter().map(|ev| ev.tau.clone()).sum();
                assert_eq!(total, rat(1), "{name}, {}, player {i}", s.display());
            }
        }
    }
}
