//! The `repro` subcommand: a fixed battery of solved cases with frozen
//! expected numbers. Cases run in parallel (bounded by `COOPEQ_THREADS`)
//! and report in a fixed canonical order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use anyhow::Result;
use coopeq_core::game::{rat, ratio, to_f64};
use coopeq_core::solver::exact_cooperative_equilibrium;
use coopeq_core::valuation::{coalition_value, deviation_report, DeviationReport};
use coopeq_core::{generators, CoalitionStructure, ExplicitGame, MixedProfile, Rational};
use serde_json::json;

pub struct ReproCase {
    pub id: &'static str,
    pub description: &'static str,
    run: fn() -> Result<Vec<String>>,
}

struct CaseOutcome {
    id: &'static str,
    description: &'static str,
    mismatches: Vec<String>,
    error: Option<String>,
    runtime: Duration,
}

fn check<T: PartialEq + std::fmt::Debug>(
    out: &mut Vec<String>,
    label: &str,
    actual: &T,
    expected: &T,
) {
    if actual != expected {
        out.push(format!("{label}: expected {expected:?}, got {actual:?}"));
    }
}

fn check_rat(out: &mut Vec<String>, label: &str, actual: &Rational, expected: &Rational) {
    if actual != expected {
        out.push(format!(
            "{label}: expected {expected} (~{:.6}), got {actual} (~{:.6})",
            to_f64(expected),
            to_f64(actual)
        ));
    }
}

fn grand_report(game: &ExplicitGame) -> Result<DeviationReport> {
    deviation_report(game, &CoalitionStructure::grand(game.num_players()))?
        .ok_or_else(|| anyhow::anyhow!("grand structure has no acceptable equilibrium"))
}

fn pure_profile(profiles: &[MixedProfile]) -> Option<Vec<usize>> {
    (profiles.len() == 1).then(|| profiles[0].as_pure()).flatten()
}

fn traveler_b5_value() -> Result<Vec<String>> {
    let g = generators::traveler(5, 180, 300)?;
    let r = grand_report(&g)?;
    let mut out = Vec::new();
    check_rat(&mut out, "deviation incentive", &r.incentives[0], &rat(4));
    check_rat(&mut out, "deviation risk", &r.risks[0], &rat(7));
    check_rat(&mut out, "deviation probability", &r.taus[0], &ratio(4, 11));
    let v = coalition_value(&g, &r, 0)?;
    check_rat(&mut out, "full-cooperation value", &v.value, &ratio(3260, 11));
    if let Some(ev) = v.events.iter().find(|ev| ev.subset == vec![1]) {
        check_rat(&mut out, "gain when the other deviates", &ev.e, &rat(290));
    } else {
        out.push("missing the single-deviator event".to_string());
    }
    Ok(out)
}

fn traveler_b2_value() -> Result<Vec<String>> {
    let g = generators::traveler(2, 2, 100)?;
    let r = grand_report(&g)?;
    let mut out = Vec::new();
    check_rat(&mut out, "deviation probability", &r.taus[0], &ratio(1, 5));
    let v = coalition_value(&g, &r, 0)?;
    check_rat(&mut out, "full-cooperation value", &v.value, &ratio(496, 5));
    Ok(out)
}

fn traveler_b180_ce() -> Result<Vec<String>> {
    let g = generators::traveler(180, 180, 300)?;
    let sol = exact_cooperative_equilibrium(&g)?;
    let mut out = Vec::new();
    check(&mut out, "selfish structure chosen", &sol.structure.is_selfish(), &true);
    check(&mut out, "equilibrium claims", &pure_profile(&sol.profiles), &Some(vec![0, 0]));
    let grand = sol.structure_values.iter().find(|s| s.structure.is_grand());
    match grand.and_then(|s| s.values.as_ref()) {
        Some(vs) => check(&mut out, "cooperation is strictly worse", &(vs[0] < rat(180)), &true),
        None => out.push("missing the full-cooperation value".to_string()),
    }
    Ok(out)
}

fn prisoner_family() -> Result<Vec<String>> {
    let mut out = Vec::new();
    for mu_num in [0i64, 1, 2] {
        let g = generators::prisoner(ratio(mu_num, 2))?;
        let sol = exact_cooperative_equilibrium(&g)?;
        check(
            &mut out,
            &format!("mu = {mu_num}/2 defects"),
            &pure_profile(&sol.profiles),
            &Some(vec![1, 1]),
        );
    }
    for mu_num in [2i64, 4, 10] {
        let g = generators::prisoner(rat(mu_num))?;
        let sol = exact_cooperative_equilibrium(&g)?;
        check(&mut out, &format!("mu = {mu_num} cooperates"), &sol.structure.is_grand(), &true);
        check_rat(
            &mut out,
            &format!("mu = {mu_num} cooperation weight"),
            &sol.profiles[0].strategies[0].prob(0),
            &ratio(mu_num - 1, mu_num),
        );
    }
    Ok(out)
}

fn dejr_prisoner() -> Result<Vec<String>> {
    let g = generators::prisoner_from_payoffs(20, 15, 5, 0, 100)?;
    let sol = exact_cooperative_equilibrium(&g)?;
    let mut out = Vec::new();
    check_rat(&mut out, "full-cooperation value", &sol.thresholds[0], &ratio(1, 10));
    match sol
        .structure_values
        .iter()
        .find(|s| s.structure.is_selfish())
        .and_then(|s| s.values.as_ref())
    {
        Some(vs) => check_rat(&mut out, "selfish value", &vs[0], &ratio(1, 20)),
        None => out.push("missing the selfish value".to_string()),
    }
    check_rat(
        &mut out,
        "cooperation weight",
        &sol.profiles[0].strategies[0].prob(0),
        &ratio(1, 2),
    );
    Ok(out)
}

fn bertrand_n2_value() -> Result<Vec<String>> {
    let g = generators::bertrand(2, 2, 100)?;
    let r = grand_report(&g)?;
    let mut out = Vec::new();
    check_rat(&mut out, "deviation probability", &r.taus[0], &ratio(49, 99));
    let v = coalition_value(&g, &r, 0)?;
    check_rat(&mut out, "full-cooperation value", &v.value, &ratio(2500, 99));
    Ok(out)
}

fn bertrand_n4_value() -> Result<Vec<String>> {
    let g = generators::bertrand(4, 2, 100)?;
    let r = grand_report(&g)?;
    let v = coalition_value(&g, &r, 0)?;
    let mut out = Vec::new();
    // 50 * (50/99)^3: the split survives only if all three others hold.
    check_rat(&mut out, "full-cooperation value", &v.value, &ratio(6_250_000, 970_299));
    Ok(out)
}

fn public_goods_value() -> Result<Vec<String>> {
    let mut out = Vec::new();
    // Cooperative value (3a - 1) * y against the selfish value y.
    for (num, den) in [(1i64, 2i64), (2, 3), (4, 5), (19, 20)] {
        let alpha = ratio(num, den);
        let y = 60; // divisible by all the denominators above
        let g = generators::public_goods(2, alpha.clone(), y, 20)?;
        let r = grand_report(&g)?;
        let v = coalition_value(&g, &r, 0)?;
        let expected = (rat(3) * &alpha - rat(1)) * rat(y);
        check_rat(&mut out, &format!("value at alpha = {num}/{den}"), &v.value, &expected);
    }
    // Crossover: at alpha = 2/3 the two values tie and the solver stays selfish.
    let g = generators::public_goods(2, ratio(2, 3), 3, 3)?;
    let sol = exact_cooperative_equilibrium(&g)?;
    check(&mut out, "crossover prefers the selfish set", &sol.structure.is_selfish(), &true);
    Ok(out)
}

fn public_goods_fine_grid() -> Result<Vec<String>> {
    let g = generators::public_goods(2, ratio(4, 5), 1, 100)?;
    let sol = exact_cooperative_equilibrium(&g)?;
    let mut out = Vec::new();
    check(&mut out, "full cooperation chosen", &sol.structure.is_grand(), &true);
    check_rat(&mut out, "cooperative value", &sol.thresholds[0], &ratio(7, 5));
    let m = &sol.profiles[0].strategies[0];
    check_rat(&mut out, "weight on 0.66", &m.prob(66), &ratio(1, 3));
    check_rat(&mut out, "weight on 0.67", &m.prob(67), &ratio(2, 3));
    let mean = ratio(66, 100) * ratio(1, 3) + ratio(67, 100) * ratio(2, 3);
    check_rat(&mut out, "mean contribution", &mean, &ratio(2, 3));
    Ok(out)
}

fn bargaining_ce() -> Result<Vec<String>> {
    let g = generators::bargaining(100)?;
    let sol = exact_cooperative_equilibrium(&g)?;
    let mut out = Vec::new();
    check(&mut out, "full cooperation chosen", &sol.structure.is_grand(), &true);
    check_rat(&mut out, "cooperative value", &sol.thresholds[0], &rat(50));
    check(&mut out, "even split", &pure_profile(&sol.profiles), &Some(vec![50, 50]));
    match sol
        .structure_values
        .iter()
        .find(|s| s.structure.is_selfish())
        .and_then(|s| s.values.as_ref())
    {
        Some(vs) => check_rat(&mut out, "selfish value", &vs[0], &rat(0)),
        None => out.push("missing the selfish value".to_string()),
    }
    Ok(out)
}

fn ultimatum_value() -> Result<Vec<String>> {
    let mut out = Vec::new();
    let g = generators::ultimatum(10, 10)?;
    let r = grand_report(&g)?;
    check_rat(&mut out, "proposer deviation probability", &r.taus[0], &ratio(1, 2));
    check_rat(&mut out, "responder deviation probability", &r.taus[1], &rat(0));
    check_rat(&mut out, "proposer value", &coalition_value(&g, &r, 0)?.value, &rat(5));
    check_rat(&mut out, "responder value", &coalition_value(&g, &r, 1)?.value, &ratio(5, 2));
    // Normalized to a unit pie the values scale linearly.
    let g = generators::ultimatum(1, 10)?;
    let r = grand_report(&g)?;
    check_rat(&mut out, "unit-pie proposer value", &coalition_value(&g, &r, 0)?.value, &ratio(1, 2));
    check_rat(
        &mut out,
        "unit-pie responder value",
        &coalition_value(&g, &r, 1)?.value,
        &ratio(1, 4),
    );
    Ok(out)
}

fn deletion_zero_sum() -> Result<Vec<String>> {
    let g = generators::sure_gain_zero_sum()?;
    let trace = coopeq_core::deletion::iterate_deletion(&g)?;
    let mut out = Vec::new();
    check(&mut out, "deletion rounds", &trace.rounds(), &2usize);
    check(&mut out, "surviving strategies", &trace.playable, &vec![vec![1], vec![0]]);
    Ok(out)
}

fn dictator_reduction() -> Result<Vec<String>> {
    let g = generators::dictator(rat(1), 10, 0)?;
    let trace = coopeq_core::deletion::iterate_deletion(&g)?;
    let mut out = Vec::new();
    // theta = 1/5 of the endowment 10 is surrendered.
    check(&mut out, "surviving offer", &trace.playable[0], &vec![2usize]);
    Ok(out)
}

fn punish_travelers_ce() -> Result<Vec<String>> {
    let plain = exact_cooperative_equilibrium(&generators::traveler(2, 2, 100)?)?;
    let punish = exact_cooperative_equilibrium(&generators::punish_travelers()?)?;
    let mut out = Vec::new();
    check(&mut out, "values agree", &punish.thresholds, &plain.thresholds);
    check(&mut out, "equilibria agree", &punish.profiles, &plain.profiles);
    Ok(out)
}

fn asym_matching_pennies_value() -> Result<Vec<String>> {
    let g = generators::asym_matching_pennies()?;
    let r = grand_report(&g)?;
    let mut out = Vec::new();
    check(&mut out, "a riskless deviation exists", &r.taus.contains(&rat(1)), &true);
    check_rat(&mut out, "row value", &coalition_value(&g, &r, 0)?.value, &rat(40));
    check_rat(&mut out, "column value", &coalition_value(&g, &r, 1)?.value, &rat(40));
    let sol = exact_cooperative_equilibrium(&g)?;
    check(&mut out, "selfish structure chosen", &sol.structure.is_selfish(), &true);
    check_rat(&mut out, "row mixture", &sol.profiles[0].strategies[0].prob(0), &ratio(1, 2));
    check_rat(&mut out, "column mixture", &sol.profiles[0].strategies[1].prob(0), &ratio(1, 8));
    Ok(out)
}

fn coordination_nash() -> Result<Vec<String>> {
    let g = generators::halpern_coordination(10, 9)?;
    let sol = exact_cooperative_equilibrium(&g)?;
    let mut out = Vec::new();
    check(&mut out, "selfish structure chosen", &sol.structure.is_selfish(), &true);
    for s in 0..3usize {
        check(
            &mut out,
            &format!("pure coordination point {s} survives"),
            &sol.profiles.contains(&MixedProfile::pure(&[s, s])),
            &true,
        );
    }
    Ok(out)
}

pub fn cases() -> Vec<ReproCase> {
    vec![
        ReproCase {
            id: "traveler-b5-value",
            description: "traveler's dilemma, bonus 5 on 180..300: value 3260/11",
            run: traveler_b5_value,
        },
        ReproCase {
            id: "traveler-b2-value",
            description: "traveler's dilemma, bonus 2 on 2..100: value 496/5",
            run: traveler_b2_value,
        },
        ReproCase {
            id: "traveler-b180-ce",
            description: "traveler's dilemma, bonus 180: cooperation collapses to (180, 180)",
            run: traveler_b180_ce,
        },
        ReproCase {
            id: "prisoner-family",
            description: "parametrized prisoner's dilemma: closed-form cooperation weights",
            run: prisoner_family,
        },
        ReproCase {
            id: "dejr-prisoner",
            description: "prisoner's dilemma 20/15/5/0 at scale 100: half-half mixture",
            run: dejr_prisoner,
        },
        ReproCase {
            id: "bertrand-n2-value",
            description: "two-seller price competition on 2..100: value 2500/99",
            run: bertrand_n2_value,
        },
        ReproCase {
            id: "bertrand-n4-value",
            description: "four-seller price competition on 2..100: value 50*(50/99)^3",
            run: bertrand_n4_value,
        },
        ReproCase {
            id: "public-goods-value",
            description: "two-player public goods: cooperative value (3a-1)y, crossover at 2/3",
            run: public_goods_value,
        },
        ReproCase {
            id: "public-goods-fine-grid",
            description: "public goods, a = 0.8 on a 1/100 grid: contributions mix on {0.66, 0.67}",
            run: public_goods_fine_grid,
        },
        ReproCase {
            id: "bargaining-ce",
            description: "100-unit bargaining: even split (50, 50)",
            run: bargaining_ce,
        },
        ReproCase {
            id: "ultimatum-value",
            description: "ultimatum over 10: responder value 5/2, proposer value 5",
            run: ultimatum_value,
        },
        ReproCase {
            id: "deletion-zero-sum",
            description: "sure-gain zero-sum game: two deletion rounds leave {D} x {L}",
            run: deletion_zero_sum,
        },
        ReproCase {
            id: "dictator-reduction",
            description: "dictator over 10: deletion leaves the single offer 2",
            run: dictator_reduction,
        },
        ReproCase {
            id: "punish-travelers-ce",
            description: "traveler variant with a punish action: solution unchanged",
            run: punish_travelers_ce,
        },
        ReproCase {
            id: "asym-matching-pennies-value",
            description: "asymmetric matching pennies: riskless deviation gives values (40, 40)",
            run: asym_matching_pennies_value,
        },
        ReproCase {
            id: "coordination-nash",
            description: "three-strategy coordination game: the whole Nash set survives",
            run: coordination_nash,
        },
    ]
}

fn thread_count(n_cases: usize) -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cap = std::env::var("COOPEQ_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(available);
    cap.min(n_cases).max(1)
}

/// Runs the battery (optionally restricted to one case id) and writes the
/// report to stdout. Returns the process exit code: 0 when everything
/// matches, 2 on any mismatch.
pub fn run_repro(filter: Option<&str>, as_json: bool) -> Result<i32> {
    let selected: Vec<ReproCase> = cases()
        .into_iter()
        .filter(|c| filter.is_none_or(|f| c.id == f))
        .collect();
    if selected.is_empty() {
        let ids: Vec<&str> = cases().iter().map(|c| c.id).collect();
        anyhow::bail!("unknown case {:?}; available: {}", filter.unwrap_or(""), ids.join(", "));
    }
    let slots: Mutex<Vec<Option<CaseOutcome>>> =
        Mutex::new((0..selected.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = thread_count(selected.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                let Some(case) = selected.get(idx) else { break };
                let start = Instant::now();
                let (mismatches, error) = match (case.run)() {
                    Ok(m) => (m, None),
                    Err(e) => (Vec::new(), Some(format!("{e}"))),
                };
                let outcome = CaseOutcome {
                    id: case.id,
                    description: case.description,
                    mismatches,
                    error,
                    runtime: start.elapsed(),
                };
                slots.lock().unwrap()[idx] = Some(outcome);
            });
        }
    });
    let outcomes: Vec<CaseOutcome> =
        slots.into_inner().unwrap().into_iter().map(|o| o.expect("all cases ran")).collect();
    let failed = outcomes.iter().filter(|o| !o.mismatches.is_empty() || o.error.is_some()).count();
    if as_json {
        let report = json!({
            "cases": outcomes
                .iter()
                .map(|o| {
                    json!({
                        "id": o.id,
                        "description": o.description,
                        "passed": o.mismatches.is_empty() && o.error.is_none(),
                        "mismatches": o.mismatches,
                        "error": o.error,
                        "seconds": o.runtime.as_secs_f64(),
                    })
                })
                .collect::<Vec<_>>(),
            "passed": outcomes.len() - failed,
            "failed": failed,
        });
        print!("{}", crate::io::to_canonical_string(&report));
    } else {
        for o in &outcomes {
            let status = if o.mismatches.is_empty() && o.error.is_none() { "ok" } else { "FAIL" };
            println!("{status:4} {} ({:.2}s) - {}", o.id, o.runtime.as_secs_f64(), o.description);
            if let Some(e) = &o.error {
                println!("      error: {e}");
            }
            for m in &o.mismatches {
                println!("      {m}");
            }
        }
        println!("{} passed, {failed} failed", outcomes.len() - failed);
    }
    Ok(if failed == 0 { 0 } else { 2 })
}
