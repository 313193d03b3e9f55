//! Plain-text table rendering for the CLI (`--format table`).

use coopeq_core::deletion::{DeletionKind, DeletionTrace};
use coopeq_core::solver::{CooperativeSolution, SolveMode};
use coopeq_core::valuation::CoalitionValueReport;
use coopeq_core::{CoalitionStructure, ExplicitGame, MixedProfile};

use crate::io::approx;
use crate::rational::format_rational;

fn profile_line(game: &ExplicitGame, profile: &MixedProfile) -> String {
    let parts: Vec<String> = profile
        .strategies
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if let Some((idx, _)) = s.support.iter().next().filter(|_| s.support.len() == 1) {
                game.strategy_labels[i][*idx].clone()
            } else {
                let terms: Vec<String> = s
                    .support
                    .iter()
                    .map(|(idx, p)| {
                        format!("{}:{}", game.strategy_labels[i][*idx], format_rational(p))
                    })
                    .collect();
                format!("{{{}}}", terms.join(", "))
            }
        })
        .collect();
    format!("({})", parts.join(", "))
}

pub fn render_value_report(report: &CoalitionValueReport, v_cpt: Option<f64>) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "player {} under {}: v = {} (~{:.6})",
        report.player + 1,
        report.structure.display(),
        format_rational(&report.value),
        approx(&report.value),
    ));
    if let Some(v) = v_cpt {
        out.push_str(&format!(", v_cpt = {v:.6}"));
    }
    out.push('\n');
    for e in &report.events {
        let subset: Vec<String> = e.subset.iter().map(|j| (j + 1).to_string()).collect();
        out.push_str(&format!(
            "  J = {{{}}}: e = {}, tau = {}",
            subset.join(","),
            format_rational(&e.e),
            format_rational(&e.tau),
        ));
        if e.count > 1 {
            out.push_str(&format!(" (x{})", e.count));
        }
        out.push('\n');
    }
    out
}

pub fn render_deletion(game: &ExplicitGame, trace: &DeletionTrace) -> String {
    let mut out = String::new();
    out.push_str(&format!("deletion rounds: {}\n", trace.rounds()));
    for step in &trace.steps {
        let kind = match step.kind {
            DeletionKind::First => "controlled selfishness",
            DeletionKind::Second => "pure altruism",
        };
        for r in &step.removed {
            out.push_str(&format!(
                "  round {}, {} removes player {}'s {:?} (witness {:?}, p = {})\n",
                step.round,
                kind,
                step.player + 1,
                game.strategy_labels[step.player][r.strategy],
                game.strategy_labels[step.player][r.witness],
                format_rational(&r.p),
            ));
        }
    }
    out.push_str("playable strategies:\n");
    for (i, keep) in trace.playable.iter().enumerate() {
        let labels: Vec<&str> =
            keep.iter().map(|&s| game.strategy_labels[i][s].as_str()).collect();
        out.push_str(&format!("  player {}: {}\n", i + 1, labels.join(", ")));
    }
    out
}

pub fn render_solution(game: &ExplicitGame, sol: &CooperativeSolution) -> String {
    let mut out = String::new();
    let mode = match sol.mode {
        SolveMode::Eut => "expected utility",
        SolveMode::Cpt => "prospect theory",
    };
    out.push_str(&format!("mode: {mode}\n"));
    out.push_str(&format!("chosen structure: {}\n", sol.structure.display()));
    let ts: Vec<String> = sol
        .thresholds
        .iter()
        .map(|t| format!("{} (~{:.6})", format_rational(t), approx(t)))
        .collect();
    out.push_str(&format!("thresholds: {}\n", ts.join(", ")));
    if let Some(cs) = &sol.cpt_thresholds {
        let ts: Vec<String> = cs.iter().map(|v| format!("{v:.6}")).collect();
        out.push_str(&format!("cpt thresholds: {}\n", ts.join(", ")));
    }
    out.push_str(&format!(
        "equilibria ({}{}):\n",
        sol.profiles.len(),
        if sol.complete { "" } else { ", incomplete" }
    ));
    for p in &sol.profiles {
        out.push_str(&format!("  {}\n", profile_line(game, p)));
    }
    out.push_str("structure values:\n");
    for sv in &sol.structure_values {
        if sv.skipped {
            out.push_str(&format!("  {}: skipped\n", sv.structure.display()));
        } else if let Some(vs) = &sv.values {
            let vals: Vec<String> = vs.iter().map(format_rational).collect();
            out.push_str(&format!("  {}: {}\n", sv.structure.display(), vals.join(", ")));
        } else if let Some(vs) = &sv.cpt_values {
            let vals: Vec<String> = vs.iter().map(|v| format!("{v:.6}")).collect();
            out.push_str(&format!("  {}: {}\n", sv.structure.display(), vals.join(", ")));
        } else {
            out.push_str(&format!("  {}: no acceptable equilibrium\n", sv.structure.display()));
        }
    }
    for r in &sol.value_reports {
        out.push_str(&render_value_report(
            r,
            sol.cpt_thresholds.as_ref().map(|t| t[r.player]),
        ));
    }
    if !sol.deletion.steps.is_empty() {
        out.push_str(&render_deletion(game, &sol.deletion));
    }
    for d in &sol.diagnostics {
        out.push_str(&format!("note: {d}\n"));
    }
    out
}

pub fn render_quantal(dist: &[Vec<(CoalitionStructure, f64)>]) -> String {
    let mut out = String::new();
    for (i, entries) in dist.iter().enumerate() {
        out.push_str(&format!("player {}:\n", i + 1));
        for (p, w) in entries {
            out.push_str(&format!("  {}: {:.6}\n", p.display(), w));
        }
    }
    out
}
