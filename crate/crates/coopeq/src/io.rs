//! Game-file IO: the JSON schema for explicit-form games and the JSON
//! serializers for solver reports.
//!
//! Schema:
//!
//! ```json
//! {
//!   "players": 2,
//!   "strategies": [["C", "D"], ["C", "D"]],
//!   "gains": [[[3, 0], [5, 1]], [[3, 5], [0, 1]]],
//!   "altruism": {"theta": "1/5"},
//!   "fairness": {"kind": "cpt", "alpha": 0.88, "beta": 0.88, "lambda": 2.25}
//! }
//! ```
//!
//! `gains` is indexed `[player][s_1]...[s_N]`; entries are integers, decimal
//! strings, or `"p/q"` fraction strings. `altruism` is either
//! `{"theta": ...}` or `{"table": [[k, y, z, a], ...]}`. The optional boolean
//! hints `exchangeable` and `monotone_opponents` enable symmetric fast paths
//! and are emitted only when true. Serialization is canonical (fixed field
//! order, reduced fractions), so generate → parse → serialize is
//! byte-identical.

use anyhow::{anyhow, bail, Context, Result};
use coopeq_core::deletion::{DeletionKind, DeletionTrace};
use coopeq_core::game::to_f64;
use coopeq_core::solver::{CooperativeSolution, SolveMode};
use coopeq_core::valuation::CoalitionValueReport;
use coopeq_core::{Altruism, CoalitionStructure, ExplicitGame, Fairness, MixedProfile, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};

use crate::rational::{format_rational, rational_from_json, rational_to_json};

/// Cap on the number of gain cells written to or read from a game file.
const FILE_CELL_CAP: usize = 1_000_000;

/// Serializes a game to the canonical JSON schema.
pub fn game_to_json(game: &ExplicitGame) -> Result<Value> {
    let n = game.num_players();
    let shape = game.shape();
    let cells: usize = shape.iter().product();
    if cells > FILE_CELL_CAP {
        bail!(
            "game has {cells} gain cells, beyond the {FILE_CELL_CAP}-cell file limit; \
             use the built-in generator families for larger games"
        );
    }
    let mut gains = Vec::with_capacity(n);
    for player in 0..n {
        gains.push(gain_tree(game, player, &shape, &mut Vec::new()));
    }
    let altruism = match &game.altruism {
        Altruism::Proportional { theta } => json!({ "theta": rational_to_json(theta) }),
        Altruism::Table(entries) => json!({
            "table": entries
                .iter()
                .map(|(k, y, z, a)| {
                    Value::from(vec![
                        rational_to_json(k),
                        rational_to_json(y),
                        rational_to_json(z),
                        rational_to_json(a),
                    ])
                })
                .collect::<Vec<_>>()
        }),
    };
    let Fairness::CptValue { alpha, beta, lambda } = game.fairness;
    let mut map = Map::new();
    map.insert("players".into(), Value::from(n));
    map.insert(
        "strategies".into(),
        Value::from(
            game.strategy_labels
                .iter()
                .map(|ls| Value::from(ls.iter().map(|l| Value::from(l.clone())).collect::<Vec<_>>()))
                .collect::<Vec<_>>(),
        ),
    );
    map.insert("gains".into(), Value::from(gains));
    map.insert("altruism".into(), altruism);
    map.insert(
        "fairness".into(),
        json!({ "kind": "cpt", "alpha": alpha, "beta": beta, "lambda": lambda }),
    );
    if game.exchangeable {
        map.insert("exchangeable".into(), Value::Bool(true));
    }
    if game.monotone_opponents {
        map.insert("monotone_opponents".into(), Value::Bool(true));
    }
    Ok(Value::Object(map))
}

fn gain_tree(game: &ExplicitGame, player: usize, shape: &[usize], prefix: &mut Vec<usize>) -> Value {
    if prefix.len() == shape.len() {
        return rational_to_json(&game.gain(prefix, player));
    }
    let depth = prefix.len();
    let mut out = Vec::with_capacity(shape[depth]);
    for s in 0..shape[depth] {
        prefix.push(s);
        out.push(gain_tree(game, player, shape, prefix));
        prefix.pop();
    }
    Value::from(out)
}

/// Parses a game from JSON text, with line/field diagnostics.
pub fn game_from_json(text: &str) -> Result<ExplicitGame> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| anyhow!("malformed JSON at line {}, column {}: {e}", e.line(), e.column()))?;
    let obj = value.as_object().ok_or_else(|| anyhow!("game file must be a JSON object"))?;
    let players = obj
        .get("players")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("field \"players\" must be a positive integer"))?
        as usize;
    let strategies = obj
        .get("strategies")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("field \"strategies\" must be an array of label arrays"))?;
    if strategies.len() != players {
        bail!("field \"strategies\" has {} entries, expected {players}", strategies.len());
    }
    let labels: Vec<Vec<String>> = strategies
        .iter()
        .enumerate()
        .map(|(i, ls)| {
            ls.as_array()
                .ok_or_else(|| anyhow!("strategies[{i}] must be an array of strings"))?
                .iter()
                .map(|l| {
                    l.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| anyhow!("strategies[{i}] entries must be strings"))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let shape: Vec<usize> = labels.iter().map(Vec::len).collect();
    let cells: usize = shape.iter().product();
    if cells == 0 {
        bail!("every player needs at least one strategy");
    }
    if cells > FILE_CELL_CAP {
        bail!("game has {cells} gain cells, beyond the {FILE_CELL_CAP}-cell file limit");
    }
    let gains_value = obj
        .get("gains")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("field \"gains\" must be an array with one table per player"))?;
    if gains_value.len() != players {
        bail!("field \"gains\" has {} tables, expected {players}", gains_value.len());
    }
    let mut rational_tables: Vec<Vec<Rational>> = Vec::with_capacity(players);
    for (player, tree) in gains_value.iter().enumerate() {
        let mut flat = Vec::with_capacity(cells);
        flatten_gains(tree, &shape, 0, player, &mut flat)
            .with_context(|| format!("in gains[{player}]"))?;
        rational_tables.push(flat);
    }
    // Common denominator across all tables.
    let mut scale = BigInt::one();
    for t in &rational_tables {
        for r in t {
            scale = scale.lcm(r.denom());
        }
    }
    let scale_i64 = scale
        .to_i64()
        .ok_or_else(|| anyhow!("gain denominators are too large (common denominator {scale})"))?;
    let tables: Vec<Vec<i64>> = rational_tables
        .iter()
        .map(|t| {
            t.iter()
                .map(|r| {
                    let raw = r.numer() * (&scale / r.denom());
                    raw.to_i64().ok_or_else(|| anyhow!("gain {r} overflows at scale {scale}"))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut game = ExplicitGame::from_tables(labels, tables, scale_i64)
        .map_err(|e| anyhow!("{e}"))?;
    if let Some(v) = obj.get("altruism") {
        game.altruism = parse_altruism(v)?;
    }
    if let Some(v) = obj.get("fairness") {
        game.fairness = parse_fairness(v)?;
    }
    game.exchangeable = obj.get("exchangeable").and_then(Value::as_bool).unwrap_or(false);
    game.monotone_opponents =
        obj.get("monotone_opponents").and_then(Value::as_bool).unwrap_or(false);
    Ok(game)
}

fn flatten_gains(
    tree: &Value,
    shape: &[usize],
    depth: usize,
    player: usize,
    out: &mut Vec<Rational>,
) -> Result<()> {
    if depth == shape.len() {
        out.push(rational_from_json(tree, false)?);
        return Ok(());
    }
    let arr = tree
        .as_array()
        .ok_or_else(|| anyhow!("expected a nested array at depth {depth} for player {player}"))?;
    if arr.len() != shape[depth] {
        bail!(
            "gain table for player {player} has {} entries at depth {depth}, expected {}",
            arr.len(),
            shape[depth]
        );
    }
    for sub in arr {
        flatten_gains(sub, shape, depth + 1, player, out)?;
    }
    Ok(())
}

fn parse_altruism(value: &Value) -> Result<Altruism> {
    let obj = value.as_object().ok_or_else(|| anyhow!("field \"altruism\" must be an object"))?;
    if let Some(theta) = obj.get("theta") {
        return Ok(Altruism::Proportional { theta: rational_from_json(theta, true)? });
    }
    if let Some(table) = obj.get("table").and_then(Value::as_array) {
        let entries = table
            .iter()
            .map(|row| {
                let row = row
                    .as_array()
                    .filter(|r| r.len() == 4)
                    .ok_or_else(|| anyhow!("altruism table rows must be [k, y, z, a]"))?;
                Ok((
                    rational_from_json(&row[0], true)?,
                    rational_from_json(&row[1], true)?,
                    rational_from_json(&row[2], true)?,
                    rational_from_json(&row[3], true)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(Altruism::Table(entries));
    }
    bail!("field \"altruism\" must contain \"theta\" or \"table\"")
}

fn parse_fairness(value: &Value) -> Result<Fairness> {
    let obj = value.as_object().ok_or_else(|| anyhow!("field \"fairness\" must be an object"))?;
    match obj.get("kind").and_then(Value::as_str) {
        Some("cpt") => {
            let get = |k: &str, default: f64| -> Result<f64> {
                match obj.get(k) {
                    None => Ok(default),
                    Some(v) => v
                        .as_f64()
                        .ok_or_else(|| anyhow!("fairness field {k:?} must be a number")),
                }
            };
            Ok(Fairness::CptValue {
                alpha: get("alpha", 0.88)?,
                beta: get("beta", 0.88)?,
                lambda: get("lambda", 2.25)?,
            })
        }
        other => bail!("unsupported fairness kind {other:?} (expected \"cpt\")"),
    }
}

/// Canonical pretty-printing used for all JSON output.
pub fn to_canonical_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// A mixed profile as JSON: one array per player of `[label, prob]` pairs.
pub fn profile_to_json(game: &ExplicitGame, profile: &MixedProfile) -> Value {
    Value::from(
        profile
            .strategies
            .iter()
            .enumerate()
            .map(|(i, s)| {
                Value::from(
                    s.support
                        .iter()
                        .map(|(idx, p)| {
                            Value::from(vec![
                                Value::from(game.strategy_labels[i][*idx].clone()),
                                rational_to_json(p),
                            ])
                        })
                        .collect::<Vec<_>>(),
                )
            })
            .collect::<Vec<_>>(),
    )
}

fn structure_json(s: &CoalitionStructure) -> Value {
    Value::from(s.display())
}

/// A per-player value report as JSON:
/// `{player, structure, events: [{J, e, tau}], v_eut, v_cpt}`.
pub fn value_report_to_json(report: &CoalitionValueReport, v_cpt: Option<f64>) -> Value {
    json!({
        "player": report.player + 1,
        "structure": structure_json(&report.structure),
        "events": report
            .events
            .iter()
            .map(|e| {
                let mut m = Map::new();
                m.insert(
                    "J".into(),
                    Value::from(e.subset.iter().map(|j| j + 1).collect::<Vec<_>>()),
                );
                m.insert("e".into(), Value::from(format_rational(&e.e)));
                m.insert("tau".into(), Value::from(format_rational(&e.tau)));
                if e.count > 1 {
                    m.insert("count".into(), Value::from(e.count));
                }
                Value::Object(m)
            })
            .collect::<Vec<_>>(),
        "v_eut": Value::from(format_rational(&report.value)),
        "v_cpt": match v_cpt {
            Some(v) => Value::from(v),
            None => Value::Null,
        },
    })
}

/// A deletion trace as JSON for the `reduce` command.
pub fn deletion_to_json(game: &ExplicitGame, trace: &DeletionTrace) -> Value {
    json!({
        "rounds": trace.rounds(),
        "steps": trace
            .steps
            .iter()
            .map(|step| {
                json!({
                    "round": step.round,
                    "kind": match step.kind {
                        DeletionKind::First => "controlled-selfishness",
                        DeletionKind::Second => "pure-altruism",
                    },
                    "player": step.player + 1,
                    "removed": step
                        .removed
                        .iter()
                        .map(|r| {
                            json!({
                                "strategy": game.strategy_labels[step.player][r.strategy].clone(),
                                "witness": game.strategy_labels[step.player][r.witness].clone(),
                                "losers": r.losers.iter().map(|j| j + 1).collect::<Vec<_>>(),
                                "p": format_rational(&r.p),
                            })
                        })
                        .collect::<Vec<_>>(),
                })
            })
            .collect::<Vec<_>>(),
        "playable": trace
            .playable
            .iter()
            .enumerate()
            .map(|(i, keep)| {
                Value::from(
                    keep.iter()
                        .map(|&s| Value::from(game.strategy_labels[i][s].clone()))
                        .collect::<Vec<_>>(),
                )
            })
            .collect::<Vec<_>>(),
    })
}

/// A cooperative solution as JSON for the `solve` command.
pub fn solution_to_json(game: &ExplicitGame, sol: &CooperativeSolution) -> Value {
    json!({
        "mode": match sol.mode {
            SolveMode::Eut => "eut",
            SolveMode::Cpt => "cpt",
        },
        "structure": structure_json(&sol.structure),
        "thresholds": sol
            .thresholds
            .iter()
            .map(|t| Value::from(format_rational(t)))
            .collect::<Vec<_>>(),
        "cpt_thresholds": match &sol.cpt_thresholds {
            Some(ts) => Value::from(ts.clone()),
            None => Value::Null,
        },
        "equilibria": sol
            .profiles
            .iter()
            .map(|p| profile_to_json(game, p))
            .collect::<Vec<_>>(),
        "complete": sol.complete,
        "maximizers": sol
            .maximizers
            .iter()
            .enumerate()
            .map(|(i, m)| {
                json!({
                    "player": i + 1,
                    "structures": m
                        .iter()
                        .map(|&idx| structure_json(&sol.structure_values[idx].structure))
                        .collect::<Vec<_>>(),
                })
            })
            .collect::<Vec<_>>(),
        "values": sol.value_reports.iter().map(|r| {
            value_report_to_json(r, sol.cpt_thresholds.as_ref().map(|t| t[r.player]))
        }).collect::<Vec<_>>(),
        "structure_values": sol
            .structure_values
            .iter()
            .map(|sv| {
                json!({
                    "structure": structure_json(&sv.structure),
                    "skipped": sv.skipped,
                    "values": match &sv.values {
                        Some(vs) => Value::from(
                            vs.iter().map(|v| Value::from(format_rational(v))).collect::<Vec<_>>(),
                        ),
                        None => Value::Null,
                    },
                    "cpt_values": match &sv.cpt_values {
                        Some(vs) => Value::from(vs.clone()),
                        None => Value::Null,
                    },
                })
            })
            .collect::<Vec<_>>(),
        "deletion": deletion_to_json(game, &sol.deletion),
        "diagnostics": sol.diagnostics.clone(),
    })
}

/// Quantal coalition distributions as JSON.
pub fn quantal_to_json(dist: &[Vec<(CoalitionStructure, f64)>]) -> Value {
    Value::from(
        dist.iter()
            .enumerate()
            .map(|(i, entries)| {
                json!({
                    "player": i + 1,
                    "distribution": entries
                        .iter()
                        .map(|(p, w)| json!({ "structure": structure_json(p), "prob": w }))
                        .collect::<Vec<_>>(),
                })
            })
            .collect::<Vec<_>>(),
    )
}

/// Approximate float value of a rational, for table rendering.
pub fn approx(r: &Rational) -> f64 {
    to_f64(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, GenParams};
    use clap::Parser;

    #[derive(Parser)]
    struct Wrapper {
        #[command(flatten)]
        params: GenParams,
    }

    fn params(args: &[&str]) -> GenParams {
        let mut argv = vec!["wrapper"];
        argv.extend_from_slice(args);
        Wrapper::parse_from(argv).params
    }

    #[test]
    fn every_family_round_trips_byte_identically() {
        let instances: Vec<(&str, Vec<&str>)> = vec![
            ("traveler", vec!["--bonus", "2", "--lo", "2", "--hi", "20"]),
            ("prisoner", vec!["--mu", "5/2"]),
            (
                "prisoner-payoffs",
                vec!["--t", "20", "--r", "15", "--p", "5", "--s", "0", "--scale", "100"],
            ),
            ("bertrand", vec!["--n", "2", "--lo", "2", "--hi", "20"]),
            (
                "public-goods",
                vec!["--n", "2", "--alpha", "0.8", "--endowment", "1", "--steps", "10"],
            ),
            ("bargaining", vec!["--total", "20"]),
            ("ultimatum", vec!["--total", "10", "--steps", "10"]),
            ("dictator", vec!["--k", "1", "--endowment", "10"]),
            ("punish-travelers", vec![]),
            ("coordination", vec!["--x", "10", "--y", "9"]),
            ("sure-gain-zero-sum", vec![]),
            ("strict-prisoner", vec![]),
            ("matching-pennies", vec![]),
            ("asym-matching-pennies", vec![]),
            ("battle-of-sexes", vec![]),
        ];
        for (family, args) in instances {
            let game = build_family(family, &params(&args)).unwrap();
            let text = to_canonical_string(&game_to_json(&game).unwrap());
            let parsed = game_from_json(&text).unwrap();
            let again = to_canonical_string(&game_to_json(&parsed).unwrap());
            assert_eq!(text, again, "round trip for {family}");
            assert_eq!(parsed.exchangeable, game.exchangeable, "hints for {family}");
            assert_eq!(parsed.shape(), game.shape(), "shape for {family}");
        }
    }

    #[test]
    fn fractional_and_decimal_gains_share_a_common_scale() {
        let text = r#"{
            "players": 2,
            "strategies": [["a", "b"], ["a", "b"]],
            "gains": [
                [["1/3", 0], ["0.5", 1]],
                [[0, "1/3"], [1, "0.5"]]
            ]
        }"#;
        let g = game_from_json(text).unwrap();
        assert_eq!(g.gain(&[0, 0], 0), Rational::new(1.into(), 3.into()));
        assert_eq!(g.gain(&[1, 0], 0), Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn malformed_json_reports_the_location() {
        let Err(err) = game_from_json("{\n  \"players\": 2,\n") else {
            panic!("truncated input must not parse");
        };
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        let text = r#"{
            "players": 2,
            "strategies": [["a", "b"], ["a"]],
            "gains": [[[1], [2]], [[1, 2], [3, 4]]]
        }"#;
        let Err(err) = game_from_json(text) else {
            panic!("mismatched shapes must not parse");
        };
        assert!(format!("{err:#}").contains("gains[1]"), "{err:#}");
    }
}
