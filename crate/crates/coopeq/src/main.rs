//! Command-line interface for the cooperative-equilibrium solver.

mod families;
mod io;
mod rational;
mod render;
mod repro;

use std::io::Read;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use coopeq_core::solver::{
    cooperative_equilibrium_cpt, exact_cooperative_equilibrium, quantal_coalition_distribution,
};
use coopeq_core::valuation::{coalition_value, coalition_value_cpt, deviation_report};
use coopeq_core::{partition, CptParams, ExplicitGame};
use serde_json::json;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Parser, Debug)]
#[command(
    name = "coopeq",
    about = "Cooperative equilibria of finite games in explicit form",
    version
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct CptFlags {
    /// Prospect-theory value exponent over gains.
    #[arg(long, default_value_t = 0.88)]
    alpha: f64,
    /// Prospect-theory value exponent over losses.
    #[arg(long, default_value_t = 0.88)]
    beta: f64,
    /// Loss-aversion coefficient.
    #[arg(long, default_value_t = 2.25)]
    lambda: f64,
    /// Probability-weighting exponent.
    #[arg(long, default_value_t = 0.61)]
    gamma: f64,
    /// Deviation probabilities below this floor are treated as impossible.
    #[arg(long, default_value_t = 0.0)]
    floor: f64,
}

impl CptFlags {
    fn params(&self) -> CptParams {
        CptParams { alpha: self.alpha, beta: self.beta, lambda: self.lambda, gamma: self.gamma }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a game end to end: deletion, structure values, equilibrium.
    Solve {
        /// Game file, or "-" for stdin.
        game: String,
        /// Value coalition structures through cumulative prospect theory.
        #[arg(long)]
        cpt: bool,
        /// Report a soft-max distribution over coalition structures with
        /// this precision parameter instead of the equilibrium.
        #[arg(long, value_name = "LAMBDA")]
        quantal: Option<f64>,
        #[command(flatten)]
        cpt_flags: CptFlags,
    },
    /// Report per-player values of coalition structures for a game as given.
    Value {
        /// Game file, or "-" for stdin.
        game: String,
        /// Restrict to one coalition structure by index (canonical order).
        #[arg(long)]
        structure: Option<usize>,
        /// Also report prospect-theory values.
        #[arg(long)]
        cpt: bool,
        #[command(flatten)]
        cpt_flags: CptFlags,
    },
    /// Run iterated deletion of unplayable strategies and report the trace.
    Reduce {
        /// Game file, or "-" for stdin.
        game: String,
    },
    /// Generate a built-in game family as a canonical game file.
    Gen {
        /// Family name (see `gen help` for the list).
        family: String,
        #[command(flatten)]
        params: families::GenParams,
        /// Output file (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-run the built-in battery of solved cases and compare against the
    /// frozen expected numbers.
    Repro {
        /// Run a single case by id.
        #[arg(long)]
        case: Option<String>,
        /// Machine-readable report.
        #[arg(long)]
        json: bool,
    },
}

fn read_game(path: &str) -> Result<ExplicitGame> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
        buf
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?
    };
    io::game_from_json(&text)
}

fn cmd_solve(
    game: &ExplicitGame,
    cpt: bool,
    quantal: Option<f64>,
    flags: &CptFlags,
    format: Format,
) -> Result<()> {
    if let Some(lambda) = quantal {
        let dist = quantal_coalition_distribution(game, lambda)?;
        match format {
            Format::Json => print!("{}", io::to_canonical_string(&io::quantal_to_json(&dist))),
            Format::Table => print!("{}", render::render_quantal(&dist)),
        }
        return Ok(());
    }
    let sol = if cpt {
        cooperative_equilibrium_cpt(game, &flags.params(), flags.floor)?
    } else {
        exact_cooperative_equilibrium(game)?
    };
    match format {
        Format::Json => print!("{}", io::to_canonical_string(&io::solution_to_json(game, &sol))),
        Format::Table => print!("{}", render::render_solution(game, &sol)),
    }
    Ok(())
}

fn cmd_value(
    game: &ExplicitGame,
    structure: Option<usize>,
    cpt: bool,
    flags: &CptFlags,
    format: Format,
) -> Result<()> {
    let structures = partition::enumerate_coalition_structures(game.num_players())?;
    if let Some(idx) = structure {
        if idx >= structures.len() {
            anyhow::bail!(
                "structure index {idx} out of range (the game has {} structures)",
                structures.len()
            );
        }
    }
    let params = flags.params();
    let mut entries = Vec::new();
    let mut text = String::new();
    for (idx, s) in structures.iter().enumerate() {
        if structure.is_some_and(|want| want != idx) {
            continue;
        }
        let report = deviation_report(game, s)?;
        let Some(report) = report else {
            match format {
                Format::Json => entries.push(json!({
                    "index": idx,
                    "structure": s.display(),
                    "reports": serde_json::Value::Null,
                })),
                Format::Table => {
                    text.push_str(&format!("[{idx}] {}: no acceptable equilibrium\n", s.display()))
                }
            }
            continue;
        };
        let mut reports = Vec::new();
        for i in 0..game.num_players() {
            let v = coalition_value(game, &report, i)?;
            let v_cpt = if cpt {
                Some(coalition_value_cpt(&report, &v, &params, flags.floor)?)
            } else {
                None
            };
            match format {
                Format::Json => reports.push(io::value_report_to_json(&v, v_cpt)),
                Format::Table => text.push_str(&render::render_value_report(&v, v_cpt)),
            }
        }
        if format == Format::Json {
            entries.push(json!({
                "index": idx,
                "structure": s.display(),
                "reports": reports,
            }));
        }
    }
    match format {
        Format::Json => {
            print!("{}", io::to_canonical_string(&serde_json::Value::from(entries)))
        }
        Format::Table => print!("{text}"),
    }
    Ok(())
}

fn cmd_reduce(game: &ExplicitGame, format: Format) -> Result<()> {
    let trace = coopeq_core::deletion::iterate_deletion(game)?;
    match format {
        Format::Json => print!("{}", io::to_canonical_string(&io::deletion_to_json(game, &trace))),
        Format::Table => print!("{}", render::render_deletion(game, &trace)),
    }
    Ok(())
}

fn cmd_gen(family: &str, params: &families::GenParams, output: Option<&PathBuf>) -> Result<()> {
    let game = families::build_family(family, params)?;
    let text = io::to_canonical_string(&io::game_to_json(&game)?);
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Solve { game, cpt, quantal, cpt_flags } => {
            cmd_solve(&read_game(game)?, *cpt, *quantal, cpt_flags, cli.format)?;
            Ok(0)
        }
        Command::Value { game, structure, cpt, cpt_flags } => {
            cmd_value(&read_game(game)?, *structure, *cpt, cpt_flags, cli.format)?;
            Ok(0)
        }
        Command::Reduce { game } => {
            cmd_reduce(&read_game(game)?, cli.format)?;
            Ok(0)
        }
        Command::Gen { family, params, output } => {
            cmd_gen(family, params, output.as_ref())?;
            Ok(0)
        }
        Command::Repro { case, json } => repro::run_repro(case.as_deref(), *json),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
