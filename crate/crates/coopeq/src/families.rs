//! The `gen` subcommand: built-in game families and their parameters.

use anyhow::{bail, Result};
use clap::Args;
use coopeq_core::generators::{make_standard_game, StandardGame};
use coopeq_core::ExplicitGame;

use crate::rational::parse_rational;

/// Parameters accepted by `gen`; each family reads the subset it needs.
#[derive(Args, Debug, Clone)]
pub struct GenParams {
    /// Bonus/penalty (traveler).
    #[arg(long)]
    pub bonus: Option<i64>,
    /// Lowest claim or bid (traveler, bertrand).
    #[arg(long)]
    pub lo: Option<i64>,
    /// Highest claim or bid (traveler, bertrand).
    #[arg(long)]
    pub hi: Option<i64>,
    /// Cooperation reward mu (prisoner), as an integer, decimal, or "p/q".
    #[arg(long)]
    pub mu: Option<String>,
    /// Temptation payoff (prisoner-payoffs).
    #[arg(long)]
    pub t: Option<i64>,
    /// Reward payoff (prisoner-payoffs).
    #[arg(long)]
    pub r: Option<i64>,
    /// Punishment payoff (prisoner-payoffs).
    #[arg(long)]
    pub p: Option<i64>,
    /// Sucker payoff (prisoner-payoffs).
    #[arg(long)]
    pub s: Option<i64>,
    /// Gain denominator (prisoner-payoffs).
    #[arg(long)]
    pub scale: Option<i64>,
    /// Player count (bertrand, public-goods).
    #[arg(long)]
    pub n: Option<usize>,
    /// Marginal return alpha (public-goods), as an integer, decimal, or "p/q".
    #[arg(long)]
    pub alpha: Option<String>,
    /// Per-player endowment (public-goods, dictator).
    #[arg(long)]
    pub endowment: Option<i64>,
    /// Grid step count (public-goods, ultimatum).
    #[arg(long)]
    pub steps: Option<i64>,
    /// Total amount divided (bargaining, ultimatum).
    #[arg(long)]
    pub total: Option<i64>,
    /// Exchange rate k (dictator), as an integer, decimal, or "p/q".
    #[arg(long)]
    pub k: Option<String>,
    /// Recipient's initial holding (dictator).
    #[arg(long)]
    pub recipient: Option<i64>,
    /// Coordination payoff x (coordination).
    #[arg(long)]
    pub x: Option<i64>,
    /// Safe payoff y (coordination).
    #[arg(long)]
    pub y: Option<i64>,
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| anyhow::anyhow!("family {family:?} requires --{flag}"))
}

fn need_rational(v: &Option<String>, flag: &str, family: &str) -> Result<coopeq_core::Rational> {
    match v {
        Some(text) => parse_rational(text),
        None => bail!("family {family:?} requires --{flag}"),
    }
}

/// Builds the requested family.
pub fn build_family(family: &str, params: &GenParams) -> Result<ExplicitGame> {
    let spec = match family {
        "traveler" => StandardGame::Traveler {
            bonus: need(params.bonus, "bonus", family)?,
            lo: need(params.lo, "lo", family)?,
            hi: need(params.hi, "hi", family)?,
        },
        "prisoner" => StandardGame::Prisoner { mu: need_rational(&params.mu, "mu", family)? },
        "prisoner-payoffs" => StandardGame::PrisonerPayoffs {
            t: need(params.t, "t", family)?,
            r: need(params.r, "r", family)?,
            p: need(params.p, "p", family)?,
            s: need(params.s, "s", family)?,
            scale: params.scale.unwrap_or(1),
        },
        "bertrand" => StandardGame::Bertrand {
            n: need(params.n, "n", family)?,
            lo: need(params.lo, "lo", family)?,
            hi: need(params.hi, "hi", family)?,
        },
        "public-goods" => StandardGame::PublicGoods {
            n: need(params.n, "n", family)?,
            alpha: need_rational(&params.alpha, "alpha", family)?,
            endowment: need(params.endowment, "endowment", family)?,
            steps: need(params.steps, "steps", family)?,
        },
        "bargaining" => StandardGame::Bargaining { total: need(params.total, "total", family)? },
        "ultimatum" => StandardGame::Ultimatum {
            total: need(params.total, "total", family)?,
            steps: need(params.steps, "steps", family)?,
        },
        "dictator" => StandardGame::Dictator {
            k: need_rational(&params.k, "k", family)?,
            endowment: need(params.endowment, "endowment", family)?,
            recipient: params.recipient.unwrap_or(0),
        },
        "punish-travelers" => StandardGame::PunishTravelers,
        "coordination" => StandardGame::HalpernCoordination {
            x: need(params.x, "x", family)?,
            y: need(params.y, "y", family)?,
        },
        "sure-gain-zero-sum" => StandardGame::SureGainZeroSum,
        "strict-prisoner" => StandardGame::StrictPrisoner,
        "matching-pennies" => StandardGame::MatchingPennies,
        "asym-matching-pennies" => StandardGame::AsymMatchingPennies,
        "battle-of-sexes" => StandardGame::BattleOfSexes,
        other => bail!(
            "unknown family {other:?}; available: traveler, prisoner, prisoner-payoffs, \
             bertrand, public-goods, bargaining, ultimatum, dictator, punish-travelers, \
             coordination, sure-gain-zero-sum, strict-prisoner, matching-pennies, \
             asym-matching-pennies, battle-of-sexes"
        ),
    };
    make_standard_game(&spec).map_err(|e| anyhow::anyhow!("{e}"))
}
