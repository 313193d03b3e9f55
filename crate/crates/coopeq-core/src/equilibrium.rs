//! Equilibrium computation for coalition-merged games: block profiles,
//! pure Nash scans, exact support enumeration for two-block games, and the
//! fairness-driven selection of acceptable equilibria and the joint-optimum
//! profile sets M(p).

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{CoopError, Result};
use crate::game::{ratio, ExplicitGame, MixedProfile, MixedStrategy, Rational};
use crate::partition::CoalitionStructure;

/// Cap on the number of joint assignments materialized per block.
pub const ASSIGNMENT_CAP: usize = 20_000;
/// Cap on full-profile enumeration in the pure Nash scan.
pub const PURE_SCAN_CAP: usize = 2_000_000;
/// Per-block strategy-count cap for full support enumeration.
pub const SUPPORT_CAP: usize = 12;
/// Cap on profiles produced by the exchangeable optimum expansion.
const PERMUTATION_CAP: usize = 10_000;
/// Tolerance for float disagreement-score ties.
const DIS_TOL: f64 = 1e-9;

/// A game merged along a coalition structure: each block acts as one player
/// whose strategies are joint assignments of its members and whose gain is
/// the sum of the members' gains.
#[derive(Clone)]
pub struct CoalitionGame {
    /// The underlying game.
    pub game: ExplicitGame,
    /// The coalition structure the game is merged along.
    pub structure: CoalitionStructure,
}

/// Builds the merged game for a coalition structure.
pub fn coalition_game(game: &ExplicitGame, structure: &CoalitionStructure) -> Result<CoalitionGame> {
    if structure.num_players() != game.num_players() {
        return Err(CoopError::InvalidPartition {
            detail: format!(
                "structure covers {} players but the game has {}",
                structure.num_players(),
                game.num_players()
            ),
        });
    }
    Ok(CoalitionGame { game: game.clone(), structure: structure.clone() })
}

impl CoalitionGame {
    /// Number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.structure.num_blocks()
    }

    /// Members of a block (sorted player indices).
    pub fn members(&self, block: usize) -> &[usize] {
        &self.structure.blocks()[block]
    }

    /// Raw (integer) block gain at a full pure profile: the sum of the
    /// members' raw gains.
    pub fn block_gain_raw(&self, profile: &[usize], block: usize) -> i64 {
        self.members(block).iter().map(|&i| self.game.gain_raw(profile, i)).sum()
    }

    /// All joint assignments of a block's members, each listing one pure
    /// strategy per member in block order.
    pub fn assignments(&self, block: usize) -> Result<Vec<Vec<usize>>> {
        let sizes: Vec<usize> =
            self.members(block).iter().map(|&i| self.game.num_strategies(i)).collect();
        let count: usize = sizes.iter().try_fold(1usize, |acc, &s| {
            let next = acc.checked_mul(s)?;
            (next <= ASSIGNMENT_CAP).then_some(next)
        }).ok_or_else(|| CoopError::Capacity {
            detail: format!(
                "block {} has more than {ASSIGNMENT_CAP} joint assignments",
                block
            ),
        })?;
        let mut out = Vec::with_capacity(count);
        let mut cur = vec![0usize; sizes.len()];
        loop {
            out.push(cur.clone());
            let mut p = sizes.len();
            loop {
                if p == 0 {
                    return Ok(out);
                }
                p -= 1;
                cur[p] += 1;
                if cur[p] < sizes[p] {
                    break;
                }
                cur[p] = 0;
            }
        }
    }
}

/// A probability measure over one block's joint assignments (a strategy of
/// the merged super-player; correlated from the members' viewpoint).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockStrategy {
    /// `(assignment, probability)` pairs, sorted, probabilities summing to 1.
    pub support: Vec<(Vec<usize>, Rational)>,
}

impl BlockStrategy {
    /// The degenerate measure on one assignment.
    pub fn pure(assignment: Vec<usize>) -> Self {
        BlockStrategy { support: vec![(assignment, Rational::one())] }
    }

    fn normalize(mut support: Vec<(Vec<usize>, Rational)>) -> Self {
        support.retain(|(_, p)| !p.is_zero());
        support.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Vec<usize>, Rational)> = Vec::new();
        for (a, p) in support {
            match merged.last_mut() {
                Some((la, lp)) if *la == a => *lp += p,
                _ => merged.push((a, p)),
            }
        }
        BlockStrategy { support: merged }
    }
}

/// One strategy per block of a merged game.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockProfile {
    /// Block strategies in block order.
    pub blocks: Vec<BlockStrategy>,
}

impl BlockProfile {
    /// The degenerate block profile on a full pure profile.
    pub fn from_pure(cg: &CoalitionGame, profile: &[usize]) -> Self {
        let blocks = (0..cg.num_blocks())
            .map(|b| {
                BlockStrategy::pure(cg.members(b).iter().map(|&i| profile[i]).collect())
            })
            .collect();
        BlockProfile { blocks }
    }

    /// Exact expected gain of an (original) player under the product of the
    /// block measures.
    pub fn expected_gain(&self, cg: &CoalitionGame, player: usize) -> Rational {
        let mut full = vec![0usize; cg.game.num_players()];
        let mut total = Rational::zero();
        self.expected_rec(cg, player, 0, Rational::one(), &mut full, &mut total);
        total
    }

    fn expected_rec(
        &self,
        cg: &CoalitionGame,
        player: usize,
        block: usize,
        weight: Rational,
        full: &mut [usize],
        total: &mut Rational,
    ) {
        if block == cg.num_blocks() {
            *total += weight * cg.game.gain(full, player);
            return;
        }
        for (assignment, p) in &self.blocks[block].support {
            for (pos, &i) in cg.members(block).iter().enumerate() {
                full[i] = assignment[pos];
            }
            self.expected_rec(cg, player, block + 1, weight.clone() * p, full, total);
        }
    }

    /// Exact expected block gain (sum of the members' expected gains).
    pub fn block_gain(&self, cg: &CoalitionGame, block: usize) -> Rational {
        cg.members(block).iter().map(|&i| self.expected_gain(cg, i)).sum()
    }

    /// The marginal mixed strategy of one player.
    pub fn marginal(&self, cg: &CoalitionGame, player: usize) -> MixedStrategy {
        let block = cg.structure.block_of(player);
        let pos = cg.members(block).iter().position(|&i| i == player).expect("member");
        let mut pairs: Vec<(usize, Rational)> = Vec::new();
        for (assignment, p) in &self.blocks[block].support {
            let s = assignment[pos];
            match pairs.iter_mut().find(|(t, _)| *t == s) {
                Some((_, q)) => *q += p.clone(),
                None => pairs.push((s, p.clone())),
            }
        }
        MixedStrategy::from_pairs(pairs).expect("marginal of a valid measure")
    }

    /// The independent profile assembled from the per-player marginals.
    pub fn to_profile(&self, cg: &CoalitionGame) -> MixedProfile {
        MixedProfile {
            strategies: (0..cg.game.num_players()).map(|i| self.marginal(cg, i)).collect(),
        }
    }
}

/// A finite set of (extreme) equilibria of a merged game.
#[derive(Clone)]
pub struct EquilibriumSet {
    /// The equilibria found.
    pub profiles: Vec<BlockProfile>,
    /// Whether the list is known to contain all extreme equilibria.
    pub complete: bool,
}

/// Pure profiles maximizing the total gain (the Nash set vertices of a
/// single-block merged game).
///
/// Dense games are scanned exhaustively; games too large to scan are handled
/// through the exchangeable multiset shortcut (total gain is invariant under
/// player permutations, so one sorted representative per multiset suffices).
pub fn grand_coalition_optima(game: &ExplicitGame) -> Result<Vec<Vec<usize>>> {
    let shape = game.shape();
    let cells = shape.iter().try_fold(1usize, |a, &s| a.checked_mul(s)).unwrap_or(usize::MAX);
    if cells <= PURE_SCAN_CAP {
        let mut best: i64 = i64::MIN;
        let mut out: Vec<Vec<usize>> = Vec::new();
        crate::game::for_each_profile(&shape, |profile| {
            let total: i64 = (0..shape.len()).map(|i| game.gain_raw(profile, i)).sum();
            if total > best {
                best = total;
                out.clear();
            }
            if total == best {
                out.push(profile.to_vec());
            }
        });
        return Ok(out);
    }
    if !game.exchangeable {
        return Err(CoopError::Capacity {
            detail: format!("{cells} profiles exceed the optimum-scan cap and the game \
                             is not exchangeable"),
        });
    }
    // Nondecreasing representatives, one per multiset.
    let n = shape.len();
    let k = shape[0];
    let mut profile = vec![0usize; n];
    let mut best: i64 = i64::MIN;
    let mut reps: Vec<Vec<usize>> = Vec::new();
    loop {
        let total: i64 = (0..n).map(|i| game.gain_raw(&profile, i)).sum();
        if total > best {
            best = total;
            reps.clear();
        }
        if total == best {
            reps.push(profile.clone());
        }
        // Next nondecreasing profile.
        let mut p = n;
        loop {
            if p == 0 {
                // Expand representatives into all distinct orderings.
                let mut out = Vec::new();
                for rep in reps {
                    expand_permutations(&rep, &mut out)?;
                }
                out.sort();
                out.dedup();
                return Ok(out);
            }
            p -= 1;
            if profile[p] + 1 < k {
                let v = profile[p] + 1;
                for q in p..n {
                    profile[q] = v;
                }
                break;
            }
        }
    }
}

/// Expands a sorted profile into all distinct permutations.
fn expand_permutations(rep: &[usize], out: &mut Vec<Vec<usize>>) -> Result<()> {
    let mut current = rep.to_vec();
    loop {
        out.push(current.clone());
        if out.len() > PERMUTATION_CAP {
            return Err(CoopError::Capacity {
                detail: "too many tied optimum profiles to expand".to_string(),
            });
        }
        // Next lexicographic permutation of the multiset.
        let n = current.len();
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1])
        else {
            return Ok(());
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).expect("successor");
        current.swap(i, j);
        current[i + 1..].reverse();
    }
}

/// All pure-profile equilibria of the merged game: no block can strictly
/// improve its block gain by jointly reassigning its members.
pub fn pure_nash(cg: &CoalitionGame) -> Result<Vec<BlockProfile>> {
    let shape = cg.game.shape();
    let cells = shape.iter().try_fold(1usize, |a, &s| a.checked_mul(s)).unwrap_or(usize::MAX);
    if cells > PURE_SCAN_CAP {
        return Err(CoopError::Capacity {
            detail: format!("{cells} profiles exceed the pure Nash scan cap"),
        });
    }
    let assignments: Vec<Vec<Vec<usize>>> =
        (0..cg.num_blocks()).map(|b| cg.assignments(b)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut scratch = vec![0usize; shape.len()];
    crate::game::for_each_profile(&shape, |profile| {
        for (b, alts) in assignments.iter().enumerate() {
            let current = cg.block_gain_raw(profile, b);
            scratch.copy_from_slice(profile);
            for alt in alts {
                for (pos, &i) in cg.members(b).iter().enumerate() {
                    scratch[i] = alt[pos];
                }
                if cg.block_gain_raw(&scratch, b) > current {
                    return;
                }
            }
            for &i in cg.members(b) {
                scratch[i] = profile[i];
            }
        }
        out.push(BlockProfile::from_pure(cg, profile));
    });
    Ok(out)
}

/// All equilibria of a two-block merged game by exact support enumeration.
///
/// Equal-size supports are solved through the rational indifference systems;
/// pure equilibria are always included. Above the per-block cap the search
/// falls back to the pure scan plus a symmetric two-point search, with the
/// completeness flag cleared.
pub fn support_enumeration_2p(cg: &CoalitionGame) -> Result<EquilibriumSet> {
    if cg.num_blocks() != 2 {
        return Err(CoopError::InvalidPartition {
            detail: "support enumeration needs exactly two blocks".to_string(),
        });
    }
    let a0 = cg.assignments(0)?;
    let a1 = cg.assignments(1)?;
    let (m, n) = (a0.len(), a1.len());
    if m > SUPPORT_CAP || n > SUPPORT_CAP {
        let mut profiles = pure_nash(cg)?;
        profiles.extend(symmetric_two_point(cg)?);
        profiles.sort();
        profiles.dedup();
        return Ok(EquilibriumSet { profiles, complete: false });
    }
    // Block-gain bimatrix.
    let mut full = vec![0usize; cg.game.num_players()];
    let mut pay = [vec![vec![Rational::zero(); n]; m], vec![vec![Rational::zero(); n]; m]];
    for (i, ai) in a0.iter().enumerate() {
        for (j, aj) in a1.iter().enumerate() {
            for (pos, &p) in cg.members(0).iter().enumerate() {
                full[p] = ai[pos];
            }
            for (pos, &p) in cg.members(1).iter().enumerate() {
                full[p] = aj[pos];
            }
            pay[0][i][j] = ratio(cg.block_gain_raw(&full, 0), cg.game.scale());
            pay[1][i][j] = ratio(cg.block_gain_raw(&full, 1), cg.game.scale());
        }
    }
    let mut profiles = Vec::new();
    for k in 1..=m.min(n) {
        for rows in combinations(m, k) {
            for cols in combinations(n, k) {
                if let Some((x, y)) = solve_support_pair(&pay, &rows, &cols) {
                    let b0 = BlockStrategy::normalize(
                        rows.iter()
                            .zip(&x)
                            .map(|(&i, p)| (a0[i].clone(), p.clone()))
                            .collect(),
                    );
                    let b1 = BlockStrategy::normalize(
                        cols.iter()
                            .zip(&y)
                            .map(|(&j, p)| (a1[j].clone(), p.clone()))
                            .collect(),
                    );
                    profiles.push(BlockProfile { blocks: vec![b0, b1] });
                }
            }
        }
    }
    profiles.sort();
    profiles.dedup();
    Ok(EquilibriumSet { profiles, complete: true })
}

/// Solves one support pair: returns the row and column mixtures when they
/// form an equilibrium with exactly these supports.
fn solve_support_pair(
    pay: &[Vec<Vec<Rational>>; 2],
    rows: &[usize],
    cols: &[usize],
) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let k = rows.len();
    if k == 1 {
        let (i, j) = (rows[0], cols[0]);
        let row_ok = (0..pay[0].len()).all(|i2| pay[0][i2][j] <= pay[0][i][j]);
        let col_ok = (0..pay[1][0].len()).all(|j2| pay[1][i][j2] <= pay[1][i][j]);
        return (row_ok && col_ok).then(|| (vec![Rational::one()], vec![Rational::one()]));
    }
    // Column mixture y makes the row block indifferent across `rows`.
    let y = solve_indifference(|i, j| pay[0][rows[i]][cols[j]].clone(), k)?;
    // Row mixture x makes the column block indifferent across `cols`.
    let x = solve_indifference(|j, i| pay[1][rows[i]][cols[j]].clone(), k)?;
    // Strictly positive weights only: zero weights belong to a smaller support.
    if y.0.iter().chain(x.0.iter()).any(|p| !p.is_positive()) {
        return None;
    }
    // No strategy outside the support may do better.
    let (yv, v_row) = y;
    let (xv, v_col) = x;
    for i2 in 0..pay[0].len() {
        let val: Rational = cols.iter().zip(&yv).map(|(&j, p)| &pay[0][i2][j] * p).sum();
        if val > v_row {
            return None;
        }
    }
    for j2 in 0..pay[1][0].len() {
        let val: Rational = rows.iter().zip(&xv).map(|(&i, p)| &pay[1][i][j2] * p).sum();
        if val > v_col {
            return None;
        }
    }
    Some((xv, yv))
}

/// Solves `sum_j a(i, j) q_j = v` for all `i` with `sum q = 1`; returns
/// `(q, v)` when uniquely solvable.
fn solve_indifference(
    a: impl Fn(usize, usize) -> Rational,
    k: usize,
) -> Option<(Vec<Rational>, Rational)> {
    // Unknowns: q_0..q_{k-1}, v.
    let mut mat = vec![vec![Rational::zero(); k + 2]; k + 1];
    for i in 0..k {
        for j in 0..k {
            mat[i][j] = a(i, j);
        }
        mat[i][k] = -Rational::one();
    }
    for j in 0..k {
        mat[k][j] = Rational::one();
    }
    mat[k][k + 1] = Rational::one();
    let sol = gaussian_solve(mat, k + 1)?;
    let v = sol[k].clone();
    Some((sol[..k].to_vec(), v))
}

/// Exact Gaussian elimination on an augmented matrix (`n` unknowns, last
/// column the right-hand side). Returns `None` for singular systems.
fn gaussian_solve(mut m: Vec<Vec<Rational>>, n: usize) -> Option<Vec<Rational>> {
    let rows = m.len();
    let mut pivot_row = 0usize;
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let Some(r) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            return None;
        };
        m.swap(pivot_row, r);
        let inv = m[pivot_row][col].clone();
        for c in col..=n {
            let v = m[pivot_row][c].clone() / &inv;
            m[pivot_row][c] = v;
        }
        for r2 in 0..rows {
            if r2 != pivot_row && !m[r2][col].is_zero() {
                let f = m[r2][col].clone();
                for c in col..=n {
                    let v = m[r2][c].clone() - m[pivot_row][c].clone() * &f;
                    m[r2][c] = v;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    if pivots.len() < n {
        return None;
    }
    // Inconsistent rows?
    for r in pivot_row..rows {
        if !m[r][n].is_zero() {
            return None;
        }
    }
    let mut sol = vec![Rational::zero(); n];
    for (r, &col) in pivots.iter().enumerate() {
        sol[col] = m[r][n].clone();
    }
    Some(sol)
}

/// Symmetric two-point mixed equilibria for exchangeable two-player games
/// whose strategy count exceeds the support-enumeration cap.
fn symmetric_two_point(cg: &CoalitionGame) -> Result<Vec<BlockProfile>> {
    if !(cg.game.exchangeable
        && cg.num_blocks() == 2
        && cg.members(0).len() == 1
        && cg.members(1).len() == 1)
    {
        return Ok(Vec::new());
    }
    let n = cg.game.num_strategies(0);
    let g = |a: usize, b: usize| cg.game.gain(&[a, b], 0);
    let mut out = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            // Both play lambda on s: indifference between s and t against the mix.
            let denom = (g(s, s) - g(t, s)) + (g(t, t) - g(s, t));
            if denom.is_zero() {
                continue;
            }
            let lambda = (g(t, t) - g(s, t)) / denom;
            if !(lambda.is_positive() && lambda < Rational::one()) {
                continue;
            }
            let value =
                lambda.clone() * g(s, s) + (Rational::one() - lambda.clone()) * g(s, t);
            // No third strategy may beat the common value.
            let ok = (0..n).all(|u| {
                lambda.clone() * g(u, s) + (Rational::one() - lambda.clone()) * g(u, t)
                    <= value
            });
            if ok {
                let mix = BlockStrategy::normalize(vec![
                    (vec![s], lambda.clone()),
                    (vec![t], Rational::one() - lambda.clone()),
                ]);
                out.push(BlockProfile { blocks: vec![mix.clone(), mix] });
            }
        }
    }
    Ok(out)
}

/// All `k`-element subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] + (k - i) < n {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Computes the (finite, extreme) equilibrium set of a merged game.
///
/// Single-block games reduce to the total-gain optima; two-block games use
/// support enumeration; larger block counts fall back to the pure scan.
pub fn equilibria(cg: &CoalitionGame) -> Result<EquilibriumSet> {
    match cg.num_blocks() {
        1 => {
            let profiles = grand_coalition_optima(&cg.game)?
                .into_iter()
                .map(|p| BlockProfile::from_pure(cg, &p))
                .collect();
            Ok(EquilibriumSet { profiles, complete: true })
        }
        2 => support_enumeration_2p(cg),
        _ => {
            let profiles = pure_nash(cg)?;
            Ok(EquilibriumSet { profiles, complete: false })
        }
    }
}

/// The disagreement score of a block at a profile: each member compares her
/// gain with the best she attains anywhere on the equilibrium set, through
/// her fairness function.
pub fn disagreement(
    cg: &CoalitionGame,
    set: &EquilibriumSet,
    block: usize,
    profile: &BlockProfile,
) -> Result<f64> {
    if set.profiles.is_empty() {
        return Err(CoopError::Internal {
            detail: "disagreement against an empty equilibrium set".to_string(),
        });
    }
    let mut total = 0.0;
    for &i in cg.members(block) {
        let best = set
            .profiles
            .iter()
            .map(|s| s.expected_gain(cg, i))
            .max()
            .expect("non-empty set");
        let own = profile.expected_gain(cg, i);
        total += cg.game.fairness.eval(&best, &own);
    }
    Ok(total)
}

/// The subset of the equilibrium set minimizing the block's disagreement.
pub fn acceptable_equilibria(
    cg: &CoalitionGame,
    set: &EquilibriumSet,
    block: usize,
) -> Result<Vec<BlockProfile>> {
    let scores: Vec<f64> = set
        .profiles
        .iter()
        .map(|p| disagreement(cg, set, block, p))
        .collect::<Result<_>>()?;
    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = DIS_TOL * (1.0 + min.abs());
    Ok(set
        .profiles
        .iter()
        .zip(&scores)
        .filter(|(_, &s)| s <= min + tol)
        .map(|(p, _)| p.clone())
        .collect())
}

/// The per-block joint-optimum profiles M̃ and their product reassembly M(p).
#[derive(Clone)]
pub struct MaxJointSet {
    /// Per block: acceptable equilibria with maximal block gain (single-block
    /// structures also carry the uniform barycenter when it stays acceptable).
    pub per_block: Vec<Vec<BlockProfile>>,
    /// The reassembled product set M(p): independent per-player profiles
    /// built from the members' marginals, one choice per block.
    pub profiles: Vec<MixedProfile>,
    /// Inherited from the equilibrium computation.
    pub complete: bool,
}

/// Selects, per block, the acceptable equilibria with maximal block gain and
/// reassembles the cross-block product set M(p) from member marginals.
pub fn max_joint_profiles(cg: &CoalitionGame, set: &EquilibriumSet) -> Result<MaxJointSet> {
    let mut per_block = Vec::with_capacity(cg.num_blocks());
    for b in 0..cg.num_blocks() {
        let acc = acceptable_equilibria(cg, set, b)?;
        let best = acc
            .iter()
            .map(|p| p.block_gain(cg, b))
            .max()
            .ok_or_else(|| CoopError::Internal {
                detail: "empty acceptable set".to_string(),
            })?;
        let mut tilde: Vec<BlockProfile> =
            acc.into_iter().filter(|p| p.block_gain(cg, b) == best).collect();
        if cg.num_blocks() == 1 && tilde.len() > 1 {
            // The one-player merged game's Nash set is every measure on the
            // optima; the uniform barycenter is kept as a representative
            // interior point when it is itself acceptable.
            let w = ratio(1, tilde.len() as i64);
            let mixed = BlockStrategy::normalize(
                tilde
                    .iter()
                    .flat_map(|p| {
                        p.blocks[0]
                            .support
                            .iter()
                            .map(|(a, q)| (a.clone(), q * w.clone()))
                            .collect::<Vec<_>>()
                    })
                    .collect(),
            );
            let bary = BlockProfile { blocks: vec![mixed] };
            let min_dis = disagreement(cg, set, b, &tilde[0])?;
            let bary_dis = disagreement(cg, set, b, &bary)?;
            if bary_dis <= min_dis + DIS_TOL * (1.0 + min_dis.abs()) && !tilde.contains(&bary)
            {
                tilde.push(bary);
            }
        }
        per_block.push(tilde);
    }
    // Cross product over blocks of the per-player marginal assemblies.
    let mut profiles: Vec<MixedProfile> = Vec::new();
    let mut choice = vec![0usize; cg.num_blocks()];
    loop {
        let mut strategies: Vec<MixedStrategy> = vec![MixedStrategy::pure(0); cg.game.num_players()];
        for b in 0..cg.num_blocks() {
            let bp = &per_block[b][choice[b]];
            for &i in cg.members(b) {
                strategies[i] = bp.marginal(cg, i);
            }
        }
        profiles.push(MixedProfile { strategies });
        let mut b = cg.num_blocks();
        loop {
            if b == 0 {
                profiles.sort();
                profiles.dedup();
                return Ok(MaxJointSet { per_block, profiles, complete: set.complete });
            }
            b -= 1;
            choice[b] += 1;
            if choice[b] < per_block[b].len() {
                break;
            }
            choice[b] = 0;
        }
    }
}
