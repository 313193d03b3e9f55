//! Coalition structures (set partitions of the player set) and their
//! canonical enumeration.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoopError, Result};

/// Default cap on the player count for full enumeration (Bell(8) = 4140).
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// A partition of the player set `{0, …, N-1}` into disjoint non-empty
/// blocks. Blocks and their members are kept sorted so equal structures
/// compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoalitionStructure {
    blocks: Vec<Vec<usize>>,
}

impl CoalitionStructure {
    /// Builds a structure after validating that `blocks` partitions
    /// `{0, …, n-1}`.
    pub fn new(mut blocks: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort();
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(CoopError::InvalidPartition { detail: "empty block".to_string() });
            }
            for &i in b {
                if i >= n {
                    return Err(CoopError::InvalidPartition {
                        detail: format!("player index {i} out of range for {n} players"),
                    });
                }
                if seen[i] {
                    return Err(CoopError::InvalidPartition {
                        detail: format!("player {} appears twice", i + 1),
                    });
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(CoopError::InvalidPartition {
                detail: "blocks do not cover the player set".to_string(),
            });
        }
        Ok(CoalitionStructure { blocks })
    }

    /// The grand coalition `({1, …, N})`.
    pub fn grand(n: usize) -> Self {
        CoalitionStructure { blocks: vec![(0..n).collect()] }
    }

    /// The selfish structure `({1}, …, {N})`.
    pub fn selfish(n: usize) -> Self {
        CoalitionStructure { blocks: (0..n).map(|i| vec![i]).collect() }
    }

    /// The sorted blocks.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Number of players covered.
    pub fn num_players(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Index of the block containing `player`.
    pub fn block_of(&self, player: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&player))
            .expect("player covered by construction")
    }

    /// True when every block is a singleton.
    pub fn is_selfish(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// True when there is a single block.
    pub fn is_grand(&self) -> bool {
        self.blocks.len() == 1
    }

    /// The meet with `other`: the coarsest structure refining both, obtained
    /// by intersecting blocks pairwise.
    pub fn meet(&self, other: &CoalitionStructure) -> CoalitionStructure {
        let mut blocks = Vec::new();
        for a in &self.blocks {
            for b in &other.blocks {
                let inter: Vec<usize> = a.iter().copied().filter(|i| b.contains(i)).collect();
                if !inter.is_empty() {
                    blocks.push(inter);
                }
            }
        }
        blocks.sort();
        CoalitionStructure { blocks }
    }

    /// Compact display such as `({1,2},{3})` (players shown 1-based).
    pub fn display(&self) -> String {
        let mut out = String::from("(");
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push('{');
            for (j, i) in b.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{}", i + 1));
            }
            out.push('}');
        }
        out.push(')');
        out
    }
}

/// Enumerates all coalition structures of `n` players in canonical order:
/// ascending block count, then lexicographic on the sorted block lists.
///
/// Partitions are generated through restricted growth strings: the i-th
/// entry names the block of player i and may exceed the running maximum by
/// at most one (Knuth, TAOCP 4A, 7.2.1.5).
pub fn enumerate_coalition_structures(n: usize) -> Result<Vec<CoalitionStructure>> {
    enumerate_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

/// As [`enumerate_coalition_structures`] with an explicit player-count cap.
pub fn enumerate_with_cap(n: usize, cap: usize) -> Result<Vec<CoalitionStructure>> {
    if n == 0 {
        return Err(CoopError::InvalidParameter {
            detail: "need at least one player".to_string(),
        });
    }
    if n > cap {
        return Err(CoopError::Capacity {
            detail: format!(
                "coalition-structure enumeration for {n} players exceeds the cap of {cap}; \
                 raise the cap explicitly if the Bell-number blowup is acceptable"
            ),
        });
    }
    let mut rgs = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let k = rgs.iter().copied().max().unwrap_or(0) + 1;
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        out.push(CoalitionStructure::new(blocks, n)?);
        // Advance the restricted growth string.
        let mut i = n;
        loop {
            if i <= 1 {
                // All strings exhausted.
                out.sort_by(|a, b| {
                    a.num_blocks().cmp(&b.num_blocks()).then_with(|| a.blocks.cmp(&b.blocks))
                });
                return Ok(out);
            }
            i -= 1;
            if rgs[i] <= maxes[i - 1] {
                break;
            }
        }
        rgs[i] += 1;
        maxes[i] = maxes[i - 1].max(rgs[i]);
        for j in i + 1..n {
            rgs[j] = 0;
            maxes[j] = maxes[j - 1];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell(n: usize) -> usize {
        // Bell triangle.
        let mut row = vec![1usize];
        for _ in 1..n {
            let mut next = vec![*row.last().unwrap()];
            for v in &row {
                let last = *next.last().unwrap();
                next.push(last + v);
            }
            row = next;
        }
        *row.last().unwrap()
    }

    #[test]
    fn counts_match_bell_numbers() {
        for n in 1..=6 {
            let all = enumerate_coalition_structures(n).unwrap();
            assert_eq!(all.len(), bell(n), "n = {n}");
            // No duplicates.
            let mut sorted = all.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), all.len());
        }
    }

    #[test]
    fn two_player_structures() {
        let all = enumerate_coalition_structures(2).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0], CoalitionStructure::grand(2));
        assert_eq!(all[1], CoalitionStructure::selfish(2));
    }

    #[test]
    fn canonical_order_by_block_count() {
        let all = enumerate_coalition_structures(4).unwrap();
        assert_eq!(all.len(), 15);
        assert!(all.windows(2).all(|w| w[0].num_blocks() <= w[1].num_blocks()));
        assert_eq!(all[0], CoalitionStructure::grand(4));
        assert_eq!(all[14], CoalitionStructure::selfish(4));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_coalition_structures(9),
            Err(CoopError::Capacity { .. })
        ));
    }

    #[test]
    fn meet_refines_both() {
        let a = CoalitionStructure::new(vec![vec![0, 1, 2], vec![3]], 4).unwrap();
        let b = CoalitionStructure::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        let m = a.meet(&b);
        assert_eq!(m.blocks(), &[vec![0, 1], vec![2], vec![3]]);
    }
}
