//! Strict ordinal preference lists with O(1) rank lookup.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One side of the market.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Doctor,
    Hospital,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Doctor => Side::Hospital,
            Side::Hospital => Side::Doctor,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Doctor => "doctor",
            Side::Hospital => "hospital",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const UNLISTED: u32 = u32::MAX;

/// Preference lists for every agent on one side, best partner first.
///
/// A list contains exactly the partners the agent finds acceptable. The
/// rank-order of the `j`-th entry is `j` (1-based): one plus the number of
/// partners strictly preferred to it.
#[derive(Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    side: Side,
    n_partners: usize,
    lists: Vec<Vec<usize>>,
    // Row-major `n_agents x n_partners`, 0-based list position or UNLISTED.
    positions: Vec<u32>,
}

impl PreferenceProfile {
    /// Builds a profile for `side`, whose agents rank partners `0..n_partners`.
    ///
    /// Rejects duplicate or out-of-range entries.
    pub fn new(side: Side, n_partners: usize, lists: Vec<Vec<usize>>) -> Result<Self> {
        if n_partners >= UNLISTED as usize {
            return Err(Error::MalformedProfile {
                side: side.as_str(),
                reason: format!("{n_partners} partners exceeds supported size"),
            });
        }
        let mut positions = vec![UNLISTED; lists.len() * n_partners];
        for (agent, list) in lists.iter().enumerate() {
            let row = &mut positions[agent * n_partners..(agent + 1) * n_partners];
            for (pos, &partner) in list.iter().enumerate() {
                if partner >= n_partners {
                    return Err(Error::MalformedProfile {
                        side: side.as_str(),
                        reason: format!(
                            "agent {agent} lists partner {partner}, but only {n_partners} exist"
                        ),
                    });
                }
                if row[partner] != UNLISTED {
                    return Err(Error::MalformedProfile {
                        side: side.as_str(),
                        reason: format!("agent {agent} lists partner {partner} twice"),
                    });
                }
                row[partner] = pos as u32;
            }
        }
        Ok(PreferenceProfile {
            side,
            n_partners,
            lists,
            positions,
        })
    }

    /// Every agent on `side` gets the same list.
    pub fn uniform(side: Side, n_agents: usize, n_partners: usize, list: &[usize]) -> Result<Self> {
        Self::new(side, n_partners, vec![list.to_vec(); n_agents])
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn n_agents(&self) -> usize {
        self.lists.len()
    }

    pub fn n_partners(&self) -> usize {
        self.n_partners
    }

    pub fn list(&self, agent: usize) -> &[usize] {
        &self.lists[agent]
    }

    pub fn lists(&self) -> &[Vec<usize>] {
        &self.lists
    }

    /// 0-based position of `partner` on `agent`'s list.
    #[inline]
    pub fn position(&self, agent: usize, partner: usize) -> Option<usize> {
        match self.positions[agent * self.n_partners + partner] {
            UNLISTED => None,
            p => Some(p as usize),
        }
    }

    /// 1-based rank-order of `partner` for `agent`, `None` if unacceptable.
    #[inline]
    pub fn rank(&self, agent: usize, partner: usize) -> Option<usize> {
        self.position(agent, partner).map(|p| p + 1)
    }

    #[inline]
    pub fn is_acceptable(&self, agent: usize, partner: usize) -> bool {
        self.positions[agent * self.n_partners + partner] != UNLISTED
    }

    /// Whether `agent` strictly prefers `candidate` to `current`, where
    /// `None` stands for remaining unmatched.
    #[inline]
    pub fn prefers(&self, agent: usize, candidate: usize, current: Option<usize>) -> bool {
        let cand = self.positions[agent * self.n_partners + candidate];
        if cand == UNLISTED {
            return false;
        }
        match current {
            None => true,
            Some(cur) => cand < self.positions[agent * self.n_partners + cur],
        }
    }

    /// Keeps only the listed partners for which `keep(agent, partner)` holds,
    /// preserving order.
    pub fn filter<F>(&self, mut keep: F) -> PreferenceProfile
    where
        F: FnMut(usize, usize) -> bool,
    {
        let lists = self
            .lists
            .iter()
            .enumerate()
            .map(|(a, list)| list.iter().copied().filter(|&b| keep(a, b)).collect())
            .collect();
        PreferenceProfile::new(self.side, self.n_partners, lists)
            .expect("a filtered strict profile stays strict")
    }

    /// Whether every agent submits the same list.
    pub fn is_common(&self) -> bool {
        self.lists.windows(2).all(|w| w[0] == w[1])
    }

    /// Checks that `other` ranks this profile's agents, i.e. the two
    /// profiles describe opposite sides of one market.
    pub fn check_counterpart(&self, other: &PreferenceProfile) -> Result<()> {
        if self.side == other.side {
            return Err(Error::DimensionMismatch(format!(
                "both profiles are for the {} side",
                self.side
            )));
        }
        if self.n_partners != other.n_agents() || other.n_partners != self.n_agents() {
            return Err(Error::DimensionMismatch(format!(
                "{} profile is {}x{}, {} profile is {}x{}",
                self.side,
                self.n_agents(),
                self.n_partners,
                other.side,
                other.n_agents(),
                other.n_partners
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for PreferenceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PreferenceProfile")
            .field("side", &self.side)
            .field("n_partners", &self.n_partners)
            .field("lists", &self.lists)
            .finish()
    }
}
