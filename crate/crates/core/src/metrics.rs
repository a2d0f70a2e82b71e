//! Match statistics: unmatched rates, reported-rank distributions, core
//! size, agreement with DA and blocking incidence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::da::{rank_of_match, Matching};
use crate::error::{Error, Result};
use crate::profile::{PreferenceProfile, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mechanism {
    /// Deferred acceptance on full preferences.
    #[serde(rename = "DA")]
    Da,
    /// Interview scheduling, then DA on interview-truncated preferences.
    #[serde(rename = "Int-DA")]
    IntDa,
    /// DA on preferences cut to the top `k` entries.
    #[serde(rename = "Tr-DA")]
    TrDa,
}

impl Mechanism {
    pub const ALL: [Mechanism; 3] = [Mechanism::Da, Mechanism::IntDa, Mechanism::TrDa];

    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::Da => "DA",
            Mechanism::IntDa => "Int-DA",
            Mechanism::TrDa => "Tr-DA",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mechanism::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown mechanism {s:?}")))
    }
}

/// One CSV row: statistics of one mechanism in one replication.
///
/// Rank fractions without suffix are conditional on being matched; `_all`
/// variants divide by every doctor. Ranks are measured in the preferences
/// submitted to the match (full for DA, interview-truncated for Int-DA,
/// top-`k` for Tr-DA); `_raw` variants measure the same partners in full
/// preferences. Blocking fractions are `NaN` when the group is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub run_id: u64,
    pub seed: u64,
    pub n: usize,
    pub n_hospitals: usize,
    pub lambda_d: f64,
    pub lambda_h: f64,
    pub k: usize,
    pub k_prime: usize,
    pub mechanism: Mechanism,
    pub proposing_side: Side,
    pub matched_doctors: usize,
    pub unmatched_doctors: usize,
    pub unmatched_fraction: f64,
    pub unmatched_fraction_hospitals: f64,
    pub first_rank_fraction: f64,
    pub top3_rank_fraction: f64,
    pub first_rank_fraction_all: f64,
    pub top3_rank_fraction_all: f64,
    pub first_rank_fraction_raw: f64,
    pub top3_rank_fraction_raw: f64,
    pub same_partner_on_swap_fraction: f64,
    pub identical_to_da_fraction: f64,
    pub improved_rank_fraction: f64,
    pub improved_rank_fraction_all: f64,
    pub blocking_fraction_matched: f64,
    pub blocking_fraction_unmatched: f64,
}

/// Unmatched agents on `side` over the side's size.
pub fn unmatched_fraction(matching: &Matching, side: Side) -> f64 {
    let n = matching.n_agents(side);
    if n == 0 {
        return 0.0;
    }
    let unmatched = (0..n)
        .filter(|&a| matching.partner(side, a).is_none())
        .count();
    unmatched as f64 / n as f64
}

/// Counts of matched agents whose rank is within each threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankFractions {
    pub thresholds: Vec<usize>,
    pub within: Vec<usize>,
    pub matched: usize,
    pub total: usize,
}

impl RankFractions {
    /// Share of matched agents with rank `<= thresholds[i]`; 0 if nobody matched.
    pub fn conditional(&self, i: usize) -> f64 {
        if self.matched == 0 {
            0.0
        } else {
            self.within[i] as f64 / self.matched as f64
        }
    }

    /// Share of all agents with rank `<= thresholds[i]`.
    pub fn unconditional(&self, i: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.within[i] as f64 / self.total as f64
        }
    }
}

/// Rank distribution of matched partners, ranks taken in `profile`.
pub fn rank_fractions(
    matching: &Matching,
    profile: &PreferenceProfile,
    thresholds: &[usize],
) -> Result<RankFractions> {
    let mut within = vec![0; thresholds.len()];
    let mut matched = 0;
    for a in 0..profile.n_agents() {
        if let Some(rank) = rank_of_match(matching, profile, a)? {
            matched += 1;
            for (count, &t) in within.iter_mut().zip(thresholds) {
                if rank <= t {
                    *count += 1;
                }
            }
        }
    }
    Ok(RankFractions {
        thresholds: thresholds.to_vec(),
        within,
        matched,
        total: profile.n_agents(),
    })
}

fn same_doctor_assignment(a: &Matching, b: &Matching) -> f64 {
    debug_assert_eq!(a.n_doctors(), b.n_doctors());
    let n = a.n_doctors();
    if n == 0 {
        return 1.0;
    }
    let same = a
        .doctor_assignments()
        .iter()
        .zip(b.doctor_assignments())
        .filter(|(x, y)| x == y)
        .count();
    same as f64 / n as f64
}

/// Share of doctors with the same assignment in both matchings (unmatched in
/// both counts as the same).
pub fn same_partner_on_swap(matching_a: &Matching, matching_b: &Matching) -> f64 {
    same_doctor_assignment(matching_a, matching_b)
}

/// Share of doctors whose Int-DA assignment equals their DA assignment.
pub fn identical_to_da(matching_int: &Matching, matching_da: &Matching) -> f64 {
    same_doctor_assignment(matching_int, matching_da)
}

/// Doctors whose rank in `submitted` under `matching` is strictly better than
/// their rank in `full` under `baseline`. An unmatched baseline rank counts
/// as worse than any rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankImprovement {
    pub improved: usize,
    pub matched: usize,
    pub total: usize,
}

impl RankImprovement {
    pub fn conditional(&self) -> f64 {
        if self.matched == 0 {
            0.0
        } else {
            self.improved as f64 / self.matched as f64
        }
    }

    pub fn unconditional(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.improved as f64 / self.total as f64
        }
    }
}

pub fn rank_improvement(
    matching: &Matching,
    submitted: &PreferenceProfile,
    baseline: &Matching,
    full: &PreferenceProfile,
) -> Result<RankImprovement> {
    let mut improved = 0;
    let mut matched = 0;
    for d in 0..submitted.n_agents() {
        if let Some(r) = rank_of_match(matching, submitted, d)? {
            matched += 1;
            match rank_of_match(baseline, full, d)? {
                Some(base) if r >= base => {}
                _ => improved += 1,
            }
        }
    }
    Ok(RankImprovement {
        improved,
        matched,
        total: submitted.n_agents(),
    })
}

/// Average share of hospitals each doctor forms a blocking pair with, split
/// by whether the doctor is matched. `None` for an empty group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockingProportions {
    pub matched: Option<f64>,
    pub unmatched: Option<f64>,
    pub n_matched: usize,
    pub n_unmatched: usize,
}

/// Blocking pairs are judged against `doctors`/`hospitals`, normally the
/// full (untruncated) preferences.
pub fn blocking_proportions(
    matching: &Matching,
    doctors: &PreferenceProfile,
    hospitals: &PreferenceProfile,
) -> BlockingProportions {
    let nh = hospitals.n_agents();
    let (mut sum_m, mut sum_u) = (0.0, 0.0);
    let (mut n_m, mut n_u) = (0, 0);
    for d in 0..doctors.n_agents() {
        let current = matching.doctor(d);
        let blocks = doctors
            .list(d)
            .iter()
            .take_while(|&&h| Some(h) != current)
            .filter(|&&h| hospitals.prefers(h, d, matching.hospital(h)))
            .count();
        let share = if nh == 0 {
            0.0
        } else {
            blocks as f64 / nh as f64
        };
        if current.is_some() {
            sum_m += share;
            n_m += 1;
        } else {
            sum_u += share;
            n_u += 1;
        }
    }
    BlockingProportions {
        matched: (n_m > 0).then(|| sum_m / n_m as f64),
        unmatched: (n_u > 0).then(|| sum_u / n_u as f64),
        n_matched: n_m,
        n_unmatched: n_u,
    }
}
