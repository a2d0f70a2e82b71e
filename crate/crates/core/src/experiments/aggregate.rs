use serde::{Deserialize, Serialize};

use crate::metrics::{Mechanism, MetricsRecord};

/// Averages over replications, pooled across doctors.
///
/// Statistics conditional on a doctor group (matched or unmatched) are
/// weighted by the group's size in each replication, so every doctor counts
/// once; all other statistics are plain means over replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub n: usize,
    pub n_hospitals: usize,
    pub lambda_d: f64,
    pub lambda_h: f64,
    pub k: usize,
    pub k_prime: usize,
    pub mechanism: Mechanism,
    pub replications: usize,
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

type GroupKey = (usize, usize, u64, u64, usize, usize, Mechanism);

fn key(r: &MetricsRecord) -> GroupKey {
    (
        r.n,
        r.n_hospitals,
        r.lambda_d.to_bits(),
        r.lambda_h.to_bits(),
        r.k,
        r.k_prime,
        r.mechanism,
    )
}

fn mean(rows: &[&MetricsRecord], f: impl Fn(&MetricsRecord) -> f64) -> f64 {
    rows.iter().map(|r| f(r)).sum::<f64>() / rows.len() as f64
}

fn weighted(
    rows: &[&MetricsRecord],
    weight: impl Fn(&MetricsRecord) -> usize,
    f: impl Fn(&MetricsRecord) -> f64,
) -> f64 {
    let (mut num, mut den) = (0.0, 0usize);
    for r in rows {
        let w = weight(r);
        if w > 0 {
            num += f(r) * w as f64;
            den += w;
        }
    }
    if den == 0 {
        f64::NAN
    } else {
        num / den as f64
    }
}

/// One row per `(n, lambda_d, lambda_h, k, k_prime, mechanism)` group, in
/// order of first appearance.
pub fn aggregate(records: &[MetricsRecord]) -> Vec<AggregateRow> {
    let mut groups: Vec<(GroupKey, Vec<&MetricsRecord>)> = Vec::new();
    for r in records {
        let k = key(r);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, rows)) => rows.push(r),
            None => groups.push((k, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(_, rows)| {
            let first = rows[0];
            let matched = |r: &MetricsRecord| r.matched_doctors;
            AggregateRow {
                n: first.n,
                n_hospitals: first.n_hospitals,
                lambda_d: first.lambda_d,
                lambda_h: first.lambda_h,
                k: first.k,
                k_prime: first.k_prime,
                mechanism: first.mechanism,
                replications: rows.len(),
                unmatched_fraction: mean(&rows, |r| r.unmatched_fraction),
                unmatched_fraction_hospitals: mean(&rows, |r| r.unmatched_fraction_hospitals),
                first_rank_fraction: weighted(&rows, matched, |r| r.first_rank_fraction),
                top3_rank_fraction: weighted(&rows, matched, |r| r.top3_rank_fraction),
                first_rank_fraction_all: mean(&rows, |r| r.first_rank_fraction_all),
                top3_rank_fraction_all: mean(&rows, |r| r.top3_rank_fraction_all),
                first_rank_fraction_raw: weighted(&rows, matched, |r| r.first_rank_fraction_raw),
                top3_rank_fraction_raw: weighted(&rows, matched, |r| r.top3_rank_fraction_raw),
                same_partner_on_swap_fraction: mean(&rows, |r| r.same_partner_on_swap_fraction),
                identical_to_da_fraction: mean(&rows, |r| r.identical_to_da_fraction),
                improved_rank_fraction: weighted(&rows, matched, |r| r.improved_rank_fraction),
                improved_rank_fraction_all: mean(&rows, |r| r.improved_rank_fraction_all),
                blocking_fraction_matched: weighted(&rows, matched, |r| {
                    r.blocking_fraction_matched
                }),
                blocking_fraction_unmatched: weighted(
                    &rows,
                    |r| r.unmatched_doctors,
                    |r| r.blocking_fraction_unmatched,
                ),
            }
        })
        .collect()
}

impl AggregateRow {
    /// The value a statistic takes, by CSV column name.
    pub fn get(&self, column: &str) -> Option<f64> {
        Some(match column {
            "unmatched_fraction" => self.unmatched_fraction,
            "unmatched_fraction_hospitals" => self.unmatched_fraction_hospitals,
            "first_rank_fraction" => self.first_rank_fraction,
            "top3_rank_fraction" => self.top3_rank_fraction,
            "first_rank_fraction_all" => self.first_rank_fraction_all,
            "top3_rank_fraction_all" => self.top3_rank_fraction_all,
            "first_rank_fraction_raw" => self.first_rank_fraction_raw,
            "top3_rank_fraction_raw" => self.top3_rank_fraction_raw,
            "same_partner_on_swap_fraction" => self.same_partner_on_swap_fraction,
            "identical_to_da_fraction" => self.identical_to_da_fraction,
            "improved_rank_fraction" => self.improved_rank_fraction,
            "improved_rank_fraction_all" => self.improved_rank_fraction_all,
            "blocking_fraction_matched" => self.blocking_fraction_matched,
            "blocking_fraction_unmatched" => self.blocking_fraction_unmatched,
            _ => return None,
        })
    }
}
