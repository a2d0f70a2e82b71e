//! DA-only sweep over `(lambda_d, lambda_h)`: share of doctors matched to
//! their first choice and share with the same partner under both proposing
//! directions.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{manifest, to_csv, write_file};
use super::{Artifacts, ExperimentSpec};
use crate::da::deferred_acceptance;
use crate::error::{Error, Result};
use crate::market::{generate_market, replication_seed, to_preferences, MarketConfig};
use crate::metrics::{rank_fractions, same_partner_on_swap};
use crate::profile::Side;

/// One cell of the sweep, averaged over replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda_d: f64,
    pub lambda_h: f64,
    pub n: usize,
    pub replications: usize,
    pub first_rank_fraction: f64,
    pub first_rank_fraction_all: f64,
    pub same_partner_on_swap_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct SweepRun {
    pub spec: ExperimentSpec,
    pub rows: Vec<SweepRow>,
    pub seeds: Vec<u64>,
}

struct CellSample {
    first: usize,
    matched: usize,
    first_all: f64,
    same: f64,
}

fn sample(config: &MarketConfig) -> Result<CellSample> {
    let market = generate_market(config)?;
    let d = to_preferences(&market, Side::Doctor);
    let h = to_preferences(&market, Side::Hospital);
    let by_doctors = deferred_acceptance(&d, &h, Side::Doctor)?;
    let by_hospitals = deferred_acceptance(&d, &h, Side::Hospital)?;
    let ranks = rank_fractions(&by_doctors, &d, &[1])?;
    Ok(CellSample {
        first: ranks.within[0],
        matched: ranks.matched,
        first_all: ranks.unconditional(0),
        same: same_partner_on_swap(&by_doctors, &by_hospitals),
    })
}

/// Runs `spec.replications` DA markets in every cell of `spec.sweep`.
/// `spec.mechanisms`, `k` and `k_prime` are ignored.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepRun> {
    spec.validate()?;
    if spec.sweep.is_none() {
        return Err(Error::InvalidConfig("sweep requires a lambda grid".into()));
    }
    let cells = spec.cells();
    let reps = spec.replications;
    let seeds: Vec<u64> = (0..reps as u64)
        .map(|r| replication_seed(spec.market.seed, r))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(lambda_d, lambda_h)| {
            let samples = (0..reps)
                .map(|r| {
                    sample(&MarketConfig {
                        lambda_d,
                        lambda_h,
                        seed: seeds[r],
                        ..spec.market.clone()
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let first: usize = samples.iter().map(|s| s.first).sum();
            let matched: usize = samples.iter().map(|s| s.matched).sum();
            Ok(SweepRow {
                lambda_d,
                lambda_h,
                n: spec.market.n_doctors,
                replications: reps,
                first_rank_fraction: if matched == 0 {
                    0.0
                } else {
                    first as f64 / matched as f64
                },
                first_rank_fraction_all: samples.iter().map(|s| s.first_all).sum::<f64>()
                    / reps as f64,
                same_partner_on_swap_fraction: samples.iter().map(|s| s.same).sum::<f64>()
                    / reps as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepRun {
        spec: spec.clone(),
        rows,
        seeds,
    })
}

impl SweepRun {
    pub fn to_csv(&self) -> Result<String> {
        to_csv(&self.rows)
    }

    pub fn row(&self, lambda_d: f64, lambda_h: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| {
            (r.lambda_d - lambda_d).abs() < 1e-12 && (r.lambda_h - lambda_h).abs() < 1e-12
        })
    }

    /// Writes the cell CSV at `csv_path` and a manifest beside it; returns
    /// both paths.
    pub fn write(&self, csv_path: &Path) -> Result<(PathBuf, PathBuf)> {
        let a = Artifacts::beside(csv_path);
        write_file(&a.csv, &self.to_csv()?)?;
        let m = manifest("sweep", &self.spec, &self.seeds, self.rows.len());
        write_file(&a.manifest, &serde_json::to_string_pretty(&m)?)?;
        Ok((a.csv, a.manifest))
    }
}
