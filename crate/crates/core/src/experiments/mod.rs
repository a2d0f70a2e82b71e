//! Seeded batch simulations and their CSV artifacts.
//!
//! Every replication draws a fresh market from
//! [`replication_seed`]`(base_seed, replication)`; the same replication index
//! reuses the same seed in every `(lambda_d, lambda_h)` cell. Replications run
//! in parallel and are merged in replication order, so output is identical
//! regardless of scheduling.
//!
//! # CSV schema
//!
//! One row per `(cell, replication, mechanism)`, columns in the order of
//! [`MetricsRecord`]'s fields:
//!
//! `run_id, seed, n, n_hospitals, lambda_d, lambda_h, k, k_prime, mechanism,
//! proposing_side, matched_doctors, unmatched_doctors, unmatched_fraction,
//! unmatched_fraction_hospitals, first_rank_fraction, top3_rank_fraction,
//! first_rank_fraction_all, top3_rank_fraction_all, first_rank_fraction_raw,
//! top3_rank_fraction_raw, same_partner_on_swap_fraction,
//! identical_to_da_fraction, improved_rank_fraction,
//! improved_rank_fraction_all, blocking_fraction_matched,
//! blocking_fraction_unmatched`
//!
//! Matching statistics describe the doctor-proposing run; the swap fraction
//! compares it with the hospital-proposing run on the same submitted
//! preferences. Tr-DA truncates doctors' lists to their top `k` entries while
//! hospitals submit complete lists; `k_prime` only applies to interviews.

mod aggregate;
pub mod example_report;
mod output;
mod spec;
pub mod sweep;
pub mod verify;

use rayon::prelude::*;

pub use aggregate::{aggregate, AggregateRow};
pub use output::{default_output_path, read_records, Artifacts, OUTPUT_DIR_ENV};
pub use spec::{ExperimentSpec, Pairing, Sweep};

use crate::da::deferred_acceptance;
use crate::error::Result;
use crate::interviews::{truncate_top_k, InterviewStage};
use crate::market::{generate_market, replication_seed, to_preferences, MarketConfig};
use crate::metrics::{
    blocking_proportions, identical_to_da, rank_fractions, rank_improvement, same_partner_on_swap,
    unmatched_fraction, Mechanism, MetricsRecord,
};
use crate::profile::{PreferenceProfile, Side};
use crate::Matching;

/// Records and aggregates of one experiment.
#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub spec: ExperimentSpec,
    pub records: Vec<MetricsRecord>,
    pub summary: Vec<AggregateRow>,
    pub seeds: Vec<u64>,
}

/// Runs every requested mechanism on `spec.replications` markets per cell.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentRun> {
    spec.validate()?;
    let cells = spec.cells();
    let reps = spec.replications;
    let seeds: Vec<u64> = (0..reps as u64)
        .map(|r| replication_seed(spec.market.seed, r))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..reps).map(move |r| (c, r)))
        .collect();
    let per_job: Vec<Vec<MetricsRecord>> = jobs
        .par_iter()
        .map(|&(c, r)| {
            let (lambda_d, lambda_h) = cells[c];
            let config = MarketConfig {
                lambda_d,
                lambda_h,
                seed: seeds[r],
                ..spec.market.clone()
            };
            replicate(&config, spec, (c * reps + r) as u64)
        })
        .collect::<Result<_>>()?;
    let records: Vec<MetricsRecord> = per_job.into_iter().flatten().collect();
    let summary = aggregate(&records);
    Ok(ExperimentRun {
        spec: spec.clone(),
        records,
        summary,
        seeds,
    })
}

/// Submitted profiles and matchings of one mechanism.
struct Outcome {
    doctors: PreferenceProfile,
    doctor_proposing: Matching,
    hospital_proposing: Matching,
}

/// All mechanisms of `spec` on the market drawn from `config`.
pub fn replicate(
    config: &MarketConfig,
    spec: &ExperimentSpec,
    run_id: u64,
) -> Result<Vec<MetricsRecord>> {
    let market = generate_market(config)?;
    let doctors = to_preferences(&market, Side::Doctor);
    let hospitals = to_preferences(&market, Side::Hospital);
    let da = deferred_acceptance(&doctors, &hospitals, Side::Doctor)?;

    spec.mechanisms
        .iter()
        .map(|&mechanism| {
            let outcome = match mechanism {
                Mechanism::Da => Outcome {
                    doctor_proposing: da.clone(),
                    hospital_proposing: deferred_acceptance(&doctors, &hospitals, Side::Hospital)?,
                    doctors: doctors.clone(),
                },
                Mechanism::IntDa => {
                    let stage = InterviewStage::run(&doctors, &hospitals, spec.k, spec.k_prime)?;
                    Outcome {
                        doctor_proposing: stage.match_with(Side::Doctor),
                        hospital_proposing: stage.match_with(Side::Hospital),
                        doctors: stage.doctors,
                    }
                }
                Mechanism::TrDa => {
                    // Only doctors cut their lists; hospitals rank everyone.
                    let d = truncate_top_k(&doctors, spec.k);
                    Outcome {
                        doctor_proposing: deferred_acceptance(&d, &hospitals, Side::Doctor)?,
                        hospital_proposing: deferred_acceptance(&d, &hospitals, Side::Hospital)?,
                        doctors: d,
                    }
                }
            };
            record(
                config, spec, run_id, mechanism, &outcome, &da, &doctors, &hospitals,
            )
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn record(
    config: &MarketConfig,
    spec: &ExperimentSpec,
    run_id: u64,
    mechanism: Mechanism,
    outcome: &Outcome,
    da: &Matching,
    full_doctors: &PreferenceProfile,
    full_hospitals: &PreferenceProfile,
) -> Result<MetricsRecord> {
    let m = &outcome.doctor_proposing;
    let submitted = rank_fractions(m, &outcome.doctors, &[1, 3])?;
    let raw = rank_fractions(m, full_doctors, &[1, 3])?;
    let improvement = rank_improvement(m, &outcome.doctors, da, full_doctors)?;
    let blocking = blocking_proportions(m, full_doctors, full_hospitals);
    Ok(MetricsRecord {
        run_id,
        seed: config.seed,
        n: config.n_doctors,
        n_hospitals: config.n_hospitals,
        lambda_d: config.lambda_d,
        lambda_h: config.lambda_h,
        k: spec.k,
        k_prime: spec.k_prime,
        mechanism,
        proposing_side: Side::Doctor,
        matched_doctors: submitted.matched,
        unmatched_doctors: submitted.total - submitted.matched,
        unmatched_fraction: unmatched_fraction(m, Side::Doctor),
        unmatched_fraction_hospitals: unmatched_fraction(m, Side::Hospital),
        first_rank_fraction: submitted.conditional(0),
        top3_rank_fraction: submitted.conditional(1),
        first_rank_fraction_all: submitted.unconditional(0),
        top3_rank_fraction_all: submitted.unconditional(1),
        first_rank_fraction_raw: raw.conditional(0),
        top3_rank_fraction_raw: raw.conditional(1),
        same_partner_on_swap_fraction: same_partner_on_swap(m, &outcome.hospital_proposing),
        identical_to_da_fraction: identical_to_da(m, da),
        improved_rank_fraction: improvement.conditional(),
        improved_rank_fraction_all: improvement.unconditional(),
        blocking_fraction_matched: blocking.matched.unwrap_or(f64::NAN),
        blocking_fraction_unmatched: blocking.unmatched.unwrap_or(f64::NAN),
    })
}
