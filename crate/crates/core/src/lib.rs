//! Simulation toolkit for two-sided matching markets with a pre-match
//! interview stage.
//!
//! The pipeline is: draw a [`MarketInstance`] from the common/idiosyncratic
//! utility model, convert it to strict [`PreferenceProfile`]s, schedule
//! interviews as the doctor-optimal `(k, k')` pairwise-stable many-to-many
//! matching, truncate both sides' preferences to their interview partners and
//! run one-to-one deferred acceptance (Int-DA). Plain DA and top-`k`
//! truncated DA (Tr-DA) serve as baselines, and [`metrics`] computes the
//! match statistics compared across them.
//!
//! [`oracle`] holds brute-force checkers used as ground truth in tests and in
//! the `verify` battery.

pub mod da;
pub mod error;
pub mod example;
pub mod experiments;
pub mod interviews;
pub mod market;
pub mod metrics;
pub mod oracle;
pub mod profile;

pub use da::{deferred_acceptance, rank_of_match, serial_dictatorship, Matching};
pub use error::{Error, Result};
pub use interviews::{
    int_da, interview_schedule, truncate_by_interviews, truncate_top_k, InterviewSchedule,
};
pub use market::{
    generate_market, replication_seed, to_preferences, Acceptability, Distribution, MarketConfig,
    MarketInstance,
};
pub use metrics::{Mechanism, MetricsRecord};
pub use profile::{PreferenceProfile, Side};
