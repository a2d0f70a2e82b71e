//! Randomized battery comparing the proposal algorithms against the
//! brute-force oracle on small markets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::da::{deferred_acceptance, Matching};
use crate::error::{Error, Result};
use crate::interviews::interview_schedule;
use crate::market::{
    generate_market, replication_seed, to_preferences, Acceptability, MarketConfig,
};
use crate::oracle::{
    enumerate_pairwise_stable, enumerate_stable, is_pairwise_stable, responsively_weakly_prefers,
    MAX_ENUMERATE_SCHEDULE,
};
use crate::profile::{PreferenceProfile, Side};

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOptions {
    /// Each side has between 1 and `max_n` agents.
    pub max_n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Interview capacities `(k, k')`, cycled through by trial.
    pub capacities: Vec<(usize, usize)>,
}

impl VerifyOptions {
    pub fn new(max_n: usize, trials: usize, seed: u64) -> Self {
        VerifyOptions {
            max_n,
            trials,
            seed,
            capacities: vec![(2, 2)],
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub trials: usize,
    pub stable_matchings: usize,
    pub pairwise_stable_schedules: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random small profiles; half the trials use a zero outside option so lists
/// are truncated and acceptability is not mutual.
pub fn random_profiles(
    rng: &mut ChaCha8Rng,
    max_n: usize,
) -> Result<(PreferenceProfile, PreferenceProfile)> {
    let config = MarketConfig {
        n_doctors: rng.random_range(1..=max_n),
        n_hospitals: rng.random_range(1..=max_n),
        lambda_d: rng.random::<f64>(),
        lambda_h: rng.random::<f64>(),
        distribution: Default::default(),
        acceptability: if rng.random_bool(0.5) {
            Acceptability::AllAcceptable
        } else {
            Acceptability::OutsideOptionZero
        },
        seed: rng.random(),
    };
    let m = generate_market(&config)?;
    Ok((
        to_preferences(&m, Side::Doctor),
        to_preferences(&m, Side::Hospital),
    ))
}

fn key(profile: &PreferenceProfile, agent: usize, partner: Option<usize>) -> usize {
    partner
        .and_then(|p| profile.position(agent, p))
        .unwrap_or(usize::MAX)
}

fn matched_sets(m: &Matching) -> (Vec<bool>, Vec<bool>) {
    (
        m.doctor_assignments().iter().map(Option::is_some).collect(),
        m.hospital_assignments()
            .iter()
            .map(Option::is_some)
            .collect(),
    )
}

struct TrialOutcome {
    stable: usize,
    schedules: usize,
    failures: Vec<String>,
}

fn trial(index: usize, options: &VerifyOptions) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(replication_seed(options.seed, index as u64));
    let (d, h) = random_profiles(&mut rng, options.max_n)?;
    let (k, k_prime) = options.capacities[index % options.capacities.len()];
    let mut failures = Vec::new();
    let mut fail = |msg: String| failures.push(format!("trial {index}: {msg}"));

    let stable = enumerate_stable(&d, &h)?;
    let by_doctors = deferred_acceptance(&d, &h, Side::Doctor)?;
    let by_hospitals = deferred_acceptance(&d, &h, Side::Hospital)?;
    if stable.is_empty() {
        fail("no stable matching enumerated".into());
    }
    if !stable.contains(&by_doctors) {
        fail("doctor-proposing DA output is not in the stable set".into());
    }
    if !stable.contains(&by_hospitals) {
        fail("hospital-proposing DA output is not in the stable set".into());
    }
    for s in &stable {
        for x in 0..d.n_agents() {
            let other = key(&d, x, s.doctor(x));
            if key(&d, x, by_doctors.doctor(x)) > other {
                fail(format!(
                    "doctor {x} does better than doctor-proposing DA in a stable matching"
                ));
            }
            if key(&d, x, by_hospitals.doctor(x)) < other {
                fail(format!(
                    "doctor {x} does worse than hospital-proposing DA in a stable matching"
                ));
            }
        }
        for y in 0..h.n_agents() {
            let other = key(&h, y, s.hospital(y));
            if key(&h, y, by_doctors.hospital(y)) < other {
                fail(format!(
                    "hospital {y} does worse than doctor-proposing DA in a stable matching"
                ));
            }
        }
        if matched_sets(s) != matched_sets(&by_doctors) {
            fail("matched agents differ across stable matchings".into());
        }
    }

    let schedule = interview_schedule(&d, &h, k, k_prime)?;
    let report = is_pairwise_stable(&schedule, &d, &h, k, k_prime);
    for v in &report.violations {
        fail(format!("schedule violation: {v}"));
    }
    let schedules = enumerate_pairwise_stable(&d, &h, k, k_prime)?;
    if !schedules.contains(&schedule) {
        fail("scheduler output missing from enumerated pairwise-stable schedules".into());
    }
    for s in &schedules {
        for x in 0..d.n_agents() {
            if !responsively_weakly_prefers(&d, x, schedule.doctor(x), s.doctor(x)) {
                fail(format!(
                    "doctor {x} prefers interview set {:?} to scheduler's {:?}",
                    s.doctor(x),
                    schedule.doctor(x)
                ));
            }
        }
    }
    Ok(TrialOutcome {
        stable: stable.len(),
        schedules: schedules.len(),
        failures,
    })
}

/// Runs `options.trials` independent checks.
pub fn run_verify(options: &VerifyOptions) -> Result<VerifyReport> {
    if options.max_n == 0 || options.max_n > MAX_ENUMERATE_SCHEDULE {
        return Err(Error::InvalidConfig(format!(
            "verify needs 1 <= n <= {MAX_ENUMERATE_SCHEDULE}, got {}",
            options.max_n
        )));
    }
    if options.capacities.is_empty() || options.capacities.iter().any(|&(a, b)| a == 0 || b == 0) {
        return Err(Error::InvalidConfig("capacities must be positive".into()));
    }
    let outcomes = (0..options.trials)
        .into_par_iter()
        .map(|t| trial(t, options))
        .collect::<Result<Vec<_>>>()?;
    let mut report = VerifyReport {
        trials: options.trials,
        ..Default::default()
    };
    for o in outcomes {
        report.stable_matchings += o.stable;
        report.pairwise_stable_schedules += o.schedules;
        report.failures.extend(o.failures);
    }
    Ok(report)
}
