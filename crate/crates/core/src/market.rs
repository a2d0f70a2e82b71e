//! Random market generation from the common/idiosyncratic utility model.
//!
//! Doctor `d` values hospital `h` at `lambda_d * c_h + (1 - lambda_d) * eta_dh`
//! and hospital `h` values doctor `d` at `lambda_h * c_d + (1 - lambda_h) * eta_hd`,
//! with every `c` and `eta` drawn i.i.d. from the configured distribution.
//!
//! # Randomness
//!
//! Draws come from [`ChaCha8Rng`] seeded with [`MarketConfig::seed`] through
//! `SeedableRng::seed_from_u64`, consumed in a fixed order: `c_h` for every
//! hospital, `c_d` for every doctor, then `eta_dh` row by row (doctor-major),
//! then `eta_hd` row by row (hospital-major). Replication seeds are derived
//! with [`replication_seed`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{PreferenceProfile, Side};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Distribution {
    #[default]
    #[serde(rename = "standard-normal")]
    StandardNormal,
    #[serde(rename = "uniform-0-1")]
    Uniform01,
}

impl Distribution {
    fn sample(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Distribution::StandardNormal => rng.sample(StandardNormal),
            Distribution::Uniform01 => rng.random::<f64>(),
        }
    }
}

/// Which partners an agent is willing to be matched with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Acceptability {
    /// Every partner beats staying unmatched.
    #[default]
    AllAcceptable,
    /// Staying unmatched is worth 0; partners with utility `<= 0` are dropped.
    OutsideOptionZero,
}

impl Acceptability {
    fn outside_option(self) -> f64 {
        match self {
            Acceptability::AllAcceptable => f64::NEG_INFINITY,
            Acceptability::OutsideOptionZero => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarketConfig {
    pub n_doctors: usize,
    pub n_hospitals: usize,
    pub lambda_d: f64,
    pub lambda_h: f64,
    #[serde(default)]
    pub distribution: Distribution,
    #[serde(default)]
    pub acceptability: Acceptability,
    #[serde(default)]
    pub seed: u64,
}

impl MarketConfig {
    /// Balanced, all-acceptable, normally distributed market with `lambda_d = lambda_h`.
    pub fn balanced(n: usize, lambda: f64, seed: u64) -> Self {
        MarketConfig {
            n_doctors: n,
            n_hospitals: n,
            lambda_d: lambda,
            lambda_h: lambda,
            distribution: Distribution::StandardNormal,
            acceptability: Acceptability::AllAcceptable,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        MarketConfig {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_doctors == 0 || self.n_hospitals == 0 {
            return Err(Error::InvalidConfig(format!(
                "market needs at least one agent per side, got {} doctors and {} hospitals",
                self.n_doctors, self.n_hospitals
            )));
        }
        for (name, v) in [("lambda_d", self.lambda_d), ("lambda_h", self.lambda_h)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {v} is outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Raw random components of a market, before weighting.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketDraws {
    pub common_hospital: Vec<f64>,
    pub common_doctor: Vec<f64>,
    /// `n_doctors x n_hospitals`, row-major.
    pub idio_doctor: Vec<f64>,
    /// `n_hospitals x n_doctors`, row-major.
    pub idio_hospital: Vec<f64>,
}

impl MarketDraws {
    pub fn sample(config: &MarketConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let dist = config.distribution;
        let (nd, nh) = (config.n_doctors, config.n_hospitals);
        let mut draw =
            |len: usize| -> Vec<f64> { (0..len).map(|_| dist.sample(&mut rng)).collect() };
        let common_hospital = draw(nh);
        let common_doctor = draw(nd);
        let idio_doctor = draw(nd * nh);
        let idio_hospital = draw(nh * nd);
        MarketDraws {
            common_hospital,
            common_doctor,
            idio_doctor,
            idio_hospital,
        }
    }
}

/// Cardinal utilities for both sides plus outside options.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketInstance {
    config: MarketConfig,
    common_hospital: Vec<f64>,
    common_doctor: Vec<f64>,
    u_doctor: Vec<f64>,
    u_hospital: Vec<f64>,
    outside_doctor: Vec<f64>,
    outside_hospital: Vec<f64>,
}

impl MarketInstance {
    /// Weights `draws` according to `config`.
    pub fn assemble(config: MarketConfig, draws: MarketDraws) -> Result<Self> {
        config.validate()?;
        let (nd, nh) = (config.n_doctors, config.n_hospitals);
        if draws.common_hospital.len() != nh
            || draws.common_doctor.len() != nd
            || draws.idio_doctor.len() != nd * nh
            || draws.idio_hospital.len() != nh * nd
        {
            return Err(Error::DimensionMismatch(
                "random draws do not match the configured market size".into(),
            ));
        }
        let (ld, lh) = (config.lambda_d, config.lambda_h);
        let u_doctor = (0..nd * nh)
            .map(|i| ld * draws.common_hospital[i % nh] + (1.0 - ld) * draws.idio_doctor[i])
            .collect();
        let u_hospital = (0..nh * nd)
            .map(|i| lh * draws.common_doctor[i % nd] + (1.0 - lh) * draws.idio_hospital[i])
            .collect();
        let outside = config.acceptability.outside_option();
        Ok(MarketInstance {
            common_hospital: draws.common_hospital,
            common_doctor: draws.common_doctor,
            u_doctor,
            u_hospital,
            outside_doctor: vec![outside; nd],
            outside_hospital: vec![outside; nh],
            config,
        })
    }

    /// Builds an instance from explicit utility matrices (row-major), with
    /// zero common components.
    pub fn from_utilities(
        config: MarketConfig,
        u_doctor: Vec<f64>,
        u_hospital: Vec<f64>,
    ) -> Result<Self> {
        config.validate()?;
        let (nd, nh) = (config.n_doctors, config.n_hospitals);
        if u_doctor.len() != nd * nh || u_hospital.len() != nh * nd {
            return Err(Error::DimensionMismatch(
                "utility matrices do not match the configured market size".into(),
            ));
        }
        let outside = config.acceptability.outside_option();
        Ok(MarketInstance {
            common_hospital: vec![0.0; nh],
            common_doctor: vec![0.0; nd],
            u_doctor,
            u_hospital,
            outside_doctor: vec![outside; nd],
            outside_hospital: vec![outside; nh],
            config,
        })
    }

    pub fn config(&self) -> &MarketConfig {
        &self.config
    }

    pub fn n_doctors(&self) -> usize {
        self.config.n_doctors
    }

    pub fn n_hospitals(&self) -> usize {
        self.config.n_hospitals
    }

    pub fn common_hospital(&self) -> &[f64] {
        &self.common_hospital
    }

    pub fn common_doctor(&self) -> &[f64] {
        &self.common_doctor
    }

    pub fn doctor_utility(&self, d: usize, h: usize) -> f64 {
        self.u_doctor[d * self.n_hospitals() + h]
    }

    pub fn hospital_utility(&self, h: usize, d: usize) -> f64 {
        self.u_hospital[h * self.n_doctors() + d]
    }

    pub fn doctor_row(&self, d: usize) -> &[f64] {
        let nh = self.n_hospitals();
        &self.u_doctor[d * nh..(d + 1) * nh]
    }

    pub fn hospital_row(&self, h: usize) -> &[f64] {
        let nd = self.n_doctors();
        &self.u_hospital[h * nd..(h + 1) * nd]
    }

    pub fn outside_option(&self, side: Side, agent: usize) -> f64 {
        match side {
            Side::Doctor => self.outside_doctor[agent],
            Side::Hospital => self.outside_hospital[agent],
        }
    }
}

/// Draws a market. Pure function of `config`, seed included.
pub fn generate_market(config: &MarketConfig) -> Result<MarketInstance> {
    config.validate()?;
    MarketInstance::assemble(config.clone(), MarketDraws::sample(config))
}

/// Strict ordinal preferences for one side: acceptable partners by
/// decreasing utility, exact ties going to the lower partner index.
pub fn to_preferences(instance: &MarketInstance, side: Side) -> PreferenceProfile {
    let (n_agents, n_partners) = match side {
        Side::Doctor => (instance.n_doctors(), instance.n_hospitals()),
        Side::Hospital => (instance.n_hospitals(), instance.n_doctors()),
    };
    let lists = (0..n_agents)
        .map(|a| {
            let row = match side {
                Side::Doctor => instance.doctor_row(a),
                Side::Hospital => instance.hospital_row(a),
            };
            let outside = instance.outside_option(side, a);
            let mut list: Vec<usize> = (0..n_partners).filter(|&b| row[b] > outside).collect();
            list.sort_by(|&x, &y| row[y].total_cmp(&row[x]).then(x.cmp(&y)));
            list
        })
        .collect();
    PreferenceProfile::new(side, n_partners, lists).expect("sorted index ranges are strict")
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replication `index` under `base_seed`: element `index + 1` of the
/// SplitMix64 stream started at `base_seed`. Distinct indices give distinct
/// seeds because the output function is a bijection.
pub fn replication_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}
