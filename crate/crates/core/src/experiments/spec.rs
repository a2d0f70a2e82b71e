use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::MarketConfig;
use crate::metrics::Mechanism;

/// How the two lambda axes of a [`Sweep`] combine into cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Every `(lambda_d, lambda_h)` combination, `lambda_d` outermost.
    #[default]
    Grid,
    /// Element-wise pairs; both axes must have equal length.
    Zip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub lambda_d: Vec<f64>,
    pub lambda_h: Vec<f64>,
    #[serde(default)]
    pub pairing: Pairing,
}

fn default_mechanisms() -> Vec<Mechanism> {
    Mechanism::ALL.to_vec()
}

fn default_capacity() -> usize {
    5
}

/// Batch run description; JSON form flattens the market fields to the top
/// level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(flatten)]
    pub market: MarketConfig,
    pub replications: usize,
    #[serde(default = "default_mechanisms")]
    pub mechanisms: Vec<Mechanism>,
    #[serde(default = "default_capacity")]
    pub k: usize,
    #[serde(default = "default_capacity")]
    pub k_prime: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

/// Lambda values shared by both sides in the interview simulations.
pub const TABLE_LAMBDAS: [f64; 3] = [0.25, 0.5, 0.75];

impl ExperimentSpec {
    /// All mechanisms, no sweep.
    pub fn new(market: MarketConfig, replications: usize, k: usize, k_prime: usize) -> Self {
        ExperimentSpec {
            market,
            replications,
            mechanisms: default_mechanisms(),
            k,
            k_prime,
            sweep: None,
            output_path: None,
        }
    }

    /// Balanced `n x n` markets with `lambda_d = lambda_h` in {1/4, 1/2, 3/4}
    /// and five interview slots per agent.
    pub fn table(n: usize, replications: usize, seed: u64) -> Self {
        ExperimentSpec {
            sweep: Some(Sweep {
                lambda_d: TABLE_LAMBDAS.to_vec(),
                lambda_h: TABLE_LAMBDAS.to_vec(),
                pairing: Pairing::Zip,
            }),
            ..ExperimentSpec::new(MarketConfig::balanced(n, 0.5, seed), replications, 5, 5)
        }
    }

    /// DA-only grid: `lambda_h` in {0, 0.1, ..., 1}, `lambda_d` in
    /// {0, 1/4, 1/2, 3/4, 1}, 500 markets of 100 per cell.
    pub fn figure(seed: u64) -> Self {
        ExperimentSpec {
            mechanisms: vec![Mechanism::Da],
            sweep: Some(Sweep {
                lambda_d: vec![0.0, 0.25, 0.5, 0.75, 1.0],
                lambda_h: (0..=10).map(|i| i as f64 / 10.0).collect(),
                pairing: Pairing::Grid,
            }),
            ..ExperimentSpec::new(MarketConfig::balanced(100, 0.0, seed), 500, 5, 5)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.market.validate()?;
        if self.replications == 0 {
            return Err(Error::InvalidConfig(
                "replications must be at least 1".into(),
            ));
        }
        if self.mechanisms.is_empty() {
            return Err(Error::InvalidConfig("no mechanisms requested".into()));
        }
        let mut seen = self.mechanisms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.mechanisms.len() {
            return Err(Error::InvalidConfig("mechanisms listed twice".into()));
        }
        if self.k == 0 || self.k_prime == 0 {
            return Err(Error::InvalidConfig(
                "k and k_prime must be positive".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.lambda_d.is_empty() || sweep.lambda_h.is_empty() {
                return Err(Error::InvalidConfig("sweep axes must be nonempty".into()));
            }
            if sweep
                .lambda_d
                .iter()
                .chain(&sweep.lambda_h)
                .any(|v| !(0.0..=1.0).contains(v))
            {
                return Err(Error::InvalidConfig(
                    "sweep values must lie in [0, 1]".into(),
                ));
            }
            if sweep.pairing == Pairing::Zip && sweep.lambda_d.len() != sweep.lambda_h.len() {
                return Err(Error::InvalidConfig(
                    "zipped sweep axes must have equal length".into(),
                ));
            }
        }
        Ok(())
    }

    /// `(lambda_d, lambda_h)` cells in run order.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        match &self.sweep {
            None => vec![(self.market.lambda_d, self.market.lambda_h)],
            Some(s) => match s.pairing {
                Pairing::Grid => s
                    .lambda_d
                    .iter()
                    .flat_map(|&d| s.lambda_h.iter().map(move |&h| (d, h)))
                    .collect(),
                Pairing::Zip => s
                    .lambda_d
                    .iter()
                    .copied()
                    .zip(s.lambda_h.iter().copied())
                    .collect(),
            },
        }
    }
}
