use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recommenders::{Algorithm, HyperParams};

/// What a user's recommendation list is filtered against.
///
/// `TrainProfile` hides only the items the model trained on, so items
/// held out by the split can reappear in lists; drawing one of those is
/// rejected at commit time. This keeps saturated items recommendable
/// the way precision-evaluated recommenders behave. `FullProfile`
/// additionally hides the held-out items, making rejected draws
/// impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionMode {
    TrainProfile,
    FullProfile,
}

/// Every knob of a simulation run. All randomness flows from `seed`;
/// `threads` only controls parallelism and never changes results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub algorithm: Algorithm,
    /// Number of iterations T.
    pub iterations: u32,
    /// Recommendation list length N.
    pub list_length: usize,
    /// Acceptance exponent; must be negative.
    pub alpha: f64,
    pub rating_min: i32,
    pub rating_max: i32,
    pub split_ratio: f64,
    pub selections_per_user: usize,
    pub exclusion: ExclusionMode,
    pub seed: u64,
    /// 0 picks the rayon default.
    pub threads: usize,
    pub kld_epsilon: f64,
    pub knn_neighbors: usize,
    pub bpr_factors: usize,
    pub bpr_learning_rate: f64,
    pub bpr_regularization: f64,
    pub bpr_epochs: usize,
    pub bpr_triples_per_epoch: u64,
}

impl Default for SimulationConfig {
    fn default() -> SimulationConfig {
        let hp = HyperParams::default();
        SimulationConfig {
            algorithm: Algorithm::MostPopular,
            iterations: 20,
            list_length: 10,
            alpha: -0.3,
            rating_min: 1,
            rating_max: 5,
            split_ratio: 0.8,
            selections_per_user: 1,
            exclusion: ExclusionMode::TrainProfile,
            seed: 42,
            threads: 0,
            kld_epsilon: 1e-9,
            knn_neighbors: hp.knn_neighbors,
            bpr_factors: hp.bpr_factors,
            bpr_learning_rate: hp.bpr_learning_rate,
            bpr_regularization: hp.bpr_regularization,
            bpr_epochs: hp.bpr_epochs,
            bpr_triples_per_epoch: hp.bpr_triples_per_epoch,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::invalid_config("iterations", "must be at least 1"));
        }
        if self.list_length < 1 {
            return Err(Error::invalid_config("list_length", "must be at least 1"));
        }
        if !self.alpha.is_finite() || self.alpha >= 0.0 {
            return Err(Error::invalid_config(
                "alpha",
                format!("must be a negative real, got {}", self.alpha),
            ));
        }
        if self.rating_min >= self.rating_max {
            return Err(Error::invalid_config(
                "rating_min",
                format!(
                    "rating bounds must satisfy min < max, got [{}, {}]",
                    self.rating_min, self.rating_max
                ),
            ));
        }
        if self.split_ratio.is_nan() || self.split_ratio <= 0.0 || self.split_ratio >= 1.0 {
            return Err(Error::invalid_config(
                "split_ratio",
                format!("must be strictly between 0 and 1, got {}", self.split_ratio),
            ));
        }
        if self.selections_per_user < 1 {
            return Err(Error::invalid_config(
                "selections_per_user",
                "must be at least 1",
            ));
        }
        if !self.kld_epsilon.is_finite() || self.kld_epsilon <= 0.0 {
            return Err(Error::invalid_config(
                "kld_epsilon",
                "must be a positive real",
            ));
        }
        if self.knn_neighbors < 1 {
            return Err(Error::invalid_config("knn_neighbors", "must be at least 1"));
        }
        if self.bpr_factors < 1 {
            return Err(Error::invalid_config("bpr_factors", "must be at least 1"));
        }
        if self.bpr_learning_rate.is_nan() || self.bpr_learning_rate <= 0.0 {
            return Err(Error::invalid_config(
                "bpr_learning_rate",
                "must be positive",
            ));
        }
        if self.bpr_regularization < 0.0 {
            return Err(Error::invalid_config(
                "bpr_regularization",
                "must be non-negative",
            ));
        }
        if self.bpr_epochs < 1 {
            return Err(Error::invalid_config("bpr_epochs", "must be at least 1"));
        }
        Ok(())
    }

    pub fn bounds(&self) -> (i32, i32) {
        (self.rating_min, self.rating_max)
    }

    pub fn hyper_params(&self) -> HyperParams {
        HyperParams {
            knn_neighbors: self.knn_neighbors,
            bpr_factors: self.bpr_factors,
            bpr_learning_rate: self.bpr_learning_rate,
            bpr_regularization: self.bpr_regularization,
            bpr_epochs: self.bpr_epochs,
            bpr_triples_per_epoch: self.bpr_triples_per_epoch,
        }
    }
}
