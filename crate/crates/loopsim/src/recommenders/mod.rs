//! The three recommendation algorithms behind one interface: fit on a
//! training store, then produce a ranked top-N list of unseen items per
//! user.

mod bpr;
mod knn;
mod most_popular;
mod ranked;

pub use bpr::{gradient as bpr_gradient, objective as bpr_objective, BprModel};
pub use knn::KnnModel;
pub use most_popular::MostPopularModel;
pub use ranked::{RankedEntry, RankedList};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{ProfileEntry, RatingStore, UserIdx};
use crate::error::{Error, Result};

pub(crate) use knn::fit_knn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    MostPopular,
    UserKnn,
    Bpr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::MostPopular, Algorithm::UserKnn, Algorithm::Bpr];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::MostPopular => "most_popular",
            Algorithm::UserKnn => "user_knn",
            Algorithm::Bpr => "bpr",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algorithm> {
        match s {
            "most_popular" => Ok(Algorithm::MostPopular),
            "user_knn" => Ok(Algorithm::UserKnn),
            "bpr" => Ok(Algorithm::Bpr),
            other => Err(Error::invalid_config(
                "algorithm",
                format!("unknown algorithm '{other}' (expected most_popular, user_knn or bpr)"),
            )),
        }
    }
}

/// Model hyperparameters; only the fields for the chosen algorithm are
/// consulted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub knn_neighbors: usize,
    pub bpr_factors: usize,
    pub bpr_learning_rate: f64,
    pub bpr_regularization: f64,
    pub bpr_epochs: usize,
    /// 0 means one triple per training rating.
    pub bpr_triples_per_epoch: u64,
}

impl Default for HyperParams {
    fn default() -> HyperParams {
        HyperParams {
            knn_neighbors: 50,
            bpr_factors: 50,
            bpr_learning_rate: 0.05,
            bpr_regularization: 0.01,
            bpr_epochs: 10,
            bpr_triples_per_epoch: 0,
        }
    }
}

/// A fitted recommender ready to produce ranked lists.
#[derive(Debug, Clone)]
pub enum FittedModel {
    MostPopular(MostPopularModel),
    UserKnn(KnnModel),
    Bpr(BprModel),
}

/// Fits the chosen algorithm on a training store. BPR consumes the rng;
/// the other algorithms are deterministic given the data.
pub fn fit(
    algorithm: Algorithm,
    train: &RatingStore,
    params: &HyperParams,
    rng: &mut impl Rng,
) -> Result<FittedModel> {
    if train.is_empty() {
        return Err(Error::EmptyStore);
    }
    match algorithm {
        Algorithm::MostPopular => Ok(FittedModel::MostPopular(MostPopularModel::fit(train))),
        Algorithm::UserKnn => Ok(FittedModel::UserKnn(fit_knn(train, params.knn_neighbors)?)),
        Algorithm::Bpr => Ok(FittedModel::Bpr(bpr::fit_bpr(train, params, rng)?)),
    }
}

impl FittedModel {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            FittedModel::MostPopular(_) => Algorithm::MostPopular,
            FittedModel::UserKnn(_) => Algorithm::UserKnn,
            FittedModel::Bpr(_) => Algorithm::Bpr,
        }
    }

    /// Top-n items the user has not seen, by the algorithm's score, ties
    /// broken by ascending item id. `exclude` is the user's profile
    /// (sorted by item); a user who has seen everything gets an empty
    /// list.
    pub fn recommend(&self, user: UserIdx, n: usize, exclude: &[ProfileEntry]) -> RankedList {
        match self {
            FittedModel::MostPopular(m) => m.recommend(user, n, exclude),
            FittedModel::UserKnn(m) => m.recommend(user, n, exclude),
            FittedModel::Bpr(m) => m.recommend(user, n, exclude),
        }
    }
}
