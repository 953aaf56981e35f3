//! Bayesian personalized ranking: latent factors trained by pairwise
//! SGD on (user, positive, negative) triples sampled from the binarized
//! training data, ascending on ln sigma(x_uij) - reg * ||params||^2.
//! Training is sequential so a fixed rng stream fixes the factors.

use rand::Rng;

use crate::dataset::{ItemIdx, ProfileEntry, RatingStore, UserIdx};
use crate::error::{Error, Result};
use crate::recommenders::ranked::{RankedList, TopN};
use crate::recommenders::HyperParams;

#[derive(Debug, Clone)]
pub struct BprModel {
    user_factors: Vec<f64>,
    item_factors: Vec<f64>,
    factors: usize,
    item_count: usize,
}

pub(crate) fn fit_bpr(
    train: &RatingStore,
    params: &HyperParams,
    rng: &mut impl Rng,
) -> Result<BprModel> {
    let f = params.bpr_factors;
    if f == 0 {
        return Err(Error::invalid_config(
            "bpr_factors",
            "factor count must be at least 1",
        ));
    }
    if params.bpr_learning_rate <= 0.0 {
        return Err(Error::invalid_config(
            "bpr_learning_rate",
            "learning rate must be positive",
        ));
    }
    let m = train.user_count();
    let n = train.item_count();
    let lr = params.bpr_learning_rate;
    let reg = params.bpr_regularization;

    let mut user_factors = init_factors(m * f, rng);
    let mut item_factors = init_factors(n * f, rng);

    // All ratings count as positives, whatever their value.
    let positives: Vec<(UserIdx, ItemIdx)> = train
        .iter()
        .map(|(user, item, _, _)| (user, item))
        .collect();
    if positives.is_empty() {
        return Err(Error::EmptyStore);
    }
    let triples_per_epoch = match params.bpr_triples_per_epoch {
        0 => positives.len() as u64,
        t => t,
    };

    for _epoch in 0..params.bpr_epochs {
        for _ in 0..triples_per_epoch {
            let (user, pos) = positives[rng.random_range(0..positives.len())];
            if train.user_rating_count(user) == n {
                // No negative item exists for this user.
                continue;
            }
            let neg = loop {
                let candidate = rng.random_range(0..n);
                if !train.has_rating(user, candidate) {
                    break candidate;
                }
            };

            let uo = user * f;
            let po = pos * f;
            let no = neg * f;
            let mut x = 0.0;
            for d in 0..f {
                x += user_factors[uo + d] * (item_factors[po + d] - item_factors[no + d]);
            }
            let slope = 1.0 / (1.0 + x.exp());
            for d in 0..f {
                let wu = user_factors[uo + d];
                let hp = item_factors[po + d];
                let hn = item_factors[no + d];
                user_factors[uo + d] = wu + lr * (slope * (hp - hn) - 2.0 * reg * wu);
                item_factors[po + d] = hp + lr * (slope * wu - 2.0 * reg * hp);
                item_factors[no + d] = hn + lr * (-slope * wu - 2.0 * reg * hn);
            }
        }
    }

    if user_factors
        .iter()
        .chain(&item_factors)
        .any(|v| !v.is_finite())
    {
        return Err(Error::Fit(
            "factor training diverged to non-finite values".into(),
        ));
    }

    Ok(BprModel {
        user_factors,
        item_factors,
        factors: f,
        item_count: n,
    })
}

fn init_factors(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..len)
        .map(|_| 0.1 * rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect()
}

impl BprModel {
    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn user_vector(&self, user: UserIdx) -> &[f64] {
        &self.user_factors[user * self.factors..(user + 1) * self.factors]
    }

    pub fn item_vector(&self, item: ItemIdx) -> &[f64] {
        &self.item_factors[item * self.factors..(item + 1) * self.factors]
    }

    pub fn score(&self, user: UserIdx, item: ItemIdx) -> f64 {
        dot(self.user_vector(user), self.item_vector(item))
    }

    pub fn recommend(&self, user: UserIdx, n: usize, exclude: &[ProfileEntry]) -> RankedList {
        let mut top = TopN::new(n);
        for item in 0..self.item_count {
            if exclude.binary_search_by_key(&item, |e| e.item).is_ok() {
                continue;
            }
            top.offer(item, self.score(user, item));
        }
        RankedList {
            user,
            entries: top.into_entries(),
        }
    }
}

/// Per-triple training objective: ln sigma(x_uij) - reg * ||params||^2
/// over the three touched vectors.
pub fn objective(user: &[f64], pos: &[f64], neg: &[f64], reg: f64) -> f64 {
    let x = dot(user, pos) - dot(user, neg);
    ln_sigmoid(x) - reg * (sq_norm(user) + sq_norm(pos) + sq_norm(neg))
}

/// Analytic gradient of [`objective`] with respect to each vector.
pub fn gradient(
    user: &[f64],
    pos: &[f64],
    neg: &[f64],
    reg: f64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let x = dot(user, pos) - dot(user, neg);
    let slope = 1.0 / (1.0 + x.exp());
    let g_user = (0..user.len())
        .map(|d| slope * (pos[d] - neg[d]) - 2.0 * reg * user[d])
        .collect();
    let g_pos = (0..user.len())
        .map(|d| slope * user[d] - 2.0 * reg * pos[d])
        .collect();
    let g_neg = (0..user.len())
        .map(|d| -slope * user[d] - 2.0 * reg * neg[d])
        .collect();
    (g_user, g_pos, g_neg)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

fn ln_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}
