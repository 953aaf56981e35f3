//! User-based k-nearest-neighbor collaborative filtering.
//!
//! Similarity is the Pearson correlation over co-rated items, computed
//! from integer co-rating sums so the values are exact and independent
//! of accumulation order. Pairs with fewer than two co-rated items, or
//! with zero variance on either side, get similarity 0 and are dropped.
//! Prediction is the classic mean-offset form: the user's mean plus the
//! similarity-weighted mean offset of the neighbors that rated the item.

use rayon::prelude::*;

use crate::dataset::{ItemIdx, ProfileEntry, RatingStore, UserIdx};
use crate::error::{Error, Result};
use crate::recommenders::ranked::{RankedEntry, RankedList};

const MIN_OVERLAP: i64 = 2;

#[derive(Debug, Clone)]
pub struct KnnModel {
    k: usize,
    /// Per user: up to k `(neighbor, similarity)` pairs, similarity
    /// descending then neighbor ascending; all similarities nonzero.
    neighbors: Vec<Vec<(UserIdx, f64)>>,
    user_means: Vec<Option<f64>>,
    profiles: Vec<Vec<(ItemIdx, i32)>>,
    item_count: usize,
}

/// Co-rating accumulators for one user pair.
#[derive(Clone, Copy, Default)]
struct PairSums {
    n: i64,
    sx: i64,
    sy: i64,
    sxy: i64,
    sxx: i64,
    syy: i64,
}

struct Scratch {
    sums: Vec<PairSums>,
    touched: Vec<UserIdx>,
}

impl Scratch {
    fn new(m: usize) -> Scratch {
        Scratch {
            sums: vec![PairSums::default(); m],
            touched: Vec::new(),
        }
    }
}

pub(crate) fn fit_knn(train: &RatingStore, k: usize) -> Result<KnnModel> {
    if k == 0 {
        return Err(Error::invalid_config(
            "knn_neighbors",
            "neighbor count must be at least 1",
        ));
    }
    let m = train.user_count();
    let n = train.item_count();

    // Inverted index: raters of each item with their ratings.
    let mut raters: Vec<Vec<(UserIdx, i32)>> = vec![Vec::new(); n];
    for user in 0..m {
        for entry in train.profile(user) {
            raters[entry.item].push((user, entry.rating));
        }
    }

    let neighbors: Vec<Vec<(UserIdx, f64)>> = (0..m)
        .into_par_iter()
        .map_init(
            || Scratch::new(m),
            |scratch, user| {
                for entry in train.profile(user) {
                    let x = entry.rating as i64;
                    for &(other, y) in &raters[entry.item] {
                        if other == user {
                            continue;
                        }
                        let sums = &mut scratch.sums[other];
                        if sums.n == 0 {
                            scratch.touched.push(other);
                        }
                        let y = y as i64;
                        sums.n += 1;
                        sums.sx += x;
                        sums.sy += y;
                        sums.sxy += x * y;
                        sums.sxx += x * x;
                        sums.syy += y * y;
                    }
                }
                let mut row: Vec<(UserIdx, f64)> = Vec::new();
                for &other in &scratch.touched {
                    let sums = scratch.sums[other];
                    scratch.sums[other] = PairSums::default();
                    if sums.n >= MIN_OVERLAP {
                        if let Some(sim) = pearson(&sums) {
                            row.push((other, sim));
                        }
                    }
                }
                scratch.touched.clear();
                row.sort_unstable_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
                row.truncate(k);
                row
            },
        )
        .collect();

    let user_means = (0..m).map(|u| train.user_mean(u)).collect();
    let profiles = (0..m)
        .map(|u| {
            train
                .profile(u)
                .iter()
                .map(|e| (e.item, e.rating))
                .collect()
        })
        .collect();

    Ok(KnnModel {
        k,
        neighbors,
        user_means,
        profiles,
        item_count: n,
    })
}

/// Pearson correlation from co-rating sums; `None` when undefined or
/// exactly zero. Exact integer detection keeps perfectly correlated
/// pairs at exactly +/-1.
fn pearson(sums: &PairSums) -> Option<f64> {
    let num = (sums.n as i128) * (sums.sxy as i128) - (sums.sx as i128) * (sums.sy as i128);
    let dx = (sums.n as i128) * (sums.sxx as i128) - (sums.sx as i128) * (sums.sx as i128);
    let dy = (sums.n as i128) * (sums.syy as i128) - (sums.sy as i128) * (sums.sy as i128);
    if dx == 0 || dy == 0 || num == 0 {
        return None;
    }
    if num * num == dx * dy {
        return Some(if num > 0 { 1.0 } else { -1.0 });
    }
    let sim = num as f64 / ((dx as f64).sqrt() * (dy as f64).sqrt());
    Some(sim.clamp(-1.0, 1.0))
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self, user: UserIdx) -> &[(UserIdx, f64)] {
        &self.neighbors[user]
    }

    /// Similarity between two users as seen from `user`'s row; 0 when
    /// `other` is not among the kept neighbors.
    pub fn similarity(&self, user: UserIdx, other: UserIdx) -> f64 {
        self.neighbors[user]
            .iter()
            .find(|(v, _)| *v == other)
            .map(|(_, s)| *s)
            .unwrap_or(0.0)
    }

    /// Predicted rating: user mean plus the weighted mean offset of the
    /// neighbors that rated the item; the bare user mean when none did.
    pub fn predict(&self, user: UserIdx, item: ItemIdx) -> Result<f64> {
        if user >= self.neighbors.len() {
            return Err(Error::UnknownUser(user as u32));
        }
        if item >= self.item_count {
            return Err(Error::UnknownItem(item as u32));
        }
        let user_mean = self.user_means[user]
            .ok_or_else(|| Error::Fit(format!("user index {user} has no training ratings")))?;
        let mut num = 0.0;
        let mut den = 0.0;
        for &(v, sim) in &self.neighbors[user] {
            if let Ok(pos) = self.profiles[v].binary_search_by_key(&item, |&(i, _)| i) {
                let rating = self.profiles[v][pos].1 as f64;
                let v_mean = self.user_means[v].expect("neighbor has ratings");
                num += sim * (rating - v_mean);
                den += sim.abs();
            }
        }
        if den > 0.0 {
            Ok(user_mean + num / den)
        } else {
            Ok(user_mean)
        }
    }

    /// Top-n unseen items by predicted rating. Items no neighbor rated
    /// score exactly the user mean, so the ordering has three tiers:
    /// neighbor-scored items above the mean, the mean tier (ties broken
    /// by ascending item id across scored and unscored items alike),
    /// then neighbor-scored items below the mean.
    pub fn recommend(&self, user: UserIdx, n: usize, exclude: &[ProfileEntry]) -> RankedList {
        let Some(user_mean) = self.user_means[user] else {
            return RankedList {
                user,
                entries: Vec::new(),
            };
        };

        // score offsets accumulated over neighbor profiles
        let mut acc: std::collections::HashMap<ItemIdx, (f64, f64)> =
            std::collections::HashMap::new();
        for &(v, sim) in &self.neighbors[user] {
            let v_mean = self.user_means[v].expect("neighbor has ratings");
            for &(item, rating) in &self.profiles[v] {
                let slot = acc.entry(item).or_insert((0.0, 0.0));
                slot.0 += sim * (rating as f64 - v_mean);
                slot.1 += sim.abs();
            }
        }

        let excluded = |item: ItemIdx| exclude.binary_search_by_key(&item, |e| e.item).is_ok();

        let mut above: Vec<RankedEntry> = Vec::new();
        let mut below: Vec<RankedEntry> = Vec::new();
        for (&item, &(num, den)) in &acc {
            if excluded(item) {
                continue;
            }
            let score = user_mean + num / den;
            if score > user_mean {
                above.push(RankedEntry { item, score });
            } else if score < user_mean {
                below.push(RankedEntry { item, score });
            }
            // score == user_mean joins the mean tier below
        }
        let by_score_then_item = |a: &RankedEntry, b: &RankedEntry| {
            b.score
                .partial_cmp(&a.score)
                .unwrap()
                .then(a.item.cmp(&b.item))
        };
        above.sort_unstable_by(by_score_then_item);
        below.sort_unstable_by(by_score_then_item);

        let mut entries = Vec::with_capacity(n);
        entries.extend(above.into_iter().take(n));
        if entries.len() < n {
            // Mean tier: every unseen item that is either unscored or
            // scored exactly at the mean, ascending item id.
            for item in 0..self.item_count {
                if entries.len() == n {
                    break;
                }
                if excluded(item) {
                    continue;
                }
                match acc.get(&item) {
                    Some(&(num, den)) => {
                        if user_mean + num / den == user_mean {
                            entries.push(RankedEntry {
                                item,
                                score: user_mean,
                            });
                        }
                    }
                    None => entries.push(RankedEntry {
                        item,
                        score: user_mean,
                    }),
                }
            }
        }
        if entries.len() < n {
            entries.extend(below.into_iter().take(n - entries.len()));
        }
        RankedList { user, entries }
    }
}
