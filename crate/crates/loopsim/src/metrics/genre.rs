//! Genre distributions and Kullback-Leibler divergence.

use crate::dataset::{ItemIdx, ItemMeta, RatingStore, UserIdx, UserMeta};
use crate::error::{Error, Result};

/// Probability vector over the genre vocabulary. Each rated item
/// contributes total mass 1, split equally among its genres.
#[derive(Debug, Clone, PartialEq)]
pub struct GenreDistribution {
    probs: Vec<f64>,
}

impl GenreDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    fn from_masses(mut masses: Vec<f64>, item_count: usize) -> GenreDistribution {
        debug_assert!(item_count > 0);
        let norm = item_count as f64;
        for p in &mut masses {
            *p /= norm;
        }
        GenreDistribution { probs: masses }
    }
}

/// Genre distribution of a multiset of items.
pub fn genre_distribution(
    items: impl IntoIterator<Item = ItemIdx>,
    meta: &[ItemMeta],
    vocab_len: usize,
) -> Result<GenreDistribution> {
    let mut masses = vec![0.0; vocab_len];
    let mut count = 0usize;
    for item in items {
        let genres = &meta[item].genres;
        let share = 1.0 / genres.len() as f64;
        for &g in genres {
            masses[g as usize] += share;
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyItemSet);
    }
    Ok(GenreDistribution::from_masses(masses, count))
}

/// KL(P || Q) in nats. Both arguments are smoothed additively by
/// `epsilon` and renormalized first, which keeps the value finite on
/// disjoint supports.
pub fn kl_divergence(p: &GenreDistribution, q: &GenreDistribution, epsilon: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::VocabularyMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let norm = 1.0 + p.len() as f64 * epsilon;
    let mut kld = 0.0;
    for (&pi, &qi) in p.probs.iter().zip(&q.probs) {
        let ps = (pi + epsilon) / norm;
        let qs = (qi + epsilon) / norm;
        kld += ps * (ps / qs).ln();
    }
    // Gibbs' inequality, up to float rounding around zero.
    Ok(kld.max(0.0))
}

/// Deviation of a profile from its initial representation:
/// KL(initial || current).
pub fn taste_drift(
    initial: &GenreDistribution,
    current: &GenreDistribution,
    epsilon: f64,
) -> Result<f64> {
    kl_divergence(initial, current, epsilon)
}

/// Genre distribution over all ratings of one user group; `None` when
/// the group has no ratings.
pub fn group_genre_distribution(
    store: &RatingStore,
    users: &[UserMeta],
    group: &str,
    meta: &[ItemMeta],
    vocab_len: usize,
) -> Option<GenreDistribution> {
    let items = group_members(users, group)
        .flat_map(|u| store.profile(u).iter().map(|e| e.item))
        .collect::<Vec<_>>();
    genre_distribution(items, meta, vocab_len).ok()
}

/// KL(G_p || G_q) between two groups' aggregate genre distributions;
/// `None` when either group has no ratings.
pub fn group_divergence(
    store: &RatingStore,
    users: &[UserMeta],
    meta: &[ItemMeta],
    vocab_len: usize,
    group_p: &str,
    group_q: &str,
    epsilon: f64,
) -> Option<f64> {
    let p = group_genre_distribution(store, users, group_p, meta, vocab_len)?;
    let q = group_genre_distribution(store, users, group_q, meta, vocab_len)?;
    kl_divergence(&p, &q, epsilon).ok()
}

/// KL(initial population distribution || group distribution at t).
pub fn group_population_divergence(
    initial_population: &GenreDistribution,
    store: &RatingStore,
    users: &[UserMeta],
    group: &str,
    meta: &[ItemMeta],
    vocab_len: usize,
    epsilon: f64,
) -> Option<f64> {
    let current = group_genre_distribution(store, users, group, meta, vocab_len)?;
    kl_divergence(initial_population, &current, epsilon).ok()
}

/// Mean taste drift over one group's users. `initial_per_user` holds the
/// cached t=1 distribution per user index; users without a cache or with
/// an empty current profile are skipped.
pub fn group_mean_taste_drift(
    store: &RatingStore,
    users: &[UserMeta],
    group: &str,
    meta: &[ItemMeta],
    vocab_len: usize,
    initial_per_user: &[Option<GenreDistribution>],
    epsilon: f64,
) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for u in group_members(users, group) {
        let Some(initial) = &initial_per_user[u] else {
            continue;
        };
        let Ok(current) =
            genre_distribution(store.profile(u).iter().map(|e| e.item), meta, vocab_len)
        else {
            continue;
        };
        sum += taste_drift(initial, &current, epsilon).expect("same vocabulary");
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

fn group_members<'a>(users: &'a [UserMeta], group: &'a str) -> impl Iterator<Item = UserIdx> + 'a {
    users
        .iter()
        .enumerate()
        .filter(move |(_, meta)| meta.group == group)
        .map(|(u, _)| u)
}
