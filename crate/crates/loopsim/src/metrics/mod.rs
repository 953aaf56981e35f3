//! Per-iteration measurements: popularity, catalog coverage, genre
//! distributions and the divergence-based drift metrics. All functions
//! here are pure over read-only snapshots.

mod genre;

pub use genre::{
    genre_distribution, group_divergence, group_genre_distribution, group_mean_taste_drift,
    group_population_divergence, kl_divergence, taste_drift, GenreDistribution,
};

use std::collections::HashSet;

use crate::dataset::{ItemIdx, RatingStore};
use crate::error::{Error, Result};
use crate::recommenders::RankedList;

/// Per-item popularity phi(i): the fraction of users who rated i.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityTable {
    phi: Vec<f64>,
    counts: Vec<u32>,
    user_count: usize,
    interactions: u64,
}

impl PopularityTable {
    pub fn from_store(store: &RatingStore) -> Result<PopularityTable> {
        if store.user_count() == 0 {
            return Err(Error::EmptyStore);
        }
        let m = store.user_count() as f64;
        let counts = store.item_counts().to_vec();
        let phi = counts.iter().map(|&c| c as f64 / m).collect();
        Ok(PopularityTable {
            phi,
            counts,
            user_count: store.user_count(),
            interactions: store.len(),
        })
    }

    pub fn phi(&self, item: ItemIdx) -> f64 {
        self.phi[item]
    }

    pub fn count(&self, item: ItemIdx) -> u32 {
        self.counts[item]
    }

    pub fn interactions(&self) -> u64 {
        self.interactions
    }

    pub fn user_count(&self) -> usize {
        self.user_count
    }
}

/// Interaction-weighted mean popularity of the rating data: the mean of
/// phi(i) over every (user, item) interaction.
pub fn average_data_popularity(store: &RatingStore) -> Result<f64> {
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }
    let table = PopularityTable::from_store(store)?;
    let sum: f64 = table
        .counts
        .iter()
        .zip(&table.phi)
        .map(|(&c, &phi)| c as f64 * phi)
        .sum();
    Ok(sum / store.len() as f64)
}

/// Item-weighted variant: the mean of phi(i) over catalog items.
pub fn average_item_popularity(store: &RatingStore) -> Result<f64> {
    if store.item_count() == 0 {
        return Err(Error::EmptyStore);
    }
    let table = PopularityTable::from_store(store)?;
    Ok(table.phi.iter().sum::<f64>() / table.phi.len() as f64)
}

/// Mean popularity over every slot of every recommendation list; `None`
/// when all lists are empty.
pub fn average_recommendation_popularity(
    lists: &[RankedList],
    table: &PopularityTable,
) -> Option<f64> {
    let mut sum = 0.0;
    let mut slots = 0u64;
    for list in lists {
        for entry in &list.entries {
            sum += table.phi(entry.item);
            slots += 1;
        }
    }
    (slots > 0).then(|| sum / slots as f64)
}

/// Fraction of the catalog that appears at least once across all lists.
pub fn aggregate_diversity(lists: &[RankedList], catalog_size: usize) -> f64 {
    assert!(catalog_size > 0, "catalog must be non-empty");
    let distinct: HashSet<ItemIdx> = lists
        .iter()
        .flat_map(|l| l.entries.iter().map(|e| e.item))
        .collect();
    distinct.len() as f64 / catalog_size as f64
}

/// Gap between recommendation and data popularity in one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    pub absolute: f64,
    pub relative: f64,
}

pub fn compute_theta(rec_pop: f64, data_pop: f64) -> Theta {
    debug_assert!(data_pop > 0.0);
    let absolute = rec_pop - data_pop;
    Theta {
        absolute,
        relative: absolute / data_pop,
    }
}
