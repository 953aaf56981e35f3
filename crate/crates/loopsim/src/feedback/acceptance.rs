//! Rank-exponential acceptance probabilities: the chance a user selects
//! the item at rank r of their list is proportional to e^(alpha * r)
//! with alpha < 0, so probability strictly decreases with rank.

use rand::Rng;

use crate::dataset::ItemIdx;
use crate::error::{Error, Result};
use crate::recommenders::RankedList;

#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceEntry {
    pub item: ItemIdx,
    /// 1-based rank in the originating list.
    pub rank: usize,
    /// Raw weight e^(alpha * rank).
    pub weight: f64,
    /// Weight normalized over the list.
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceDistribution {
    entries: Vec<AcceptanceEntry>,
}

/// Builds the acceptance distribution for one list.
pub fn acceptance_probabilities(list: &RankedList, alpha: f64) -> Result<AcceptanceDistribution> {
    if alpha.is_nan() || alpha >= 0.0 {
        return Err(Error::invalid_config(
            "alpha",
            format!("acceptance exponent must be negative, got {alpha}"),
        ));
    }
    if list.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut entries: Vec<AcceptanceEntry> = list
        .entries
        .iter()
        .enumerate()
        .map(|(pos, entry)| {
            let rank = pos + 1;
            AcceptanceEntry {
                item: entry.item,
                rank,
                weight: (alpha * rank as f64).exp(),
                probability: 0.0,
            }
        })
        .collect();
    let total: f64 = entries.iter().map(|e| e.weight).sum();
    for entry in &mut entries {
        entry.probability = entry.weight / total;
    }
    Ok(AcceptanceDistribution { entries })
}

/// Draws one item per the normalized probabilities.
pub fn sample_selection(dist: &AcceptanceDistribution, rng: &mut impl Rng) -> ItemIdx {
    dist.sample(rng)
}

impl AcceptanceDistribution {
    pub fn entries(&self) -> &[AcceptanceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inverse-CDF draw over the ordered entries.
    pub fn sample(&self, rng: &mut impl Rng) -> ItemIdx {
        let total: f64 = self.entries.iter().map(|e| e.weight).sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for entry in &self.entries {
            acc += entry.weight;
            if acc > target {
                return entry.item;
            }
        }
        self.entries.last().expect("non-empty").item
    }

    /// Draws up to `count` distinct items without replacement, removing
    /// each drawn entry and renormalizing over the remainder. Returns
    /// `(item, rank)` pairs in draw order.
    pub fn sample_without_replacement(
        &self,
        count: usize,
        rng: &mut impl Rng,
    ) -> Vec<(ItemIdx, usize)> {
        let mut alive: Vec<bool> = vec![true; self.entries.len()];
        let mut remaining: f64 = self.entries.iter().map(|e| e.weight).sum();
        let draws = count.min(self.entries.len());
        let mut out = Vec::with_capacity(draws);
        for _ in 0..draws {
            let target = rng.random::<f64>() * remaining;
            let mut acc = 0.0;
            let mut picked = None;
            for (idx, entry) in self.entries.iter().enumerate() {
                if !alive[idx] {
                    continue;
                }
                acc += entry.weight;
                if acc > target {
                    picked = Some(idx);
                    break;
                }
            }
            let picked = picked.unwrap_or_else(|| {
                // Float round-off can leave the walk just short of the
                // last live entry.
                alive.iter().rposition(|&a| a).expect("a live entry")
            });
            alive[picked] = false;
            remaining -= self.entries[picked].weight;
            out.push((self.entries[picked].item, self.entries[picked].rank));
        }
        out
    }
}
