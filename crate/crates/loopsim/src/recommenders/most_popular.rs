use crate::dataset::{ItemIdx, ProfileEntry, RatingStore, UserIdx};
use crate::recommenders::ranked::{RankedEntry, RankedList};

/// Non-personalized baseline: every user gets the items with the most
/// training ratings, minus what they have already rated.
#[derive(Debug, Clone)]
pub struct MostPopularModel {
    // All catalog items sorted by rating count descending, item ascending.
    ranking: Vec<(ItemIdx, u32)>,
}

impl MostPopularModel {
    pub fn fit(train: &RatingStore) -> MostPopularModel {
        let mut ranking: Vec<(ItemIdx, u32)> = train
            .item_counts()
            .iter()
            .enumerate()
            .map(|(item, &count)| (item, count))
            .collect();
        ranking.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        MostPopularModel { ranking }
    }

    pub fn recommend(&self, user: UserIdx, n: usize, exclude: &[ProfileEntry]) -> RankedList {
        let mut entries = Vec::with_capacity(n);
        for &(item, count) in &self.ranking {
            if entries.len() == n {
                break;
            }
            if exclude.binary_search_by_key(&item, |e| e.item).is_ok() {
                continue;
            }
            entries.push(RankedEntry {
                item,
                score: count as f64,
            });
        }
        RankedList { user, entries }
    }
}
