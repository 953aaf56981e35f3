use std::collections::HashMap;

use crate::error::{Error, Result};

pub type UserIdx = usize;
pub type ItemIdx = usize;

/// Where a rating entered the store: the loaded dataset or a later
/// simulation iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Initial,
    Iteration(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEntry {
    pub item: ItemIdx,
    pub rating: i32,
    pub origin: Origin,
}

/// Sparse user x item rating matrix with cached per-user and per-item
/// statistics.
///
/// Users and items are fixed at construction and addressed by dense
/// indices (`UserIdx`, `ItemIdx`); indices are assigned in ascending
/// external-id order, so index order equals id order everywhere.
/// Ratings are integers within the store bounds. Sums are kept as
/// integers, which makes the cached means and deviations exact.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingStore {
    user_ids: Vec<u32>,
    item_ids: Vec<u32>,
    user_index: HashMap<u32, UserIdx>,
    item_index: HashMap<u32, ItemIdx>,
    min_rating: i32,
    max_rating: i32,
    profiles: Vec<Vec<ProfileEntry>>,
    user_sums: Vec<i64>,
    user_sq_sums: Vec<i64>,
    item_counts: Vec<u32>,
    item_sums: Vec<i64>,
    total_ratings: u64,
    rating_sum: i64,
}

impl RatingStore {
    /// Creates an empty store over the given user and item id universe.
    /// Ids are deduplicated and sorted ascending before index assignment.
    pub fn new(mut user_ids: Vec<u32>, mut item_ids: Vec<u32>, bounds: (i32, i32)) -> RatingStore {
        assert!(bounds.0 < bounds.1, "rating bounds must satisfy min < max");
        user_ids.sort_unstable();
        user_ids.dedup();
        item_ids.sort_unstable();
        item_ids.dedup();
        let user_index = user_ids
            .iter()
            .enumerate()
            .map(|(idx, &id)| (id, idx))
            .collect();
        let item_index = item_ids
            .iter()
            .enumerate()
            .map(|(idx, &id)| (id, idx))
            .collect();
        let m = user_ids.len();
        let n = item_ids.len();
        RatingStore {
            user_ids,
            item_ids,
            user_index,
            item_index,
            min_rating: bounds.0,
            max_rating: bounds.1,
            profiles: vec![Vec::new(); m],
            user_sums: vec![0; m],
            user_sq_sums: vec![0; m],
            item_counts: vec![0; n],
            item_sums: vec![0; n],
            total_ratings: 0,
            rating_sum: 0,
        }
    }

    /// Inserts a rating, rejecting out-of-bounds values and duplicate
    /// (user, item) pairs. Cached statistics are updated in place.
    pub fn insert(
        &mut self,
        user: UserIdx,
        item: ItemIdx,
        rating: i32,
        origin: Origin,
    ) -> Result<()> {
        if rating < self.min_rating || rating > self.max_rating {
            return Err(Error::RatingRejected {
                user: self.user_ids[user],
                item: self.item_ids[item],
                value: rating,
                min: self.min_rating,
                max: self.max_rating,
            });
        }
        let profile = &mut self.profiles[user];
        match profile.binary_search_by_key(&item, |e| e.item) {
            Ok(_) => Err(Error::DuplicateRating {
                user: self.user_ids[user],
                item: self.item_ids[item],
            }),
            Err(pos) => {
                profile.insert(
                    pos,
                    ProfileEntry {
                        item,
                        rating,
                        origin,
                    },
                );
                self.user_sums[user] += rating as i64;
                self.user_sq_sums[user] += (rating as i64) * (rating as i64);
                self.item_counts[item] += 1;
                self.item_sums[item] += rating as i64;
                self.total_ratings += 1;
                self.rating_sum += rating as i64;
                Ok(())
            }
        }
    }

    /// Builds a store directly from per-user profiles. Profiles must be
    /// sorted by item with no duplicates and in-bounds ratings; used for
    /// train/test views carved out of a valid store.
    pub(crate) fn from_profiles(
        user_ids: Vec<u32>,
        item_ids: Vec<u32>,
        bounds: (i32, i32),
        profiles: Vec<Vec<ProfileEntry>>,
    ) -> RatingStore {
        let mut store = RatingStore::new(user_ids, item_ids, bounds);
        assert_eq!(profiles.len(), store.user_count());
        for (user, profile) in profiles.iter().enumerate() {
            for entry in profile {
                debug_assert!(entry.rating >= bounds.0 && entry.rating <= bounds.1);
                store.user_sums[user] += entry.rating as i64;
                store.user_sq_sums[user] += (entry.rating as i64) * (entry.rating as i64);
                store.item_counts[entry.item] += 1;
                store.item_sums[entry.item] += entry.rating as i64;
                store.total_ratings += 1;
                store.rating_sum += entry.rating as i64;
            }
        }
        store.profiles = profiles;
        store
    }

    pub fn user_count(&self) -> usize {
        self.user_ids.len()
    }

    pub fn item_count(&self) -> usize {
        self.item_ids.len()
    }

    /// Total number of ratings currently stored.
    pub fn len(&self) -> u64 {
        self.total_ratings
    }

    pub fn is_empty(&self) -> bool {
        self.total_ratings == 0
    }

    pub fn bounds(&self) -> (i32, i32) {
        (self.min_rating, self.max_rating)
    }

    pub fn user_id(&self, user: UserIdx) -> u32 {
        self.user_ids[user]
    }

    pub fn item_id(&self, item: ItemIdx) -> u32 {
        self.item_ids[item]
    }

    pub fn user_idx(&self, user_id: u32) -> Option<UserIdx> {
        self.user_index.get(&user_id).copied()
    }

    pub fn item_idx(&self, item_id: u32) -> Option<ItemIdx> {
        self.item_index.get(&item_id).copied()
    }

    pub fn user_ids(&self) -> &[u32] {
        &self.user_ids
    }

    pub fn item_ids(&self) -> &[u32] {
        &self.item_ids
    }

    pub fn profile(&self, user: UserIdx) -> &[ProfileEntry] {
        &self.profiles[user]
    }

    pub fn has_rating(&self, user: UserIdx, item: ItemIdx) -> bool {
        self.profiles[user]
            .binary_search_by_key(&item, |e| e.item)
            .is_ok()
    }

    pub fn rating(&self, user: UserIdx, item: ItemIdx) -> Option<i32> {
        self.profiles[user]
            .binary_search_by_key(&item, |e| e.item)
            .ok()
            .map(|pos| self.profiles[user][pos].rating)
    }

    pub fn user_rating_count(&self, user: UserIdx) -> usize {
        self.profiles[user].len()
    }

    pub fn item_rating_count(&self, item: ItemIdx) -> u32 {
        self.item_counts[item]
    }

    pub fn item_counts(&self) -> &[u32] {
        &self.item_counts
    }

    /// Mean rating of the user's profile; `None` for an empty profile.
    pub fn user_mean(&self, user: UserIdx) -> Option<f64> {
        let count = self.profiles[user].len();
        if count == 0 {
            return None;
        }
        Some(self.user_sums[user] as f64 / count as f64)
    }

    /// Population standard deviation of the user's ratings; 0 for a
    /// single-rating profile, `None` for an empty one.
    pub fn user_sd(&self, user: UserIdx) -> Option<f64> {
        let count = self.profiles[user].len() as i64;
        if count == 0 {
            return None;
        }
        if count == 1 {
            return Some(0.0);
        }
        let sum = self.user_sums[user];
        let sq_sum = self.user_sq_sums[user];
        // count * variance * count = count * sq_sum - sum^2, exact in i64.
        let scaled_var = count * sq_sum - sum * sum;
        debug_assert!(scaled_var >= 0);
        Some((scaled_var as f64).sqrt() / count as f64)
    }

    pub fn item_mean(&self, item: ItemIdx) -> Option<f64> {
        let count = self.item_counts[item];
        if count == 0 {
            return None;
        }
        Some(self.item_sums[item] as f64 / count as f64)
    }

    pub fn global_mean(&self) -> Option<f64> {
        if self.total_ratings == 0 {
            return None;
        }
        Some(self.rating_sum as f64 / self.total_ratings as f64)
    }

    /// Iterates `(user, item, rating, origin)` over all entries, user
    /// index order then profile item order.
    pub fn iter(&self) -> impl Iterator<Item = (UserIdx, ItemIdx, i32, Origin)> + '_ {
        self.profiles
            .iter()
            .enumerate()
            .flat_map(|(user, profile)| {
                profile
                    .iter()
                    .map(move |e| (user, e.item, e.rating, e.origin))
            })
    }
}
