//! Per-user stratified train/test splitting.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::store::{ProfileEntry, RatingStore};
use crate::error::{Error, Result};

/// Disjoint train/test views of a store. Together they contain every
/// rating of the source; every user with at least one rating keeps at
/// least one in train.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub train: RatingStore,
    pub test: RatingStore,
}

/// Splits each user's profile at the given ratio, remainder rounding
/// toward train. Selection within a profile is a seeded shuffle, so the
/// same rng stream reproduces the same split.
pub fn split_train_test(
    store: &RatingStore,
    ratio: f64,
    rng: &mut impl Rng,
) -> Result<SplitResult> {
    if ratio.is_nan() || ratio <= 0.0 || ratio >= 1.0 {
        return Err(Error::invalid_config(
            "split_ratio",
            format!("must be strictly between 0 and 1, got {ratio}"),
        ));
    }
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }

    let m = store.user_count();
    let mut train_profiles: Vec<Vec<ProfileEntry>> = Vec::with_capacity(m);
    let mut test_profiles: Vec<Vec<ProfileEntry>> = Vec::with_capacity(m);
    let mut positions: Vec<usize> = Vec::new();

    for user in 0..m {
        let profile = store.profile(user);
        let len = profile.len();
        if len == 0 {
            train_profiles.push(Vec::new());
            test_profiles.push(Vec::new());
            continue;
        }
        let train_count = train_share(len, ratio);
        positions.clear();
        positions.extend(0..len);
        positions.shuffle(rng);
        let mut in_train = vec![false; len];
        for &pos in positions.iter().take(train_count) {
            in_train[pos] = true;
        }
        // Filtering the sorted profile keeps both views item-ordered.
        let mut train = Vec::with_capacity(train_count);
        let mut test = Vec::with_capacity(len - train_count);
        for (pos, entry) in profile.iter().enumerate() {
            if in_train[pos] {
                train.push(*entry);
            } else {
                test.push(*entry);
            }
        }
        train_profiles.push(train);
        test_profiles.push(test);
    }

    let train = RatingStore::from_profiles(
        store.user_ids().to_vec(),
        store.item_ids().to_vec(),
        store.bounds(),
        train_profiles,
    );
    let test = RatingStore::from_profiles(
        store.user_ids().to_vec(),
        store.item_ids().to_vec(),
        store.bounds(),
        test_profiles,
    );
    Ok(SplitResult { train, test })
}

/// Number of profile entries that go to train: `ceil(len * ratio)`,
/// with a snap to the nearest integer to keep exact shares (10 ratings
/// at 0.8 give exactly 8) immune to float representation error.
fn train_share(len: usize, ratio: f64) -> usize {
    let exact = len as f64 * ratio;
    let nearest = exact.round();
    let count = if (exact - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        exact.ceil() as usize
    };
    count.clamp(1, len)
}
