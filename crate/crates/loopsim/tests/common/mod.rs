//! Shared helpers for integration tests: synthetic datasets with a
//! long-tail popularity profile and gendered taste groups, plus a
//! rank-correlation oracle.
#![allow(dead_code)] // each test binary uses its own subset

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use loopsim::dataset::{Dataset, GenreVocab, ItemMeta, Origin, RatingStore, UserMeta};

/// Builds a dataset over up to `n_candidates` items with 6 genres whose
/// popularity follows a power law, and two user groups with distinct
/// genre tastes: the first `male_users` users prefer genres 0..3, the
/// rest genres 3..6. Mirroring the loader, the item universe is exactly
/// the set of items that received at least one rating.
pub fn gendered_longtail_dataset(
    male_users: usize,
    female_users: usize,
    n_candidates: usize,
    profile_len: usize,
    seed: u64,
) -> Dataset {
    let m = male_users + female_users;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let genre_names: Vec<String> = (0..6).map(|g| format!("genre{g}")).collect();
    let genres = GenreVocab::new(genre_names);

    let candidate_genres = |i: usize| -> Vec<u8> {
        let primary = (i % 6) as u8;
        let mut gs = vec![primary];
        if i.is_multiple_of(3) {
            let secondary = ((i / 3) % 6) as u8;
            if secondary != primary {
                gs.push(secondary);
            }
        }
        gs.sort_unstable();
        gs
    };

    // Popularity weight: power law over item rank.
    let base_weight = |i: usize| 1.0 / ((i + 1) as f64).powf(0.8);

    let mut profiles: Vec<Vec<(usize, i32)>> = Vec::with_capacity(m);
    for u in 0..m {
        let taste: &[u8] = if u < male_users {
            &[0, 1, 2]
        } else {
            &[3, 4, 5]
        };
        let weights: Vec<f64> = (0..n_candidates)
            .map(|i| {
                let affinity = if candidate_genres(i).iter().any(|g| taste.contains(g)) {
                    3.0
                } else {
                    1.0
                };
                base_weight(i) * affinity
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let len = profile_len + rng.random_range(0..profile_len / 2 + 1);
        let mut chosen = std::collections::HashSet::new();
        let mut guard = 0;
        while chosen.len() < len.min(n_candidates) && guard < 100_000 {
            guard += 1;
            let mut target = rng.random::<f64>() * total;
            let mut pick = n_candidates - 1;
            for (i, w) in weights.iter().enumerate() {
                target -= w;
                if target < 0.0 {
                    pick = i;
                    break;
                }
            }
            chosen.insert(pick);
        }
        let user_bias: f64 = rng.random_range(-0.8..0.8);
        let mut profile: Vec<(usize, i32)> = chosen
            .into_iter()
            .map(|item| {
                let noise: f64 = rng.random_range(-1.2..1.2);
                let rating = (3.4 + user_bias + noise).round().clamp(1.0, 5.0) as i32;
                (item, rating)
            })
            .collect();
        profile.sort_unstable_by_key(|&(item, _)| item);
        profiles.push(profile);
    }

    // Universe = rated candidates only, like the loader.
    let mut rated: Vec<u32> = profiles
        .iter()
        .flat_map(|p| p.iter().map(|&(item, _)| item as u32))
        .collect();
    rated.sort_unstable();
    rated.dedup();

    let mut store = RatingStore::new((0..m as u32).collect(), rated.clone(), (1, 5));
    for (u, profile) in profiles.iter().enumerate() {
        for &(candidate, rating) in profile {
            let item = store.item_idx(candidate as u32).unwrap();
            store.insert(u, item, rating, Origin::Initial).unwrap();
        }
    }

    let items: Vec<ItemMeta> = rated
        .iter()
        .map(|&candidate| ItemMeta {
            item_id: candidate,
            genres: candidate_genres(candidate as usize),
        })
        .collect();
    let users: Vec<UserMeta> = (0..m)
        .map(|u| UserMeta {
            user_id: u as u32,
            group: if u < male_users { "M" } else { "F" }.to_string(),
        })
        .collect();

    Dataset {
        store,
        users,
        items,
        genres,
    }
}

/// A fixed 3-user, 5-item dataset small enough to trace by hand.
pub fn tiny_dataset() -> Dataset {
    let genres = GenreVocab::new(vec!["a".into(), "b".into(), "c".into()]);
    let items: Vec<ItemMeta> = [vec![0u8], vec![0, 1], vec![1], vec![2], vec![1, 2]]
        .into_iter()
        .enumerate()
        .map(|(i, gs)| ItemMeta {
            item_id: (i + 100) as u32,
            genres: gs,
        })
        .collect();
    let mut store = RatingStore::new(vec![1, 2, 3], (100..105).collect(), (1, 5));
    // user 0 rated items 0,1; user 1 rated 0,2,3; user 2 rated 1.
    for (u, i, r) in [
        (0usize, 0usize, 5),
        (0, 1, 3),
        (1, 0, 4),
        (1, 2, 2),
        (1, 3, 5),
        (2, 1, 1),
    ] {
        store.insert(u, i, r, Origin::Initial).unwrap();
    }
    let users = vec![
        UserMeta {
            user_id: 1,
            group: "M".into(),
        },
        UserMeta {
            user_id: 2,
            group: "F".into(),
        },
        UserMeta {
            user_id: 3,
            group: "M".into(),
        },
    ];
    Dataset {
        store,
        users,
        items,
        genres,
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg_rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        dx += (x - mx) * (x - mx);
        dy += (y - my) * (y - my);
    }
    num / (dx.sqrt() * dy.sqrt())
}
