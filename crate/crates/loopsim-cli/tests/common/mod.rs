//! Helpers shared by the CLI and acceptance tests.
#![allow(dead_code)] // each test binary uses its own subset

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GENRES: [&str; 6] = ["Action", "Comedy", "Drama", "Horror", "Romance", "Sci-Fi"];

/// Writes a synthetic MovieLens-format dataset (`ratings.dat`,
/// `users.dat`, `movies.dat`) with a long-tail popularity profile and
/// gendered genre tastes: male users favor the first three genres,
/// female users the last three.
pub fn write_synthetic_movielens(
    dir: &Path,
    male_users: usize,
    female_users: usize,
    n_movies: usize,
    profile_len: usize,
    seed: u64,
) -> (PathBuf, PathBuf, PathBuf) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = male_users + female_users;

    let movie_genres = |i: usize| -> Vec<&'static str> {
        let mut gs = vec![GENRES[i % 6]];
        if i.is_multiple_of(3) {
            let second = GENRES[(i / 3) % 6];
            if second != gs[0] {
                gs.push(second);
            }
        }
        gs
    };

    let movies_path = dir.join("movies.dat");
    {
        let mut f = fs::File::create(&movies_path).unwrap();
        for i in 0..n_movies {
            writeln!(
                f,
                "{}::Movie {} ({})::{}",
                i + 1,
                i + 1,
                1990 + i % 20,
                movie_genres(i).join("|")
            )
            .unwrap();
        }
    }

    let users_path = dir.join("users.dat");
    {
        let mut f = fs::File::create(&users_path).unwrap();
        for u in 0..m {
            let gender = if u < male_users { "M" } else { "F" };
            writeln!(f, "{}::{}::25::4::00000", u + 1, gender).unwrap();
        }
    }

    let ratings_path = dir.join("ratings.dat");
    {
        let mut f = fs::File::create(&ratings_path).unwrap();
        let base_weight = |i: usize| 1.0 / ((i + 1) as f64).powf(0.8);
        for u in 0..m {
            let male = u < male_users;
            let weights: Vec<f64> = (0..n_movies)
                .map(|i| {
                    let genre_set = movie_genres(i);
                    let favored = genre_set.iter().any(|g| {
                        let idx = GENRES.iter().position(|x| x == g).unwrap();
                        if male {
                            idx < 3
                        } else {
                            idx >= 3
                        }
                    });
                    base_weight(i) * if favored { 3.0 } else { 1.0 }
                })
                .collect();
            let total: f64 = weights.iter().sum();
            let len = profile_len + rng.random_range(0..profile_len / 2 + 1);
            let mut chosen = std::collections::BTreeSet::new();
            let mut guard = 0;
            while chosen.len() < len.min(n_movies) && guard < 100_000 {
                guard += 1;
                let mut target = rng.random::<f64>() * total;
                let mut pick = n_movies - 1;
                for (i, w) in weights.iter().enumerate() {
                    target -= w;
                    if target < 0.0 {
                        pick = i;
                        break;
                    }
                }
                chosen.insert(pick);
            }
            let bias: f64 = rng.random_range(-0.8..0.8);
            for item in chosen {
                let noise: f64 = rng.random_range(-1.2..1.2);
                let rating = (3.4 + bias + noise).round().clamp(1.0, 5.0) as i32;
                writeln!(f, "{}::{}::{}::978300000", u + 1, item + 1, rating).unwrap();
            }
        }
    }

    (ratings_path, users_path, movies_path)
}

/// Writes a run config pointing at the given dataset files.
pub fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

pub fn basic_config_body(extra: &str) -> String {
    format!(
        "ratings_file = \"ratings.dat\"\n\
         users_file = \"users.dat\"\n\
         movies_file = \"movies.dat\"\n\
         {extra}"
    )
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (x, y) in rx.iter().zip(&ry) {
        num += (x - mx) * (y - my);
        dx += (x - mx) * (x - mx);
        dy += (y - my) * (y - my);
    }
    num / (dx.sqrt() * dy.sqrt())
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
