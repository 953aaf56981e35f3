//! MovieLens 1M file ingestion.
//!
//! `ratings.dat` lines are `UserID::MovieID::Rating::Timestamp`,
//! `users.dat` lines are `UserID::Gender::Age::Occupation::Zip`, and
//! `movies.dat` lines are `MovieID::Title::Genres` with `|`-separated
//! genres. Files are read as raw bytes because movie titles are not
//! UTF-8; only the numeric and genre fields are decoded.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::meta::{Dataset, GenreVocab, ItemMeta, UserMeta, UNKNOWN_GROUP};
use crate::dataset::store::{Origin, RatingStore};
use crate::error::{Error, Result};

/// Loads a MovieLens-format dataset. The item universe is the set of
/// items that appear in the ratings file; movies that were never rated
/// are dropped. Every rated movie must have a metadata row with at
/// least one genre.
pub fn load_movielens(
    ratings_path: &Path,
    users_path: &Path,
    movies_path: &Path,
    bounds: (i32, i32),
) -> Result<Dataset> {
    let ratings = parse_ratings(ratings_path, bounds)?;

    let mut user_ids: Vec<u32> = ratings.iter().map(|r| r.user).collect();
    let mut item_ids: Vec<u32> = ratings.iter().map(|r| r.item).collect();
    user_ids.sort_unstable();
    user_ids.dedup();
    item_ids.sort_unstable();
    item_ids.dedup();

    let mut store = RatingStore::new(user_ids, item_ids, bounds);
    for record in &ratings {
        let user = store.user_idx(record.user).expect("user in universe");
        let item = store.item_idx(record.item).expect("item in universe");
        store
            .insert(user, item, record.rating, Origin::Initial)
            .map_err(|err| match err {
                Error::DuplicateRating { user, item } => Error::DuplicateRecord {
                    file: ratings_path.to_path_buf(),
                    line: record.line,
                    user,
                    item,
                },
                other => other,
            })?;
    }

    let groups = parse_users(users_path)?;
    let users = store
        .user_ids()
        .iter()
        .map(|&user_id| UserMeta {
            user_id,
            group: groups
                .get(&user_id)
                .cloned()
                .unwrap_or_else(|| UNKNOWN_GROUP.to_string()),
        })
        .collect();

    let genre_lists = parse_movies(movies_path)?;
    let mut vocab_names: Vec<String> = Vec::new();
    for &item_id in store.item_ids() {
        let genres = genre_lists
            .get(&item_id)
            .ok_or(Error::UnknownItem(item_id))?;
        vocab_names.extend(genres.iter().cloned());
    }
    let genres = GenreVocab::new(vocab_names);
    let items = store
        .item_ids()
        .iter()
        .map(|&item_id| ItemMeta {
            item_id,
            genres: genre_lists[&item_id]
                .iter()
                .map(|g| genres.index(g).expect("genre in vocabulary"))
                .collect(),
        })
        .collect();

    Ok(Dataset {
        store,
        users,
        items,
        genres,
    })
}

/// |ratings| / (m * n).
pub fn density(store: &RatingStore) -> Result<f64> {
    if store.user_count() == 0 || store.item_count() == 0 {
        return Err(Error::UndefinedDensity);
    }
    Ok(store.len() as f64 / (store.user_count() as f64 * store.item_count() as f64))
}

struct RatingRecord {
    user: u32,
    item: u32,
    rating: i32,
    line: usize,
}

fn parse_ratings(path: &Path, bounds: (i32, i32)) -> Result<Vec<RatingRecord>> {
    let bytes = fs::read(path)?;
    let mut records = Vec::new();
    for (line_no, line) in lines(&bytes) {
        let fields = split_fields(line);
        if fields.len() != 4 {
            return Err(malformed(path, line_no, "expected 4 '::'-separated fields"));
        }
        let user = parse_u32(fields[0], path, line_no, "user id")?;
        let item = parse_u32(fields[1], path, line_no, "item id")?;
        let rating = parse_i64(fields[2], path, line_no, "rating")?;
        // Timestamp is validated and then dropped.
        parse_i64(fields[3], path, line_no, "timestamp")?;
        if rating < bounds.0 as i64 || rating > bounds.1 as i64 {
            return Err(Error::RatingOutOfBounds {
                file: path.to_path_buf(),
                line: line_no,
                value: rating,
                min: bounds.0,
                max: bounds.1,
            });
        }
        records.push(RatingRecord {
            user,
            item,
            rating: rating as i32,
            line: line_no,
        });
    }
    Ok(records)
}

fn parse_users(path: &Path) -> Result<HashMap<u32, String>> {
    let bytes = fs::read(path)?;
    let mut groups = HashMap::new();
    for (line_no, line) in lines(&bytes) {
        let fields = split_fields(line);
        if fields.len() != 5 {
            return Err(malformed(path, line_no, "expected 5 '::'-separated fields"));
        }
        let user = parse_u32(fields[0], path, line_no, "user id")?;
        let group = std::str::from_utf8(fields[1])
            .map_err(|_| malformed(path, line_no, "gender field is not UTF-8"))?
            .trim()
            .to_string();
        let group = if group.is_empty() {
            UNKNOWN_GROUP.to_string()
        } else {
            group
        };
        groups.insert(user, group);
    }
    Ok(groups)
}

fn parse_movies(path: &Path) -> Result<HashMap<u32, Vec<String>>> {
    let bytes = fs::read(path)?;
    let mut genre_lists = HashMap::new();
    for (line_no, line) in lines(&bytes) {
        // Titles may contain single colons; fields are id, title, genres.
        let first = find_sep(line, 0)
            .ok_or_else(|| malformed(path, line_no, "expected 3 '::'-separated fields"))?;
        let last = rfind_sep(line)
            .filter(|&pos| pos > first)
            .ok_or_else(|| malformed(path, line_no, "expected 3 '::'-separated fields"))?;
        let item = parse_u32(&line[..first], path, line_no, "item id")?;
        let genre_field = std::str::from_utf8(&line[last + 2..])
            .map_err(|_| malformed(path, line_no, "genre field is not UTF-8"))?;
        let genres: Vec<String> = genre_field
            .split('|')
            .map(|g| g.trim().to_string())
            .filter(|g| !g.is_empty())
            .collect();
        if genres.is_empty() {
            return Err(malformed(path, line_no, "empty genre list"));
        }
        genre_lists.insert(item, genres);
    }
    Ok(genre_lists)
}

/// Iterates non-empty lines as `(1-based line number, bytes)`, tolerating
/// trailing carriage returns.
fn lines(bytes: &[u8]) -> impl Iterator<Item = (usize, &[u8])> {
    bytes
        .split(|&b| b == b'\n')
        .enumerate()
        .map(|(i, line)| {
            let line = line.strip_suffix(b"\r").unwrap_or(line);
            (i + 1, line)
        })
        .filter(|(_, line)| !line.is_empty())
}

fn split_fields(line: &[u8]) -> Vec<&[u8]> {
    let mut fields = Vec::new();
    let mut start = 0;
    while let Some(pos) = find_sep(line, start) {
        fields.push(&line[start..pos]);
        start = pos + 2;
    }
    fields.push(&line[start..]);
    fields
}

fn find_sep(line: &[u8], from: usize) -> Option<usize> {
    line[from..]
        .windows(2)
        .position(|w| w == b"::")
        .map(|p| from + p)
}

fn rfind_sep(line: &[u8]) -> Option<usize> {
    if line.len() < 2 {
        return None;
    }
    (0..=line.len() - 2)
        .rev()
        .find(|&i| &line[i..i + 2] == b"::")
}

fn parse_u32(field: &[u8], path: &Path, line: usize, what: &str) -> Result<u32> {
    std::str::from_utf8(field)
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .ok_or_else(|| malformed(path, line, format!("{what} is not an unsigned integer")))
}

fn parse_i64(field: &[u8], path: &Path, line: usize, what: &str) -> Result<i64> {
    std::str::from_utf8(field)
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .ok_or_else(|| malformed(path, line, format!("{what} is not an integer")))
}

fn malformed(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedRecord {
        file: PathBuf::from(path),
        line,
        reason: reason.into(),
    }
}
