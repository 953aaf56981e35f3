//! Line-oriented store dumps: `user<TAB>item<TAB>rating<TAB>origin`,
//! where origin is `initial` or the iteration index that injected the
//! rating. Reloading a dump reproduces the store exactly.

use std::io::{BufRead, Write};

use crate::dataset::store::{Origin, RatingStore};
use crate::error::{Error, Result};

pub fn write_snapshot<W: Write>(store: &RatingStore, w: &mut W) -> std::io::Result<()> {
    for (user, item, rating, origin) in store.iter() {
        let user_id = store.user_id(user);
        let item_id = store.item_id(item);
        match origin {
            Origin::Initial => writeln!(w, "{user_id}\t{item_id}\t{rating}\tinitial")?,
            Origin::Iteration(t) => writeln!(w, "{user_id}\t{item_id}\t{rating}\t{t}")?,
        }
    }
    Ok(())
}

pub fn read_snapshot<R: BufRead>(r: R, bounds: (i32, i32)) -> Result<RatingStore> {
    let mut rows = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        rows.push(parse_line(&line, line_no)?);
    }
    build_store(&rows, bounds)
}

pub(crate) struct SnapshotRow {
    pub user: u32,
    pub item: u32,
    pub rating: i32,
    pub origin: Origin,
    pub line: usize,
}

pub(crate) fn parse_line(line: &str, line_no: usize) -> Result<SnapshotRow> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(Error::SnapshotFormat {
            line: line_no,
            reason: format!("expected 4 tab-separated fields, got {}", fields.len()),
        });
    }
    let user = fields[0]
        .parse::<u32>()
        .map_err(|_| Error::SnapshotFormat {
            line: line_no,
            reason: "user id is not an unsigned integer".into(),
        })?;
    let item = fields[1]
        .parse::<u32>()
        .map_err(|_| Error::SnapshotFormat {
            line: line_no,
            reason: "item id is not an unsigned integer".into(),
        })?;
    let rating = fields[2]
        .parse::<i32>()
        .map_err(|_| Error::SnapshotFormat {
            line: line_no,
            reason: "rating is not an integer".into(),
        })?;
    let origin = if fields[3] == "initial" {
        Origin::Initial
    } else {
        Origin::Iteration(
            fields[3]
                .parse::<u32>()
                .map_err(|_| Error::SnapshotFormat {
                    line: line_no,
                    reason: "origin is neither 'initial' nor an iteration index".into(),
                })?,
        )
    };
    Ok(SnapshotRow {
        user,
        item,
        rating,
        origin,
        line: line_no,
    })
}

pub(crate) fn build_store(rows: &[SnapshotRow], bounds: (i32, i32)) -> Result<RatingStore> {
    let user_ids: Vec<u32> = rows.iter().map(|r| r.user).collect();
    let item_ids: Vec<u32> = rows.iter().map(|r| r.item).collect();
    let mut store = RatingStore::new(user_ids, item_ids, bounds);
    for row in rows {
        let user = store.user_idx(row.user).expect("user in universe");
        let item = store.item_idx(row.item).expect("item in universe");
        store
            .insert(user, item, row.rating, row.origin)
            .map_err(|err| Error::SnapshotFormat {
                line: row.line,
                reason: err.to_string(),
            })?;
    }
    Ok(store)
}
