//! Iteration snapshots: a small `#`-prefixed header followed by the
//! store dump, written after an iteration's commit. The header binds
//! the snapshot to its configuration and seed so a resumed run cannot
//! silently diverge.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::dataset::{build_store, parse_line, write_snapshot, RatingStore};
use crate::error::{Error, Result};

const MAGIC: &str = "#loopsim-checkpoint v1";
const RNG_SCHEME: &str = "chacha8-iteration-user-streams";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointHeader {
    /// The iteration whose commit produced the stored data.
    pub iteration: u32,
    pub config_hash: String,
    pub master_seed: u64,
}

pub fn write_checkpoint<W: Write>(
    store: &RatingStore,
    header: &CheckpointHeader,
    w: &mut W,
) -> std::io::Result<()> {
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "#iteration={}", header.iteration)?;
    writeln!(w, "#config_hash={}", header.config_hash)?;
    writeln!(w, "#seed={}", header.master_seed)?;
    writeln!(w, "#rng_scheme={RNG_SCHEME}")?;
    write_snapshot(store, w)
}

pub fn read_checkpoint<R: BufRead>(
    r: R,
    bounds: (i32, i32),
) -> Result<(CheckpointHeader, RatingStore)> {
    let mut fields: HashMap<String, String> = HashMap::new();
    let mut rows = Vec::new();
    let mut saw_magic = false;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if line == MAGIC {
                saw_magic = true;
            } else if let Some((key, value)) = rest.split_once('=') {
                fields.insert(key.to_string(), value.to_string());
            }
            continue;
        }
        rows.push(parse_line(&line, line_no)?);
    }
    if !saw_magic {
        return Err(Error::SnapshotFormat {
            line: 1,
            reason: format!("missing '{MAGIC}' marker"),
        });
    }
    let header = CheckpointHeader {
        iteration: header_field(&fields, "iteration")?.parse().map_err(|_| {
            Error::SnapshotFormat {
                line: 2,
                reason: "iteration is not an unsigned integer".into(),
            }
        })?,
        config_hash: header_field(&fields, "config_hash")?.to_string(),
        master_seed: header_field(&fields, "seed")?
            .parse()
            .map_err(|_| Error::SnapshotFormat {
                line: 4,
                reason: "seed is not an unsigned integer".into(),
            })?,
    };
    let store = build_store(&rows, bounds)?;
    Ok((header, store))
}

fn header_field<'a>(fields: &'a HashMap<String, String>, key: &str) -> Result<&'a str> {
    fields
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::SnapshotFormat {
            line: 1,
            reason: format!("header is missing '{key}'"),
        })
}
