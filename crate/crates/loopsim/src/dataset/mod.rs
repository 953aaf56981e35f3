//! Rating data: MovieLens ingestion, the evolving store, train/test
//! splitting and snapshot io.

mod loader;
mod meta;
mod snapshot;
mod split;
mod store;

pub use loader::{density, load_movielens};
pub use meta::{Dataset, GenreVocab, ItemMeta, UserMeta, UNKNOWN_GROUP};
pub use snapshot::{read_snapshot, write_snapshot};
pub use split::{split_train_test, SplitResult};
pub use store::{ItemIdx, Origin, ProfileEntry, RatingStore, UserIdx};

pub(crate) use snapshot::{build_store, parse_line};
