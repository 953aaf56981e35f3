use crate::dataset::store::RatingStore;

/// Group label for a user that never appeared in the users file.
pub const UNKNOWN_GROUP: &str = "unknown";

/// Per-user metadata; one entry per store user, aligned with user indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserMeta {
    pub user_id: u32,
    pub group: String,
}

/// Per-item metadata; one entry per store item, aligned with item indices.
/// Genres are indices into the dataset's genre vocabulary and never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemMeta {
    pub item_id: u32,
    pub genres: Vec<u8>,
}

/// Sorted genre vocabulary of the loaded dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenreVocab {
    names: Vec<String>,
}

impl GenreVocab {
    pub fn new(mut names: Vec<String>) -> GenreVocab {
        names.sort();
        names.dedup();
        GenreVocab { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, idx: u8) -> &str {
        &self.names[idx as usize]
    }

    pub fn index(&self, name: &str) -> Option<u8> {
        self.names
            .binary_search_by(|probe| probe.as_str().cmp(name))
            .ok()
            .map(|i| i as u8)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A loaded dataset: the rating store plus aligned user/item metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub store: RatingStore,
    pub users: Vec<UserMeta>,
    pub items: Vec<ItemMeta>,
    pub genres: GenreVocab,
}
