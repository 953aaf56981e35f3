use crate::dataset::{ItemIdx, UserIdx};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedEntry {
    pub item: ItemIdx,
    pub score: f64,
}

/// One user's top-N list. Entries are ordered by descending score with
/// ties broken by ascending item id; rank is the 1-based position.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub user: UserIdx,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based rank of a position in the list.
    pub fn rank_of(&self, position: usize) -> usize {
        position + 1
    }

    pub fn items(&self) -> impl Iterator<Item = ItemIdx> + '_ {
        self.entries.iter().map(|e| e.item)
    }
}

/// Keeps the best `n` `(score, item)` pairs under the ordering
/// score-descending, item-ascending. Items must be offered in ascending
/// item order for the tie-break to hold.
pub(crate) struct TopN {
    n: usize,
    entries: Vec<RankedEntry>,
}

impl TopN {
    pub fn new(n: usize) -> TopN {
        TopN {
            n,
            entries: Vec::with_capacity(n + 1),
        }
    }

    pub fn offer(&mut self, item: ItemIdx, score: f64) {
        if self.entries.len() == self.n {
            // Full: an earlier (smaller) item wins ties, so strict greater only.
            if score <= self.entries[self.n - 1].score {
                return;
            }
        }
        // Insert after all entries with score >= incoming score.
        let pos = self.entries.partition_point(|e| e.score >= score);
        self.entries.insert(pos, RankedEntry { item, score });
        if self.entries.len() > self.n {
            self.entries.pop();
        }
    }

    pub fn into_entries(self) -> Vec<RankedEntry> {
        self.entries
    }
}
