use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use indexmap::IndexMap;
use statetest_core::{Session, ValidatedModel};

/// Insertion-ordered map that moves entries to the back on access and drops
/// the front entry when full.
#[derive(Debug)]
pub(crate) struct Lru<V> {
    entries: IndexMap<String, V>,
    capacity: usize,
}

impl<V: Clone> Lru<V> {
    pub(crate) fn new(capacity: usize) -> Self {
        Lru {
            entries: IndexMap::new(),
            capacity: capacity.max(1),
        }
    }

    pub(crate) fn insert(&mut self, key: String, value: V) {
        if self.entries.len() >= self.capacity {
            self.entries.shift_remove_index(0);
        }
        self.entries.insert(key, value);
    }

    pub(crate) fn get(&mut self, key: &str) -> Option<V> {
        let index = self.entries.get_index_of(key)?;
        let last = self.entries.len() - 1;
        self.entries.move_index(index, last);
        self.entries.get_index(last).map(|(_, v)| v.clone())
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.entries.len()
    }
}

#[derive(Debug)]
pub(crate) struct StoredModel {
    pub model: ValidatedModel,
    pub source: String,
}

#[derive(Debug)]
pub(crate) struct StoredSession {
    pub model_id: String,
    pub created_at_ms: u64,
    pub session: Session,
}

pub(crate) type SessionCell = Arc<Mutex<StoredSession>>;

#[derive(Debug)]
pub(crate) struct Store {
    pub models: Lru<Arc<StoredModel>>,
    pub sessions: Lru<SessionCell>,
    next_id: u64,
}

impl Store {
    pub(crate) fn new(max_models: usize, max_sessions: usize) -> Self {
        Store {
            models: Lru::new(max_models),
            sessions: Lru::new(max_sessions),
            next_id: 1,
        }
    }

    pub(crate) fn fresh_id(&mut self, prefix: &str) -> String {
        let id = format!("{prefix}{}", self.next_id);
        self.next_id += 1;
        id
    }
}

pub(crate) fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}
