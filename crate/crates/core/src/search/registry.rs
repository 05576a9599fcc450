use std::collections::BTreeMap;

use crate::scheme::{Format, Scheme};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub scheme: Scheme,
    pub rank: usize,
    pub complexity: i64,
}

/// Best verified scheme per format, ranked by rank and then additive
/// complexity. Ties keep the incumbent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BestRegistry {
    entries: BTreeMap<Format, RegistryEntry>,
}

impl BestRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Would `s` replace the current entry for its format?
    pub fn improves(&self, s: &Scheme) -> bool {
        match self.entries.get(&s.format()) {
            None => true,
            Some(e) => (s.rank(), s.additive_complexity()) < (e.rank, e.complexity),
        }
    }

    /// Inserts `s` if it is strictly better than the stored entry and
    /// passes verification. Returns whether it was stored.
    pub fn offer(&mut self, s: &Scheme) -> bool {
        if !self.improves(s) || !s.verify().passed() {
            return false;
        }
        self.entries.insert(
            s.format(),
            RegistryEntry {
                scheme: s.normalized(),
                rank: s.rank(),
                complexity: s.additive_complexity(),
            },
        );
        true
    }

    pub fn get(&self, format: Format) -> Option<&RegistryEntry> {
        self.entries.get(&format)
    }

    pub fn best_rank(&self, format: Format) -> Option<usize> {
        self.entries.get(&format).map(|e| e.rank)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in format order.
    pub fn iter(&self) -> impl Iterator<Item = (&Format, &RegistryEntry)> {
        self.entries.iter()
    }

    pub fn schemes(&self) -> Vec<&Scheme> {
        self.entries.values().map(|e| &e.scheme).collect()
    }
}
