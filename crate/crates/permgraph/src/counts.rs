//! The common currency of cycle statistics: counts keyed by word class.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::words::WordClass;

/// Nonnegative integer counts per word class; graph cycle counts, limit
/// process occupation numbers, and Poisson references all speak this type.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountVector(BTreeMap<WordClass, u64>);

impl CountVector {
    pub fn new() -> Self {
        CountVector(BTreeMap::new())
    }

    pub fn add(&mut self, class: WordClass, count: u64) {
        if count > 0 {
            *self.0.entry(class).or_insert(0) += count;
        }
    }

    pub fn get(&self, class: &WordClass) -> u64 {
        self.0.get(class).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WordClass, u64)> {
        self.0.iter().map(|(k, &v)| (k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.values().all(|&v| v == 0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    /// Aggregates by word length: `C_k = Σ_{|w|=k} C_w`.
    pub fn by_length(&self) -> BTreeMap<usize, u64> {
        let mut m = BTreeMap::new();
        for (cl, v) in self.iter() {
            *m.entry(cl.len()).or_insert(0) += v;
        }
        m
    }

    /// `C_k` for a single length.
    pub fn length_count(&self, k: usize) -> u64 {
        self.iter().filter(|(cl, _)| cl.len() == k).map(|(_, v)| v).sum()
    }
}

impl FromIterator<(WordClass, u64)> for CountVector {
    fn from_iter<T: IntoIterator<Item = (WordClass, u64)>>(iter: T) -> Self {
        let mut cv = CountVector::new();
        for (cl, n) in iter {
            cv.add(cl, n);
        }
        cv
    }
}
