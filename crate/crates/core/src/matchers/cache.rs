use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;

/// Concurrent memo of directional pair scores, keyed by
/// `(hypothesis text, premise text)`.
///
/// One cache must only ever be shared by scorers using the same matcher.
/// Concurrent writers of the same key keep the first stored value, and every
/// caller observes that value.
#[derive(Debug, Default)]
pub struct PairCache {
    scores: DashMap<(Arc<str>, Arc<str>), f64>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl PairCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, hyp: &Arc<str>, prem: &Arc<str>) -> Option<f64> {
        let found = self
            .scores
            .get(&(hyp.clone(), prem.clone()))
            .map(|v| *v);
        let counter = if found.is_some() { &self.hits } else { &self.misses };
        counter.fetch_add(1, Ordering::Relaxed);
        found
    }

    /// Stores `score` unless a value is already present; returns the stored value.
    pub fn insert(&self, hyp: Arc<str>, prem: Arc<str>, score: f64) -> f64 {
        *self.scores.entry((hyp, prem)).or_insert(score)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `(hits, misses)` observed by [`PairCache::get`].
    pub fn stats(&self) -> (u64, u64) {
        (
            self.hits.load(Ordering::Relaxed),
            self.misses.load(Ordering::Relaxed),
        )
    }
}
