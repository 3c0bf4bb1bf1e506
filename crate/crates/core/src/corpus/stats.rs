use std::collections::BTreeMap;

use super::histogram::ChunkHistogram;
use crate::error::{Error, Result};

/// Summary of how occurrences are spread over distinct chunks.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub total_chunks: u64,
    pub unique_chunks: usize,
    /// `unique_chunks / total_chunks`; 0 for an empty histogram.
    pub unique_fraction: f64,
    pub top_k: usize,
    /// Share of all occurrences covered by the `top_k` most frequent chunks.
    pub top_k_share: f64,
    /// Occurrence count → number of distinct chunks with that count. The key
    /// equal to `tail_bucket` collects every count `>= tail_bucket`.
    pub frequency_histogram: BTreeMap<u64, usize>,
    pub tail_bucket: u64,
}

impl CorpusStats {
    pub fn compute(hist: &ChunkHistogram, top_k: usize, tail_bucket: u64) -> Result<Self> {
        if top_k > hist.unique() {
            return Err(Error::InvalidArgument(format!(
                "top_k={top_k} exceeds {} unique chunks",
                hist.unique()
            )));
        }
        if tail_bucket < 2 {
            return Err(Error::InvalidArgument("tail bucket must be at least 2".into()));
        }
        let total = hist.total();
        let unique = hist.unique();
        let ranked = hist.ranked();
        let top: u64 = ranked.iter().take(top_k).map(|&(_, c)| c).sum();
        let mut frequency_histogram = BTreeMap::new();
        for &(_, count) in &ranked {
            *frequency_histogram.entry(count.min(tail_bucket)).or_insert(0) += 1;
        }
        let ratio = |num: f64| if total == 0 { 0.0 } else { num / total as f64 };
        Ok(Self {
            total_chunks: total,
            unique_chunks: unique,
            unique_fraction: ratio(unique as f64),
            top_k,
            top_k_share: ratio(top as f64),
            frequency_histogram,
            tail_bucket,
        })
    }

    /// Mean occurrences per distinct chunk.
    pub fn mean_count(&self) -> f64 {
        if self.unique_chunks == 0 {
            0.0
        } else {
            self.total_chunks as f64 / self.unique_chunks as f64
        }
    }

    /// Fraction of distinct chunks seen fewer than `count` times.
    pub fn fraction_below(&self, count: u64) -> f64 {
        if self.unique_chunks == 0 {
            return 0.0;
        }
        let below: usize = self.frequency_histogram.range(..count).map(|(_, n)| n).sum();
        below as f64 / self.unique_chunks as f64
    }
}
