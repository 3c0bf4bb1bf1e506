use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::config::CountingMode;
use super::sequences::{Sequence, TokenSequenceSet};
use crate::Pair;

// Below this many sequences a single thread is faster.
pub(crate) const PARALLEL_MIN_SEQUENCES: usize = 8192;

/// Weighted adjacent-pair counts: each occurrence inside a sequence adds the
/// sequence's frequency.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairStats {
    counts: FxHashMap<Pair, u64>,
}

impl PairStats {
    pub fn get(&self, pair: Pair) -> u64 {
        self.counts.get(&pair).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pair, u64)> + '_ {
        self.counts.iter().map(|(&p, &c)| (p, c))
    }

    pub fn into_map(self) -> FxHashMap<Pair, u64> {
        self.counts
    }

    /// The `limit` highest counts, highest first; equal counts are ordered by
    /// ascending pair.
    pub fn top(&self, limit: usize) -> Vec<(Pair, u64)> {
        let order = |a: &(Pair, u64), b: &(Pair, u64)| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0));
        let mut entries: Vec<(Pair, u64)> = self.iter().collect();
        if limit < entries.len() {
            entries.select_nth_unstable_by(limit, order);
            entries.truncate(limit);
        }
        entries.sort_unstable_by(order);
        entries
    }

    pub(crate) fn add_sequence(&mut self, ids: &[u32], freq: u64, mode: CountingMode) {
        match mode {
            CountingMode::Overcount => {
                for w in ids.windows(2) {
                    *self.counts.entry((w[0], w[1])).or_insert(0) += freq;
                }
            }
            CountingMode::NonOverlapping => {
                let mut i = 0;
                while i < ids.len() {
                    let token = ids[i];
                    let mut end = i + 1;
                    while end < ids.len() && ids[end] == token {
                        end += 1;
                    }
                    let run = (end - i) as u64;
                    if run >= 2 {
                        *self.counts.entry((token, token)).or_insert(0) += run / 2 * freq;
                    }
                    if end < ids.len() {
                        *self.counts.entry((token, ids[end])).or_insert(0) += freq;
                    }
                    i = end;
                }
            }
        }
    }

    pub(crate) fn absorb(&mut self, other: PairStats) {
        let (mut big, small) = if self.counts.len() >= other.counts.len() {
            (std::mem::take(&mut self.counts), other.counts)
        } else {
            (other.counts, std::mem::take(&mut self.counts))
        };
        for (pair, count) in small {
            *big.entry(pair).or_insert(0) += count;
        }
        self.counts = big;
    }

    pub(crate) fn from_sequences(items: &[Sequence], mode: CountingMode) -> Self {
        let mut stats = Self::default();
        for seq in items {
            stats.add_sequence(&seq.ids, seq.freq, mode);
        }
        stats
    }
}

impl FromIterator<(Pair, u64)> for PairStats {
    fn from_iter<I: IntoIterator<Item = (Pair, u64)>>(iter: I) -> Self {
        let mut counts = FxHashMap::default();
        for (pair, count) in iter {
            if count > 0 {
                *counts.entry(pair).or_insert(0) += count;
            }
        }
        Self { counts }
    }
}

/// Counts every adjacent pair across all sequences.
///
/// Large sets are split across threads; integer sums make the result
/// identical to the single-threaded count.
pub fn get_stats(seqs: &TokenSequenceSet, mode: CountingMode) -> PairStats {
    if seqs.items.len() < PARALLEL_MIN_SEQUENCES {
        return PairStats::from_sequences(&seqs.items, mode);
    }
    seqs.items
        .par_chunks(PARALLEL_MIN_SEQUENCES / 4)
        .map(|part| PairStats::from_sequences(part, mode))
        .reduce(PairStats::default, |mut a, b| {
            a.absorb(b);
            a
        })
}
