use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use super::config::{BatchStrategy, CountingMode, TrainConfig};
use super::pair_stats::{PairStats, PARALLEL_MIN_SEQUENCES};
use super::sequences::{Sequence, TokenSequenceSet};
use crate::error::{Error, Result};
use crate::{Pair, TokenId};

/// Pairs merged together in one pass over the corpus.
///
/// `considered` holds every pair examined during selection, in the order it
/// was examined, including the ones that were skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafeBatch {
    first_id: TokenId,
    merges: Vec<Pair>,
    considered: Vec<Pair>,
    lookup: FxHashMap<Pair, TokenId>,
}

impl SafeBatch {
    /// Builds a batch from pairs already known to be safe. Pair `i` becomes
    /// token `first_id + i`.
    pub fn from_pairs(first_id: TokenId, merges: Vec<Pair>, considered: Vec<Pair>) -> Self {
        let lookup = merges.iter().copied().zip(first_id..).collect();
        Self {
            first_id,
            merges,
            considered,
            lookup,
        }
    }

    pub fn first_id(&self) -> TokenId {
        self.first_id
    }

    /// Merged pairs in id order.
    pub fn pairs(&self) -> &[Pair] {
        &self.merges
    }

    /// `(pair, new token)` in id order.
    pub fn merges(&self) -> impl Iterator<Item = (Pair, TokenId)> + '_ {
        self.merges.iter().copied().zip(self.first_id..)
    }

    pub fn considered(&self) -> &[Pair] {
        &self.considered
    }

    /// Considered pairs that were left out of the batch.
    pub fn skipped(&self) -> Vec<Pair> {
        self.considered
            .iter()
            .filter(|p| !self.lookup.contains_key(p))
            .copied()
            .collect()
    }

    pub fn new_token(&self, pair: Pair) -> Option<TokenId> {
        self.lookup.get(&pair).copied()
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    fn check_defined(&self) -> Result<()> {
        for &(first, last) in &self.merges {
            if first >= self.first_id || last >= self.first_id {
                return Err(Error::Invariant(format!(
                    "batch pair ({first}, {last}) references a token not yet defined (next id {})",
                    self.first_id
                )));
            }
        }
        Ok(())
    }
}

/// Number of top pairs to examine for the next batch.
///
/// `min(merges_remaining / cap_divisor, current_vocab_size, max_batch_size)`,
/// but never less than 1.
pub fn batch_search_limit(merges_remaining: u32, current_vocab_size: u32, config: &TrainConfig) -> usize {
    let by_remaining = merges_remaining / config.cap_divisor.max(1);
    let limit = by_remaining
        .min(current_vocab_size)
        .min(config.max_batch_size.unwrap_or(u32::MAX));
    limit.max(1) as usize
}

/// Picks a batch of mutually non-interfering pairs from the `limit` most
/// frequent ones.
pub fn select_safe_batch(
    stats: &PairStats,
    limit: usize,
    next_id: TokenId,
    strategy: BatchStrategy,
) -> SafeBatch {
    let top = stats.top(limit);
    let mut merges = Vec::new();
    let mut considered = Vec::with_capacity(top.len());
    match strategy {
        BatchStrategy::PositionSensitive => {
            let mut seen_first = FxHashSet::default();
            let mut seen_last = FxHashSet::default();
            for &((first, last), _) in &top {
                considered.push((first, last));
                let unsafe_pair = seen_last.contains(&first) || seen_first.contains(&last);
                seen_first.insert(first);
                seen_last.insert(last);
                if !unsafe_pair {
                    merges.push((first, last));
                }
            }
        }
        BatchStrategy::Naive => {
            let mut seen = FxHashSet::default();
            for &((first, last), _) in &top {
                considered.push((first, last));
                if seen.contains(&first) || seen.contains(&last) {
                    break;
                }
                seen.insert(first);
                seen.insert(last);
                merges.push((first, last));
            }
        }
    }
    SafeBatch::from_pairs(next_id, merges, considered)
}

/// Rewrites `ids` in one left-to-right scan, replacing each adjacent pair
/// found in the batch by its new token.
fn merge_sequence(ids: &mut Vec<TokenId>, batch: &SafeBatch) {
    if ids.len() < 2 {
        return;
    }
    let mut read = 0;
    let mut write = 0;
    while read < ids.len() {
        if read + 1 < ids.len() {
            if let Some(new) = batch.new_token((ids[read], ids[read + 1])) {
                ids[write] = new;
                write += 1;
                read += 2;
                continue;
            }
        }
        ids[write] = ids[read];
        write += 1;
        read += 1;
    }
    ids.truncate(write);
}

/// Applies every merge in `batch` to every sequence in a single pass.
pub fn merge_batch(seqs: &mut TokenSequenceSet, batch: &SafeBatch) -> Result<()> {
    batch.check_defined()?;
    if batch.is_empty() {
        return Ok(());
    }
    if seqs.items.len() < PARALLEL_MIN_SEQUENCES {
        for seq in &mut seqs.items {
            merge_sequence(&mut seq.ids, batch);
        }
    } else {
        seqs.items
            .par_iter_mut()
            .for_each(|seq| merge_sequence(&mut seq.ids, batch));
    }
    Ok(())
}

/// [`merge_batch`] followed by pair counting, fused into one pass over the
/// sequences.
pub fn merge_batch_and_count(
    seqs: &mut TokenSequenceSet,
    batch: &SafeBatch,
    mode: CountingMode,
) -> Result<PairStats> {
    batch.check_defined()?;
    let merge_and_count = |part: &mut [Sequence]| {
        let mut stats = PairStats::default();
        for seq in part {
            merge_sequence(&mut seq.ids, batch);
            stats.add_sequence(&seq.ids, seq.freq, mode);
        }
        stats
    };
    if seqs.items.len() < PARALLEL_MIN_SEQUENCES {
        return Ok(merge_and_count(&mut seqs.items));
    }
    Ok(seqs
        .items
        .par_chunks_mut(PARALLEL_MIN_SEQUENCES / 4)
        .map(merge_and_count)
        .reduce(PairStats::default, |mut a, b| {
            a.absorb(b);
            a
        }))
}
