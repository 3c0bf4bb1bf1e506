//! Textbook one-merge-per-pass BPE, kept free of the batched trainer's
//! counting and merging code so the two can check each other.

use std::collections::HashMap;

use super::config::{CountingMode, TrainConfig};
use crate::corpus::ChunkHistogram;
use crate::error::{Error, Result};
use crate::model::MergeTable;
use crate::{Pair, TokenId, BASE_VOCAB_SIZE};

/// Trains by repeatedly merging the single most frequent pair.
///
/// Uses the same frequency cutoff, stop-token id offset, counting mode and
/// tie-break (lowest pair wins) as the batched trainer. Batch parameters are
/// ignored. Stops early, returning a shorter table, if the corpus runs out of
/// pairs.
pub fn train_serial_reference(hist: &ChunkHistogram, config: &TrainConfig) -> Result<MergeTable> {
    config.validate()?;
    let kept = hist.with_freq_cutoff(config.freq_cutoff)?;
    if kept.is_empty() {
        return Err(Error::EmptyCorpus {
            freq_cutoff: config.freq_cutoff,
        });
    }
    if config.stop_list_size as usize > kept.unique() {
        return Err(Error::InvalidArgument(format!(
            "stop_list_size {} exceeds {} unique chunks",
            config.stop_list_size,
            kept.unique()
        )));
    }
    let mut words: Vec<(Vec<TokenId>, u64)> = kept
        .iter()
        .map(|(chunk, count)| (chunk.iter().map(|&b| TokenId::from(b)).collect(), count))
        .collect();

    let first_id = BASE_VOCAB_SIZE + config.stop_list_size;
    let mut pairs = Vec::new();
    for step in 0..config.merges_requested() {
        let counts = count_pairs(&words, config.counting_mode);
        let Some(best) = most_frequent(&counts) else {
            break;
        };
        let new_id = first_id + step;
        for (word, _) in &mut words {
            *word = replace_pair(word, best, new_id);
        }
        pairs.push(best);
    }
    Ok(MergeTable::new(first_id, pairs))
}

fn count_pairs(words: &[(Vec<TokenId>, u64)], mode: CountingMode) -> HashMap<Pair, u64> {
    let mut counts = HashMap::new();
    for (word, freq) in words {
        // `claimed` marks that the previous position's identical pair was
        // counted, so the overlapping one starting here is not mergeable.
        let mut claimed = false;
        for i in 1..word.len() {
            let pair = (word[i - 1], word[i]);
            let repeated = pair.0 == pair.1;
            if repeated && claimed && mode == CountingMode::NonOverlapping {
                claimed = false;
                continue;
            }
            *counts.entry(pair).or_insert(0) += freq;
            claimed = repeated;
        }
    }
    counts
}

fn most_frequent(counts: &HashMap<Pair, u64>) -> Option<Pair> {
    let mut best: Option<(Pair, u64)> = None;
    for (&pair, &count) in counts {
        best = match best {
            Some((bp, bc)) if bc > count || (bc == count && bp < pair) => Some((bp, bc)),
            _ => Some((pair, count)),
        };
    }
    best.map(|(pair, _)| pair)
}

fn replace_pair(word: &[TokenId], pair: Pair, new_id: TokenId) -> Vec<TokenId> {
    let mut out = Vec::with_capacity(word.len());
    let mut i = 0;
    while i < word.len() {
        if i + 1 < word.len() && (word[i], word[i + 1]) == pair {
            out.push(new_id);
            i += 2;
        } else {
            out.push(word[i]);
            i += 1;
        }
    }
    out
}
