//! Vocabulary training by safe merge batches.
//!
//! Each pass over the corpus counts pairs once, then merges as many of the
//! most frequent pairs as can be merged together without any of them
//! changing whether another can apply. With a batch size of one this is plain
//! BPE; [`train_serial_reference`] implements that directly as a check.

mod batch;
mod config;
mod pair_stats;
mod report;
mod sequences;
mod serial;

use std::time::Instant;

pub use batch::{batch_search_limit, merge_batch, merge_batch_and_count, select_safe_batch, SafeBatch};
pub use config::{BatchStrategy, CountingMode, TrainConfig};
pub use pair_stats::{get_stats, PairStats};
pub use report::{BatchRecord, StopReason, TrainReport};
pub use sequences::{prepare_sequences, Sequence, TokenSequenceSet};
pub use serial::train_serial_reference;

use crate::corpus::ChunkHistogram;
use crate::error::{Error, Result};
use crate::model::TokenizerModel;
use crate::BASE_VOCAB_SIZE;

/// Trains a model from a chunk histogram.
///
/// If the corpus runs out of pairs before the vocabulary is full, the model
/// built so far is returned and the report's `stop_reason` says so.
pub fn train(hist: &ChunkHistogram, config: &TrainConfig) -> Result<(TokenizerModel, TrainReport)> {
    train_with_observer(hist, config, |_| {})
}

/// [`train`], calling `observe` after every batch.
pub fn train_with_observer(
    hist: &ChunkHistogram,
    config: &TrainConfig,
    mut observe: impl FnMut(&BatchRecord),
) -> Result<(TokenizerModel, TrainReport)> {
    let started = Instant::now();
    if hist.pattern_name() != config.split_pattern.name() {
        return Err(Error::PatternMismatch {
            left: hist.pattern_name().to_string(),
            right: config.split_pattern.name().to_string(),
        });
    }
    let (mut seqs, stops) = prepare_sequences(hist, config)?;
    let merges_requested = config.merges_requested();
    let mut merges_remaining = merges_requested;
    let mut next_id = BASE_VOCAB_SIZE + stops.len() as u32;
    let mut merges = Vec::with_capacity(merges_requested as usize);
    let mut batches: Vec<BatchRecord> = Vec::new();
    let mut stats = get_stats(&seqs, config.counting_mode);
    let mut pass_started = Instant::now();

    while merges_remaining > 0 {
        if stats.is_empty() {
            break;
        }
        // The current vocabulary includes the stop tokens.
        let limit = batch_search_limit(merges_remaining, next_id, config);
        let batch = select_safe_batch(&stats, limit, next_id, config.strategy);
        merges.extend_from_slice(batch.pairs());
        next_id += batch.len() as u32;
        merges_remaining -= batch.len() as u32;
        // The last batch is never applied: nothing reads the sequences again.
        if merges_remaining > 0 {
            match config.counting_mode {
                CountingMode::Overcount => {
                    stats = merge_batch_and_count(&mut seqs, &batch, config.counting_mode)?;
                }
                CountingMode::NonOverlapping => {
                    merge_batch(&mut seqs, &batch)?;
                    stats = get_stats(&seqs, config.counting_mode);
                }
            }
        }
        let now = Instant::now();
        let record = BatchRecord {
            index: batches.len(),
            considered: batch.considered().to_vec(),
            merged: batch.merges().collect(),
            merges_remaining,
            elapsed: now - pass_started,
        };
        pass_started = now;
        observe(&record);
        batches.push(record);
    }

    let model = TokenizerModel::new(config.split_pattern.clone(), stops, merges)?;
    let merges_made = merges_requested - merges_remaining;
    let report = TrainReport {
        batches,
        merges_requested,
        merges_made,
        wall_time: started.elapsed(),
        stop_reason: if merges_remaining == 0 {
            StopReason::VocabFilled
        } else {
            StopReason::CorpusExhausted {
                merges_missing: merges_remaining,
            }
        },
    };
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(entries: &[(&str, u64)]) -> ChunkHistogram {
        let mut h = ChunkHistogram::new("gpt4");
        for (c, n) in entries {
            h.add(c, *n).unwrap();
        }
        h
    }

    #[test]
    fn serial_batches_match_reference_on_classic_example() {
        let h = hist(&[("aaabdaaabac", 1)]);
        let cfg = TrainConfig::new(259).with_max_batch_size(Some(1));
        let (model, report) = train(&h, &cfg).unwrap();
        assert_eq!(model.merges(), &train_serial_reference(&h, &cfg).unwrap());
        assert_eq!(report.batch_sizes(), vec![1, 1, 1]);
        assert!(report.is_complete());
    }

    #[test]
    fn exhaustion_returns_partial_model() {
        let h = hist(&[("abc", 3)]);
        let (model, report) = train(&h, &TrainConfig::new(300)).unwrap();
        assert_eq!(model.merges().len(), 2);
        assert_eq!(report.merges_made, 2);
        assert_eq!(
            report.stop_reason,
            StopReason::CorpusExhausted { merges_missing: 42 }
        );
        assert_eq!(model.token_bytes(257), Some(&b"abc"[..]));
    }

    #[test]
    fn accounting_and_report() {
        let h = hist(&[(" the", 50), (" there", 20), (" then", 12), (" other", 9), (" her", 30)]);
        let cfg = TrainConfig::new(262).with_stop_list_size(1);
        let mut seen = Vec::new();
        let (model, report) = train_with_observer(&h, &cfg, |r| seen.push(r.index)).unwrap();
        assert_eq!(report.merges_made, 5);
        assert_eq!(report.batch_sizes().iter().sum::<usize>(), 5);
        assert_eq!(seen, (0..report.pass_count()).collect::<Vec<_>>());
        assert_eq!(model.stops(), &[b" the".to_vec()]);
        assert_eq!(model.merges().first_id(), 257);
        assert_eq!(report.batches.last().unwrap().merges_remaining, 0);
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), report.pass_count() + 1);
    }

    #[test]
    fn config_errors() {
        let h = hist(&[("ab", 1)]);
        assert!(matches!(
            train(&h, &TrainConfig::new(256).with_stop_list_size(1)),
            Err(Error::Config(_))
        ));
        let gpt2 = TrainConfig::new(300).with_split_pattern(crate::corpus::SplitPattern::gpt2());
        assert!(matches!(train(&h, &gpt2), Err(Error::PatternMismatch { .. })));
    }
}
