use std::io::Write;
use std::time::Duration;

use crate::error::Result;
use crate::{Pair, TokenId};

/// One pass over the corpus: the pairs examined and the merges made.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchRecord {
    pub index: usize,
    pub considered: Vec<Pair>,
    pub merged: Vec<(Pair, TokenId)>,
    /// Merges still to make after this batch.
    pub merges_remaining: u32,
    /// Time spent on this pass (counting, selection and merging).
    pub elapsed: Duration,
}

impl BatchRecord {
    pub fn size(&self) -> usize {
        self.merged.len()
    }
}

/// Why training stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    VocabFilled,
    /// No adjacent pairs were left before the vocabulary was full.
    CorpusExhausted { merges_missing: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainReport {
    pub batches: Vec<BatchRecord>,
    pub merges_requested: u32,
    pub merges_made: u32,
    pub wall_time: Duration,
    pub stop_reason: StopReason,
}

impl TrainReport {
    /// Full passes over the corpus, one per batch.
    pub fn pass_count(&self) -> usize {
        self.batches.len()
    }

    pub fn batch_sizes(&self) -> Vec<usize> {
        self.batches.iter().map(BatchRecord::size).collect()
    }

    pub fn mean_batch_size(&self) -> f64 {
        if self.batches.is_empty() {
            0.0
        } else {
            self.merges_made as f64 / self.batches.len() as f64
        }
    }

    /// Largest batch and the index of the first batch that reached it.
    pub fn max_batch(&self) -> Option<(usize, usize)> {
        self.batches
            .iter()
            .enumerate()
            .map(|(i, b)| (b.size(), i))
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
            .map(|(size, i)| (i, size))
    }

    /// Fraction of all merges already made when batch `index` started.
    pub fn progress_before(&self, index: usize) -> f64 {
        if self.merges_made == 0 {
            return 0.0;
        }
        let before: usize = self.batches[..index].iter().map(BatchRecord::size).sum();
        before as f64 / self.merges_made as f64
    }

    pub fn is_complete(&self) -> bool {
        self.stop_reason == StopReason::VocabFilled
    }

    /// One CSV row per batch: `batch,batch_size,pairs_considered,merges_remaining,elapsed_ms`.
    ///
    /// `elapsed_ms` is wall time and differs between runs.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "batch,batch_size,pairs_considered,merges_remaining,elapsed_ms")?;
        for b in &self.batches {
            writeln!(
                out,
                "{},{},{},{},{:.3}",
                b.index,
                b.size(),
                b.considered.len(),
                b.merges_remaining,
                b.elapsed.as_secs_f64() * 1000.0
            )?;
        }
        Ok(())
    }
}
