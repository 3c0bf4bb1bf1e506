use std::collections::hash_map::Entry;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::pattern::SplitPattern;
use crate::error::{Error, Result};

/// Chunk → occurrence count. The whole training corpus, compressed.
///
/// Chunks are byte strings. Counts are always at least 1: a chunk that never
/// occurred has no entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkHistogram {
    counts: FxHashMap<Vec<u8>, u64>,
    total: u64,
    pattern_name: String,
}

impl ChunkHistogram {
    pub fn new(pattern_name: impl Into<String>) -> Self {
        Self {
            counts: FxHashMap::default(),
            total: 0,
            pattern_name: pattern_name.into(),
        }
    }

    /// Splits every document with `pattern` and counts the chunks.
    pub fn build<I, S>(docs: I, pattern: &SplitPattern) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut hist = Self::new(pattern.name());
        for doc in docs {
            hist.add_document(doc.as_ref(), pattern)?;
        }
        Ok(hist)
    }

    /// Same result as [`ChunkHistogram::build`], with documents spread over
    /// worker threads and the per-worker histograms merged at the end.
    pub fn build_sharded<S>(docs: &[S], pattern: &SplitPattern) -> Result<Self>
    where
        S: AsRef<str> + Sync,
    {
        docs.par_iter()
            .try_fold(
                || Self::new(pattern.name()),
                |mut hist, doc| {
                    hist.add_document(doc.as_ref(), pattern)?;
                    Ok(hist)
                },
            )
            .try_reduce(
                || Self::new(pattern.name()),
                |mut a, b| {
                    a.merge_from(b)?;
                    Ok(a)
                },
            )
    }

    pub fn add_document(&mut self, text: &str, pattern: &SplitPattern) -> Result<()> {
        self.check_pattern(pattern.name())?;
        pattern.for_each_chunk(text, |chunk| self.bump(chunk.as_bytes(), 1))
    }

    /// Adds `count` occurrences of `chunk`.
    pub fn add(&mut self, chunk: impl AsRef<[u8]>, count: u64) -> Result<()> {
        let chunk = chunk.as_ref();
        if count == 0 {
            return Err(Error::InvalidArgument(format!(
                "chunk {:?} added with count 0",
                String::from_utf8_lossy(chunk)
            )));
        }
        if chunk.is_empty() {
            return Err(Error::InvalidArgument("empty chunk".into()));
        }
        self.bump(chunk, count);
        Ok(())
    }

    fn bump(&mut self, chunk: &[u8], count: u64) {
        // Avoid allocating a key for chunks that are already present.
        if let Some(c) = self.counts.get_mut(chunk) {
            *c += count;
        } else {
            self.counts.insert(chunk.to_vec(), count);
        }
        self.total += count;
    }

    pub fn pattern_name(&self) -> &str {
        &self.pattern_name
    }

    pub fn get(&self, chunk: impl AsRef<[u8]>) -> u64 {
        self.counts.get(chunk.as_ref()).copied().unwrap_or(0)
    }

    /// Number of chunk occurrences.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct chunks.
    pub fn unique(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Entries in arbitrary order.
    pub fn iter(&self) -> impl Iterator<Item = (&[u8], u64)> + '_ {
        self.counts.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    /// Entries by descending count; equal counts ordered by chunk bytes.
    pub fn ranked(&self) -> Vec<(&[u8], u64)> {
        let mut entries: Vec<_> = self.iter().collect();
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        entries
    }

    pub fn merge(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.merge_from(other.clone())?;
        Ok(out)
    }

    pub fn merge_from(&mut self, other: Self) -> Result<()> {
        self.check_pattern(&other.pattern_name)?;
        if self.counts.len() < other.counts.len() {
            // Fold the smaller map into the larger one.
            let mine = std::mem::replace(&mut self.counts, other.counts);
            self.total += other.total;
            for (chunk, count) in mine {
                *self.counts.entry(chunk).or_insert(0) += count;
            }
        } else {
            self.total += other.total;
            for (chunk, count) in other.counts {
                match self.counts.entry(chunk) {
                    Entry::Occupied(mut e) => *e.get_mut() += count,
                    Entry::Vacant(e) => {
                        e.insert(count);
                    }
                }
            }
        }
        Ok(())
    }

    /// Keeps only chunks seen at least `cutoff` times.
    pub fn with_freq_cutoff(&self, cutoff: u64) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidArgument("freq_cutoff must be at least 1".into()));
        }
        if cutoff == 1 {
            return Ok(self.clone());
        }
        let counts: FxHashMap<_, _> = self
            .counts
            .iter()
            .filter(|(_, &c)| c >= cutoff)
            .map(|(k, &c)| (k.clone(), c))
            .collect();
        Ok(Self {
            total: counts.values().sum(),
            counts,
            pattern_name: self.pattern_name.clone(),
        })
    }

    /// The `n` most frequent chunks, most frequent first.
    pub fn stop_list(&self, n: usize) -> Result<Vec<Vec<u8>>> {
        if n > self.unique() {
            return Err(Error::InvalidArgument(format!(
                "stop list of {n} chunks requested but the histogram has only {} unique chunks",
                self.unique()
            )));
        }
        Ok(self
            .ranked()
            .into_iter()
            .take(n)
            .map(|(chunk, _)| chunk.to_vec())
            .collect())
    }

    fn check_pattern(&self, other: &str) -> Result<()> {
        if self.pattern_name != other {
            return Err(Error::PatternMismatch {
                left: self.pattern_name.clone(),
                right: other.to_string(),
            });
        }
        Ok(())
    }
}
