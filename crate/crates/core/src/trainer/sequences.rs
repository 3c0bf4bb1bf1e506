use super::config::TrainConfig;
use crate::corpus::ChunkHistogram;
use crate::error::{Error, Result};
use crate::TokenId;

/// One distinct chunk as token ids, with how often the chunk occurs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub ids: Vec<TokenId>,
    pub freq: u64,
}

/// The trainer's working copy of the corpus. Merges rewrite `ids` in place;
/// frequencies never change.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequenceSet {
    pub items: Vec<Sequence>,
}

impl TokenSequenceSet {
    pub fn new(items: Vec<Sequence>) -> Self {
        Self { items }
    }

    /// Sequences of raw bytes for every chunk in the histogram, most
    /// frequent first.
    pub fn from_histogram(hist: &ChunkHistogram) -> Self {
        let items = hist
            .ranked()
            .into_iter()
            .map(|(chunk, freq)| Sequence {
                ids: chunk.iter().map(|&b| b as TokenId).collect(),
                freq,
            })
            .collect();
        Self { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Tokens in the corpus these sequences stand for (each sequence counted
    /// `freq` times).
    pub fn weighted_tokens(&self) -> u64 {
        self.items.iter().map(|s| s.ids.len() as u64 * s.freq).sum()
    }

    /// Tokens stored, one copy per distinct chunk.
    pub fn stored_tokens(&self) -> usize {
        self.items.iter().map(|s| s.ids.len()).sum()
    }
}

/// Filters the histogram, picks the stop chunks and converts every remaining
/// chunk to byte tokens.
///
/// Stop chunks keep their byte sequences in the returned set: they still
/// shape merge statistics and only affect encoding. The stop list is taken
/// after the frequency cutoff is applied.
pub fn prepare_sequences(
    hist: &ChunkHistogram,
    config: &TrainConfig,
) -> Result<(TokenSequenceSet, Vec<Vec<u8>>)> {
    config.validate()?;
    let filtered = hist.with_freq_cutoff(config.freq_cutoff)?;
    if filtered.is_empty() {
        return Err(Error::EmptyCorpus {
            freq_cutoff: config.freq_cutoff,
        });
    }
    let stops = filtered.stop_list(config.stop_list_size as usize)?;
    Ok((TokenSequenceSet::from_histogram(&filtered), stops))
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
    fn no_stop_list() {
        let (seqs, stops) =
            prepare_sequences(&hist(&[("ab", 2), ("c", 5)]), &TrainConfig::new(300)).unwrap();
        assert!(stops.is_empty());
        assert_eq!(
            seqs.items,
            vec![
                Sequence { ids: vec![99], freq: 5 },
                Sequence { ids: vec![97, 98], freq: 2 },
            ]
        );
        assert_eq!(seqs.weighted_tokens(), 9);
    }

    #[test]
    fn stop_chunks_stay_as_bytes() {
        let h = hist(&[(" the", 10), (" theory", 2), (" in", 7)]);
        let cfg = TrainConfig::new(300).with_stop_list_size(2);
        let (seqs, stops) = prepare_sequences(&h, &cfg).unwrap();
        assert_eq!(stops, vec![b" the".to_vec(), b" in".to_vec()]);
        assert_eq!(seqs.len(), 3);
        assert!(seqs.items.iter().flat_map(|s| &s.ids).all(|&id| id < 256));
    }

    #[test]
    fn cutoff_applies_first() {
        let h = hist(&[("a", 1), ("b", 5)]);
        let cfg = TrainConfig::new(300).with_freq_cutoff(2);
        let (seqs, _) = prepare_sequences(&h, &cfg).unwrap();
        assert_eq!(seqs.items, vec![Sequence { ids: vec![98], freq: 5 }]);

        let cfg = TrainConfig::new(300).with_freq_cutoff(6);
        assert!(matches!(
            prepare_sequences(&h, &cfg),
            Err(Error::EmptyCorpus { freq_cutoff: 6 })
        ));

        let cfg = TrainConfig::new(300).with_freq_cutoff(2).with_stop_list_size(2);
        assert!(matches!(
            prepare_sequences(&h, &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }
}
