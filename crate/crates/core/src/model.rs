use rustc_hash::FxHashMap;

use crate::corpus::SplitPattern;
use crate::error::{Error, Result};
use crate::{Pair, TokenId, BASE_VOCAB_SIZE};

/// Ordered merges. The merge at rank `r` produces token `first_id + r`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MergeTable {
    first_id: TokenId,
    pairs: Vec<Pair>,
}

impl MergeTable {
    pub fn new(first_id: TokenId, pairs: Vec<Pair>) -> Self {
        Self { first_id, pairs }
    }

    /// Id of the token produced by the first merge.
    pub fn first_id(&self) -> TokenId {
        self.first_id
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(pair, new token)` in rank order.
    pub fn iter(&self) -> impl Iterator<Item = (Pair, TokenId)> + '_ {
        self.pairs
            .iter()
            .zip(self.first_id..)
            .map(|(&pair, id)| (pair, id))
    }

    /// The first `n` merges.
    pub fn prefix(&self, n: usize) -> Self {
        Self::new(self.first_id, self.pairs[..n.min(self.pairs.len())].to_vec())
    }
}

/// Everything needed to encode and decode: the split pattern, whole-chunk
/// stop tokens and the ranked merges.
///
/// Token ids: `0..256` are raw bytes, then one id per stop chunk in stop-list
/// order, then one id per merge in rank order.
#[derive(Debug, Clone)]
pub struct TokenizerModel {
    pattern: SplitPattern,
    stops: Vec<Vec<u8>>,
    stop_ids: FxHashMap<Vec<u8>, TokenId>,
    merges: MergeTable,
    ranks: FxHashMap<Pair, u32>,
    vocab: Vec<Vec<u8>>,
}

impl TokenizerModel {
    pub fn new(pattern: SplitPattern, stops: Vec<Vec<u8>>, merges: Vec<Pair>) -> Result<Self> {
        let mut vocab: Vec<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
        let mut stop_ids = FxHashMap::default();
        for chunk in &stops {
            if chunk.is_empty() {
                return Err(Error::InvalidArgument("empty stop chunk".into()));
            }
            let id = vocab.len() as TokenId;
            if stop_ids.insert(chunk.clone(), id).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate stop chunk {:?}",
                    String::from_utf8_lossy(chunk)
                )));
            }
            vocab.push(chunk.clone());
        }
        let first_merge = vocab.len() as TokenId;
        let mut ranks = FxHashMap::default();
        for (rank, &(first, last)) in merges.iter().enumerate() {
            let id = vocab.len() as TokenId;
            for part in [first, last] {
                if part >= id {
                    return Err(Error::InvalidArgument(format!(
                        "merge {rank} ({first}, {last}) uses token {part} before it is defined"
                    )));
                }
                if (BASE_VOCAB_SIZE..first_merge).contains(&part) {
                    return Err(Error::InvalidArgument(format!(
                        "merge {rank} ({first}, {last}) uses stop token {part}"
                    )));
                }
            }
            if ranks.insert((first, last), rank as u32).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "merge {rank} ({first}, {last}) repeats an earlier merge"
                )));
            }
            let mut bytes = vocab[first as usize].clone();
            bytes.extend_from_slice(&vocab[last as usize]);
            vocab.push(bytes);
        }
        Ok(Self {
            pattern,
            stops,
            stop_ids,
            merges: MergeTable::new(first_merge, merges),
            ranks,
            vocab,
        })
    }

    /// A model with no stop tokens and no merges: plain byte encoding.
    pub fn bytes_only(pattern: SplitPattern) -> Self {
        Self::new(pattern, Vec::new(), Vec::new()).expect("empty model is valid")
    }

    pub fn pattern(&self) -> &SplitPattern {
        &self.pattern
    }

    /// Stop chunks in id order.
    pub fn stops(&self) -> &[Vec<u8>] {
        &self.stops
    }

    pub fn stop_id(&self, chunk: &[u8]) -> Option<TokenId> {
        self.stop_ids.get(chunk).copied()
    }

    pub fn merges(&self) -> &MergeTable {
        &self.merges
    }

    pub fn rank(&self, pair: Pair) -> Option<u32> {
        self.ranks.get(&pair).copied()
    }

    /// Bytes of every token, indexed by id.
    pub fn vocab(&self) -> &[Vec<u8>] {
        &self.vocab
    }

    pub fn token_bytes(&self, id: TokenId) -> Option<&[u8]> {
        self.vocab.get(id as usize).map(Vec::as_slice)
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_stop_token(&self, id: TokenId) -> bool {
        (BASE_VOCAB_SIZE..self.merges.first_id()).contains(&id)
    }

    /// Same model with only the first `n` merges.
    pub fn truncated(&self, n: usize) -> Self {
        Self::new(
            self.pattern.clone(),
            self.stops.clone(),
            self.merges.prefix(n).pairs().to_vec(),
        )
        .expect("a prefix of a valid merge table is valid")
    }
}
