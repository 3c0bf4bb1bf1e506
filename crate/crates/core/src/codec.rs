//! Encoding text to token ids and back.

use crate::error::{Error, Result};
use crate::model::TokenizerModel;
use crate::{Pair, TokenId};

/// What to do with byte sequences that are not valid UTF-8 when decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecodePolicy {
    /// Substitute U+FFFD.
    #[default]
    Replace,
    Strict,
}

impl TokenizerModel {
    /// Encodes one chunk.
    ///
    /// A chunk equal to a stop chunk becomes that single stop token. Anything
    /// else starts as bytes and repeatedly merges the lowest-ranked pair
    /// present.
    pub fn encode_chunk(&self, chunk: &[u8]) -> Vec<TokenId> {
        if let Some(id) = self.stop_id(chunk) {
            return vec![id];
        }
        let mut ids: Vec<TokenId> = chunk.iter().map(|&b| TokenId::from(b)).collect();
        while ids.len() >= 2 {
            let best = ids
                .windows(2)
                .filter_map(|w| self.rank((w[0], w[1])).map(|r| (r, (w[0], w[1]))))
                .min();
            let Some((rank, pair)) = best else {
                break;
            };
            let new_id = self.merges().first_id() + rank;
            merge_all(&mut ids, pair, new_id);
        }
        ids
    }

    pub fn encode(&self, text: &str) -> Result<Vec<TokenId>> {
        let mut ids = Vec::new();
        self.pattern()
            .for_each_chunk(text, |chunk| ids.extend(self.encode_chunk(chunk.as_bytes())))?;
        Ok(ids)
    }

    /// Number of tokens `text` encodes to.
    pub fn encoded_length(&self, text: &str) -> Result<usize> {
        let mut len = 0;
        self.pattern()
            .for_each_chunk(text, |chunk| len += self.encode_chunk(chunk.as_bytes()).len())?;
        Ok(len)
    }

    /// Concatenated bytes of `ids`.
    pub fn decode_bytes(&self, ids: &[TokenId]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for (position, &id) in ids.iter().enumerate() {
            let bytes = self
                .token_bytes(id)
                .ok_or(Error::UnknownToken { id, position })?;
            out.extend_from_slice(bytes);
        }
        Ok(out)
    }

    pub fn decode(&self, ids: &[TokenId], policy: DecodePolicy) -> Result<String> {
        let bytes = self.decode_bytes(ids)?;
        match policy {
            DecodePolicy::Replace => Ok(String::from_utf8_lossy(&bytes).into_owned()),
            DecodePolicy::Strict => String::from_utf8(bytes).map_err(|e| Error::InvalidUtf8 {
                offset: e.utf8_error().valid_up_to(),
            }),
        }
    }
}

fn merge_all(ids: &mut Vec<TokenId>, pair: Pair, new_id: TokenId) {
    let mut read = 0;
    let mut write = 0;
    while read < ids.len() {
        if read + 1 < ids.len() && (ids[read], ids[read + 1]) == pair {
            ids[write] = new_id;
            read += 2;
        } else {
            ids[write] = ids[read];
            read += 1;
        }
        write += 1;
    }
    ids.truncate(write);
}
