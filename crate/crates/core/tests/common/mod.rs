//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::OnceLock;

use batch_bpe::trainer::TrainReport;
use batch_bpe::{ChunkHistogram, Pair, SplitPattern, TokenId, TokenizerModel};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// ~950 KB of English technical prose used as the training corpus.
pub fn train_text() -> &'static str {
    static TEXT: OnceLock<String> = OnceLock::new();
    TEXT.get_or_init(|| std::fs::read_to_string(data_path("train_corpus.txt")).unwrap())
}

/// 100 KB of held-out prose from the same domain.
pub fn eval_text() -> &'static str {
    static TEXT: OnceLock<String> = OnceLock::new();
    TEXT.get_or_init(|| std::fs::read_to_string(data_path("eval_text.txt")).unwrap())
}

pub fn desk_histogram() -> &'static ChunkHistogram {
    static HIST: OnceLock<ChunkHistogram> = OnceLock::new();
    HIST.get_or_init(|| ChunkHistogram::build([train_text()], &SplitPattern::gpt4()).unwrap())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const SYLLABLES: &[&str] = &[
    "th", "e", "an", "in", "er", "re", "on", "at", "st", "en", "a", "o", "ti", "ng", "is", "or",
    "ou", "ar", "es", "te", "l", "s", "x", "qu", "z", "aa", "ee", "oo",
];

/// Random text with word-like structure: words built from a syllable
/// inventory with skewed frequencies, joined by spaces, punctuation and
/// newlines, with occasional long character runs.
pub fn random_corpus(rng: &mut impl Rng, max_bytes: usize) -> String {
    let target = rng.random_range(1..=max_bytes);
    let lexicon: Vec<String> = (0..rng.random_range(5..200))
        .map(|_| {
            (0..rng.random_range(1..5))
                .map(|_| SYLLABLES[rng.random_range(0..SYLLABLES.len())])
                .collect()
        })
        .collect();
    let mut out = String::new();
    while out.len() < target {
        // Squaring a uniform draw skews choices toward the front of the lexicon.
        let u: f64 = rng.random();
        let word = &lexicon[((u * u) * lexicon.len() as f64) as usize];
        match rng.random_range(0..40) {
            0 => out.push_str(&"a".repeat(rng.random_range(2..9))),
            1 => out.push_str(&" ".repeat(rng.random_range(2..9))),
            2 => out.push('\n'),
            3 => out.push_str(", "),
            4 => out.push_str(". "),
            5 => out.push_str(&rng.random_range(0..10_000).to_string()),
            _ => {
                out.push(' ');
                out.push_str(word);
            }
        }
    }
    out
}

/// Random valid UTF-8 drawn from ASCII, Latin, CJK, emoji, combining marks
/// and whitespace.
pub fn random_unicode(rng: &mut impl Rng, max_chars: usize) -> String {
    const POOLS: &[(u32, u32)] = &[
        (0x20, 0x7e),
        (0x20, 0x7e),
        (0x20, 0x7e),
        (0x09, 0x0d),
        (0xa0, 0x17f),
        (0x300, 0x36f),
        (0x391, 0x3c9),
        (0x4e00, 0x4fff),
        (0x1f600, 0x1f64f),
        (0x2000, 0x206f),
    ];
    let len = rng.random_range(0..=max_chars);
    (0..len)
        .map(|_| {
            let (lo, hi) = POOLS[rng.random_range(0..POOLS.len())];
            char::from_u32(rng.random_range(lo..=hi)).unwrap_or('?')
        })
        .collect()
}

/// Oracle: pair counts by direct enumeration. Distinct-token pairs count
/// every adjacent occurrence; a repeated-token pair counts the greedy
/// leftmost non-overlapping matches of the two-token substring.
pub fn brute_force_pair_counts(seq: &[TokenId], freq: u64, overcount: bool) -> HashMap<Pair, u64> {
    let mut alphabet: Vec<TokenId> = seq.to_vec();
    alphabet.sort_unstable();
    alphabet.dedup();
    let mut out = HashMap::new();
    for &x in &alphabet {
        for &y in &alphabet {
            let mut count = 0u64;
            let mut i = 0;
            while i + 1 < seq.len() {
                if seq[i] == x && seq[i + 1] == y {
                    count += 1;
                    if x == y && !overcount {
                        i += 2;
                        continue;
                    }
                }
                i += 1;
            }
            if count > 0 {
                out.insert((x, y), count * freq);
            }
        }
    }
    out
}

/// Oracle: counts merged pairs that break the safety definition. A merged
/// pair is unsafe if its first token is the last token of any pair considered
/// before it, or its last token is the first token of any such pair.
pub fn safety_violations(considered: &[Pair], merged: &[Pair]) -> usize {
    let mut violations = 0;
    for &(first, last) in merged {
        let Some(pos) = considered.iter().position(|&p| p == (first, last)) else {
            violations += 1;
            continue;
        };
        if considered[..pos]
            .iter()
            .any(|&(f, l)| l == first || f == last)
        {
            violations += 1;
        }
    }
    violations
}

pub fn report_violations(report: &TrainReport) -> usize {
    report
        .batches
        .iter()
        .map(|b| {
            let merged: Vec<Pair> = b.merged.iter().map(|&(p, _)| p).collect();
            let ids_ok = b
                .merged
                .windows(2)
                .all(|w| w[1].1 == w[0].1 + 1);
            safety_violations(&b.considered, &merged) + usize::from(!ids_ok)
        })
        .sum()
}

/// Oracle: replaces every non-overlapping occurrence of one pair, scanning
/// left to right.
pub fn apply_one_pair(seq: &[TokenId], pair: Pair, new_id: TokenId) -> Vec<TokenId> {
    let mut out = Vec::with_capacity(seq.len());
    let mut i = 0;
    while i < seq.len() {
        if i + 1 < seq.len() && seq[i] == pair.0 && seq[i + 1] == pair.1 {
            out.push(new_id);
            i += 2;
        } else {
            out.push(seq[i]);
            i += 1;
        }
    }
    out
}

/// Oracle: encodes a chunk by replaying every merge in rank order.
pub fn replay_merges(model: &TokenizerModel, chunk: &[u8]) -> Vec<TokenId> {
    if let Some(id) = model.stop_id(chunk) {
        return vec![id];
    }
    let mut ids: Vec<TokenId> = chunk.iter().map(|&b| TokenId::from(b)).collect();
    for (pair, new_id) in model.merges().iter() {
        ids = apply_one_pair(&ids, pair, new_id);
    }
    ids
}
