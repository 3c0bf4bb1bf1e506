use std::fmt;
use std::str::FromStr;

use crate::corpus::SplitPattern;
use crate::error::{Error, Result};
use crate::BASE_VOCAB_SIZE;

/// How a run of identical tokens contributes to the `(t, t)` pair count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum CountingMode {
    /// A run of `k` identical tokens counts `k / 2` times: the number of
    /// merges that can actually be made in it.
    #[default]
    NonOverlapping,
    /// A run of `k` identical tokens counts `k - 1` times. Stats are
    /// recomputed in the same pass that applies a batch.
    Overcount,
}

/// Rule deciding which of the top pairs join a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum BatchStrategy {
    /// A pair is skipped when its first token already appeared last in an
    /// earlier considered pair, or its last token already appeared first.
    /// Skipped pairs still mark their tokens. Selection continues past skips.
    #[default]
    PositionSensitive,
    /// Pairs may share no token at all with earlier pairs; selection stops at
    /// the first conflict.
    Naive,
}

impl FromStr for CountingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "non-overlapping" | "non_overlapping" => Ok(Self::NonOverlapping),
            "overcount" => Ok(Self::Overcount),
            other => Err(Error::InvalidArgument(format!(
                "unknown counting mode {other:?} (expected non-overlapping or overcount)"
            ))),
        }
    }
}

impl fmt::Display for CountingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NonOverlapping => "non-overlapping",
            Self::Overcount => "overcount",
        })
    }
}

impl FromStr for BatchStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "position-sensitive" | "position_sensitive" => Ok(Self::PositionSensitive),
            "naive" => Ok(Self::Naive),
            other => Err(Error::InvalidArgument(format!(
                "unknown batch strategy {other:?} (expected position-sensitive or naive)"
            ))),
        }
    }
}

impl fmt::Display for BatchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PositionSensitive => "position-sensitive",
            Self::Naive => "naive",
        })
    }
}

/// Training parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainConfig {
    /// Final vocabulary size: 256 byte tokens + stop tokens + merges.
    pub vocab_size: u32,
    /// Number of most frequent chunks given a dedicated whole-chunk token.
    pub stop_list_size: u32,
    /// Chunks seen fewer times than this are dropped before training.
    pub freq_cutoff: u64,
    /// At most `merges_remaining / cap_divisor` pairs are examined per batch.
    pub cap_divisor: u32,
    /// Hard cap on pairs examined per batch; `None` means no cap.
    pub max_batch_size: Option<u32>,
    pub split_pattern: SplitPattern,
    pub counting_mode: CountingMode,
    pub strategy: BatchStrategy,
}

impl TrainConfig {
    pub fn new(vocab_size: u32) -> Self {
        Self {
            vocab_size,
            stop_list_size: 0,
            freq_cutoff: 1,
            cap_divisor: 2,
            max_batch_size: None,
            split_pattern: SplitPattern::gpt4(),
            counting_mode: CountingMode::NonOverlapping,
            strategy: BatchStrategy::PositionSensitive,
        }
    }

    pub fn with_stop_list_size(mut self, n: u32) -> Self {
        self.stop_list_size = n;
        self
    }

    pub fn with_freq_cutoff(mut self, cutoff: u64) -> Self {
        self.freq_cutoff = cutoff;
        self
    }

    pub fn with_cap_divisor(mut self, divisor: u32) -> Self {
        self.cap_divisor = divisor;
        self
    }

    pub fn with_max_batch_size(mut self, max: Option<u32>) -> Self {
        self.max_batch_size = max;
        self
    }

    pub fn with_split_pattern(mut self, pattern: SplitPattern) -> Self {
        self.split_pattern = pattern;
        self
    }

    pub fn with_counting_mode(mut self, mode: CountingMode) -> Self {
        self.counting_mode = mode;
        self
    }

    pub fn with_strategy(mut self, strategy: BatchStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let floor = BASE_VOCAB_SIZE as u64 + self.stop_list_size as u64;
        if (self.vocab_size as u64) < floor {
            return Err(Error::Config(format!(
                "vocab_size {} is smaller than 256 byte tokens + {} stop tokens",
                self.vocab_size, self.stop_list_size
            )));
        }
        if self.freq_cutoff == 0 {
            return Err(Error::Config("freq_cutoff must be at least 1".into()));
        }
        if self.cap_divisor == 0 {
            return Err(Error::Config("cap_divisor must be at least 1".into()));
        }
        if self.max_batch_size == Some(0) {
            return Err(Error::Config("max_batch_size must be at least 1".into()));
        }
        Ok(())
    }

    /// Merges needed to reach `vocab_size`.
    pub fn merges_requested(&self) -> u32 {
        self.vocab_size
            .saturating_sub(BASE_VOCAB_SIZE + self.stop_list_size)
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::new(BASE_VOCAB_SIZE)
    }
}
