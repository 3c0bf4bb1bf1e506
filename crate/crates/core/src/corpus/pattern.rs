use std::fmt;

use fancy_regex::{Regex, RegexBuilder};

use crate::error::{Error, Result};

/// Pretokenization pattern used by the GPT-4 (cl100k) tokenizer.
pub const GPT4_PATTERN: &str = r"'(?i:[sdmt]|ll|ve|re)|[^\r\n\p{L}\p{N}]?+\p{L}+|\p{N}{1,3}| ?[^\s\p{L}\p{N}]++[\r\n]*|\s*[\r\n]|\s+(?!\S)|\s+";

/// Pretokenization pattern used by the GPT-2 (r50k) tokenizer.
pub const GPT2_PATTERN: &str =
    r"'(?:[sdmt]|ll|ve|re)| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+";

// Long whitespace runs make `\s+(?!\S)` backtrack once per character.
const BACKTRACK_LIMIT: usize = 50_000_000;

/// A named regular expression that cuts text into chunks.
///
/// Splitting is a lossless partition: text the pattern does not match is
/// emitted as its own chunk, so the chunks always concatenate back to the
/// input.
#[derive(Clone)]
pub struct SplitPattern {
    name: String,
    source: String,
    regex: Regex,
}

impl SplitPattern {
    pub fn new(name: impl Into<String>, source: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let source = source.into();
        if name.is_empty() || !name.bytes().all(|b| b.is_ascii_graphic() && b != b'"') {
            return Err(Error::Pattern {
                name,
                message: "pattern names must be non-empty printable ASCII without spaces or quotes"
                    .into(),
            });
        }
        let regex = RegexBuilder::new(&source)
            .backtrack_limit(BACKTRACK_LIMIT)
            .build()
            .map_err(|e| Error::Pattern {
                name: name.clone(),
                message: e.to_string(),
            })?;
        Ok(Self {
            name,
            source,
            regex,
        })
    }

    pub fn gpt4() -> Self {
        Self::new("gpt4", GPT4_PATTERN).expect("built-in pattern compiles")
    }

    pub fn gpt2() -> Self {
        Self::new("gpt2", GPT2_PATTERN).expect("built-in pattern compiles")
    }

    /// Looks up a built-in pattern by name.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "gpt4" => Ok(Self::gpt4()),
            "gpt2" => Ok(Self::gpt2()),
            other => Err(Error::Pattern {
                name: other.to_string(),
                message: "unknown built-in pattern (expected gpt4 or gpt2)".into(),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Splits `text` into chunks whose concatenation is exactly `text`.
    pub fn split<'t>(&self, text: &'t str) -> Result<Vec<&'t str>> {
        let mut chunks = Vec::new();
        self.for_each_chunk(text, |c| chunks.push(c))?;
        Ok(chunks)
    }

    /// Streams chunks to `f` without collecting them.
    pub fn for_each_chunk<'t>(&self, text: &'t str, mut f: impl FnMut(&'t str)) -> Result<()> {
        let mut last = 0;
        for m in self.regex.find_iter(text) {
            let m = m.map_err(|e| Error::Split {
                name: self.name.clone(),
                message: e.to_string(),
            })?;
            if m.start() == m.end() {
                continue;
            }
            if m.start() > last {
                f(&text[last..m.start()]);
            }
            f(m.as_str());
            last = m.end();
        }
        if last < text.len() {
            f(&text[last..]);
        }
        Ok(())
    }
}

impl Default for SplitPattern {
    fn default() -> Self {
        Self::gpt4()
    }
}

impl PartialEq for SplitPattern {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.source == other.source
    }
}

impl Eq for SplitPattern {}

impl fmt::Debug for SplitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SplitPattern")
            .field("name", &self.name)
            .field("source", &self.source)
            .finish()
    }
}
