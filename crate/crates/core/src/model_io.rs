//! Plain-text model files.
//!
//! ```text
//! batch-bpe-model v1
//! pattern gpt4 "'(?i:[sdmt]|ll|ve|re)|..."
//! stops 2
//! " the"
//! ","
//! merges 3
//! 32 116
//! 104 101
//! 258 257
//! ```
//!
//! Stop chunks take ids from 256 in file order and merge `i` produces token
//! `256 + stops + i`, so ids are never written. Quoted strings escape `\`,
//! `"`, tab, CR and LF with a backslash; other control characters and bytes
//! that are not valid UTF-8 are written as `\xHH`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::corpus::SplitPattern;
use crate::error::{Error, Result};
use crate::model::TokenizerModel;
use crate::{TokenId, BASE_VOCAB_SIZE};

const MAGIC: &str = "batch-bpe-model";
const VERSION: &str = "v1";

pub fn write_model<W: Write>(model: &TokenizerModel, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC} {VERSION}")?;
    writeln!(
        out,
        "pattern {} {}",
        model.pattern().name(),
        quote(model.pattern().source().as_bytes())
    )?;
    writeln!(out, "stops {}", model.stops().len())?;
    for chunk in model.stops() {
        writeln!(out, "{}", quote(chunk))?;
    }
    writeln!(out, "merges {}", model.merges().len())?;
    for &(first, last) in model.merges().pairs() {
        writeln!(out, "{first} {last}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn model_to_bytes(model: &TokenizerModel) -> Vec<u8> {
    let mut buf = Vec::new();
    write_model(model, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

pub fn read_model<R: BufRead>(input: R) -> Result<TokenizerModel> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };

    let header = lines.next_required("header")?;
    let Some(version) = header.strip_prefix(MAGIC).and_then(|r| r.strip_prefix(' ')) else {
        return Err(lines.error("not a batch-bpe model file"));
    };
    if version != VERSION {
        return Err(Error::ModelVersion(version.to_string()));
    }

    let pattern_line = lines.next_required("pattern line")?;
    let rest = pattern_line
        .strip_prefix("pattern ")
        .ok_or_else(|| lines.error("expected `pattern <name> \"<source>\"`"))?;
    let (name, quoted) = rest
        .split_once(' ')
        .ok_or_else(|| lines.error("expected `pattern <name> \"<source>\"`"))?;
    let source = unquote(quoted).map_err(|m| lines.error(m))?;
    let source = String::from_utf8(source).map_err(|_| lines.error("pattern is not UTF-8"))?;
    let pattern = SplitPattern::new(name, source).map_err(|e| lines.error(e.to_string()))?;

    let stop_count = lines.counted("stops")?;
    let mut stops = Vec::with_capacity(stop_count.min(1 << 16));
    for _ in 0..stop_count {
        let line = lines.next_required("stop chunk")?;
        stops.push(unquote(&line).map_err(|m| lines.error(m))?);
    }

    let merge_count = lines.counted("merges")?;
    let mut merges = Vec::with_capacity(merge_count.min(1 << 20));
    for _ in 0..merge_count {
        let line = lines.next_required("merge")?;
        let parsed = line.split_once(' ').and_then(|(a, b)| {
            Some((a.parse::<TokenId>().ok()?, b.parse::<TokenId>().ok()?))
        });
        let pair = parsed.ok_or_else(|| lines.error("expected `<first> <last>` token ids"))?;
        let first_merge = BASE_VOCAB_SIZE as usize + stops.len();
        let next_id = first_merge + merges.len();
        for part in [pair.0, pair.1] {
            let part = part as usize;
            if part >= next_id {
                return Err(lines.error(format!("merge references undefined token {part}")));
            }
            if (BASE_VOCAB_SIZE as usize..first_merge).contains(&part) {
                return Err(lines.error(format!("merge references stop token {part}")));
            }
        }
        merges.push(pair);
    }
    if let Some(extra) = lines.next_line()? {
        if !extra.is_empty() {
            return Err(lines.error("unexpected content after the last merge"));
        }
    }

    TokenizerModel::new(pattern, stops, merges).map_err(|e| match e {
        Error::InvalidArgument(message) => Error::ModelFormat {
            line: lines.line,
            message,
        },
        other => other,
    })
}

pub fn save_model(model: &TokenizerModel, path: impl AsRef<Path>) -> Result<()> {
    write_model(model, BufWriter::new(File::create(path)?))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TokenizerModel> {
    read_model(BufReader::new(File::open(path)?))
}

/// SHA-256 of the model's canonical file contents, hex encoded.
pub fn model_hash(model: &TokenizerModel) -> String {
    hex::encode(Sha256::digest(model_to_bytes(model)))
}

struct Lines<I> {
    inner: I,
    line: usize,
}

impl<I: Iterator<Item = std::io::Result<String>>> Lines<I> {
    fn next_line(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            Some(line) => {
                self.line += 1;
                Ok(Some(line?))
            }
            None => Ok(None),
        }
    }

    fn next_required(&mut self, what: &str) -> Result<String> {
        match self.next_line()? {
            Some(line) => Ok(line),
            None => Err(Error::ModelFormat {
                line: self.line + 1,
                message: format!("unexpected end of file, expected {what}"),
            }),
        }
    }

    fn counted(&mut self, keyword: &str) -> Result<usize> {
        let line = self.next_required(keyword)?;
        line.strip_prefix(keyword)
            .and_then(|r| r.strip_prefix(' '))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| self.error(format!("expected `{keyword} <count>`")))
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::ModelFormat {
            line: self.line,
            message: message.into(),
        }
    }
}

fn quote(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() + 2);
    out.push('"');
    for chunk in bytes.utf8_chunks() {
        for c in chunk.valid().chars() {
            match c {
                '\\' => out.push_str("\\\\"),
                '"' => out.push_str("\\\""),
                '\n' => out.push_str("\\n"),
                '\r' => out.push_str("\\r"),
                '\t' => out.push_str("\\t"),
                c if c.is_control() && (c as u32) < 0x80 => {
                    out.push_str(&format!("\\x{:02x}", c as u32))
                }
                c => out.push(c),
            }
        }
        for b in chunk.invalid() {
            out.push_str(&format!("\\x{b:02x}"));
        }
    }
    out.push('"');
    out
}

fn unquote(s: &str) -> std::result::Result<Vec<u8>, String> {
    let inner = s
        .strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .filter(|_| s.len() >= 2)
        .ok_or("expected a double-quoted string")?;
    let mut out = Vec::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '"' => return Err("unescaped quote inside string".into()),
            '\\' => match chars.next() {
                Some('\\') => out.push(b'\\'),
                Some('"') => out.push(b'"'),
                Some('n') => out.push(b'\n'),
                Some('r') => out.push(b'\r'),
                Some('t') => out.push(b'\t'),
                Some('x') => {
                    let hex: String = chars.by_ref().take(2).collect();
                    let byte = u8::from_str_radix(&hex, 16)
                        .ok()
                        .filter(|_| hex.len() == 2)
                        .ok_or_else(|| format!("bad \\x escape {hex:?}"))?;
                    out.push(byte);
                }
                other => return Err(format!("unknown escape \\{}", other.unwrap_or(' '))),
            },
            c => {
                let mut buf = [0; 4];
                out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
            }
        }
    }
    Ok(out)
}
