//! Two-column `chunk,count` histogram files.
//!
//! The first row is the header `chunk,count`. Fields that contain a comma,
//! a double quote, CR or LF are wrapped in double quotes with embedded quotes
//! doubled. Rows are written by descending count, ties by chunk bytes, and
//! end with `\n`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use csv::{ByteRecord, QuoteStyle, ReaderBuilder, Terminator, WriterBuilder};
use rustc_hash::FxHashSet;

use super::histogram::ChunkHistogram;
use crate::error::{Error, Result};

const HEADER: [&str; 2] = ["chunk", "count"];

pub fn write_csv<W: Write>(hist: &ChunkHistogram, out: W) -> Result<()> {
    let mut writer = WriterBuilder::new()
        .quote_style(QuoteStyle::Necessary)
        .terminator(Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(HEADER).map_err(csv_write_error)?;
    for (chunk, count) in hist.ranked() {
        let text =
            std::str::from_utf8(chunk).map_err(|_| Error::NonUtf8Chunk(chunk.to_vec()))?;
        writer
            .write_record([text, count.to_string().as_str()])
            .map_err(csv_write_error)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R, pattern_name: &str) -> Result<ChunkHistogram> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut hist = ChunkHistogram::new(pattern_name);
    let mut seen = FxHashSet::default();
    let mut record = ByteRecord::new();
    let mut first = true;
    loop {
        let more = reader.read_byte_record(&mut record).map_err(|e| Error::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        let fail = |message: String| Error::Csv { line, message };
        if record.len() != 2 {
            return Err(fail(format!("expected 2 columns, found {}", record.len())));
        }
        if first {
            first = false;
            if record.iter().ne(HEADER.iter().map(|h| h.as_bytes())) {
                return Err(fail("expected header `chunk,count`".into()));
            }
            continue;
        }
        let chunk = &record[0];
        if std::str::from_utf8(chunk).is_err() {
            return Err(fail("chunk is not valid UTF-8".into()));
        }
        if chunk.is_empty() {
            return Err(fail("empty chunk".into()));
        }
        let count = std::str::from_utf8(&record[1])
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| {
                fail(format!(
                    "count {:?} is not a non-negative integer",
                    String::from_utf8_lossy(&record[1])
                ))
            })?;
        if count == 0 {
            return Err(fail("count must be at least 1".into()));
        }
        if !seen.insert(chunk.to_vec()) {
            return Err(fail(format!(
                "duplicate chunk {:?}",
                String::from_utf8_lossy(chunk)
            )));
        }
        hist.add(chunk, count)?;
    }
    if first {
        return Err(Error::Csv {
            line: 1,
            message: "missing header `chunk,count`".into(),
        });
    }
    Ok(hist)
}

pub fn save_csv(hist: &ChunkHistogram, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_csv(hist, BufWriter::new(file))
}

pub fn load_csv(path: impl AsRef<Path>, pattern_name: &str) -> Result<ChunkHistogram> {
    let file = File::open(path)?;
    read_csv(BufReader::new(file), pattern_name)
}

fn csv_write_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Csv {
            line: 0,
            message: format!("{other:?}"),
        },
    }
}
