use std::fs;
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use super::csv_file::load_csv;
use super::histogram::ChunkHistogram;
use super::pattern::SplitPattern;
use crate::error::{Error, Result};

/// How a plain-text file is cut into documents before splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DocumentMode {
    /// The whole file is one document.
    #[default]
    File,
    /// Every line is a document; line terminators are dropped.
    Line,
}

/// Expands directories (recursively) into the files they contain, sorted by
/// path so ingestion order is stable.
pub fn collect_inputs<P: AsRef<Path>>(inputs: &[P]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        let input = input.as_ref();
        if input.is_dir() {
            let mut found = Vec::new();
            for entry in WalkDir::new(input).follow_links(true) {
                let entry = entry.map_err(|e| Error::Input {
                    path: input.to_path_buf(),
                    source: Box::new(Error::Io(e.into())),
                })?;
                if entry.file_type().is_file() {
                    found.push(entry.into_path());
                }
            }
            found.sort();
            files.extend(found);
        } else {
            files.push(input.to_path_buf());
        }
    }
    Ok(files)
}

/// Whether `path` is read as a histogram file rather than raw text.
pub fn is_histogram_file(path: &Path) -> bool {
    path.extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"))
}

/// Builds one histogram from text files and `.csv` histogram files.
///
/// Errors name the offending file.
pub fn ingest_paths<P: AsRef<Path>>(
    inputs: &[P],
    pattern: &SplitPattern,
    mode: DocumentMode,
) -> Result<ChunkHistogram> {
    let mut hist = ChunkHistogram::new(pattern.name());
    for path in collect_inputs(inputs)? {
        let wrap = |e: Error| Error::Input {
            path: path.clone(),
            source: Box::new(e),
        };
        if is_histogram_file(&path) {
            hist.merge_from(load_csv(&path, pattern.name()).map_err(wrap)?)
                .map_err(wrap)?;
            continue;
        }
        let text = fs::read_to_string(&path).map_err(|e| wrap(e.into()))?;
        match mode {
            DocumentMode::File => hist.add_document(&text, pattern),
            DocumentMode::Line => text
                .lines()
                .try_for_each(|line| hist.add_document(line, pattern)),
        }
        .map_err(wrap)?;
    }
    Ok(hist)
}
