//! Corpus ingestion: splitting text into chunks and keeping only the
//! chunk-frequency histogram.

mod csv_file;
mod histogram;
mod ingest;
mod pattern;
mod stats;

pub use csv_file::{load_csv, read_csv, save_csv, write_csv};
pub use histogram::ChunkHistogram;
pub use ingest::{collect_inputs, ingest_paths, is_histogram_file, DocumentMode};
pub use pattern::{SplitPattern, GPT2_PATTERN, GPT4_PATTERN};
pub use stats::CorpusStats;
