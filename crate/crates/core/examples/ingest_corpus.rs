//! Reduces text files to a chunk histogram, prints its distribution and
//! writes it as csv.
//!
//! cargo run --example ingest_corpus -- [FILES...]

use std::path::PathBuf;

use batch_bpe::corpus::{ingest_paths, save_csv};
use batch_bpe::{CorpusStats, DocumentMode, SplitPattern};

fn main() -> batch_bpe::Result<()> {
    let mut inputs: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if inputs.is_empty() {
        inputs.push(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/train_corpus.txt").into());
    }
    let hist = ingest_paths(&inputs, &SplitPattern::gpt4(), DocumentMode::File)?;
    let stats = CorpusStats::compute(&hist, 100.min(hist.unique()), 10)?;
    println!("{} chunks, {} unique ({:.2}%)", stats.total_chunks, stats.unique_chunks, stats.unique_fraction * 100.0);
    println!("top {} chunks cover {:.1}% of occurrences", stats.top_k, stats.top_k_share * 100.0);
    println!("chunks seen once: {}", stats.frequency_histogram.get(&1).unwrap_or(&0));
    for (chunk, count) in hist.ranked().into_iter().take(10) {
        println!("{count:>8}  {:?}", String::from_utf8_lossy(chunk));
    }
    let out = std::env::temp_dir().join("batch_bpe_histogram.csv");
    save_csv(&hist, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
