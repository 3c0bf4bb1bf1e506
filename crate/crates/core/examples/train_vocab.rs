//! Trains a 2048-token vocabulary and shows how few passes the batches need.
//!
//! cargo run --release --example train_vocab

use batch_bpe::trainer::train_with_observer;
use batch_bpe::{ChunkHistogram, SplitPattern, TrainConfig};

fn main() -> batch_bpe::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/train_corpus.txt"))?;
    let hist = ChunkHistogram::build([&text], &SplitPattern::gpt4())?;
    let config = TrainConfig::new(2048);
    let (model, report) = train_with_observer(&hist, &config, |batch| {
        if batch.index % 10 == 0 {
            println!("batch {:>3}: {:>3} merges, {} left", batch.index, batch.size(), batch.merges_remaining);
        }
    })?;
    let (max_index, max_size) = report.max_batch().unwrap_or_default();
    println!(
        "{} merges in {} passes (mean batch {:.1}, largest {max_size} at batch {max_index}) in {:.2?}",
        report.merges_made,
        report.pass_count(),
        report.mean_batch_size(),
        report.wall_time
    );
    let longest = model.vocab().iter().max_by_key(|t| t.len()).unwrap();
    println!("longest token: {:?}", String::from_utf8_lossy(longest));
    Ok(())
}
