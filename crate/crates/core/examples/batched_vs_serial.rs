//! Trains the same vocabulary batched and one merge per pass, then compares
//! the two.
//!
//! cargo run --release --example batched_vs_serial

use std::time::Instant;

use batch_bpe::experiments::compare_batched_serial;
use batch_bpe::{ChunkHistogram, SplitPattern, TrainConfig};

fn main() -> batch_bpe::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let text = std::fs::read_to_string(format!("{dir}/train_corpus.txt"))?;
    let eval = std::fs::read_to_string(format!("{dir}/eval_text.txt"))?;
    let hist = ChunkHistogram::build([&text], &SplitPattern::gpt4())?;

    let started = Instant::now();
    let cmp = compare_batched_serial(&hist, &TrainConfig::new(2048), &eval)?;
    println!("both trainings took {:.2?}", started.elapsed());
    println!(
        "passes: batched {}, serial {}",
        cmp.batched_report.pass_count(),
        cmp.serial.merges().len()
    );
    println!("merge edit distance: {}", cmp.merge_edit_distance);
    println!("shared vocabulary: {:.1}%", cmp.shared_vocab_fraction * 100.0);
    println!(
        "encoded length: batched {} vs serial {} ({:+.4}%)",
        cmp.batched_encoded_length,
        cmp.serial_encoded_length,
        cmp.encoded_length_delta_percent()
    );
    Ok(())
}
