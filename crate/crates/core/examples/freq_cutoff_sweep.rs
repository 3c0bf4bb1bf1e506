//! Trains one model per freq_cutoff value and reports the change in encoded
//! length of held-out text.
//!
//! cargo run --release --example freq_cutoff_sweep

use batch_bpe::experiments::{run_sweep, SweepParam};
use batch_bpe::{ChunkHistogram, SplitPattern, TrainConfig};

fn main() -> batch_bpe::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let text = std::fs::read_to_string(format!("{dir}/train_corpus.txt"))?;
    let eval = std::fs::read_to_string(format!("{dir}/eval_text.txt"))?;
    let hist = ChunkHistogram::build([&text], &SplitPattern::gpt4())?;
    let values: Vec<u64> = (1..=10).collect();
    let rows = run_sweep(&hist, &TrainConfig::new(2048), SweepParam::FreqCutoff, &values, &eval)?;
    println!("cutoff  unique chunks  encoded length  change");
    for row in rows {
        let unique = hist.with_freq_cutoff(row.value)?.unique();
        println!("{:>6}  {unique:>13}  {:>14}  {:+.3}%", row.value, row.encoded_length, row.percent_change);
    }
    Ok(())
}
