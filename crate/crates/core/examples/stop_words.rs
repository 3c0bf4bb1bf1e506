//! Reserves tokens for the most frequent chunks and shows that they only
//! match whole chunks.
//!
//! cargo run --release --example stop_words

use batch_bpe::{train, ChunkHistogram, SplitPattern, TrainConfig};

fn main() -> batch_bpe::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/train_corpus.txt"))?;
    let hist = ChunkHistogram::build([&text], &SplitPattern::gpt4())?;
    let (model, _) = train(&hist, &TrainConfig::new(1024).with_stop_list_size(10))?;

    for (i, stop) in model.stops().iter().enumerate() {
        println!("stop token {}: {:?}", 256 + i, String::from_utf8_lossy(stop));
    }
    for word in [" the", " theory", " in", " inside"] {
        let ids = model.encode(word)?;
        let stop = ids.iter().any(|&id| model.is_stop_token(id));
        println!("{word:?} -> {ids:?}{}", if stop { "  (stop token)" } else { "" });
    }
    Ok(())
}
