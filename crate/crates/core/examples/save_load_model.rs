//! Writes a model file, reads it back and checks nothing changed.
//!
//! cargo run --release --example save_load_model

use batch_bpe::model_io::model_hash;
use batch_bpe::{load_model, save_model, train, ChunkHistogram, SplitPattern, TrainConfig};

fn main() -> batch_bpe::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/train_corpus.txt"))?;
    let hist = ChunkHistogram::build([&text], &SplitPattern::gpt4())?;
    let (model, _) = train(&hist, &TrainConfig::new(600).with_stop_list_size(5))?;

    let path = std::env::temp_dir().join("batch_bpe_example.bpe");
    save_model(&model, &path)?;
    let loaded = load_model(&path)?;
    println!("wrote {} ({} tokens)", path.display(), loaded.vocab_size());
    println!("sha256 {}", model_hash(&loaded));
    assert_eq!(model_hash(&loaded), model_hash(&model));

    let sample = "Loaded models encode exactly like the original.";
    assert_eq!(loaded.encode(sample)?, model.encode(sample)?);
    let head: String = std::fs::read_to_string(&path)?.lines().take(6).collect::<Vec<_>>().join("\n");
    println!("{head}");
    Ok(())
}
