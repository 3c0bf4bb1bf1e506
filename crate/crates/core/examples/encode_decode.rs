//! Encodes held-out text with a trained model and decodes it back.
//!
//! cargo run --release --example encode_decode -- "some text"

use batch_bpe::{train, ChunkHistogram, DecodePolicy, SplitPattern, TrainConfig};

fn main() -> batch_bpe::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/train_corpus.txt"))?;
    let hist = ChunkHistogram::build([&text], &SplitPattern::gpt4())?;
    let (model, _) = train(&hist, &TrainConfig::new(1024))?;

    let input = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "The tokenizer splits text into chunks, then merges bytes. 😀".to_string());
    let ids = model.encode(&input)?;
    println!("{} bytes -> {} tokens", input.len(), ids.len());
    let pieces: Vec<String> = ids
        .iter()
        .map(|&id| format!("{:?}", String::from_utf8_lossy(model.token_bytes(id).unwrap())))
        .collect();
    println!("{}", pieces.join(" "));
    let decoded = model.decode(&ids, DecodePolicy::Strict)?;
    assert_eq!(decoded, input);
    println!("round trip ok");
    Ok(())
}
