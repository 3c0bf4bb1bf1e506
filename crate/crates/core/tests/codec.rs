mod common;

use std::sync::OnceLock;

use batch_bpe::{train, DecodePolicy, Error, SplitPattern, TokenizerModel, TrainConfig};
use common::*;
use proptest::prelude::*;

fn desk_model() -> &'static TokenizerModel {
    static MODEL: OnceLock<TokenizerModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        train(desk_histogram(), &TrainConfig::new(1024).with_stop_list_size(10))
            .unwrap()
            .0
    })
}

proptest! {
    #[test]
    fn round_trip(s in any::<String>()) {
        let ids = desk_model().encode(&s).unwrap();
        prop_assert_eq!(desk_model().decode(&ids, DecodePolicy::Strict).unwrap(), s);
    }

    #[test]
    fn encode_matches_rank_order_replay(s in "[a-z ,.'\n]{0,80}") {
        let model = desk_model();
        let mut expected = Vec::new();
        for chunk in model.pattern().split(&s).unwrap() {
            expected.extend(replay_merges(model, chunk.as_bytes()));
        }
        prop_assert_eq!(model.encode(&s).unwrap(), expected);
    }
}

#[test]
fn encode_matches_replay_on_eval_text() {
    let model = desk_model();
    let text = &eval_text()[..30_000];
    let mut expected = Vec::new();
    for chunk in model.pattern().split(text).unwrap() {
        expected.extend(replay_merges(model, chunk.as_bytes()));
    }
    assert_eq!(model.encode(text).unwrap(), expected);
}

#[test]
fn more_merges_never_lengthen_the_encoding() {
    let model = desk_model();
    let text = &eval_text()[..20_000];
    let mut previous = usize::MAX;
    for n in [0, 1, 10, 50, 100, 300, 500, 768] {
        let len = model.truncated(n).encoded_length(text).unwrap();
        assert!(len <= previous, "{n} merges: {len} > {previous}");
        previous = len;
    }
    assert_eq!(model.truncated(0).encoded_length(text).unwrap(), {
        // Bytes only, except chunks that hit a stop token.
        model
            .pattern()
            .split(text)
            .unwrap()
            .iter()
            .map(|c| if model.stop_id(c.as_bytes()).is_some() { 1 } else { c.len() })
            .sum::<usize>()
    });
}

#[test]
fn stop_tokens_match_whole_chunks_only() {
    let model = desk_model();
    let the = model.stop_id(b" the").unwrap();
    assert_eq!(model.encode(" the").unwrap(), vec![the]);
    for text in [" theory", " then", " there", "the", " The"] {
        assert!(!model.encode(text).unwrap().contains(&the), "{text:?}");
    }
}

#[test]
fn bytes_only_model_encodes_bytes() {
    let model = TokenizerModel::bytes_only(SplitPattern::gpt4());
    let text = "héllo 😀";
    let ids = model.encode(text).unwrap();
    assert_eq!(ids, text.bytes().map(u32::from).collect::<Vec<_>>());
    assert!(model.encode("").unwrap().is_empty());
    assert_eq!(model.decode(&[], DecodePolicy::Strict).unwrap(), "");
}

#[test]
fn decode_errors() {
    let model = desk_model();
    let err = model.decode(&[104, 105, 5000], DecodePolicy::Replace).unwrap_err();
    assert!(matches!(err, Error::UnknownToken { id: 5000, position: 2 }));

    // First byte of "é" alone is not valid UTF-8.
    let partial = [104, 0xc3];
    assert!(matches!(
        model.decode(&partial, DecodePolicy::Strict),
        Err(Error::InvalidUtf8 { offset: 1 })
    ));
    assert_eq!(model.decode(&partial, DecodePolicy::Replace).unwrap(), "h\u{fffd}");
}
