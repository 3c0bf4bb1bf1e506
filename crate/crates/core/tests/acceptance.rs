//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.
//!
//! Runs without the libtest harness: `cargo test --test acceptance`.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::sync::Mutex;
use std::time::Instant;

use batch_bpe::experiments::{compare_batched_serial, run_sweep, SweepParam};
use batch_bpe::model_io::{model_hash, model_to_bytes, read_model};
use batch_bpe::trainer::{
    get_stats, merge_batch, train, train_serial_reference, Sequence, SafeBatch, TokenSequenceSet,
    TrainReport,
};
use batch_bpe::{
    corpus, ChunkHistogram, CountingMode, DecodePolicy, Pair, SplitPattern, TokenId,
    TokenizerModel, TrainConfig,
};
use common::*;
use rand::prelude::*;
use sha2::{Digest, Sha256};

/// Every training report produced by this suite, replayed by criterion 2.
static REPORTS: Mutex<Vec<(String, TrainReport)>> = Mutex::new(Vec::new());

fn keep(label: impl Into<String>, report: &TrainReport) {
    REPORTS.lock().unwrap().push((label.into(), report.clone()));
}

fn train_kept(label: &str, hist: &ChunkHistogram, cfg: &TrainConfig) -> (TokenizerModel, TrainReport) {
    let (model, report) = train(hist, cfg).unwrap();
    keep(label, &report);
    (model, report)
}

const DESK_VOCAB: u32 = 2048;

// ---------------------------------------------------------------------------

fn c01_serial_oracle_equivalence() -> String {
    let mut rng = rng(0x5e71a1);
    let mut corpora = 0;
    for i in 0..100 {
        let text = random_corpus(&mut rng, 64 * 1024);
        let hist = ChunkHistogram::build([&text], &SplitPattern::gpt4()).unwrap();
        let vocab = 256 + rng.random_range(1..=300);
        for mode in [CountingMode::NonOverlapping, CountingMode::Overcount] {
            let cfg = TrainConfig::new(vocab)
                .with_max_batch_size(Some(1))
                .with_counting_mode(mode);
            let (model, report) = train_kept(&format!("c01 random #{i} {mode}"), &hist, &cfg);
            let serial = train_serial_reference(&hist, &cfg).unwrap();
            assert_eq!(model.merges(), &serial, "random corpus #{i}, {mode}");
            assert!(report.batch_sizes().iter().all(|&s| s == 1));
        }
        corpora += 1;
    }
    for mode in [CountingMode::NonOverlapping, CountingMode::Overcount] {
        let cfg = TrainConfig::new(DESK_VOCAB)
            .with_max_batch_size(Some(1))
            .with_counting_mode(mode);
        let (model, _) = train_kept(&format!("c01 desk {mode}"), desk_histogram(), &cfg);
        let serial = train_serial_reference(desk_histogram(), &cfg).unwrap();
        assert_eq!(serial.len(), (DESK_VOCAB - 256) as usize);
        assert_eq!(model.merges(), &serial, "desk corpus, {mode}");
    }
    format!("{corpora} random corpora + desk corpus, both counting modes, identical merge tables")
}

fn c02_batch_safety_replay() -> String {
    // Runs here exercise caps and strategies not used elsewhere; everything
    // recorded by earlier criteria is replayed as well.
    for cap in [1, 2, 4] {
        for mode in [CountingMode::NonOverlapping, CountingMode::Overcount] {
            let cfg = TrainConfig::new(1024)
                .with_cap_divisor(cap)
                .with_stop_list_size(5)
                .with_counting_mode(mode);
            train_kept(&format!("c02 cap={cap} {mode}"), desk_histogram(), &cfg);
        }
    }
    let mut rng = rng(2);
    for i in 0..20 {
        let hist = ChunkHistogram::build([random_corpus(&mut rng, 16 * 1024)], &SplitPattern::gpt4())
            .unwrap();
        train_kept(&format!("c02 random #{i}"), &hist, &TrainConfig::new(400));
    }
    let reports = REPORTS.lock().unwrap();
    let mut batches = 0;
    for (label, report) in reports.iter() {
        assert_eq!(report_violations(report), 0, "safety violation in run {label}");
        batches += report.batches.len();
    }
    format!("{} runs, {batches} batches replayed, 0 violations", reports.len())
}

fn c03_order_independence() -> String {
    let mut rng = rng(3);
    let mut orders_checked = 0;
    for trial in 0..1000 {
        let alphabet = rng.random_range(2..7u32);
        // Random candidate order; keep pairs that satisfy the definition
        // against every earlier candidate.
        let mut considered: Vec<Pair> = Vec::new();
        let mut batch: Vec<Pair> = Vec::new();
        for _ in 0..rng.random_range(1..12) {
            let p = (rng.random_range(0..alphabet), rng.random_range(0..alphabet));
            if considered.contains(&p) {
                continue;
            }
            if !considered.iter().any(|&(f, l)| l == p.0 || f == p.1) {
                batch.push(p);
            }
            considered.push(p);
        }
        let first_id = 100;
        let seq: Vec<TokenId> = (0..rng.random_range(0..40))
            .map(|_| rng.random_range(0..alphabet))
            .collect();

        let mut set = TokenSequenceSet::new(vec![Sequence { ids: seq.clone(), freq: 1 }]);
        merge_batch(&mut set, &SafeBatch::from_pairs(first_id, batch.clone(), considered)).unwrap();
        let single_pass = &set.items[0].ids;

        let ids: Vec<TokenId> = (first_id..).take(batch.len()).collect();
        for _ in 0..6 {
            let mut order: Vec<usize> = (0..batch.len()).collect();
            order.shuffle(&mut rng);
            let mut cur = seq.clone();
            loop {
                let before = cur.clone();
                for &k in &order {
                    cur = apply_one_pair(&cur, batch[k], ids[k]);
                }
                if cur == before {
                    break;
                }
            }
            assert_eq!(&cur, single_pass, "trial {trial}: batch {batch:?}, seq {seq:?}");
            orders_checked += 1;
        }
    }
    format!("1000 trials, {orders_checked} pair orders, all equal to the single pass")
}

fn c04_run_counting_oracle() -> String {
    let mut rng = rng(4);
    for trial in 0..10_000 {
        let alphabet = rng.random_range(1..=4u32);
        let len = rng.random_range(0..=50);
        let seq: Vec<TokenId> = (0..len).map(|_| rng.random_range(0..alphabet)).collect();
        let freq = rng.random_range(1..5u64);
        let set = TokenSequenceSet::new(vec![Sequence { ids: seq.clone(), freq }]);
        for (mode, overcount) in [(CountingMode::NonOverlapping, false), (CountingMode::Overcount, true)] {
            let got: std::collections::HashMap<Pair, u64> = get_stats(&set, mode).iter().collect();
            assert_eq!(got, brute_force_pair_counts(&seq, freq, overcount), "trial {trial} {seq:?}");
        }
    }
    let aaaaa = TokenSequenceSet::new(vec![Sequence { ids: vec![97; 5], freq: 1 }]);
    let count = get_stats(&aaaaa, CountingMode::NonOverlapping).get((97, 97));
    assert_eq!(count, 2);
    format!("10000 random sequences match; \"aaaaa\" counts (a,a) = {count}")
}

fn c05_pass_count_reduction() -> String {
    let (_, report) = train_kept("c05 desk", desk_histogram(), &TrainConfig::new(DESK_VOCAB));
    assert!(report.is_complete());
    let passes = report.pass_count();
    let merges = report.merges_made as usize;
    let ratio = passes as f64 / merges as f64;
    let (max_index, max_size) = report.max_batch().unwrap();
    let position = max_index as f64 / passes as f64;
    let merged_before = report.progress_before(max_index);
    assert!(ratio <= 0.15, "passes/merges = {ratio:.4} > 0.15");
    assert!(
        (1.0 / 3.0..2.0 / 3.0).contains(&position),
        "largest batch at pass {max_index}/{passes} ({position:.3}), outside the middle third"
    );
    format!(
        "{passes} passes for {merges} merges (ratio {ratio:.4} <= 0.15); mean batch {:.2}, max {max_size} at pass {max_index}/{passes} ({position:.3} of passes, {merged_before:.3} of merges made)",
        report.mean_batch_size()
    )
}

fn c06_batched_vs_serial_compression() -> String {
    let cmp = compare_batched_serial(desk_histogram(), &TrainConfig::new(DESK_VOCAB), eval_text())
        .unwrap();
    keep("c06 batched", &cmp.batched_report);
    let delta = cmp.encoded_length_delta_percent();
    assert!(delta.abs() <= 1.0, "encoded length differs by {delta:.4}%");
    format!(
        "batched {} vs serial {} tokens on 100 KB held-out text ({delta:+.4}%, bound 1.0%); shared vocab {:.3}",
        cmp.batched_encoded_length, cmp.serial_encoded_length, cmp.shared_vocab_fraction
    )
}

fn c07_round_trip_fuzz() -> String {
    let cfg = TrainConfig::new(DESK_VOCAB).with_stop_list_size(20);
    let (model, _) = train_kept("c07 desk stops=20", desk_histogram(), &cfg);
    let mut rng = rng(7);
    let check = |s: &str| {
        let ids = model.encode(s).unwrap();
        assert_eq!(model.decode(&ids, DecodePolicy::Strict).unwrap(), s, "round trip of {s:?}");
    };
    for _ in 0..10_000 {
        check(&random_unicode(&mut rng, 60));
    }
    let adversarial = [
        "".to_string(),
        "😀👍🏽👨‍👩‍👧‍👦🇫🇷".to_string(),
        "e\u{301}\u{302}\u{303} a\u{308}\u{308}".to_string(),
        " ".repeat(5000),
        "\n".repeat(300) + &"\t".repeat(300),
        "the".repeat(2000),
        "'s'S'll'LL'd don't".to_string(),
        "\u{0}\u{1}\u{7f}\u{feff}\u{200b}\u{2028}".to_string(),
        "日本語のテキスト、中文文本。".to_string(),
        train_text()[..20_000].to_string(),
    ];
    for s in &adversarial {
        check(s);
    }
    format!("10000 random strings + {} adversarial cases round-trip exactly", adversarial.len())
}

fn c08_stop_token_semantics() -> String {
    let cfg = TrainConfig::new(DESK_VOCAB).with_stop_list_size(10);
    let (model, _) = train_kept("c08 desk stops=10", desk_histogram(), &cfg);
    let the = model.stop_id(b" the").expect("\" the\" is among the 10 most common chunks");
    assert_eq!(model.encode(" the").unwrap(), vec![the]);
    let theory = model.encode(" theory").unwrap();
    assert!(!theory.contains(&the), "\" theory\" encoded as {theory:?}");
    let text = " the theory and the thesis, then the theme: the";
    let ids = model.encode(text).unwrap();
    assert_eq!(ids.iter().filter(|&&id| id == the).count(), 4);
    format!("\" the\" -> [{the}]; \" theory\" -> {theory:?} (no stop token)")
}

fn c09_sweep_sanity() -> String {
    let base = TrainConfig::new(DESK_VOCAB);
    let cutoffs: Vec<u64> = (1..=10).collect();
    let rows = run_sweep(desk_histogram(), &base, SweepParam::FreqCutoff, &cutoffs, eval_text())
        .unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0].value, 1);
    assert_eq!(rows[0].percent_change, 0.0);
    let worst = rows
        .iter()
        .max_by(|a, b| a.percent_change.abs().total_cmp(&b.percent_change.abs()))
        .unwrap();
    let changes: Vec<String> = rows.iter().map(|r| format!("{:+.3}", r.percent_change)).collect();

    let stops = [0, 1, 2, 5, 10, 25, 50, 100, 150, 200];
    let stop_rows =
        run_sweep(desk_histogram(), &base, SweepParam::StopListSize, &stops, eval_text()).unwrap();
    assert_eq!(stop_rows.len(), stops.len());
    assert_eq!(stop_rows[0].value, 0);
    assert_eq!(stop_rows[0].percent_change, 0.0);
    let stop_range = stop_rows
        .iter()
        .map(|r| r.percent_change)
        .fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let detail = format!(
        "freq_cutoff 1..10 changes [{}]%, max |change| {:.4}% at cutoff {} (bound 2%); stop_list_size sweep of {} values completed, change {:+.4}%..{:+.4}%",
        changes.join(", "),
        worst.percent_change.abs(),
        worst.value,
        stops.len(),
        stop_range.0,
        stop_range.1
    );
    assert!(worst.percent_change.abs() <= 2.0, "{detail}");
    detail
}

// Frozen from the first run of this suite; any change means training,
// encoding or the file format changed behaviour.
const GOLDEN_MODEL_SHA256: &str = "53016bb899f6508b9396a9fa4ddd5c16c5fa68125702834ff253ed133c92ccc3";
const GOLDEN_IDS_SHA256: &str = "793bdd67ba2bc5715455b51543336c6c7b266b0a33e52afb17373acea3e7130f";

fn ids_hash(ids: &[TokenId]) -> String {
    let mut h = Sha256::new();
    for id in ids {
        h.update(id.to_le_bytes());
    }
    hex::encode(h.finalize())
}

fn c10_persistence() -> String {
    let cfg = TrainConfig::new(1024).with_stop_list_size(16);
    let (model, _) = train_kept("c10 desk 1024", desk_histogram(), &cfg);
    let bytes = model_to_bytes(&model);
    let loaded = read_model(bytes.as_slice()).unwrap();
    assert_eq!(model_to_bytes(&loaded), bytes, "save -> load -> save changed the file");
    let ids = model.encode(eval_text()).unwrap();
    assert_eq!(loaded.encode(eval_text()).unwrap(), ids);
    let model_sha = model_hash(&loaded);
    let ids_sha = ids_hash(&ids);
    assert_eq!(model_sha, GOLDEN_MODEL_SHA256, "model file hash");
    assert_eq!(ids_sha, GOLDEN_IDS_SHA256, "encoded ids hash");
    format!("byte-identical re-save; model sha256 {}…, ids sha256 {}…", &model_sha[..12], &ids_sha[..12])
}

fn c11_csv_round_trip() -> String {
    let mut rng = rng(11);
    let alphabet: Vec<char> = "ab,\"\n\r \té😀'".chars().collect();
    for _ in 0..500 {
        let mut h = ChunkHistogram::new("gpt4");
        for _ in 0..rng.random_range(0..30) {
            let chunk: String = (0..rng.random_range(1..8))
                .map(|_| alphabet[rng.random_range(0..alphabet.len())])
                .collect();
            h.add(&chunk, rng.random_range(1..1_000_000)).unwrap();
        }
        let mut buf = Vec::new();
        corpus::write_csv(&h, &mut buf).unwrap();
        assert_eq!(corpus::read_csv(buf.as_slice(), "gpt4").unwrap(), h);
    }
    let mut buf = Vec::new();
    corpus::write_csv(desk_histogram(), &mut buf).unwrap();
    let loaded = corpus::read_csv(buf.as_slice(), "gpt4").unwrap();
    assert_eq!(&loaded, desk_histogram());
    format!(
        "500 random histograms with separators/quotes/newlines + desk histogram ({} chunks) round-trip exactly",
        loaded.unique()
    )
}

// ---------------------------------------------------------------------------

type Criterion = (&'static str, fn() -> String);

fn main() {
    let criteria: &[Criterion] = &[
        ("1 serial-oracle equivalence", c01_serial_oracle_equivalence),
        ("3 order independence of safe batches", c03_order_independence),
        ("4 run-counting oracle", c04_run_counting_oracle),
        ("5 pass-count reduction", c05_pass_count_reduction),
        ("6 batched-vs-serial compression", c06_batched_vs_serial_compression),
        ("7 round-trip fuzzing", c07_round_trip_fuzz),
        ("8 stop-token semantics", c08_stop_token_semantics),
        ("9 sweep harness sanity", c09_sweep_sanity),
        ("10 persistence", c10_persistence),
        ("11 csv histogram round-trip", c11_csv_round_trip),
        // Last, so it replays every run recorded above.
        ("2 batch-safety replay", c02_batch_safety_replay),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        let started = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.1}s): {detail}"),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL  criterion {name} ({secs:.1}s): {msg}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
