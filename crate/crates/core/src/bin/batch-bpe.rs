use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use batch_bpe::corpus::{ingest_paths, save_csv};
use batch_bpe::experiments::{compare_batched_serial, run_sweep, write_sweep_csv, SweepParam};
use batch_bpe::{
    load_model, save_model, train, BatchStrategy, ChunkHistogram, CorpusStats, CountingMode,
    DecodePolicy, DocumentMode, Error, SplitPattern, StopReason, TokenId, TrainConfig,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

/// Train and use byte pair encoding vocabularies built from chunk histograms.
#[derive(Parser)]
#[command(name = "batch-bpe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a chunk histogram from text (or csv histogram) files and write it as csv.
    Ingest {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Histogram csv to write.
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        stats: StatsArgs,
    },
    /// Print distribution statistics for a corpus.
    Stats {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        stats: StatsArgs,
    },
    /// Train a vocabulary and write the model file.
    Train {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Model file to write.
        #[arg(short, long)]
        output: PathBuf,
        /// Also write one csv row per batch here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Encode text into space-separated token ids.
    Encode {
        #[arg(short, long)]
        model: PathBuf,
        /// Text file to encode; stdin if omitted.
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decode whitespace-separated token ids back into text.
    Decode {
        #[arg(short, long)]
        model: PathBuf,
        /// File of token ids; stdin if omitted.
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Fail on bytes that are not valid UTF-8 instead of substituting U+FFFD.
        #[arg(long)]
        strict: bool,
    },
    /// Train one model per parameter value and compare encoded lengths.
    Sweep {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long, value_enum)]
        param: ParamArg,
        /// Comma-separated values; must include the baseline (0 for
        /// stop-list-size, 1 for freq-cutoff).
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
        /// Text whose encoded length is measured.
        #[arg(long)]
        eval: PathBuf,
        /// Result csv; stdout if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Train batched and one-merge-per-pass models and report how they differ.
    Compare {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        eval: PathBuf,
        /// Result csv; stdout if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CorpusArgs {
    /// Text files, directories, or `.csv` histograms.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Built-in split pattern.
    #[arg(long, default_value = "gpt4")]
    pattern: String,
    #[arg(long, value_enum, default_value_t = DocModeArg::File)]
    doc_mode: DocModeArg,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, default_value_t = 100)]
    top_k: usize,
    /// Counts at or above this share one bucket in the frequency table.
    #[arg(long, default_value_t = 10)]
    tail_bucket: u64,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    vocab_size: u32,
    #[arg(long, default_value_t = 0)]
    stop_list_size: u32,
    #[arg(long, default_value_t = 1)]
    freq_cutoff: u64,
    #[arg(long, default_value_t = 2)]
    cap_divisor: u32,
    #[arg(long)]
    max_batch_size: Option<u32>,
    #[arg(long, default_value_t = CountingMode::NonOverlapping)]
    counting_mode: CountingMode,
    #[arg(long, default_value_t = BatchStrategy::PositionSensitive)]
    strategy: BatchStrategy,
}

#[derive(Clone, Copy, ValueEnum)]
enum DocModeArg {
    File,
    Line,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamArg {
    StopListSize,
    FreqCutoff,
}

impl TrainArgs {
    fn config(&self, pattern: SplitPattern) -> Result<TrainConfig, Error> {
        let config = TrainConfig::new(self.vocab_size)
            .with_stop_list_size(self.stop_list_size)
            .with_freq_cutoff(self.freq_cutoff)
            .with_cap_divisor(self.cap_divisor)
            .with_max_batch_size(self.max_batch_size)
            .with_counting_mode(self.counting_mode)
            .with_strategy(self.strategy)
            .with_split_pattern(pattern);
        config.validate()?;
        Ok(config)
    }
}

impl CorpusArgs {
    fn load(&self) -> Result<(ChunkHistogram, SplitPattern), Error> {
        let pattern = SplitPattern::builtin(&self.pattern)?;
        let mode = match self.doc_mode {
            DocModeArg::File => DocumentMode::File,
            DocModeArg::Line => DocumentMode::Line,
        };
        Ok((ingest_paths(&self.inputs, &pattern, mode)?, pattern))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { EXIT_USAGE } else { EXIT_DATA })
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Ingest { corpus, output, stats } => {
            let (hist, _) = corpus.load()?;
            save_csv(&hist, &output)?;
            print_stats(&hist, &stats)
        }
        Command::Stats { corpus, stats } => {
            let (hist, _) = corpus.load()?;
            print_stats(&hist, &stats)
        }
        Command::Train { corpus, train: args, output, report } => {
            let (hist, pattern) = corpus.load()?;
            let config = args.config(pattern)?;
            let (model, summary) = train(&hist, &config)?;
            save_model(&model, &output)?;
            if let Some(path) = report {
                summary.write_csv(BufWriter::new(File::create(path)?))?;
            }
            let mut out = io::stdout().lock();
            writeln!(out, "merges_made {}", summary.merges_made)?;
            writeln!(out, "passes {}", summary.pass_count())?;
            writeln!(out, "mean_batch_size {:.3}", summary.mean_batch_size())?;
            if let Some((index, size)) = summary.max_batch() {
                writeln!(out, "max_batch_size {size} (batch {index})")?;
            }
            writeln!(out, "vocab_size {}", model.vocab_size())?;
            if let StopReason::CorpusExhausted { merges_missing } = summary.stop_reason {
                eprintln!("warning: corpus exhausted, {merges_missing} merges short of vocab_size");
            }
            Ok(())
        }
        Command::Encode { model, input, output } => {
            let model = load_model(&model)?;
            let text = String::from_utf8(read_input(input.as_deref())?)
                .map_err(|e| Error::InvalidUtf8 { offset: e.utf8_error().valid_up_to() })?;
            let ids = model.encode(&text)?;
            let mut out = open_output(output.as_deref())?;
            if !ids.is_empty() {
                let line: Vec<String> = ids.iter().map(TokenId::to_string).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
            out.flush()?;
            Ok(())
        }
        Command::Decode { model, input, output, strict } => {
            let model = load_model(&model)?;
            let raw = read_input(input.as_deref())?;
            let ids = String::from_utf8_lossy(&raw)
                .split_whitespace()
                .map(|t| {
                    t.parse::<TokenId>()
                        .map_err(|_| Error::InvalidArgument(format!("not a token id: {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Error::Input {
                    path: input.clone().unwrap_or_else(|| "<stdin>".into()),
                    source: Box::new(e),
                })?;
            let policy = if strict { DecodePolicy::Strict } else { DecodePolicy::Replace };
            let text = model.decode(&ids, policy)?;
            let mut out = open_output(output.as_deref())?;
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
        Command::Sweep { corpus, train: args, param, values, eval, output } => {
            let (hist, pattern) = corpus.load()?;
            let config = args.config(pattern)?;
            let param = match param {
                ParamArg::StopListSize => SweepParam::StopListSize,
                ParamArg::FreqCutoff => SweepParam::FreqCutoff,
            };
            let eval_text = read_text(&eval)?;
            let rows = run_sweep(&hist, &config, param, &values, &eval_text)?;
            let mut out = open_output(output.as_deref())?;
            write_sweep_csv(&rows, &mut out)?;
            out.flush()?;
            Ok(())
        }
        Command::Compare { corpus, train: args, eval, output } => {
            let (hist, pattern) = corpus.load()?;
            let config = args.config(pattern)?;
            let eval_text = read_text(&eval)?;
            let comparison = compare_batched_serial(&hist, &config, &eval_text)?;
            let mut out = open_output(output.as_deref())?;
            comparison.write_csv(&mut out)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn print_stats(hist: &ChunkHistogram, args: &StatsArgs) -> Result<(), Error> {
    let stats = CorpusStats::compute(hist, args.top_k.min(hist.unique()), args.tail_bucket)?;
    let mut out = io::stdout().lock();
    writeln!(out, "total_chunks {}", stats.total_chunks)?;
    writeln!(out, "unique_chunks {}", stats.unique_chunks)?;
    writeln!(out, "unique_fraction {:.6}", stats.unique_fraction)?;
    writeln!(out, "top_{}_share {:.6}", stats.top_k, stats.top_k_share)?;
    writeln!(out, "mean_count {:.3}", stats.mean_count())?;
    for (count, chunks) in &stats.frequency_histogram {
        let label = if *count == stats.tail_bucket {
            format!("{count}+")
        } else {
            count.to_string()
        };
        writeln!(out, "chunks_with_count {label} {chunks}")?;
    }
    Ok(())
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, Error> {
    match path {
        Some(p) => fs::read(p).map_err(|e| Error::Input {
            path: p.to_path_buf(),
            source: Box::new(e.into()),
        }),
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input {
        path: path.to_path_buf(),
        source: Box::new(e.into()),
    })
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
