//! Parameter sweeps and batched-vs-serial comparisons, measured by encoded
//! length of an evaluation text.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::corpus::ChunkHistogram;
use crate::error::{Error, Result};
use crate::model::TokenizerModel;
use crate::trainer::{train, train_serial_reference, TrainConfig, TrainReport};

/// Training parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    StopListSize,
    FreqCutoff,
}

impl SweepParam {
    /// The value meaning "feature off", against which changes are reported.
    pub fn baseline(self) -> u64 {
        match self {
            Self::StopListSize => 0,
            Self::FreqCutoff => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::StopListSize => "stop_list_size",
            Self::FreqCutoff => "freq_cutoff",
        }
    }

    fn apply(self, config: &TrainConfig, value: u64) -> Result<TrainConfig> {
        Ok(match self {
            Self::StopListSize => config.clone().with_stop_list_size(
                u32::try_from(value)
                    .map_err(|_| Error::InvalidArgument(format!("stop_list_size {value} too large")))?,
            ),
            Self::FreqCutoff => config.clone().with_freq_cutoff(value),
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stop_list_size" | "stop-list-size" => Ok(Self::StopListSize),
            "freq_cutoff" | "freq-cutoff" => Ok(Self::FreqCutoff),
            other => Err(Error::InvalidArgument(format!(
                "unknown sweep parameter {other:?} (expected stop-list-size or freq-cutoff)"
            ))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub parameter: SweepParam,
    pub value: u64,
    pub encoded_length: usize,
    /// Change in encoded length against the baseline row, in percent.
    pub percent_change: f64,
    pub merges_made: u32,
    pub batch_sizes: Vec<usize>,
    pub train_time: Duration,
}

/// Trains one model per value of `param` and encodes `eval_text` with each.
///
/// `values` must include the parameter's baseline. Rows come back sorted by
/// value whatever order the trainings finish in.
pub fn run_sweep(
    hist: &ChunkHistogram,
    base: &TrainConfig,
    param: SweepParam,
    values: &[u64],
    eval_text: &str,
) -> Result<Vec<SweepRow>> {
    let mut values = values.to_vec();
    values.sort_unstable();
    values.dedup();
    if !values.contains(&param.baseline()) {
        return Err(Error::InvalidArgument(format!(
            "{param} sweep must include the baseline value {}",
            param.baseline()
        )));
    }
    let configs = values
        .iter()
        .map(|&v| param.apply(base, v).and_then(|c| c.validate().map(|_| c)))
        .collect::<Result<Vec<_>>>()?;

    let measured = configs
        .par_iter()
        .map(|config| {
            let started = Instant::now();
            let (model, report) = train(hist, config)?;
            let train_time = started.elapsed();
            let encoded_length = model.encoded_length(eval_text)?;
            Ok((encoded_length, report, train_time))
        })
        .collect::<Result<Vec<_>>>()?;

    let baseline_index = values.iter().position(|&v| v == param.baseline()).unwrap();
    let baseline_len = measured[baseline_index].0;
    Ok(values
        .into_iter()
        .zip(measured)
        .map(|(value, (encoded_length, report, train_time))| SweepRow {
            parameter: param,
            value,
            encoded_length,
            percent_change: percent_change(encoded_length, baseline_len),
            merges_made: report.merges_made,
            batch_sizes: report.batch_sizes(),
            train_time,
        })
        .collect())
}

/// `parameter,value,encoded_length,percent_change,merges_made,num_batches,train_seconds,batch_sizes`
///
/// `batch_sizes` is `;`-separated. `train_seconds` is wall time and is the
/// only column that varies between identical runs.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "parameter,value,encoded_length,percent_change,merges_made,num_batches,train_seconds,batch_sizes"
    )?;
    for row in rows {
        let sizes: Vec<String> = row.batch_sizes.iter().map(usize::to_string).collect();
        writeln!(
            out,
            "{},{},{},{:.6},{},{},{:.3},{}",
            row.parameter,
            row.value,
            row.encoded_length,
            row.percent_change,
            row.merges_made,
            row.batch_sizes.len(),
            row.train_time.as_secs_f64(),
            sizes.join(";")
        )?;
    }
    Ok(())
}

/// How far a batched vocabulary drifts from the serial one.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub batched: TokenizerModel,
    pub batched_report: TrainReport,
    pub serial: TokenizerModel,
    /// Edit distance between the two merge sequences, comparing the byte
    /// strings each merge produces.
    pub merge_edit_distance: usize,
    /// Jaccard similarity of the two sets of merged-token byte strings.
    pub shared_vocab_fraction: f64,
    pub batched_encoded_length: usize,
    pub serial_encoded_length: usize,
}

impl Comparison {
    /// Batched encoded length relative to serial, in percent.
    pub fn encoded_length_delta_percent(&self) -> f64 {
        percent_change(self.batched_encoded_length, self.serial_encoded_length)
    }

    /// `metric,value` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "metric,value")?;
        writeln!(out, "batched_merges,{}", self.batched.merges().len())?;
        writeln!(out, "serial_merges,{}", self.serial.merges().len())?;
        writeln!(out, "batched_passes,{}", self.batched_report.pass_count())?;
        writeln!(out, "serial_passes,{}", self.serial.merges().len())?;
        writeln!(out, "merge_edit_distance,{}", self.merge_edit_distance)?;
        writeln!(out, "shared_vocab_fraction,{:.6}", self.shared_vocab_fraction)?;
        writeln!(out, "batched_encoded_length,{}", self.batched_encoded_length)?;
        writeln!(out, "serial_encoded_length,{}", self.serial_encoded_length)?;
        writeln!(
            out,
            "encoded_length_delta_percent,{:.6}",
            self.encoded_length_delta_percent()
        )?;
        Ok(())
    }
}

/// Trains batched and serial vocabularies with the same settings and
/// measures how they differ.
pub fn compare_batched_serial(
    hist: &ChunkHistogram,
    config: &TrainConfig,
    eval_text: &str,
) -> Result<Comparison> {
    let (batched, batched_report) = train(hist, config)?;
    let serial_merges = train_serial_reference(hist, config)?;
    let serial = TokenizerModel::new(
        config.split_pattern.clone(),
        batched.stops().to_vec(),
        serial_merges.pairs().to_vec(),
    )?;
    let merged_strings = |m: &TokenizerModel| -> Vec<Vec<u8>> {
        m.merges()
            .iter()
            .map(|(_, id)| m.token_bytes(id).unwrap().to_vec())
            .collect()
    };
    let a = merged_strings(&batched);
    let b = merged_strings(&serial);
    let merge_edit_distance = strsim::generic_levenshtein(&a, &b);
    let set_a: HashSet<&Vec<u8>> = a.iter().collect();
    let set_b: HashSet<&Vec<u8>> = b.iter().collect();
    let union = set_a.union(&set_b).count();
    let shared_vocab_fraction = if union == 0 {
        1.0
    } else {
        set_a.intersection(&set_b).count() as f64 / union as f64
    };
    Ok(Comparison {
        batched_encoded_length: batched.encoded_length(eval_text)?,
        serial_encoded_length: serial.encoded_length(eval_text)?,
        batched,
        batched_report,
        serial,
        merge_edit_distance,
        shared_vocab_fraction,
    })
}

fn percent_change(value: usize, baseline: usize) -> f64 {
    if baseline == 0 {
        return 0.0;
    }
    (value as f64 - baseline as f64) / baseline as f64 * 100.0
}
