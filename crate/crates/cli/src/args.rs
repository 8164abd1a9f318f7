use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use svad_ntc::channel::Normalization;
use svad_ntc::convcode::{CodeSpec, LockMode};
use svad_ntc::harness::Scheme;
use svad_ntc::rs::RsParams;
use svad_ntc::viterbi::{Metric, NtcPolarity};

#[derive(Debug, Parser)]
#[command(name = "svad", version, about = "Locked convolutional coding with NTC-assisted soft Viterbi decoding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lock, encode and modulate a bit file (or raw bytes) into a sample file.
    Encode(EncodeArgs),
    /// Add Gaussian noise to a sample file.
    Corrupt(CorruptArgs),
    /// Decode a sample file back into data bits.
    Decode(DecodeArgs),
    /// Residual-error sweep over Eb/N0 for one or more schemes.
    Sweep(SweepArgs),
    /// Residual errors as a function of the number of NTCs.
    NtcStudy(NtcStudyArgs),
    /// Print the trellis of a code.
    Trellis(TrellisArgs),
}

/// Code parameters. Unset flags fall back to a manifest, then to defaults.
#[derive(Debug, Args, Clone, Default)]
pub struct CodeArgs {
    /// Octal generator masks, most significant bit tapping the current input [default: 7,5]
    #[arg(long, value_name = "OCTAL", value_parser = parse_generators)]
    pub generators: Option<CodeSpec>,
    /// Lock mode [default: lower]
    #[arg(long, value_parser = parse_lock)]
    pub lock: Option<LockMode>,
    /// Non-transmittable codewords appended before decoding [default: 6, or 0 without a lock]
    #[arg(long, value_name = "N")]
    pub ntc: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// NTCF if the magic matches, raw bytes otherwise
    Auto,
    Ntcf,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Ntcf,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Dat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolarityArg {
    Standard,
    Inverted,
}

impl From<PolarityArg> for NtcPolarity {
    fn from(p: PolarityArg) -> Self {
        match p {
            PolarityArg::Standard => NtcPolarity::Standard,
            PolarityArg::Inverted => NtcPolarity::Inverted,
        }
    }
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_enum, default_value = "auto")]
    pub input_format: InputFormat,
    /// Sidecar path [default: <out>.manifest]
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorruptArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Noise standard deviation per sample
    #[arg(long, conflicts_with = "ebno", required_unless_present = "ebno")]
    pub sigma: Option<f64>,
    /// Eb/N0 in dB, converted to a noise level with --normalization
    #[arg(long, allow_hyphen_values = true)]
    pub ebno: Option<f64>,
    #[arg(long, value_parser = parse_normalization)]
    pub normalization: Option<Normalization>,
    #[arg(long, default_value_t = 2016)]
    pub seed: u64,
    #[command(flatten)]
    pub code: CodeArgs,
    /// Sidecar of the input [default: <input>.manifest]; copied next to the output
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_parser = parse_metric)]
    pub metric: Option<Metric>,
    #[arg(long, value_enum)]
    pub ntc_polarity: Option<PolarityArg>,
    /// Output layout [default: whatever encode read, else ntcf]
    #[arg(long, value_enum)]
    pub output_format: Option<OutputFormat>,
    /// Sidecar path [default: <input>.manifest, if present]
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Flags shared by the simulation campaigns.
#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Data bits per point
    #[arg(long, default_value_t = 1_000_000)]
    pub bits: usize,
    #[arg(long, default_value_t = 2016)]
    pub seed: u64,
    #[arg(long, value_parser = parse_normalization, default_value = "symbol")]
    pub normalization: Normalization,
    /// Reed-Solomon code as `n,k`
    #[arg(long, value_parser = parse_rs, default_value = "255,223")]
    pub rs: RsParams,
    /// Data bits per decode frame [default: the whole point]
    #[arg(long, value_name = "N")]
    pub frame_bits: Option<usize>,
    /// Fixed noise level replacing the Eb/N0 conversion
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum, default_value = "standard")]
    pub ntc_polarity: PolarityArg,
    /// Worker threads [default: all cores]
    #[arg(long, value_name = "N")]
    pub workers: Option<usize>,
    /// Output file; with --format dat, a prefix for one file per series
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Eb/N0 points: `1..11`, `0..5:0.5`, `1,3,5` or a mix
    #[arg(long, value_parser = parse_ebno_list, default_value = "1..11", allow_hyphen_values = true)]
    pub ebno: EbnoList,
    #[arg(long, value_parser = parse_schemes, default_value = "svad,rs")]
    pub schemes: SchemeList,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Args)]
pub struct NtcStudyArgs {
    #[arg(long, value_parser = parse_ebno_list, default_value = "3", allow_hyphen_values = true)]
    pub ebno: EbnoList,
    /// NTC counts to compare, e.g. `0..8` or `0,2,6`
    #[arg(long, value_parser = parse_count_list, default_value = "0..8")]
    pub ntc_values: CountList,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Args)]
pub struct TrellisArgs {
    #[command(flatten)]
    pub code: CodeArgs,
}

// Newtypes so clap treats each list as a single value.
#[derive(Debug, Clone)]
pub struct EbnoList(pub Vec<f64>);
#[derive(Debug, Clone)]
pub struct SchemeList(pub Vec<Scheme>);
#[derive(Debug, Clone)]
pub struct CountList(pub Vec<usize>);

fn parse_generators(s: &str) -> Result<CodeSpec, String> {
    CodeSpec::from_octal(s).map_err(|e| e.to_string())
}

fn parse_lock(s: &str) -> Result<LockMode, String> {
    s.parse().map_err(|e: svad_ntc::Error| e.to_string())
}

fn parse_normalization(s: &str) -> Result<Normalization, String> {
    s.parse().map_err(|e: svad_ntc::Error| e.to_string())
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    match s {
        "soft" => Ok(Metric::SoftEuclidean),
        "hard" => Ok(Metric::HardHamming),
        _ => Err(format!("unknown metric `{s}`, expected soft or hard")),
    }
}

fn parse_rs(s: &str) -> Result<RsParams, String> {
    let (n, k) = s.split_once(',').ok_or("expected `n,k`")?;
    let n = n.trim().parse().map_err(|_| format!("bad n `{n}`"))?;
    let k = k.trim().parse().map_err(|_| format!("bad k `{k}`"))?;
    RsParams::new(n, k).map_err(|e| e.to_string())
}

fn parse_schemes(s: &str) -> Result<SchemeList, String> {
    let schemes = s
        .split(',')
        .map(|name| name.trim().parse::<Scheme>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SchemeList(schemes))
}

fn parse_f64(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("bad number `{s}`")),
    }
}

/// Comma-separated items, each a number or an inclusive `a..b[:step]` range.
pub fn parse_ebno_list(s: &str) -> Result<EbnoList, String> {
    let mut points = Vec::new();
    for item in s.split(',') {
        let Some((start, rest)) = item.split_once("..") else {
            points.push(parse_f64(item)?);
            continue;
        };
        let (end, step) = match rest.split_once(':') {
            Some((end, step)) => (end, parse_f64(step)?),
            None => (rest, 1.0),
        };
        let (start, end) = (parse_f64(start)?, parse_f64(end)?);
        if step <= 0.0 || end < start {
            return Err(format!("empty range `{item}`"));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        // index-based so that long ranges do not accumulate drift
        points.extend((0..=count).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9));
    }
    Ok(EbnoList(points))
}

fn parse_count_list(s: &str) -> Result<CountList, String> {
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("bad count `{v}`"));
    let mut counts = Vec::new();
    for item in s.split(',') {
        match item.split_once("..") {
            Some((a, b)) => counts.extend(parse(a)?..=parse(b)?),
            None => counts.push(parse(item)?),
        }
    }
    Ok(CountList(counts))
}
