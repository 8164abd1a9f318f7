//! Monte Carlo residual-error experiments.
//!
//! Every point draws its data and noise from label-addressed streams
//! ([`crate::rng::derive_stream`]) so results do not depend on how work is
//! scheduled. Labels are `[point, frame, role, chain]`:
//!
//! * `point` is the Eb/N0 in milli-dB, rounded and cast to `u64`.
//! * `frame` is the frame index within the point.
//! * `role` is [`ROLE_DATA`] for the source bits and [`ROLE_NOISE`] for the
//!   channel; data streams omit the `chain` label so every scheme at a point
//!   sees the same data.
//! * `chain` separates the noise of each transmitted signal: all
//!   convolutional schemes share one chain because they transmit the same
//!   symbols, Reed-Solomon and uncoded BPSK have their own.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::channel::{self, noise_sigma, NoiseSpec, Normalization};
use crate::convcode::{build_trellis, conv_encode, lock_insert, CodeSpec, LockMode, Trellis};
use crate::rng::derive_stream;
use crate::rs::{pack_bits, unpack_bits, RsCodec, RsParams};
use crate::viterbi::{decode_with_trellis, DecodeConfig, Metric, NtcPolarity};
use crate::{Bit, Error, Result};

pub const ROLE_DATA: u64 = 0;
pub const ROLE_NOISE: u64 = 1;

const CHAIN_CONVOLUTIONAL: u64 = 0;
const CHAIN_REED_SOLOMON: u64 = 1;
const CHAIN_UNCODED: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Locked code, soft Viterbi, NTCs appended.
    SvadNtc,
    ReedSolomon,
    UncodedHard,
    /// Locked code, soft Viterbi, no NTCs.
    SoftViterbiNoNtc,
    /// Locked code, hard-decision Viterbi, NTCs appended.
    HardViterbi,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::SvadNtc,
        Scheme::ReedSolomon,
        Scheme::UncodedHard,
        Scheme::SoftViterbiNoNtc,
        Scheme::HardViterbi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SvadNtc => "svad",
            Scheme::ReedSolomon => "rs",
            Scheme::UncodedHard => "uncoded",
            Scheme::SoftViterbiNoNtc => "soft-no-ntc",
            Scheme::HardViterbi => "hard-viterbi",
        }
    }

    fn is_convolutional(self) -> bool {
        matches!(self, Scheme::SvadNtc | Scheme::SoftViterbiNoNtc | Scheme::HardViterbi)
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scheme `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Data bits per Eb/N0 point.
    pub info_bits: usize,
    pub ebno_points: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub master_seed: u64,
    pub code_spec: CodeSpec,
    pub lock_mode: LockMode,
    pub ntc_count: usize,
    pub ntc_polarity: NtcPolarity,
    pub rs_params: RsParams,
    pub normalization: Normalization,
    /// Data bits per decode frame; `None` decodes each point as one frame.
    pub frame_len_bits: Option<usize>,
    /// Replaces the Eb/N0-derived noise level when set.
    pub sigma_override: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            info_bits: 1_000_000,
            ebno_points: (1..=11).map(f64::from).collect(),
            schemes: vec![Scheme::SvadNtc, Scheme::ReedSolomon],
            master_seed: 2016,
            code_spec: CodeSpec::standard(),
            lock_mode: LockMode::Lower,
            ntc_count: 6,
            ntc_polarity: NtcPolarity::Standard,
            rs_params: RsParams::default(),
            normalization: Normalization::PerSymbol,
            frame_len_bits: None,
            sigma_override: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.info_bits == 0 {
            return Err(Error::InvalidConfig("info_bits must be at least 1".into()));
        }
        if self.ebno_points.is_empty() {
            return Err(Error::InvalidConfig("no Eb/N0 points".into()));
        }
        if let Some(p) = self.ebno_points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidConfig(format!("Eb/N0 point {p} is not finite")));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("no schemes".into()));
        }
        if self.frame_len_bits == Some(0) {
            return Err(Error::InvalidConfig("frame length must be at least 1".into()));
        }
        if let Some(s) = self.sigma_override {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidConfig(format!("sigma {s} must be finite and >= 0")));
            }
        }
        self.rs_params.validate()?;
        self.decode_config(Scheme::SvadNtc, self.ntc_count).validate()?;
        Ok(())
    }

    fn frame_len(&self) -> usize {
        self.frame_len_bits.unwrap_or(self.info_bits).min(self.info_bits)
    }

    fn decode_config(&self, scheme: Scheme, ntc_count: usize) -> DecodeConfig {
        DecodeConfig {
            metric: if scheme == Scheme::HardViterbi {
                Metric::HardHamming
            } else {
                Metric::SoftEuclidean
            },
            lock_mode: self.lock_mode,
            ntc_count: if scheme == Scheme::SoftViterbiNoNtc { 0 } else { ntc_count },
            start_state_forced: true,
            ntc_polarity: self.ntc_polarity,
        }
    }

    /// Information bits per channel symbol for `scheme`.
    pub fn code_rate(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::ReedSolomon => self.rs_params.k as f64 / self.rs_params.n as f64,
            Scheme::UncodedHard => 1.0,
            _ => 1.0 / (self.code_spec.outputs() * self.lock_mode.period()) as f64,
        }
    }

    fn sigma(&self, ebno_db: f64, scheme: Scheme) -> f64 {
        self.sigma_override.unwrap_or_else(|| {
            noise_sigma(&NoiseSpec {
                ebno_db,
                normalization: self.normalization,
                code_rate: self.code_rate(scheme),
            })
        })
    }

    fn params_label(&self, scheme: Scheme, ntc_count: usize) -> String {
        let mut s = match scheme {
            Scheme::ReedSolomon => format!("rs={}/{}", self.rs_params.n, self.rs_params.k),
            Scheme::UncodedHard => String::new(),
            _ => {
                let cfg = self.decode_config(scheme, ntc_count);
                format!(
                    "gen={};lock={};ntc={};metric={}",
                    self.code_spec.octal().replace(',', "/"),
                    self.lock_mode.name(),
                    cfg.ntc_count,
                    cfg.metric.name()
                )
            }
        };
        if !s.is_empty() {
            s.push(';');
        }
        let _ = write!(s, "norm={};frame={}", self.normalization.name(), self.frame_len());
        if let Some(sigma) = self.sigma_override {
            let _ = write!(s, ";sigma={sigma}");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointResult {
    pub ebno_db: f64,
    pub scheme: Scheme,
    pub info_bits: usize,
    /// NTCs appended by the decoder; zero for non-convolutional schemes.
    pub ntc_count: usize,
    pub residual_errors: u64,
    pub ber: f64,
    pub seed: u64,
    pub params: String,
    pub elapsed_secs: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<PointResult>,
    pub totals: BTreeMap<Scheme, u64>,
}

impl SweepTable {
    /// Sorts rows by `(ebno, scheme, ntc)` and computes per-scheme totals.
    pub fn new(mut rows: Vec<PointResult>) -> Self {
        rows.sort_by(|a, b| {
            a.ebno_db
                .total_cmp(&b.ebno_db)
                .then(a.scheme.cmp(&b.scheme))
                .then(a.ntc_count.cmp(&b.ntc_count))
        });
        let mut totals = BTreeMap::new();
        for row in &rows {
            *totals.entry(row.scheme).or_insert(0) += row.residual_errors;
        }
        Self { rows, totals }
    }

    pub fn rows_for(&self, scheme: Scheme) -> impl Iterator<Item = &PointResult> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }

    pub fn residual(&self, ebno_db: f64, scheme: Scheme) -> Option<u64> {
        self.rows_for(scheme)
            .find(|r| r.ebno_db == ebno_db)
            .map(|r| r.residual_errors)
    }

    pub fn total(&self, scheme: Scheme) -> u64 {
        self.totals.get(&scheme).copied().unwrap_or(0)
    }
}

pub fn count_residual(original: &[Bit], decoded: &[Bit]) -> Result<u64> {
    if original.len() != decoded.len() {
        return Err(Error::LengthMismatch {
            expected: original.len(),
            actual: decoded.len(),
        });
    }
    Ok(original.iter().zip(decoded).filter(|(a, b)| a != b).count() as u64)
}

fn point_label(ebno_db: f64) -> u64 {
    (ebno_db * 1000.0).round() as i64 as u64
}

struct PointRunner<'a> {
    cfg: &'a ExperimentConfig,
    trellis: Trellis,
    rs: RsCodec,
    scheme: Scheme,
    decode: DecodeConfig,
    point: u64,
    sigma: f64,
}

impl PointRunner<'_> {
    fn frame(&self, index: usize, len: usize) -> Result<u64> {
        let seed = self.cfg.master_seed;
        let frame = index as u64;
        let data = derive_stream(seed, &[self.point, frame, ROLE_DATA]).bits(len);
        let chain = match self.scheme {
            Scheme::ReedSolomon => CHAIN_REED_SOLOMON,
            Scheme::UncodedHard => CHAIN_UNCODED,
            _ => CHAIN_CONVOLUTIONAL,
        };
        let mut noise = derive_stream(seed, &[self.point, frame, ROLE_NOISE, chain]);
        let decoded = match self.scheme {
            Scheme::ReedSolomon => self.reed_solomon(&data, &mut noise)?,
            Scheme::UncodedHard => {
                let mut samples = channel::bpsk_modulate(&data).into_samples();
                channel::awgn_in_place(&mut samples, self.sigma, &mut noise);
                channel::hard_slice_samples(&samples)?
            }
            _ => {
                let coded = conv_encode(&self.cfg.code_spec, &lock_insert(&data, self.cfg.lock_mode));
                let mut read = channel::bpsk_modulate(&coded);
                read = channel::awgn(&read, self.sigma, &mut noise);
                decode_with_trellis(&self.trellis, &read, &self.decode)?.0
            }
        };
        count_residual(&data, &decoded)
    }

    /// pack -> encode -> BPSK -> AWGN -> slice -> decode -> unpack; a failed
    /// block keeps its sliced message symbols.
    fn reed_solomon(&self, data: &[Bit], noise: &mut crate::rng::RngStream) -> Result<Vec<Bit>> {
        let RsParams { n, k, .. } = self.rs.params();
        let symbols = pack_bits(data);
        let mut decoded_symbols = Vec::with_capacity(symbols.len().div_ceil(k) * k);
        for block in symbols.chunks(k) {
            let mut msg = block.to_vec();
            msg.resize(k, 0);
            let codeword = self.rs.encode(&msg)?;
            let mut samples = channel::bpsk_modulate(&unpack_bits(&codeword, n * 8)).into_samples();
            channel::awgn_in_place(&mut samples, self.sigma, noise);
            let read = pack_bits(&channel::hard_slice_samples(&samples)?);
            let (out, _status) = self.rs.decode(&read)?;
            decoded_symbols.extend_from_slice(&out);
        }
        Ok(unpack_bits(&decoded_symbols, data.len()))
    }
}

pub fn run_point(cfg: &ExperimentConfig, ebno_db: f64, scheme: Scheme) -> Result<PointResult> {
    run_point_with_ntc(cfg, ebno_db, scheme, cfg.ntc_count)
}

fn run_point_with_ntc(cfg: &ExperimentConfig, ebno_db: f64, scheme: Scheme, ntc_count: usize) -> Result<PointResult> {
    cfg.validate()?;
    let started = Instant::now();
    let decode = cfg.decode_config(scheme, ntc_count);
    decode.validate()?;
    let runner = PointRunner {
        cfg,
        trellis: build_trellis(&cfg.code_spec),
        rs: RsCodec::new(cfg.rs_params)?,
        scheme,
        decode,
        point: point_label(ebno_db),
        sigma: cfg.sigma(ebno_db, scheme),
    };
    let frame_len = cfg.frame_len();
    let frames = cfg.info_bits.div_ceil(frame_len);
    let residual_errors = (0..frames)
        .into_par_iter()
        .map(|i| runner.frame(i, frame_len.min(cfg.info_bits - i * frame_len)))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(PointResult {
        ebno_db,
        scheme,
        info_bits: cfg.info_bits,
        ntc_count: if scheme.is_convolutional() { decode.ntc_count } else { 0 },
        residual_errors,
        ber: residual_errors as f64 / cfg.info_bits as f64,
        seed: cfg.master_seed,
        params: cfg.params_label(scheme, ntc_count),
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}

fn tag(ebno_db: f64, scheme: Scheme) -> impl Fn(Error) -> Error {
    move |e| Error::AtPoint {
        ebno_db,
        scheme: scheme.name().to_string(),
        source: Box::new(e),
    }
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let jobs: Vec<(f64, Scheme)> = cfg
        .ebno_points
        .iter()
        .flat_map(|&p| cfg.schemes.iter().map(move |&s| (p, s)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(p, s)| run_point(cfg, p, s).map_err(tag(p, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable::new(rows))
}

/// Runs [`Scheme::SvadNtc`] at every configured point for each NTC count.
pub fn ntc_study(cfg: &ExperimentConfig, ntc_values: &[usize]) -> Result<SweepTable> {
    if !cfg.lock_mode.is_locked() {
        return Err(Error::NtcWithoutLock);
    }
    cfg.validate()?;
    let jobs: Vec<(f64, usize)> = cfg
        .ebno_points
        .iter()
        .flat_map(|&p| ntc_values.iter().map(move |&n| (p, n)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(p, n)| run_point_with_ntc(cfg, p, Scheme::SvadNtc, n).map_err(tag(p, Scheme::SvadNtc)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable::new(rows))
}

pub const CSV_HEADER: &str = "ebno_db,scheme,info_bits,residual_errors,ber,seed,params";

pub fn emit_csv(table: &SweepTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.5e},{},{}",
            r.ebno_db,
            r.scheme.name(),
            r.info_bits,
            r.residual_errors,
            r.ber,
            r.seed,
            r.params
        );
    }
    out
}

/// Two whitespace-separated columns, `ebno_db residual_errors`, for one scheme.
pub fn emit_dat(table: &SweepTable, scheme: Scheme) -> String {
    let mut out = format!("# ebno_db residual_errors ({})\n", scheme.name());
    for r in table.rows_for(scheme) {
        let _ = writeln!(out, "{} {}", r.ebno_db, r.residual_errors);
    }
    out
}

/// Aligned plain-text rendering with a totals line per scheme.
pub fn render_text(table: &SweepTable) -> String {
    let mut out = format!("{:>8}  {:<13} {:>5} {:>12} {:>12}\n", "Eb/N0", "scheme", "ntc", "residual", "ber");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{:>8}  {:<13} {:>5} {:>12} {:>12.5e}",
            r.ebno_db,
            r.scheme.name(),
            r.ntc_count,
            r.residual_errors,
            r.ber
        );
    }
    for (scheme, total) in &table.totals {
        let _ = writeln!(out, "{:>8}  {:<13} {:>5} {:>12}", "total", scheme.name(), "", total);
    }
    out
}
