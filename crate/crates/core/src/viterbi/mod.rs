//! Hard- and soft-decision Viterbi decoding over locked trellises, extended
//! with non-transmittable codewords (NTCs).
//!
//! NTCs are known symbols appended to the read sequence at the decoder only.
//! They add trellis steps whose inputs are free; the decoded inputs of those
//! steps are dropped before the result is returned. At locked positions the
//! decoder only follows the known lock input, and states excluded by the
//! lock mode are pruned at every step.

mod oracle;

pub use oracle::ml_oracle_decode;

use crate::channel::{bit_to_volt, SoftSequence};
use crate::convcode::{build_trellis, lock_strip, CodeSpec, LockMode, Trellis};
use crate::{Bit, Error, Result};

pub const MAX_NTC_COUNT: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Metric {
    /// Squared Euclidean distance to the expected antipodal symbol.
    #[default]
    SoftEuclidean,
    /// Hamming distance after slicing at zero.
    HardHamming,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::SoftEuclidean => "soft",
            Metric::HardHamming => "hard",
        }
    }
}

/// Sign of the appended NTC symbols.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum NtcPolarity {
    /// `(+1, +1)` for the lower lock, `(-1, -1)` for the higher lock.
    #[default]
    Standard,
    /// The opposite signs.
    Inverted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodeConfig {
    pub metric: Metric,
    pub lock_mode: LockMode,
    pub ntc_count: usize,
    pub start_state_forced: bool,
    pub ntc_polarity: NtcPolarity,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            metric: Metric::SoftEuclidean,
            lock_mode: LockMode::Lower,
            ntc_count: 6,
            start_state_forced: true,
            ntc_polarity: NtcPolarity::Standard,
        }
    }
}

impl DecodeConfig {
    pub fn unlocked() -> Self {
        Self {
            lock_mode: LockMode::Unlocked,
            ntc_count: 0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ntc_count > MAX_NTC_COUNT {
            return Err(Error::NtcCountTooLarge(self.ntc_count));
        }
        if self.ntc_count > 0 && !self.lock_mode.is_locked() {
            return Err(Error::NtcWithoutLock);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// Encoder inputs along the best path, lock bits included, NTC steps removed.
    pub decoded_input_bits: Vec<Bit>,
    pub final_metric: f64,
    pub end_state: usize,
    pub start_state: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Survivor {
    pub predecessor: usize,
    pub input: Bit,
}

/// Full add-compare-select history. `metrics[t][s]` is the best cumulative
/// metric into state `s` after `t` steps (`+inf` when unreachable), and
/// `survivors[t][s]` is the branch that achieved it on step `t`.
#[derive(Clone, Debug, Default)]
pub struct PathLattice {
    pub metrics: Vec<Vec<f64>>,
    pub survivors: Vec<Vec<Option<Survivor>>>,
}

fn check_samples(samples: &[f64]) -> Result<()> {
    match samples.iter().position(|s| s.is_nan()) {
        Some(index) => Err(Error::NonFiniteSample { index }),
        None => Ok(()),
    }
}

/// Distance between `received` samples and the symbol for `expected` bits.
pub fn branch_metric(received: &[f64], expected: &[Bit], metric: Metric) -> Result<f64> {
    if received.len() != expected.len() {
        return Err(Error::LengthMismatch {
            expected: expected.len(),
            actual: received.len(),
        });
    }
    check_samples(received)?;
    let word = expected
        .iter()
        .enumerate()
        .fold(0u32, |acc, (j, &b)| acc | ((b as u32 & 1) << j));
    Ok(branch_metric_word(received, word, metric))
}

/// As [`branch_metric`], with expected bit `j` taken from bit `j` of `word`.
pub(crate) fn branch_metric_word(received: &[f64], word: u32, metric: Metric) -> f64 {
    let mut acc = 0.0;
    for (j, &r) in received.iter().enumerate() {
        let bit = ((word >> j) & 1) as Bit;
        acc += match metric {
            Metric::SoftEuclidean => {
                let d = r - bit_to_volt(bit);
                d * d
            }
            Metric::HardHamming => (((r >= 0.0) as Bit) != bit) as u8 as f64,
        };
    }
    acc
}

/// The sample value an NTC carries for this lock mode, or `None` when unlocked.
pub fn ntc_level(lock_mode: LockMode, polarity: NtcPolarity) -> Option<f64> {
    let level = match lock_mode {
        LockMode::Unlocked => return None,
        LockMode::Lower => 1.0,
        LockMode::Higher => -1.0,
    };
    Some(match polarity {
        NtcPolarity::Standard => level,
        NtcPolarity::Inverted => -level,
    })
}

/// Appends `n` NTC symbols of `seq.symbol_width()` samples each.
pub fn append_ntc(seq: &SoftSequence, lock_mode: LockMode, n: usize) -> Result<SoftSequence> {
    append_ntc_with(seq, lock_mode, n, NtcPolarity::Standard)
}

pub fn append_ntc_with(
    seq: &SoftSequence,
    lock_mode: LockMode,
    n: usize,
    polarity: NtcPolarity,
) -> Result<SoftSequence> {
    if n == 0 {
        return Ok(seq.clone());
    }
    let level = ntc_level(lock_mode, polarity).ok_or(Error::NtcWithoutLock)?;
    let width = seq.symbol_width();
    let mut samples = Vec::with_capacity(seq.len() + n * width);
    samples.extend_from_slice(seq.samples());
    samples.resize(seq.len() + n * width, level);
    Ok(SoftSequence::from_raw(samples, width))
}

/// Which inputs each trellis step may take.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Schedule {
    pub steps: usize,
    pub data_steps: usize,
    pub lock_mode: LockMode,
}

impl Schedule {
    pub(crate) fn new(trellis: &Trellis, seq: &SoftSequence, cfg: &DecodeConfig) -> Result<Self> {
        cfg.validate()?;
        let width = trellis.outputs();
        if seq.symbol_width() != 1 && seq.symbol_width() != width {
            return Err(Error::Framing {
                len: seq.symbol_width(),
                width,
            });
        }
        if seq.len() % width != 0 {
            return Err(Error::Framing {
                len: seq.len(),
                width,
            });
        }
        check_samples(seq.samples())?;
        let steps = seq.len() / width;
        if steps == 0 {
            return Ok(Self {
                steps: 0,
                data_steps: 0,
                lock_mode: cfg.lock_mode,
            });
        }
        let data_steps = steps.checked_sub(cfg.ntc_count).ok_or(Error::NtcExceedsSequence {
            steps,
            ntc: cfg.ntc_count,
        })?;
        let period = cfg.lock_mode.period();
        if data_steps % period != 0 {
            return Err(Error::Framing {
                len: data_steps,
                width: period,
            });
        }
        Ok(Self {
            steps,
            data_steps,
            lock_mode: cfg.lock_mode,
        })
    }

    /// The input step `t` is pinned to, if any.
    #[inline]
    pub(crate) fn forced_input(&self, t: usize) -> Option<Bit> {
        if t < self.data_steps && t % self.lock_mode.period() != 0 {
            self.lock_mode.lock_bit()
        } else {
            None
        }
    }
}

pub fn viterbi_decode(trellis: &Trellis, seq: &SoftSequence, cfg: &DecodeConfig) -> Result<DecodeResult> {
    run(trellis, seq, cfg, None)
}

/// Decodes while recording the whole lattice; memory grows with the
/// sequence, so use it for inspection of short frames.
pub fn viterbi_lattice(
    trellis: &Trellis,
    seq: &SoftSequence,
    cfg: &DecodeConfig,
) -> Result<(DecodeResult, PathLattice)> {
    let mut lattice = PathLattice::default();
    let result = run(trellis, seq, cfg, Some(&mut lattice))?;
    Ok((result, lattice))
}

fn run(
    trellis: &Trellis,
    seq: &SoftSequence,
    cfg: &DecodeConfig,
    mut lattice: Option<&mut PathLattice>,
) -> Result<DecodeResult> {
    let schedule = Schedule::new(trellis, seq, cfg)?;
    if schedule.steps == 0 {
        return Ok(DecodeResult {
            decoded_input_bits: Vec::new(),
            final_metric: 0.0,
            end_state: 0,
            start_state: 0,
        });
    }
    let width = trellis.outputs();
    let states = trellis.state_count();
    let m = trellis.memory();
    let mask = states - 1;
    let lock = cfg.lock_mode;
    let bytes_per_step = states.div_ceil(8);

    let mut metrics = vec![f64::INFINITY; states];
    if cfg.start_state_forced {
        metrics[0] = 0.0;
    } else {
        for (s, metric) in metrics.iter_mut().enumerate() {
            if !trellis.is_excluded(lock, s, 0) {
                *metric = 0.0;
            }
        }
    }
    let mut next = vec![f64::INFINITY; states];
    let mut decisions = vec![0u8; schedule.steps * bytes_per_step];
    let mut branch = vec![0.0; 1 << width];
    if let Some(l) = lattice.as_deref_mut() {
        l.metrics.push(metrics.clone());
    }

    for (t, received) in seq.samples().chunks_exact(width).enumerate() {
        for (word, bm) in branch.iter_mut().enumerate() {
            *bm = branch_metric_word(received, word as u32, cfg.metric);
        }
        let forced = schedule.forced_input(t);
        let row = &mut decisions[t * bytes_per_step..(t + 1) * bytes_per_step];
        let mut survivors = lattice.as_ref().map(|_| vec![None; states]);
        for (s, slot) in next.iter_mut().enumerate() {
            let input = (s >> (m - 1)) as Bit;
            if forced.is_some_and(|f| f != input) || trellis.is_excluded(lock, s, t + 1) {
                *slot = f64::INFINITY;
                continue;
            }
            let p0 = (s << 1) & mask;
            let p1 = p0 | 1;
            let c0 = metrics[p0] + branch[trellis.transition(p0, input).output as usize];
            let c1 = metrics[p1] + branch[trellis.transition(p1, input).output as usize];
            let (best, predecessor) = if c1 < c0 { (c1, p1) } else { (c0, p0) };
            if predecessor == p1 {
                row[s / 8] |= 1 << (s % 8);
            }
            *slot = best;
            if let Some(sv) = survivors.as_mut() {
                if best.is_finite() {
                    sv[s] = Some(Survivor { predecessor, input });
                }
            }
        }
        std::mem::swap(&mut metrics, &mut next);
        if let Some(l) = lattice.as_deref_mut() {
            l.metrics.push(metrics.clone());
            l.survivors.push(survivors.unwrap_or_default());
        }
    }

    let end_state = metrics
        .iter()
        .enumerate()
        .fold(0, |best, (s, &v)| if v < metrics[best] { s } else { best });
    let mut inputs = vec![0; schedule.steps];
    let mut s = end_state;
    for t in (0..schedule.steps).rev() {
        inputs[t] = (s >> (m - 1)) as Bit;
        let bit = (decisions[t * bytes_per_step + s / 8] >> (s % 8)) & 1;
        s = ((s << 1) & mask) | bit as usize;
    }
    inputs.truncate(schedule.data_steps);
    Ok(DecodeResult {
        decoded_input_bits: inputs,
        final_metric: metrics[end_state],
        end_state,
        start_state: s,
    })
}

/// Sum of branch metrics along the inputs from `start_state`; used to check
/// a decoder result independently of the lattice.
pub fn path_metric(
    trellis: &Trellis,
    seq: &SoftSequence,
    start_state: usize,
    inputs: &[Bit],
    metric: Metric,
) -> f64 {
    let mut s = start_state;
    let mut acc = 0.0;
    for (received, &x) in seq.samples().chunks_exact(trellis.outputs()).zip(inputs) {
        let tr = trellis.transition(s, x);
        acc += branch_metric_word(received, tr.output, metric);
        s = tr.next_state;
    }
    acc
}

/// Read-side pipeline: append NTCs, decode, strip lock bits.
pub fn decode_pipeline(seq: &SoftSequence, spec: &CodeSpec, cfg: &DecodeConfig) -> Result<Vec<Bit>> {
    let trellis = build_trellis(spec);
    Ok(decode_with_trellis(&trellis, seq, cfg)?.0)
}

/// [`decode_pipeline`] with a prebuilt trellis, also returning the raw result.
pub fn decode_with_trellis(
    trellis: &Trellis,
    seq: &SoftSequence,
    cfg: &DecodeConfig,
) -> Result<(Vec<Bit>, DecodeResult)> {
    let grouped = seq.clone().with_symbol_width(trellis.outputs())?;
    let extended = append_ntc_with(&grouped, cfg.lock_mode, cfg.ntc_count, cfg.ntc_polarity)?;
    let result = viterbi_decode(trellis, &extended, cfg)?;
    let data = lock_strip(&result.decoded_input_bits, cfg.lock_mode)?;
    Ok((data, result))
}
