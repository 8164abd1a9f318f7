//! BPSK mapping, the AWGN storage-medium model, and the hard slicer.

use crate::rng::RngStream;
use crate::{Bit, Error, Result};

/// Real-valued samples read back from the medium, grouped `symbol_width`
/// samples per trellis step.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftSequence {
    samples: Vec<f64>,
    symbol_width: usize,
}

impl SoftSequence {
    pub fn new(samples: Vec<f64>, symbol_width: usize) -> Result<Self> {
        if symbol_width == 0 || samples.len() % symbol_width != 0 {
            return Err(Error::Framing {
                len: samples.len(),
                width: symbol_width,
            });
        }
        if let Some(index) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self {
            samples,
            symbol_width,
        })
    }

    /// Regroups the same samples into steps of `width`.
    pub fn with_symbol_width(self, width: usize) -> Result<Self> {
        Self::new(self.samples, width)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn symbol_width(&self) -> usize {
        self.symbol_width
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub(crate) fn from_raw(samples: Vec<f64>, symbol_width: usize) -> Self {
        debug_assert!(symbol_width > 0 && samples.len() % symbol_width == 0);
        Self {
            samples,
            symbol_width,
        }
    }
}

/// Bit 1 maps to +1 V, bit 0 to -1 V.
#[inline]
pub fn bit_to_volt(bit: Bit) -> f64 {
    if bit & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

pub fn bpsk_modulate(bits: &[Bit]) -> SoftSequence {
    SoftSequence::from_raw(bits.iter().map(|&b| bit_to_volt(b)).collect(), 1)
}

/// Threshold at zero; a sample of exactly `0.0` reads as 1.
pub fn hard_slice(seq: &SoftSequence) -> Result<Vec<Bit>> {
    hard_slice_samples(&seq.samples)
}

pub(crate) fn hard_slice_samples(samples: &[f64]) -> Result<Vec<Bit>> {
    samples
        .iter()
        .enumerate()
        .map(|(index, &s)| {
            if s.is_nan() {
                Err(Error::NonFiniteSample { index })
            } else {
                Ok((s >= 0.0) as Bit)
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// `Eb` is the energy per information bit, so noise scales with code rate.
    PerInfoBit,
    /// `Eb` is the energy per channel symbol.
    #[default]
    PerSymbol,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::PerInfoBit => "info",
            Normalization::PerSymbol => "symbol",
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "info" => Ok(Normalization::PerInfoBit),
            "symbol" => Ok(Normalization::PerSymbol),
            other => Err(Error::InvalidConfig(format!("unknown normalization `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub ebno_db: f64,
    pub normalization: Normalization,
    /// Information bits per channel symbol; only read for [`Normalization::PerInfoBit`].
    pub code_rate: f64,
}

impl NoiseSpec {
    pub fn per_symbol(ebno_db: f64) -> Self {
        Self {
            ebno_db,
            normalization: Normalization::PerSymbol,
            code_rate: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.ebno_db.is_finite() {
            return Err(Error::InvalidConfig("Eb/N0 must be finite".into()));
        }
        if !(self.code_rate > 0.0 && self.code_rate <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "code rate {} outside (0, 1]",
                self.code_rate
            )));
        }
        Ok(())
    }
}

/// Noise standard deviation for unit-energy antipodal samples.
pub fn noise_sigma(spec: &NoiseSpec) -> f64 {
    let ebno = 10f64.powf(spec.ebno_db / 10.0);
    let rate = match spec.normalization {
        Normalization::PerSymbol => 1.0,
        Normalization::PerInfoBit => spec.code_rate,
    };
    (1.0 / (2.0 * rate * ebno)).sqrt()
}

/// Adds `sigma * g_i` to every sample, drawing `g_i` from `rng` in sample order.
pub fn awgn(seq: &SoftSequence, sigma: f64, rng: &mut RngStream) -> SoftSequence {
    let mut out = seq.clone();
    awgn_in_place(&mut out.samples, sigma, rng);
    out
}

pub(crate) fn awgn_in_place(samples: &mut [f64], sigma: f64, rng: &mut RngStream) {
    if sigma == 0.0 {
        return;
    }
    for s in samples {
        *s += sigma * rng.next_gaussian();
    }
}
