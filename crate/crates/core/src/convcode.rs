//! Binary rate-1/n feed-forward convolutional codes and lock-bit framing.
//!
//! # Register and mask layout
//!
//! A code with constraint length `v` has `m = v - 1` memory cells. Generator
//! masks are `v`-bit integers, conventionally written in octal, whose most
//! significant bit taps the current input and whose bit `v - 1 - i` taps
//! memory cell `i` (cell 1 holds the most recent previous input). With this
//! layout `(6, 5)` means `g0 = 1 + D` and `g1 = 1 + D^2`.
//!
//! A state index packs the memory cells with cell 1 as the most significant
//! bit, so for `v = 3` state `S2 = 0b10` means "previous input 1, the one
//! before that 0".

use std::fmt;

use crate::{Bit, Error, Result};

/// Largest supported constraint length.
pub const MAX_CONSTRAINT_LENGTH: usize = 16;

/// Number of lock bits inserted after each data bit in locked modes.
pub const LOCK_BITS: usize = 2;

/// Definition of a feed-forward convolutional code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    constraint_length: usize,
    generators: Vec<u32>,
}

impl CodeSpec {
    pub fn new(constraint_length: usize, generators: Vec<u32>) -> Result<Self> {
        if !(2..=MAX_CONSTRAINT_LENGTH).contains(&constraint_length) {
            return Err(Error::InvalidCode(format!(
                "constraint length {constraint_length} outside [2, {MAX_CONSTRAINT_LENGTH}]"
            )));
        }
        if generators.is_empty() {
            return Err(Error::InvalidCode("no generators".into()));
        }
        let limit = 1u32 << constraint_length;
        for &g in &generators {
            if g == 0 {
                return Err(Error::InvalidCode("generator mask is zero".into()));
            }
            if g >= limit {
                return Err(Error::InvalidCode(format!(
                    "generator {g:o} does not fit in {constraint_length} bits"
                )));
            }
        }
        if generators.len() > 8 {
            return Err(Error::InvalidCode("at most 8 generators are supported".into()));
        }
        Ok(Self {
            constraint_length,
            generators,
        })
    }

    /// Parses a comma-separated list of octal masks such as `"7,5"`. The
    /// constraint length is the bit width of the widest mask.
    pub fn from_octal(list: &str) -> Result<Self> {
        let generators = list
            .split(',')
            .map(|g| {
                u32::from_str_radix(g.trim(), 8)
                    .map_err(|_| Error::InvalidCode(format!("`{}` is not an octal mask", g.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        let width = generators
            .iter()
            .map(|g| 32 - g.leading_zeros() as usize)
            .max()
            .unwrap_or(0);
        Self::new(width, generators)
    }

    /// The non-catastrophic `(7, 5)` code with `v = 3`.
    pub fn standard() -> Self {
        Self::new(3, vec![0o7, 0o5]).expect("valid preset")
    }

    /// The `(6, 5)` code, the `v = 3` pair that reproduces the worked
    /// modulation example `1010 -> 11 10 10 10`.
    pub fn example_65() -> Self {
        Self::new(3, vec![0o6, 0o5]).expect("valid preset")
    }

    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }

    pub fn memory(&self) -> usize {
        self.constraint_length - 1
    }

    pub fn state_count(&self) -> usize {
        1 << self.memory()
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    /// Number of output bits per input bit (the code rate is its inverse).
    pub fn outputs(&self) -> usize {
        self.generators.len()
    }

    pub fn rate(&self) -> f64 {
        1.0 / self.outputs() as f64
    }

    /// Generators rendered as in [`CodeSpec::from_octal`].
    pub fn octal(&self) -> String {
        self.generators
            .iter()
            .map(|g| format!("{g:o}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// True when the generator polynomials share a common factor other than
    /// a power of `D` over GF(2).
    pub fn is_catastrophic(&self) -> bool {
        let mut common = 0u32;
        for &g in &self.generators {
            common = gf2_gcd(common, self.polynomial(g));
        }
        while common != 0 && common & 1 == 0 {
            common >>= 1;
        }
        common != 1
    }

    /// Generator as a polynomial in `D`, bit `i` holding the coefficient of `D^i`.
    fn polynomial(&self, mask: u32) -> u32 {
        mask.reverse_bits() >> (32 - self.constraint_length)
    }

    /// Output word for `input` applied in `state`; bit `j` is generator `j`'s parity.
    pub fn output(&self, state: usize, input: Bit) -> u32 {
        let register = ((input as u32) << self.memory()) | state as u32;
        self.generators
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &g)| acc | (((g & register).count_ones() & 1) << j))
    }

    pub fn next_state(&self, state: usize, input: Bit) -> usize {
        (((input as usize) << self.memory()) | state) >> 1
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) v={}", self.octal(), self.constraint_length)
    }
}

fn gf2_gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let mut r = a;
        let db = 31 - b.leading_zeros();
        while r != 0 && 31 - r.leading_zeros() >= db {
            r ^= b << (31 - r.leading_zeros() - db);
        }
        a = b;
        b = r;
    }
    a
}

/// Lock framing applied before encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LockMode {
    Unlocked,
    /// Two `0` bits after every data bit.
    #[default]
    Lower,
    /// Two `1` bits after every data bit.
    Higher,
}

impl LockMode {
    pub fn lock_bit(self) -> Option<Bit> {
        match self {
            LockMode::Unlocked => None,
            LockMode::Lower => Some(0),
            LockMode::Higher => Some(1),
        }
    }

    pub fn is_locked(self) -> bool {
        self != LockMode::Unlocked
    }

    /// Encoder input steps per data bit.
    pub fn period(self) -> usize {
        if self.is_locked() {
            1 + LOCK_BITS
        } else {
            1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LockMode::Unlocked => "none",
            LockMode::Lower => "lower",
            LockMode::Higher => "higher",
        }
    }
}

impl std::str::FromStr for LockMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "unlocked" => Ok(LockMode::Unlocked),
            "lower" => Ok(LockMode::Lower),
            "higher" => Ok(LockMode::Higher),
            other => Err(Error::InvalidCode(format!("unknown lock mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub next_state: usize,
    /// Bit `j` is the output of generator `j`.
    pub output: u32,
}

/// Complete state-transition table of a code.
#[derive(Clone, Debug)]
pub struct Trellis {
    spec: CodeSpec,
    transitions: Vec<[Transition; 2]>,
}

impl Trellis {
    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn outputs(&self) -> usize {
        self.spec.outputs()
    }

    pub fn memory(&self) -> usize {
        self.spec.memory()
    }

    pub fn transition(&self, state: usize, input: Bit) -> Transition {
        self.transitions[state][input as usize]
    }

    /// States no legal locked input stream can occupy. They need two memory
    /// cells to exist, so `v = 2` codes exclude nothing.
    pub fn excluded_states(&self, lock: LockMode) -> Vec<usize> {
        if self.memory() < LOCK_BITS {
            return Vec::new();
        }
        match lock {
            LockMode::Unlocked => Vec::new(),
            LockMode::Lower => vec![self.state_count() - 1],
            LockMode::Higher => vec![0],
        }
    }

    /// Whether `state` is excluded at lattice position `position` (after
    /// `position` inputs). The higher lock can still sit in `S0` before its
    /// first lock bit has entered the register.
    pub fn is_excluded(&self, lock: LockMode, state: usize, position: usize) -> bool {
        if self.memory() < LOCK_BITS {
            return false;
        }
        match lock {
            LockMode::Unlocked => false,
            LockMode::Lower => state == self.state_count() - 1,
            LockMode::Higher => state == 0 && position >= LOCK_BITS,
        }
    }
}

pub fn build_trellis(spec: &CodeSpec) -> Trellis {
    let transitions = (0..spec.state_count())
        .map(|s| {
            [0, 1].map(|x| Transition {
                next_state: spec.next_state(s, x),
                output: spec.output(s, x),
            })
        })
        .collect();
    Trellis {
        spec: spec.clone(),
        transitions,
    }
}

/// Encodes from the all-zero state; output bits for one step are emitted in
/// generator order.
pub fn conv_encode(spec: &CodeSpec, input: &[Bit]) -> Vec<Bit> {
    let n = spec.outputs();
    let m = spec.memory();
    let mut register = 0u32;
    let mut out = Vec::with_capacity(input.len() * n);
    for &x in input {
        register = (register >> 1) | ((x as u32 & 1) << m);
        out.extend(spec.generators.iter().map(|&g| ((g & register).count_ones() & 1) as Bit));
    }
    out
}

pub fn lock_insert(data: &[Bit], mode: LockMode) -> Vec<Bit> {
    match mode.lock_bit() {
        None => data.to_vec(),
        Some(lock) => data.iter().flat_map(|&d| [d, lock, lock]).collect(),
    }
}

pub fn lock_strip(locked: &[Bit], mode: LockMode) -> Result<Vec<Bit>> {
    let period = mode.period();
    if locked.len() % period != 0 {
        return Err(Error::Framing {
            len: locked.len(),
            width: period,
        });
    }
    Ok(locked.iter().step_by(period).copied().collect())
}
