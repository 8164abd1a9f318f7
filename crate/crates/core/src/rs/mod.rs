//! Systematic Reed-Solomon codes over GF(2^8).
//!
//! Codewords are stored highest-degree coefficient first: symbol `i` of an
//! `n`-symbol word is the coefficient of `x^(n-1-i)`, so the message occupies
//! the first `k` positions and parity the last `n - k`. The generator is
//! `prod_{i=fcr}^{fcr+2t-1} (x - alpha^i)` with `fcr = 1` by default.

pub mod gf;

use crate::{Bit, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RsParams {
    pub n: usize,
    pub k: usize,
    /// Exponent of the first consecutive generator root.
    pub first_root: usize,
}

impl RsParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let params = Self { n, k, first_root: 1 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { n, k, .. } = *self;
        if n > 255 {
            return Err(Error::InvalidRsParams(format!("n = {n} exceeds 255")));
        }
        if k == 0 || k >= n {
            return Err(Error::InvalidRsParams(format!("k = {k} must be in [1, n)")));
        }
        if (n - k) % 2 != 0 {
            return Err(Error::InvalidRsParams(format!("n - k = {} is odd", n - k)));
        }
        Ok(())
    }

    pub fn parity(&self) -> usize {
        self.n - self.k
    }

    /// Correctable symbol errors.
    pub fn t(&self) -> usize {
        self.parity() / 2
    }
}

impl Default for RsParams {
    fn default() -> Self {
        Self {
            n: 255,
            k: 223,
            first_root: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RsDecodeStatus {
    Clean,
    Corrected(usize),
    Failure,
}

#[derive(Clone, Debug)]
pub struct RsCodec {
    params: RsParams,
    /// Generator coefficients, highest degree first; `generator[0] == 1`.
    generator: Vec<u8>,
}

impl RsCodec {
    pub fn new(params: RsParams) -> Result<Self> {
        params.validate()?;
        let mut generator = vec![1u8];
        for i in 0..params.parity() {
            let root = gf::exp(params.first_root + i);
            // multiply by (x + root)
            let mut next = vec![0u8; generator.len() + 1];
            for (j, &g) in generator.iter().enumerate() {
                next[j] ^= g;
                next[j + 1] ^= gf::mul(g, root);
            }
            generator = next;
        }
        Ok(Self { params, generator })
    }

    pub fn params(&self) -> RsParams {
        self.params
    }

    pub fn generator(&self) -> &[u8] {
        &self.generator
    }

    pub fn encode(&self, msg: &[u8]) -> Result<Vec<u8>> {
        let RsParams { n, k, .. } = self.params;
        if msg.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                actual: msg.len(),
            });
        }
        let parity = self.params.parity();
        let mut remainder = vec![0u8; parity];
        for &m in msg {
            let feedback = m ^ remainder[0];
            remainder.rotate_left(1);
            remainder[parity - 1] = 0;
            if feedback != 0 {
                for (r, &g) in remainder.iter_mut().zip(&self.generator[1..]) {
                    *r ^= gf::mul(g, feedback);
                }
            }
        }
        let mut codeword = Vec::with_capacity(n);
        codeword.extend_from_slice(msg);
        codeword.extend_from_slice(&remainder);
        Ok(codeword)
    }

    /// `S_j = r(alpha^(first_root + j))` for `j` in `0..n-k`.
    pub fn syndromes(&self, received: &[u8]) -> Vec<u8> {
        (0..self.params.parity())
            .map(|j| {
                let x = gf::exp(self.params.first_root + j);
                received.iter().fold(0u8, |acc, &c| gf::mul(acc, x) ^ c)
            })
            .collect()
    }

    pub fn decode(&self, received: &[u8]) -> Result<(Vec<u8>, RsDecodeStatus)> {
        let RsParams { n, k, .. } = self.params;
        if received.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: received.len(),
            });
        }
        let syndromes = self.syndromes(received);
        if syndromes.iter().all(|&s| s == 0) {
            return Ok((received[..k].to_vec(), RsDecodeStatus::Clean));
        }
        match self.correct(received, &syndromes) {
            Some((word, count)) => Ok((word[..k].to_vec(), RsDecodeStatus::Corrected(count))),
            None => Ok((received[..k].to_vec(), RsDecodeStatus::Failure)),
        }
    }

    fn correct(&self, received: &[u8], syndromes: &[u8]) -> Option<(Vec<u8>, usize)> {
        let n = self.params.n;
        let locator = berlekamp_massey(syndromes);
        let degree = locator.len() - 1;
        if degree == 0 || degree > self.params.t() {
            return None;
        }
        // Chien search: x^p is in error when locator(alpha^-p) = 0.
        let positions: Vec<usize> = (0..n)
            .filter(|&p| poly_eval_low(&locator, gf::exp(255 - p % 255)) == 0)
            .collect();
        if positions.len() != degree {
            return None;
        }
        // Forney: e = X^(1 - fcr) * omega(X^-1) / locator'(X^-1)
        let mut omega = poly_mul_low(syndromes, &locator);
        omega.truncate(syndromes.len());
        let derivative: Vec<u8> = locator
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
            .collect();
        let mut word = received.to_vec();
        for &p in &positions {
            let x_inv = gf::exp(255 - p % 255);
            let denom = poly_eval_low(&derivative, x_inv);
            if denom == 0 {
                return None;
            }
            let mut magnitude = gf::div(poly_eval_low(&omega, x_inv), denom);
            let fcr = self.params.first_root;
            if fcr != 1 {
                // X^(1 - fcr) = (X^-1)^(fcr - 1)
                magnitude = gf::mul(magnitude, gf::pow(x_inv, (fcr + 254) as u32 % 255));
            }
            if magnitude == 0 {
                return None;
            }
            word[n - 1 - p] ^= magnitude;
        }
        if self.syndromes(&word).iter().any(|&s| s != 0) {
            return None;
        }
        Some((word, positions.len()))
    }
}

/// Error locator, lowest degree first, trimmed so the last coefficient is nonzero.
fn berlekamp_massey(syndromes: &[u8]) -> Vec<u8> {
    let mut locator = vec![1u8];
    let mut previous = vec![1u8];
    let mut length = 0usize;
    let mut shift = 1usize;
    let mut last_discrepancy = 1u8;
    for r in 0..syndromes.len() {
        let mut d = syndromes[r];
        for i in 1..locator.len().min(r + 1) {
            d ^= gf::mul(locator[i], syndromes[r - i]);
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        let scale = gf::div(d, last_discrepancy);
        let mut updated = locator.clone();
        if updated.len() < previous.len() + shift {
            updated.resize(previous.len() + shift, 0);
        }
        for (i, &b) in previous.iter().enumerate() {
            updated[i + shift] ^= gf::mul(scale, b);
        }
        if 2 * length <= r {
            previous = std::mem::replace(&mut locator, updated);
            length = r + 1 - length;
            last_discrepancy = d;
            shift = 1;
        } else {
            locator = updated;
            shift += 1;
        }
    }
    while locator.len() > 1 && *locator.last().unwrap() == 0 {
        locator.pop();
    }
    locator
}

fn poly_eval_low(poly: &[u8], x: u8) -> u8 {
    poly.iter().rev().fold(0u8, |acc, &c| gf::mul(acc, x) ^ c)
}

fn poly_mul_low(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= gf::mul(x, y);
        }
    }
    out
}

/// Packs bits MSB-first into bytes, zero-padding the last one.
pub fn pack_bits(bits: &[Bit]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b & 1) << (7 - i)))
        })
        .collect()
}

/// Inverse of [`pack_bits`], keeping the first `bit_len` bits.
pub fn unpack_bits(symbols: &[u8], bit_len: usize) -> Vec<Bit> {
    symbols
        .iter()
        .flat_map(|&s| (0..8).map(move |i| (s >> (7 - i)) & 1))
        .take(bit_len)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use proptest::prelude::*;

    /// Remainder of `msg * x^(n-k)` by the generator, via schoolbook long
    /// division on an explicitly expanded generator polynomial.
    fn long_division_parity(msg: &[u8], parity: usize) -> Vec<u8> {
        let mut g = vec![1u8];
        for i in 1..=parity {
            let root = gf::pow(2, i as u32);
            let mut next = vec![0u8; g.len() + 1];
            for j in 0..g.len() {
                next[j] ^= gf::mul(g[j], root);
                next[j + 1] ^= g[j];
            }
            g = next; // lowest degree first
        }
        let g_high: Vec<u8> = g.into_iter().rev().collect();
        let mut dividend: Vec<u8> = msg.to_vec();
        dividend.extend(std::iter::repeat(0).take(parity));
        for i in 0..msg.len() {
            let coef = dividend[i];
            if coef != 0 {
                for (j, &gc) in g_high.iter().enumerate() {
                    dividend[i + j] ^= gf::mul(gc, coef);
                }
            }
        }
        dividend[msg.len()..].to_vec()
    }

    #[test]
    fn params_validation() {
        assert!(RsParams::new(256, 200).is_err());
        assert!(RsParams::new(15, 12).is_err());
        assert!(RsParams::new(15, 15).is_err());
        assert!(RsParams::new(15, 0).is_err());
        assert_eq!(RsParams::new(15, 11).unwrap().t(), 2);
        assert_eq!(RsParams::default().t(), 16);
    }

    #[test]
    fn rs15_parity_matches_long_division() {
        let codec = RsCodec::new(RsParams::new(15, 11).unwrap()).unwrap();
        let msg: Vec<u8> = (1..=11).collect();
        let cw = codec.encode(&msg).unwrap();
        assert_eq!(&cw[..11], &msg[..]);
        assert_eq!(cw[11..].to_vec(), long_division_parity(&msg, 4));
        assert!(codec.syndromes(&cw).iter().all(|&s| s == 0));
    }

    #[test]
    fn zero_and_wrong_length() {
        let codec = RsCodec::new(RsParams::default()).unwrap();
        assert_eq!(codec.encode(&[0; 223]).unwrap(), vec![0; 255]);
        assert!(codec.encode(&[0; 222]).is_err());
        assert!(codec.decode(&[0; 254]).is_err());
    }

    fn corrupt(word: &mut [u8], count: usize, rng: &mut crate::rng::RngStream) -> Vec<usize> {
        let mut positions = Vec::new();
        while positions.len() < count {
            let p = (rng.next_u64() % word.len() as u64) as usize;
            if !positions.contains(&p) {
                positions.push(p);
            }
        }
        for &p in &positions {
            let e = (rng.next_u64() % 255 + 1) as u8;
            word[p] ^= e;
        }
        positions
    }

    #[test]
    fn corrects_up_to_t() {
        let codec = RsCodec::new(RsParams::default()).unwrap();
        let mut rng = derive_stream(5, &[]);
        for trial in 0..300 {
            let msg: Vec<u8> = (0..223).map(|_| rng.next_u64() as u8).collect();
            let cw = codec.encode(&msg).unwrap();
            let mut rx = cw.clone();
            let errors = trial % 17;
            corrupt(&mut rx, errors, &mut rng);
            let (out, status) = codec.decode(&rx).unwrap();
            assert_eq!(out, msg, "trial {trial}");
            let expected = if errors == 0 { RsDecodeStatus::Clean } else { RsDecodeStatus::Corrected(errors) };
            assert_eq!(status, expected);
        }
    }

    #[test]
    fn beyond_t_never_partially_corrects() {
        let codec = RsCodec::new(RsParams::new(15, 11).unwrap()).unwrap();
        let mut rng = derive_stream(6, &[]);
        let mut failures = 0;
        for _ in 0..5000 {
            let msg: Vec<u8> = (0..11).map(|_| rng.next_u64() as u8).collect();
            let cw = codec.encode(&msg).unwrap();
            let mut rx = cw.clone();
            corrupt(&mut rx, 3, &mut rng);
            let (out, status) = codec.decode(&rx).unwrap();
            match status {
                RsDecodeStatus::Failure => {
                    failures += 1;
                    assert_eq!(out, rx[..11]);
                }
                RsDecodeStatus::Corrected(c) => {
                    assert!(c <= 2);
                    // a miscorrection lands on another codeword
                    let reencoded = codec.encode(&out).unwrap();
                    let changed = reencoded.iter().zip(&rx).filter(|(a, b)| a != b).count();
                    assert_eq!(changed, c);
                    assert_ne!(out, msg);
                }
                RsDecodeStatus::Clean => panic!("three errors cannot leave zero syndromes"),
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn nonstandard_first_root() {
        let params = RsParams { n: 31, k: 23, first_root: 0 };
        let codec = RsCodec::new(params).unwrap();
        let mut rng = derive_stream(12, &[]);
        let msg: Vec<u8> = (0..23).map(|_| rng.next_u64() as u8).collect();
        let mut rx = codec.encode(&msg).unwrap();
        corrupt(&mut rx, 4, &mut rng);
        assert_eq!(codec.decode(&rx).unwrap(), (msg, RsDecodeStatus::Corrected(4)));
    }

    #[test]
    fn packing() {
        assert_eq!(pack_bits(&[1, 0, 1, 0, 1, 0, 1, 0]), [0xAA]);
        assert!(pack_bits(&[]).is_empty());
        let bits = [1, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 1];
        let packed = pack_bits(&bits);
        assert_eq!(packed, [0xCB, 0x90]);
        assert_eq!(unpack_bits(&packed, 12), bits);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn encoder_is_linear(a in prop::collection::vec(any::<u8>(), 223), b in prop::collection::vec(any::<u8>(), 223)) {
            let codec = RsCodec::new(RsParams::default()).unwrap();
            let xor: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let sum: Vec<u8> = codec.encode(&a).unwrap().iter().zip(codec.encode(&b).unwrap()).map(|(x, y)| x ^ y).collect();
            prop_assert_eq!(codec.encode(&xor).unwrap(), sum);
        }

        #[test]
        fn pack_round_trip(bits in prop::collection::vec(0u8..2, 0..100)) {
            prop_assert_eq!(unpack_bits(&pack_bits(&bits), bits.len()), bits);
        }

        #[test]
        fn corrected_count_matches_changes(seed: u64, errors in 0usize..=16) {
            let codec = RsCodec::new(RsParams::default()).unwrap();
            let mut rng = derive_stream(seed, &[]);
            let msg: Vec<u8> = (0..223).map(|_| rng.next_u64() as u8).collect();
            let cw = codec.encode(&msg).unwrap();
            let mut rx = cw.clone();
            corrupt(&mut rx, errors, &mut rng);
            let (out, status) = codec.decode(&rx).unwrap();
            prop_assert_eq!(&out, &msg);
            let changed = cw.iter().zip(&rx).filter(|(a, b)| a != b).count();
            match status {
                RsDecodeStatus::Clean => prop_assert_eq!(changed, 0),
                RsDecodeStatus::Corrected(c) => prop_assert_eq!(c, changed),
                RsDecodeStatus::Failure => prop_assert!(false, "failure within t"),
            }
        }
    }
}
