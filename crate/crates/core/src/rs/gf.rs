//! GF(2^8) arithmetic with primitive polynomial `x^8 + x^4 + x^3 + x^2 + 1`
//! (0x11D) and generator `alpha = 2`, using log/antilog tables.

use crate::{Error, Result};

pub const PRIMITIVE_POLY: u16 = 0x11D;

/// Exponent table doubled so `EXP[log a + log b]` never needs a modulo.
static EXP: [u8; 512] = build_exp();
static LOG: [u8; 256] = build_log();

const fn build_exp() -> [u8; 512] {
    let mut exp = [0u8; 512];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        exp[i + 255] = x as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= PRIMITIVE_POLY;
        }
        i += 1;
    }
    exp[510] = exp[0];
    exp[511] = exp[1];
    exp
}

const fn build_log() -> [u8; 256] {
    let exp = build_exp();
    let mut log = [0u8; 256];
    let mut i = 0;
    while i < 255 {
        log[exp[i] as usize] = i as u8;
        i += 1;
    }
    log
}

/// `alpha^power`, for any power.
#[inline]
pub fn exp(power: usize) -> u8 {
    EXP[power % 255]
}

/// Discrete log of a nonzero element.
#[inline]
pub fn log(a: u8) -> usize {
    debug_assert!(a != 0);
    LOG[a as usize] as usize
}

#[inline]
pub fn mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        0
    } else {
        EXP[LOG[a as usize] as usize + LOG[b as usize] as usize]
    }
}

pub fn inv(a: u8) -> Result<u8> {
    if a == 0 {
        return Err(Error::ZeroInverse);
    }
    Ok(EXP[255 - LOG[a as usize] as usize])
}

#[inline]
pub(crate) fn div(a: u8, b: u8) -> u8 {
    debug_assert!(b != 0);
    if a == 0 {
        0
    } else {
        EXP[LOG[a as usize] as usize + 255 - LOG[b as usize] as usize]
    }
}

pub fn pow(a: u8, n: u32) -> u8 {
    if n == 0 {
        return 1;
    }
    if a == 0 {
        return 0;
    }
    EXP[(LOG[a as usize] as usize * (n as usize % 255)) % 255]
}
