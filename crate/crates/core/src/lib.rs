//! Locked convolutional coding with soft-decision Viterbi decoding enhanced by
//! non-transmittable codewords (NTCs), a Reed-Solomon baseline, and a Monte
//! Carlo harness that compares the two over an AWGN storage-medium model.
//!
//! The write path is `lock_insert -> conv_encode -> bpsk_modulate`, the
//! medium is [`channel::awgn`], and the read path is
//! `append_ntc -> viterbi_decode -> lock_strip` (bundled as
//! [`viterbi::decode_pipeline`]).
//!
//! ```
//! use svad_ntc::channel::bpsk_modulate;
//! use svad_ntc::convcode::{conv_encode, lock_insert, CodeSpec, LockMode};
//! use svad_ntc::viterbi::{decode_pipeline, DecodeConfig};
//!
//! let spec = CodeSpec::standard();
//! let data = [1, 0, 1, 1, 0, 0, 1];
//! let written = bpsk_modulate(&conv_encode(&spec, &lock_insert(&data, LockMode::Lower)));
//! let read = decode_pipeline(&written, &spec, &DecodeConfig::default()).unwrap();
//! assert_eq!(read, data);
//! ```

pub mod channel;
pub mod convcode;
mod error;
pub mod formats;
pub mod harness;
pub mod rng;
pub mod rs;
pub mod viterbi;

pub use error::{Error, Result};

/// A single bit stored as `0` or `1`.
pub type Bit = u8;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/locked-encoder.md")]
    mod locked_encoder {}
    #[doc = include_str!("../../../book/src/channel.md")]
    mod channel {}
    #[doc = include_str!("../../../book/src/viterbi.md")]
    mod viterbi {}
    #[doc = include_str!("../../../book/src/reed-solomon.md")]
    mod reed_solomon {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/file-formats.md")]
    mod file_formats {}
}
