use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid code spec: {0}")]
    InvalidCode(String),
    #[error("framing error: {len} items is not a multiple of {width}")]
    Framing { len: usize, width: usize },
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("non-transmittable codewords require a locked code")]
    NtcWithoutLock,
    #[error("ntc count {0} exceeds the limit of 64")]
    NtcCountTooLarge(usize),
    #[error("sequence has {steps} steps but {ntc} are reserved for NTCs")]
    NtcExceedsSequence { steps: usize, ntc: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("exhaustive search over {0} free inputs exceeds the limit of 20")]
    OracleTooLong(usize),
    #[error("zero has no multiplicative inverse in GF(256)")]
    ZeroInverse,
    #[error("invalid Reed-Solomon parameters: {0}")]
    InvalidRsParams(String),
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("bad file format: {0}")]
    Format(String),
    #[error("at {ebno_db} dB, scheme {scheme}: {source}")]
    AtPoint {
        ebno_db: f64,
        scheme: String,
        #[source]
        source: Box<Error>,
    },
}
