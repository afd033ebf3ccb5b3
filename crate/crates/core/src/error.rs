/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A length that must be a power of two (capture size, transform size)
    /// was not, or was below the stated minimum.
    #[error("invalid length {len}: expected a power of two >= {min}")]
    BadLength { len: usize, min: usize },

    /// The sample rate does not satisfy the Nyquist criterion for the
    /// requested tones.
    #[error(
        "sample rate {sample_rate} Hz must exceed twice the highest tone frequency ({max_tone_hz} Hz)"
    )]
    NyquistViolation { sample_rate: f64, max_tone_hz: f64 },

    /// Catch-all for parameter validation failures.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The spectrum holds no energy outside DC; no fundamental exists.
    #[error("spectrum contains no signal")]
    NoSignal,

    /// Capture file does not start with the expected magic bytes.
    #[error("bad capture magic {found:02x?}")]
    BadMagic { found: [u8; 4] },

    /// Capture file carries a format version this build does not read.
    #[error("unsupported capture version {0}")]
    UnsupportedVersion(u16),

    /// Capture file payload encoding is unknown.
    #[error("unsupported capture encoding {0}")]
    UnsupportedEncoding(u16),

    /// Capture payload size disagrees with the header.
    #[error("payload length mismatch: header declares {expected} samples, payload holds {actual}")]
    LengthMismatch { expected: u64, actual: u64 },

    /// A CSV record could not be parsed.
    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
