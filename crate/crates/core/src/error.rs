use thiserror::Error;

/// Errors produced while building, querying or loading an index.
#[derive(Debug, Error)]
pub enum Error {
    #[error("text is empty")]
    EmptyText,
    #[error("pattern is empty")]
    EmptyPattern,
    #[error("block size must be at least 1")]
    InvalidBlockSize,
    #[error("block size {block} exceeds the word capacity of {capacity} characters")]
    BlockTooLarge { block: usize, capacity: usize },
    #[error("alphabet of {sigma} symbols needs {bits_per_char} bits per character, which does not fit {capacity} characters in a {word_bits}-bit word")]
    AlphabetOverflow {
        sigma: usize,
        bits_per_char: usize,
        capacity: usize,
        word_bits: usize,
    },
    #[error("position {pos} (length {len}) is out of range 1..={limit}")]
    OutOfRange { pos: usize, len: usize, limit: usize },
    #[error("expected {expected} letters, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("pattern of length {m} is shorter than the block size {block}")]
    PatternTooShort { m: usize, block: usize },
    #[error("character code {code} is outside the alphabet")]
    InvalidCode { code: u32 },
    #[error("no child edge starts with code {code}")]
    NoSuchChild { code: u16 },
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("bad magic number")]
    BadMagic,
    #[error("format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt section `{section}`: {reason}")]
    CorruptSection {
        section: &'static str,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short, stable name of the variant, used by the CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyText => "EmptyText",
            Error::EmptyPattern => "EmptyPattern",
            Error::InvalidBlockSize => "InvalidBlockSize",
            Error::BlockTooLarge { .. } => "BlockTooLarge",
            Error::AlphabetOverflow { .. } => "AlphabetOverflow",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::BadLength { .. } => "BadLength",
            Error::PatternTooShort { .. } => "PatternTooShort",
            Error::InvalidCode { .. } => "InvalidCode",
            Error::NoSuchChild { .. } => "NoSuchChild",
            Error::InternalInvariantViolation(_) => "InternalInvariantViolation",
            Error::BadMagic => "BadMagic",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::CorruptSection { .. } => "CorruptSection",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
