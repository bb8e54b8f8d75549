use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    // -- query name parsing --
    #[error("empty query name")]
    EmptyName,
    #[error("empty label in query name")]
    EmptyLabel,
    #[error("label exceeds 63 bytes (got {0})")]
    LabelTooLong(usize),
    #[error("name exceeds 253 bytes (got {0})")]
    NameTooLong(usize),

    // -- pcap ingestion --
    #[error("not a pcap file: bad magic {0:#010x}")]
    BadMagic(u32),
    #[error("truncated pcap global header")]
    TruncatedHeader,
    #[error("unsupported link type {0} (only Ethernet, code 1, is handled)")]
    UnsupportedLinkType(u32),

    // -- n-gram tables --
    #[error("n-gram order {0} unsupported (expected 1, 2 or 3)")]
    UnsupportedOrder(u8),
    #[error("no n-grams produced; table would be empty")]
    EmptyTable,
    #[error("table has {0} distinct n-grams; at least 2 required")]
    TooFewNgrams(usize),
    #[error("fingerprint file: {0}")]
    FingerprintFormat(String),

    // -- scoring --
    #[error("order mismatch: input n={input}, fingerprint n={fingerprint}")]
    OrderMismatch { input: u8, fingerprint: u8 },
    #[error("input table has no n-grams to score")]
    EmptyInput,
    #[error("invalid match parameters: {0}")]
    InvalidParams(String),

    // -- synthetic corpora --
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
