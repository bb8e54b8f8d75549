//! Canonical representation of DNS query names and the records that
//! carry them.
//!
//! Names are kept as raw bytes rather than `String`: tunnel payloads are
//! exactly the inputs that may carry octets outside the hostname
//! alphabet, and those bytes must be analyzed, not rejected. ASCII
//! uppercase is folded to lowercase during normalization; all other
//! bytes pass through verbatim.

use std::fmt;
use std::net::Ipv4Addr;

use crate::error::{Error, Result};
use crate::escape::escape_bytes;

/// Longest label the wire format can express.
pub const MAX_LABEL_LEN: usize = 63;

/// Longest dotted name we accept (RFC 1035 presentation limit).
pub const MAX_NAME_LEN: usize = 253;

/// A DNS query name: the raw form seen on the wire plus its normalized,
/// lowercase decomposition into labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QueryName {
    raw: Vec<u8>,
    labels: Vec<Vec<u8>>,
    normalized: Vec<u8>,
}

impl QueryName {
    /// Parse a name from its dotted text form.
    ///
    /// Leading/trailing whitespace and one trailing root dot are
    /// dropped. Labels are ASCII-lowercased; bytes outside `[a-z0-9_-]`
    /// are retained verbatim.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        let trimmed = trimmed.strip_suffix('.').unwrap_or(trimmed);
        if trimmed.is_empty() {
            return Err(Error::EmptyName);
        }
        let labels = trimmed
            .split('.')
            .map(|l| l.as_bytes().to_vec())
            .collect::<Vec<_>>();
        Self::from_wire_labels(labels)
    }

    /// Build a name from already-split label bytes, as decoded from the
    /// DNS wire format. Validates lengths and lowercases ASCII.
    pub fn from_wire_labels(labels: Vec<Vec<u8>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyName);
        }
        let mut raw = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if label.len() > MAX_LABEL_LEN {
                return Err(Error::LabelTooLong(label.len()));
            }
            if i > 0 {
                raw.push(b'.');
            }
            raw.extend_from_slice(label);
        }
        let labels: Vec<Vec<u8>> = labels
            .into_iter()
            .map(|l| l.iter().map(|b| b.to_ascii_lowercase()).collect())
            .collect();
        let normalized = labels.join(&b'.');
        if normalized.len() > MAX_NAME_LEN {
            return Err(Error::NameTooLong(normalized.len()));
        }
        Ok(QueryName {
            raw,
            labels,
            normalized,
        })
    }

    /// The name as seen before normalization (dots re-inserted for wire
    /// input, trailing dot and whitespace already stripped).
    pub fn raw(&self) -> &[u8] {
        &self.raw
    }

    /// Lowercase labels, left to right.
    pub fn labels(&self) -> &[Vec<u8>] {
        &self.labels
    }

    /// Lowercase dotted join of the labels.
    pub fn normalized(&self) -> &[u8] {
        &self.normalized
    }

    /// Heuristic apex: the join of the last two labels (the whole name
    /// when only one label exists). Always a suffix of `normalized`.
    /// Public-suffix-list accuracy is deliberately out of scope.
    pub fn registered_domain(&self) -> &[u8] {
        if self.labels.len() <= 2 {
            return &self.normalized;
        }
        let apex_len = self.labels[self.labels.len() - 2].len()
            + 1
            + self.labels[self.labels.len() - 1].len();
        &self.normalized[self.normalized.len() - apex_len..]
    }

    /// Labels left of the registered domain; empty when there are none.
    pub fn subdomain_labels(&self) -> &[Vec<u8>] {
        let keep = self.labels.len().saturating_sub(2);
        &self.labels[..keep]
    }
}

impl fmt::Display for QueryName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&escape_bytes(&self.normalized))
    }
}

/// Whether a packet carried the name in a question or an answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Query,
    Response,
}

/// Capture timestamp with microsecond resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Timestamp {
    pub sec: u32,
    pub usec: u32,
}

/// One observed DNS query name together with its split keys.
///
/// `client_ip` is the source IP for queries and the destination IP for
/// responses, so both directions key on the original querier. `seq` is
/// strictly increasing within one ingestion run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRecord {
    pub name: QueryName,
    pub client_ip: Ipv4Addr,
    pub direction: Direction,
    pub timestamp: Timestamp,
    pub seq: u64,
}

impl QueryRecord {
    /// Record for a name with no packet context (domain lists, synthetic
    /// corpora): client 0.0.0.0, direction query, timestamp zero.
    pub fn bare(name: QueryName, seq: u64) -> Self {
        QueryRecord {
            name,
            client_ip: Ipv4Addr::UNSPECIFIED,
            direction: Direction::Query,
            timestamp: Timestamp::default(),
            seq,
        }
    }
}
