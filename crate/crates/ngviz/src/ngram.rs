//! N-gram extraction and ranked frequency tables.
//!
//! A table maps each n-gram (a byte window that never crosses a label
//! boundary) to its occurrence count, and keeps a dense ranking: count
//! descending, ties broken lexicographically so ranks are reproducible.
//! A fingerprint is such a table built from a legitimate-traffic corpus.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use crate::domain::{QueryName, QueryRecord};
use crate::error::{Error, Result};
use crate::escape::{escape_bytes, unescape_bytes};

/// Highest n-gram order the table builder accepts. Each additional
/// character multiplies the space of possible n-grams by the alphabet
/// size, so orders above 3 cost far more than they discriminate.
pub const MAX_ORDER: u8 = 3;

/// Which part of a name contributes n-grams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// All labels, including the registered domain (Alexa-style corpora
    /// are bare domains, so fingerprints usually want this).
    WholeName,
    /// Only the labels left of the registered domain — the part a
    /// tunnel mutates with each request.
    SubdomainOnly,
}

/// Sliding n-gram windows over one label. Labels shorter than `n` yield
/// nothing; windows never cross a dot because extraction is per label.
pub fn extract_ngrams(label: &[u8], n: usize) -> impl Iterator<Item = &[u8]> {
    assert!(n >= 1, "n-gram order must be at least 1");
    label.windows(n)
}

/// Ranked n-gram frequency table.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramTable {
    n: u8,
    scope: Scope,
    counts: HashMap<Vec<u8>, u64>,
    total: u64,
    /// (n-gram, count) sorted by count descending, ties lexicographic
    /// ascending. Rank i (1-based) is position i in this list.
    ranking: Vec<(Vec<u8>, u64)>,
    rank_index: HashMap<Vec<u8>, u32>,
}

impl NgramTable {
    /// Build a table from query names.
    ///
    /// With `dedup` set, only the first occurrence of each distinct
    /// normalized name contributes — the recommended mode for tunnel
    /// detection, since repeated lookups of one name say nothing new.
    pub fn from_names<'a, I>(names: I, n: u8, dedup: bool, scope: Scope) -> Result<Self>
    where
        I: IntoIterator<Item = &'a QueryName>,
    {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::UnsupportedOrder(n));
        }
        let mut counts: HashMap<Vec<u8>, u64> = HashMap::new();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        for name in names {
            if dedup && !seen.insert(name.normalized().to_vec()) {
                continue;
            }
            let labels = match scope {
                Scope::WholeName => name.labels(),
                Scope::SubdomainOnly => name.subdomain_labels(),
            };
            for label in labels {
                for gram in extract_ngrams(label, n as usize) {
                    match counts.get_mut(gram) {
                        Some(c) => *c += 1,
                        None => {
                            counts.insert(gram.to_vec(), 1);
                        }
                    }
                }
            }
        }
        Self::from_counts(counts, n, scope)
    }

    /// Assemble a table from raw counts, computing total and ranking.
    pub fn from_counts(counts: HashMap<Vec<u8>, u64>, n: u8, scope: Scope) -> Result<Self> {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::UnsupportedOrder(n));
        }
        if counts.is_empty() {
            return Err(Error::EmptyTable);
        }
        let total = counts.values().sum();
        let mut ranking: Vec<(Vec<u8>, u64)> =
            counts.iter().map(|(g, c)| (g.clone(), *c)).collect();
        ranking.sort_by(|(ga, ca), (gb, cb)| cb.cmp(ca).then_with(|| ga.cmp(gb)));
        let rank_index = ranking
            .iter()
            .enumerate()
            .map(|(i, (g, _))| (g.clone(), (i + 1) as u32))
            .collect();
        Ok(NgramTable {
            n,
            scope,
            counts,
            total,
            ranking,
            rank_index,
        })
    }

    /// Sum counts of two tables of the same order (dedup-free merge).
    pub fn merged(&self, other: &NgramTable) -> Result<NgramTable> {
        if self.n != other.n {
            return Err(Error::OrderMismatch {
                input: other.n,
                fingerprint: self.n,
            });
        }
        let mut counts = self.counts.clone();
        for (g, c) in &other.counts {
            *counts.entry(g.clone()).or_insert(0) += c;
        }
        Self::from_counts(counts, self.n, self.scope)
    }

    pub fn order(&self) -> u8 {
        self.n
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    /// Number of distinct n-grams (the K in the match formulas).
    pub fn k(&self) -> usize {
        self.ranking.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, gram: &[u8]) -> u64 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// 1-based rank of an n-gram, if present.
    pub fn rank_of(&self, gram: &[u8]) -> Option<u32> {
        self.rank_index.get(gram).copied()
    }

    /// Relative frequency of the n-gram holding 1-based rank `rank`.
    pub fn freq_at_rank(&self, rank: usize) -> Option<f64> {
        self.ranking
            .get(rank.checked_sub(1)?)
            .map(|(_, c)| *c as f64 / self.total as f64)
    }

    pub fn ranking(&self) -> &[(Vec<u8>, u64)] {
        &self.ranking
    }

    /// Drop in relative frequency from each rank to the next: element i
    /// (0-based) is freq(rank i+1) − freq(rank i+2). All elements are
    /// nonnegative because the ranking is non-increasing. Spikes here
    /// betray many subdomains sharing a repeated label.
    pub fn freq_deltas(&self) -> Result<Vec<f64>> {
        if self.k() < 2 {
            return Err(Error::TooFewNgrams(self.k()));
        }
        let total = self.total as f64;
        Ok(self
            .ranking
            .windows(2)
            .map(|w| (w[0].1 as f64 - w[1].1 as f64) / total)
            .collect())
    }

    /// Shannon entropy (bits) of the relative-frequency distribution.
    pub fn shannon_entropy(&self) -> f64 {
        let total = self.total as f64;
        self.ranking
            .iter()
            .map(|(_, c)| {
                let p = *c as f64 / total;
                -p * p.log2()
            })
            .sum()
    }
}

/// Build a table from query records (see [`NgramTable::from_names`]).
pub fn build_table(records: &[QueryRecord], n: u8, dedup: bool, scope: Scope) -> Result<NgramTable> {
    NgramTable::from_names(records.iter().map(|r| &r.name), n, dedup, scope)
}

/// A frequency table built from a legitimate-traffic corpus: the
/// baseline every input segment is compared against.
#[derive(Debug, Clone)]
pub struct Fingerprint {
    pub table: NgramTable,
    pub source_label: String,
    pub dedup_applied: bool,
}

impl Fingerprint {
    pub fn new(table: NgramTable, source_label: impl Into<String>, dedup_applied: bool) -> Result<Self> {
        let source_label = source_label.into();
        if source_label.is_empty() {
            return Err(Error::InvalidConfig("fingerprint source label is empty".into()));
        }
        Ok(Fingerprint {
            table,
            source_label,
            dedup_applied,
        })
    }

    /// Persist as text: header `ngviz-fp v1 n=<order> total=<total>`,
    /// then one `<ngram>\t<count>` line per entry in rank order, with
    /// bytes outside printable ASCII (plus tab and backslash)
    /// hex-escaped.
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "ngviz-fp v1 n={} total={}",
            self.table.order(),
            self.table.total()
        )?;
        for (gram, count) in self.table.ranking() {
            writeln!(w, "{}\t{}", escape_bytes(gram), count)?;
        }
        Ok(())
    }

    /// Load a fingerprint saved by [`Fingerprint::save`]. The format
    /// does not carry scope or dedup metadata: loaded tables get
    /// whole-name scope and `dedup_applied = false`.
    pub fn load<R: BufRead>(r: R, source_label: impl Into<String>) -> Result<Self> {
        let bad = |msg: String| Error::FingerprintFormat(msg);
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| bad("missing header line".into()))??;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("ngviz-fp") || parts.next() != Some("v1") {
            return Err(bad(format!("unrecognized header {header:?}")));
        }
        let n: u8 = parts
            .next()
            .and_then(|t| t.strip_prefix("n="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("header missing n=<order>".into()))?;
        let total: u64 = parts
            .next()
            .and_then(|t| t.strip_prefix("total="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("header missing total=<total>".into()))?;

        let mut counts: HashMap<Vec<u8>, u64> = HashMap::new();
        for (idx, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (gram_text, count_text) = line
                .split_once('\t')
                .ok_or_else(|| bad(format!("line {}: missing tab separator", idx + 2)))?;
            let gram = unescape_bytes(gram_text)?;
            if gram.len() != n as usize {
                return Err(bad(format!(
                    "line {}: n-gram has {} bytes, expected {}",
                    idx + 2,
                    gram.len(),
                    n
                )));
            }
            let count: u64 = count_text
                .parse()
                .map_err(|_| bad(format!("line {}: bad count {count_text:?}", idx + 2)))?;
            if count == 0 {
                return Err(bad(format!("line {}: zero count", idx + 2)));
            }
            if counts.insert(gram, count).is_some() {
                return Err(bad(format!("line {}: duplicate n-gram", idx + 2)));
            }
        }
        let table = NgramTable::from_counts(counts, n, Scope::WholeName)?;
        if table.total() != total {
            return Err(bad(format!(
                "header total {} does not match entry sum {}",
                total,
                table.total()
            )));
        }
        Fingerprint::new(table, source_label, false)
    }
}
