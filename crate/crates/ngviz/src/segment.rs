//! Partitioning the record stream into scoreable segments.
//!
//! A tunnel hiding inside mixed traffic surfaces once the stream is
//! split by client IP and/or registered domain and then windowed on
//! unique names, so each window is scored on its own.

use std::collections::{BTreeMap, HashSet};

use crate::domain::QueryRecord;
use crate::error::{Error, Result};
use crate::escape::escape_bytes;
use crate::ngram::{Fingerprint, NgramTable, Scope};
use crate::score::{total_match, MatchParams, MatchScore};

/// How to group records before windowing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMode {
    /// Single "all" group.
    None,
    /// Group by client IP.
    ByIp,
    /// Group by registered domain.
    ByDomain,
    /// Group by (client IP, registered domain) pairs; both views of the
    /// same tunnel can matter at once.
    ByIpAndDomain,
}

/// A keyed run of records awaiting scoring.
#[derive(Debug, Clone)]
pub struct Segment {
    pub key: String,
    pub window_index: u32,
    pub records: Vec<QueryRecord>,
}

/// A segment with its match score and threshold verdict.
#[derive(Debug, Clone)]
pub struct ScoredSegment {
    pub key: String,
    pub window_index: u32,
    pub score: MatchScore,
    pub flagged: bool,
}

/// Report ordering. Ascending puts the worst match (most suspicious
/// traffic) first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortOrder {
    Ascending,
    Descending,
}

fn split_key(record: &QueryRecord, mode: SplitMode) -> String {
    match mode {
        SplitMode::None => "all".to_string(),
        SplitMode::ByIp => record.client_ip.to_string(),
        SplitMode::ByDomain => escape_bytes(record.name.registered_domain()),
        SplitMode::ByIpAndDomain => format!(
            "{}|{}",
            record.client_ip,
            escape_bytes(record.name.registered_domain())
        ),
    }
}

/// Group records by the active split key, preserving seq order within
/// each group. No record is lost or duplicated.
pub fn split(records: &[QueryRecord], mode: SplitMode) -> BTreeMap<String, Vec<QueryRecord>> {
    let mut groups: BTreeMap<String, Vec<QueryRecord>> = BTreeMap::new();
    for record in records {
        groups
            .entry(split_key(record, mode))
            .or_default()
            .push(record.clone());
    }
    groups
}

fn dedup_first(records: Vec<QueryRecord>) -> Vec<QueryRecord> {
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    records
        .into_iter()
        .filter(|r| seen.insert(r.name.normalized().to_vec()))
        .collect()
}

/// One segment covering a whole group: the unwindowed mode.
pub fn whole_group(key: &str, records: Vec<QueryRecord>, dedup: bool) -> Segment {
    let records = if dedup { dedup_first(records) } else { records };
    Segment {
        key: key.to_string(),
        window_index: 0,
        records,
    }
}

/// Chunk one group into fixed windows of unique names.
///
/// With `dedup` set the group is first reduced to the first occurrence
/// of each normalized name, so a window of 100 covers 100 *unique*
/// names. A trailing partial window survives only if it holds at least
/// max(2, size/10) names; smaller tails make meaningless tables.
pub fn window(key: &str, records: Vec<QueryRecord>, size: usize, dedup: bool) -> Vec<Segment> {
    assert!(size >= 1, "window size must be at least 1");
    let records = if dedup { dedup_first(records) } else { records };
    let min_tail = 2.max(size / 10);
    let mut segments = Vec::new();
    for (i, chunk) in records.chunks(size).enumerate() {
        if chunk.len() < size && chunk.len() < min_tail {
            break;
        }
        segments.push(Segment {
            key: key.to_string(),
            window_index: i as u32,
            records: chunk.to_vec(),
        });
    }
    segments
}

/// Score each segment against the fingerprint. Windows that yield no
/// n-grams (every label shorter than n) are skipped and counted rather
/// than failing the run.
pub fn score_segments(
    segments: &[Segment],
    fingerprint: &Fingerprint,
    params: &MatchParams,
    threshold: f64,
    n: u8,
    scope: Scope,
) -> Result<(Vec<ScoredSegment>, usize)> {
    let mut scored = Vec::with_capacity(segments.len());
    let mut skipped = 0;
    for segment in segments {
        // windows already hold unique names; no second dedup needed
        let table = match NgramTable::from_names(
            segment.records.iter().map(|r| &r.name),
            n,
            false,
            scope,
        ) {
            Ok(table) => table,
            Err(Error::EmptyTable) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let score = total_match(&table, fingerprint, params)?;
        scored.push(ScoredSegment {
            key: segment.key.clone(),
            window_index: segment.window_index,
            flagged: score.total_match < threshold,
            score,
        });
    }
    Ok((scored, skipped))
}

/// Order scored segments by total match; ties break on (key,
/// window_index) so output is deterministic.
pub fn rank_results(mut scored: Vec<ScoredSegment>, order: SortOrder) -> Vec<ScoredSegment> {
    scored.sort_by(|a, b| {
        let by_score = a.score.total_match.total_cmp(&b.score.total_match);
        let by_score = match order {
            SortOrder::Ascending => by_score,
            SortOrder::Descending => by_score.reverse(),
        };
        by_score
            .then_with(|| a.key.cmp(&b.key))
            .then_with(|| a.window_index.cmp(&b.window_index))
    });
    scored
}
