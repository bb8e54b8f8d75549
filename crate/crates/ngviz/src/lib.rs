//! DNS tunnel detection through n-gram frequency fingerprints.
//!
//! The library compares character n-gram frequency distributions of
//! observed DNS query names against a fingerprint built from legitimate
//! traffic. Tunnel payloads are high-entropy and flatten the Zipf-like
//! curve that natural domain names follow, which shows up as low match
//! scores and in frequency-by-rank charts.
//!
//! Pipeline: ingest (pcap or domain list) -> split by IP/domain ->
//! window on unique names -> score each window against the fingerprint
//! -> rank and report.

pub mod chart;
pub mod domain;
pub mod error;
pub mod escape;
pub mod ngram;
pub mod pcap;
pub mod report;
pub mod score;
pub mod segment;
pub mod synth;

pub use domain::{Direction, QueryName, QueryRecord, Timestamp};
pub use error::{Error, Result};
pub use ngram::{build_table, extract_ngrams, Fingerprint, NgramTable, Scope};
pub use score::{freq_match, rank_match, total_match, MatchParams, MatchScore};
pub use segment::{rank_results, split, window, ScoredSegment, Segment, SortOrder, SplitMode};

use segment::score_segments;

/// Knobs for one end-to-end analysis run. Defaults follow the CLI
/// defaults: unigrams, dedup on, whole-name scope, split by domain,
/// windows of 100, equal weights, threshold 0.5, worst match first.
/// A window of 0 scores each split group whole, without windowing.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub n: u8,
    pub dedup: bool,
    pub scope: Scope,
    pub split: SplitMode,
    pub window: usize,
    pub params: MatchParams,
    pub threshold: f64,
    pub sort: SortOrder,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            n: 1,
            dedup: true,
            scope: Scope::WholeName,
            split: SplitMode::ByDomain,
            window: 100,
            params: MatchParams::default(),
            threshold: 0.5,
            sort: SortOrder::Ascending,
        }
    }
}

/// Outcome of an analysis run: ranked scored segments plus the number of
/// windows too small or too uniform to build a table from.
#[derive(Debug)]
pub struct AnalysisResult {
    pub segments: Vec<ScoredSegment>,
    pub windows_skipped: usize,
}

impl AnalysisResult {
    /// True when at least one segment fell below the threshold.
    pub fn any_flagged(&self) -> bool {
        self.segments.iter().any(|s| s.flagged)
    }
}

/// Run the full split -> window -> score -> rank pipeline.
pub fn analyze(
    records: &[QueryRecord],
    fingerprint: &Fingerprint,
    cfg: &AnalysisConfig,
) -> Result<AnalysisResult> {
    let groups = split(records, cfg.split);
    let mut segments = Vec::new();
    for (key, group) in groups {
        if cfg.window == 0 {
            segments.push(segment::whole_group(&key, group, cfg.dedup));
        } else {
            segments.extend(window(&key, group, cfg.window, cfg.dedup));
        }
    }
    let (scored, windows_skipped) = score_segments(
        &segments,
        fingerprint,
        &cfg.params,
        cfg.threshold,
        cfg.n,
        cfg.scope,
    )?;
    Ok(AnalysisResult {
        segments: rank_results(scored, cfg.sort),
        windows_skipped,
    })
}
