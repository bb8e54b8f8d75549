//! Quantitative report rendering: TSV and JSON-lines, byte-deterministic.

use crate::segment::ScoredSegment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    JsonLines,
}

/// One output row per scored segment. Scores render with four decimal
/// places; no timestamps or locale formatting anywhere, so identical
/// inputs always produce identical bytes.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub key: String,
    pub window_index: u32,
    pub k_input: usize,
    pub rank_match: f64,
    pub freq_match: f64,
    pub total_match: f64,
    pub flagged: bool,
}

impl From<&ScoredSegment> for ReportRow {
    fn from(s: &ScoredSegment) -> Self {
        ReportRow {
            key: s.key.clone(),
            window_index: s.window_index,
            k_input: s.score.k_input,
            rank_match: s.score.rank_match,
            freq_match: s.score.freq_match,
            total_match: s.score.total_match,
            flagged: s.flagged,
        }
    }
}

const TSV_HEADER: &str = "key\twindow_index\tk_input\trank_match\tfreq_match\ttotal_match\tflagged";

/// Render rows (already ordered by rank_results) to a byte stream.
pub fn render_report(rows: &[ReportRow], format: ReportFormat) -> Vec<u8> {
    let mut out = String::new();
    match format {
        ReportFormat::Tsv => {
            out.push_str(TSV_HEADER);
            out.push('\n');
            for row in rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}\n",
                    row.key,
                    row.window_index,
                    row.k_input,
                    row.rank_match,
                    row.freq_match,
                    row.total_match,
                    row.flagged
                ));
            }
        }
        ReportFormat::JsonLines => {
            for row in rows {
                // assembled by hand so score fields keep their four
                // decimal places; serde_json handles key escaping
                out.push_str(&format!(
                    "{{\"key\":{},\"window_index\":{},\"k_input\":{},\"rank_match\":{:.4},\"freq_match\":{:.4},\"total_match\":{:.4},\"flagged\":{}}}\n",
                    serde_json::to_string(&row.key).expect("string serialization"),
                    row.window_index,
                    row.k_input,
                    row.rank_match,
                    row.freq_match,
                    row.total_match,
                    row.flagged
                ));
            }
        }
    }
    out.into_bytes()
}
