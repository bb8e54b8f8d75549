//! Match scores between an input table and a fingerprint.
//!
//! Three scores, each in [0,1]:
//!
//! * `rank_match = ((K - avg(rank diff)) / K)^a` — how far each input
//!   n-gram's rank sits from its rank in the fingerprint. K is the
//!   number of distinct input n-grams. An n-gram absent from the
//!   fingerprint is treated as ranking just past the fingerprint's last
//!   place, which can push the average diff above K; the quotient is
//!   clamped at zero before the exponent.
//! * `freq_match = (sum(pct of fingerprint freq) / K)^b` — compares the
//!   relative frequency at each rank position against the fingerprint's
//!   frequency at the same rank, regardless of which characters hold
//!   it. pct is min/max so it stays in [0,1]; ranks past the
//!   fingerprint's last contribute 0.
//! * `total_match = rank_match * x + freq_match * y`, with x + y = 1.

use crate::error::{Error, Result};
use crate::ngram::{Fingerprint, NgramTable};

/// Rank assigned to input n-grams the fingerprint has never seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingRankPolicy {
    /// One past the fingerprint's last rank: worse than last place but
    /// finitely penalized.
    #[default]
    FingerprintSizePlusOne,
}

/// Exponents and weights for the match formulas.
#[derive(Debug, Clone, Copy)]
pub struct MatchParams {
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub y: f64,
    pub missing_rank_policy: MissingRankPolicy,
}

impl MatchParams {
    pub fn new(a: f64, b: f64, x: f64, y: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) || !(b.is_finite() && b >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "exponents must be finite and nonnegative (a={a}, b={b})"
            )));
        }
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) || (x + y - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "weights must satisfy x + y = 1 with x, y in [0,1] (x={x}, y={y})"
            )));
        }
        Ok(MatchParams {
            a,
            b,
            x,
            y,
            missing_rank_policy: MissingRankPolicy::FingerprintSizePlusOne,
        })
    }
}

impl Default for MatchParams {
    /// a = b = 1, x = y = 0.5: the simplest members of the family.
    fn default() -> Self {
        MatchParams::new(1.0, 1.0, 0.5, 0.5).unwrap()
    }
}

/// The (rank_match, freq_match, total_match) triple for one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchScore {
    pub rank_match: f64,
    pub freq_match: f64,
    pub total_match: f64,
    pub k_input: usize,
    pub k_fingerprint: usize,
}

fn check(input: &NgramTable, fp: &Fingerprint) -> Result<()> {
    if input.order() != fp.table.order() {
        return Err(Error::OrderMismatch {
            input: input.order(),
            fingerprint: fp.table.order(),
        });
    }
    if input.k() == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Average rank displacement score.
pub fn rank_match(input: &NgramTable, fp: &Fingerprint, params: &MatchParams) -> Result<f64> {
    check(input, fp)?;
    let MissingRankPolicy::FingerprintSizePlusOne = params.missing_rank_policy;
    let missing_rank = (fp.table.k() + 1) as f64;
    let mut diff_sum = 0.0;
    for (i, (gram, _)) in input.ranking().iter().enumerate() {
        let input_rank = (i + 1) as f64;
        let fp_rank = fp
            .table
            .rank_of(gram)
            .map(f64::from)
            .unwrap_or(missing_rank);
        diff_sum += (input_rank - fp_rank).abs();
    }
    let k = input.k() as f64;
    let avg_diff = diff_sum / k;
    let base = ((k - avg_diff) / k).max(0.0);
    Ok(base.powf(params.a))
}

/// Rank-positional frequency similarity score.
pub fn freq_match(input: &NgramTable, fp: &Fingerprint, params: &MatchParams) -> Result<f64> {
    check(input, fp)?;
    let k = input.k();
    let mut pct_sum = 0.0;
    for rank in 1..=k {
        let f_in = input.freq_at_rank(rank).expect("rank within input table");
        let f_fp = fp.table.freq_at_rank(rank).unwrap_or(0.0);
        if f_fp > 0.0 {
            pct_sum += f_in.min(f_fp) / f_in.max(f_fp);
        }
    }
    Ok((pct_sum / k as f64).powf(params.b))
}

/// Weighted combination of the two scores.
pub fn total_match(input: &NgramTable, fp: &Fingerprint, params: &MatchParams) -> Result<MatchScore> {
    let rank = rank_match(input, fp, params)?;
    let freq = freq_match(input, fp, params)?;
    Ok(MatchScore {
        rank_match: rank,
        freq_match: freq,
        total_match: rank * params.x + freq * params.y,
        k_input: input.k(),
        k_fingerprint: fp.table.k(),
    })
}
