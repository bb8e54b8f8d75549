//! SVG charts: fingerprint-vs-input frequency-by-rank overlays and the
//! change-in-frequency graph.
//!
//! Rendering is dependency-free and byte-deterministic: fixed geometry,
//! fixed colors, coordinates formatted to two decimals, no timestamps.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::ngram::{Fingerprint, NgramTable};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;

const FP_COLOR: &str = "#4878a8";
const INPUT_COLOR: &str = "#d1495b";
const SPIKE_COLOR: &str = "#e07b00";

/// A delta counts as a spike when it is both large relative to the
/// table (more than three times the median delta) and large in absolute
/// terms (more than half a uniform share, 1/(2K) for a K-entry table).
/// The absolute floor keeps plain sampling noise — whose extreme-rank
/// gaps routinely exceed 3x the median — from registering as spikes.
pub fn spike_indices(deltas: &[f64]) -> Vec<usize> {
    if deltas.is_empty() {
        return Vec::new();
    }
    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    let k = deltas.len() + 1;
    let floor = 1.0 / (2.0 * k as f64);
    deltas
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 3.0 * median && d > floor)
        .map(|(i, _)| i)
        .collect()
}

struct Plot {
    svg: String,
    y_max: f64,
    points: usize,
}

impl Plot {
    fn plot_width() -> f64 {
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    }

    fn plot_height() -> f64 {
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    }

    /// `points` is the number of x positions (1-based series indices),
    /// `y_max` the top of the y scale.
    fn new(title: &str, x_label: &str, y_label: &str, points: usize, y_max: f64) -> Plot {
        let y_max = if y_max > 0.0 { y_max } else { 1e-9 };
        let mut svg = String::new();
        let _ = write!(
            svg,
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" "#,
                r#"viewBox="0 0 {w} {h}">"#,
                "\n"
            ),
            w = WIDTH,
            h = HEIGHT
        );
        let _ = writeln!(
            svg,
            r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            title
        );
        let bottom = HEIGHT - MARGIN_BOTTOM;
        let right = WIDTH - MARGIN_RIGHT;
        let _ = writeln!(
            svg,
            r#"<line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
            MARGIN_LEFT + Self::plot_width() / 2.0,
            HEIGHT - 16.0,
            x_label
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {:.2})">{}</text>"#,
            MARGIN_TOP + Self::plot_height() / 2.0,
            MARGIN_TOP + Self::plot_height() / 2.0,
            y_label
        );
        let mut plot = Plot {
            svg,
            y_max,
            points,
        };
        plot.draw_y_ticks();
        plot.draw_x_ticks();
        plot
    }

    fn x_pos(&self, index_1based: usize) -> f64 {
        if self.points <= 1 {
            return MARGIN_LEFT + Self::plot_width() / 2.0;
        }
        MARGIN_LEFT + (index_1based - 1) as f64 / (self.points - 1) as f64 * Self::plot_width()
    }

    fn y_pos(&self, value: f64) -> f64 {
        MARGIN_TOP + Self::plot_height() * (1.0 - value / self.y_max)
    }

    fn draw_y_ticks(&mut self) {
        for step in 0..=4 {
            let value = self.y_max * step as f64 / 4.0;
            let y = self.y_pos(value);
            let _ = writeln!(
                self.svg,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/>"#,
                MARGIN_LEFT - 6.0
            );
            let _ = writeln!(
                self.svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{value:.4}</text>"#,
                MARGIN_LEFT - 9.0,
                y + 4.0
            );
        }
    }

    fn draw_x_ticks(&mut self) {
        let bottom = HEIGHT - MARGIN_BOTTOM;
        let step = 1.max(self.points / 8);
        let mut ticks: Vec<usize> = (1..=self.points).step_by(step).collect();
        if ticks.last() != Some(&self.points) {
            ticks.push(self.points);
        }
        for tick in ticks {
            let x = self.x_pos(tick);
            let _ = writeln!(
                self.svg,
                r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
                bottom + 6.0
            );
            let _ = writeln!(
                self.svg,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{tick}</text>"#,
                bottom + 20.0
            );
        }
    }

    fn polyline(&mut self, series: &[f64], color: &str) {
        if series.len() < 2 {
            return;
        }
        let points: Vec<String> = series
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{:.2},{:.2}", self.x_pos(i + 1), self.y_pos(*v)))
            .collect();
        let _ = writeln!(
            self.svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
    }

    fn marker(&mut self, index_1based: usize, value: f64, spike: bool) {
        let (radius, color, class) = if spike {
            (4.5, SPIKE_COLOR, r#" class="spike""#)
        } else {
            (2.0, FP_COLOR, "")
        };
        let _ = writeln!(
            self.svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{color}"{class}/>"#,
            self.x_pos(index_1based),
            self.y_pos(value)
        );
    }

    fn legend(&mut self, entries: &[(&str, &str)]) {
        let x = WIDTH - MARGIN_RIGHT - 150.0;
        for (i, (label, color)) in entries.iter().enumerate() {
            let y = MARGIN_TOP + 10.0 + 18.0 * i as f64;
            let _ = writeln!(
                self.svg,
                r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="3"/>"#,
                x + 22.0
            );
            let _ = writeln!(
                self.svg,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{label}</text>"#,
                x + 28.0,
                y + 4.0
            );
        }
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

/// Frequency-by-rank overlay of input vs fingerprint, both series
/// truncated to `top_k` ranks (or to however many ranks exist).
pub fn render_rank_chart(input: &NgramTable, fp: &Fingerprint, top_k: usize) -> Result<String> {
    assert!(top_k >= 1, "top_k must be at least 1");
    if input.k() == 0 || fp.table.k() == 0 {
        return Err(Error::TooFewNgrams(0));
    }
    let shown = top_k.min(input.k().max(fp.table.k()));
    let fp_series: Vec<f64> = (1..=shown.min(fp.table.k()))
        .map(|r| fp.table.freq_at_rank(r).expect("rank in range"))
        .collect();
    let input_series: Vec<f64> = (1..=shown.min(input.k()))
        .map(|r| input.freq_at_rank(r).expect("rank in range"))
        .collect();
    let y_max = fp_series
        .iter()
        .chain(&input_series)
        .fold(0.0f64, |acc, v| acc.max(*v))
        * 1.05;
    let mut plot = Plot::new(
        &format!("n-gram frequency by rank (n={})", input.order()),
        "rank",
        "relative frequency",
        shown,
        y_max,
    );
    plot.polyline(&fp_series, FP_COLOR);
    plot.polyline(&input_series, INPUT_COLOR);
    if fp_series.len() == 1 {
        plot.marker(1, fp_series[0], false);
    }
    if input_series.len() == 1 {
        plot.marker(1, input_series[0], false);
    }
    plot.legend(&[("fingerprint", FP_COLOR), ("input", INPUT_COLOR)]);
    Ok(plot.finish())
}

/// Change-in-frequency graph: the drop from each rank to the next, with
/// spikes drawn larger in a distinct color (class "spike").
pub fn render_delta_chart(table: &NgramTable) -> Result<String> {
    let deltas = table.freq_deltas()?;
    let spikes = spike_indices(&deltas);
    let y_max = deltas.iter().fold(0.0f64, |acc, v| acc.max(*v)) * 1.05;
    let mut plot = Plot::new(
        &format!("change in frequency by rank (n={})", table.order()),
        "rank",
        "frequency drop to next rank",
        deltas.len(),
        y_max,
    );
    plot.polyline(&deltas, FP_COLOR);
    for (i, delta) in deltas.iter().enumerate() {
        plot.marker(i + 1, *delta, spikes.contains(&i));
    }
    plot.legend(&[("delta", FP_COLOR), ("spike", SPIKE_COLOR)]);
    Ok(plot.finish())
}
