//! Circular connectivity graphs as standalone SVG.
//!
//! Channels sit on a circle grouped by cortical region (fixed
//! anterior-to-posterior order, labels sorted within a region); the
//! strongest pairs are drawn as chords through the center with opacity
//! proportional to the absolute value. The output is a pure function of the
//! inputs, byte for byte.

use crate::error::{PipelineError, PipelineResult};
use crate::matrix_io::MatrixFile;
use eegsync_core::montage::{Region, RegionMap};
use std::fmt::Write as _;

const SIZE: f64 = 820.0;
const CENTER: f64 = SIZE / 2.0;
const NODE_RADIUS: f64 = 330.0;
const LABEL_RADIUS: f64 = 344.0;

fn region_color(region: Region) -> &'static str {
    match region {
        Region::Prefrontal => "#9467bd",
        Region::Frontal => "#1f77b4",
        Region::Central => "#2ca02c",
        Region::Temporal => "#d62728",
        Region::Parietal => "#ff7f0e",
        Region::Occipital => "#8c564b",
    }
}

/// Render a connectivity or difference matrix as a circular chord graph.
/// `top_k` bounds the number of chords; zero-valued pairs are never drawn.
pub fn render_circular(
    matrix: &MatrixFile,
    rm: &RegionMap,
    top_k: usize,
) -> PipelineResult<String> {
    if top_k < 1 {
        return Err(PipelineError::new("render", "top_k must be at least 1"));
    }
    let channels = matrix.channels();
    let values = matrix.values();

    // region lookup for every channel; fail on unmapped ones
    let mut by_region: Vec<(Region, Vec<usize>)> =
        Region::ALL.iter().map(|&r| (r, Vec::new())).collect();
    for (idx, ch) in channels.iter().enumerate() {
        let region = rm.region_for(ch).ok_or_else(|| {
            PipelineError::new("render", format!("channel '{ch}' missing from region map"))
        })?;
        by_region
            .iter_mut()
            .find(|(r, _)| *r == region)
            .expect("all regions present")
            .1
            .push(idx);
    }
    for (_, members) in &mut by_region {
        members.sort_by(|&a, &b| channels[a].cmp(&channels[b]));
    }

    // fixed angular slot per channel, clockwise from the top
    let n = channels.len();
    let mut slot_of = vec![0usize; n];
    let mut ordered: Vec<usize> = Vec::with_capacity(n);
    for (_, members) in &by_region {
        for &idx in members {
            slot_of[idx] = ordered.len();
            ordered.push(idx);
        }
    }
    let angle = |slot: usize| -> (f64, f64) {
        let theta = 2.0 * std::f64::consts::PI * slot as f64 / n as f64
            - std::f64::consts::FRAC_PI_2;
        (theta.cos(), theta.sin())
    };
    let node_xy = |idx: usize| -> (f64, f64) {
        let (c, s) = angle(slot_of[idx]);
        (CENTER + NODE_RADIUS * c, CENTER + NODE_RADIUS * s)
    };

    // strongest pairs by absolute value, ties by label order
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = values[i][j];
            if v != 0.0 && v.is_finite() {
                pairs.push((i, j, v));
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.2.abs()
            .total_cmp(&a.2.abs())
            .then_with(|| channels[a.0].cmp(&channels[b.0]))
            .then_with(|| channels[a.1].cmp(&channels[b.1]))
    });
    pairs.truncate(top_k);
    let max_abs = pairs
        .iter()
        .map(|p| p.2.abs())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" \
         viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"#ffffff\"/>");

    // chords first so nodes draw on top
    for (i, j, v) in &pairs {
        let (x1, y1) = node_xy(*i);
        let (x2, y2) = node_xy(*j);
        let opacity = 0.05 + 0.95 * v.abs() / max_abs;
        let color = if *v >= 0.0 { "#c0392b" } else { "#2980b9" };
        let _ = writeln!(
            svg,
            "<path class=\"chord\" d=\"M {x1:.2} {y1:.2} Q {CENTER:.2} {CENTER:.2} {x2:.2} {y2:.2}\" \
             fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" stroke-opacity=\"{opacity:.4}\"/>"
        );
    }

    let show_labels = n <= 160;
    for &idx in &ordered {
        let (x, y) = node_xy(idx);
        let region = rm.region_for(&channels[idx]).expect("checked above");
        let _ = writeln!(
            svg,
            "<circle class=\"node\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{}\"/>",
            region_color(region)
        );
        if show_labels {
            let (c, s) = angle(slot_of[idx]);
            let lx = CENTER + LABEL_RADIUS * c;
            let ly = CENTER + LABEL_RADIUS * s;
            let anchor = if c >= 0.0 { "start" } else { "end" };
            let _ = writeln!(
                svg,
                "<text x=\"{lx:.2}\" y=\"{ly:.2}\" font-size=\"7\" font-family=\"sans-serif\" \
                 text-anchor=\"{anchor}\" dominant-baseline=\"middle\">{}</text>",
                channels[idx]
            );
        }
    }

    // legend
    for (row, &region) in Region::ALL.iter().enumerate() {
        let y = 16.0 + 16.0 * row as f64;
        let _ = writeln!(
            svg,
            "<rect x=\"10\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{}\"/>",
            y - 9.0,
            region_color(region)
        );
        let _ = writeln!(
            svg,
            "<text x=\"24\" y=\"{y:.2}\" font-size=\"11\" font-family=\"sans-serif\">{region}</text>"
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
