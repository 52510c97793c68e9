//! Region-pair reduction of difference matrices: connection counts and mean
//! weights per band, the table emitted by the pipeline.

use crate::bands::{BandDefinition, BandName};
use crate::connectivity::{
    condition_difference, connectivity_matrices, ConnectivityMatrix, ConnectivityParams,
    DifferenceMatrix, MetricKind,
};
use crate::epoch::EpochSet;
use crate::error::{CoreError, Result};
use crate::montage::{Region, RegionMap};
use std::collections::BTreeMap;

/// One row of the region-pair table: how many channel pairs of a region pair
/// exceeded the counting threshold, and their mean signed weight.
///
/// The pair is stored canonically (`region_a <= region_b` in
/// anterior-to-posterior order); a row with zero connections carries
/// `mean_weight = 0` and the `empty` flag.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPairSummary {
    pub region_a: Region,
    pub region_b: Region,
    pub band: BandName,
    pub metric: MetricKind,
    pub connections: usize,
    pub mean_weight: f64,
    pub threshold: f64,
    pub empty: bool,
}

/// Reduce a difference matrix to one row per unordered region pair.
///
/// A channel pair `(i < j)` counts as a connection of its region pair when
/// `|d.values[i][j]| > threshold`; the mean weight is the signed mean of the
/// surviving values. All 21 region pairs are emitted so the output schema is
/// stable.
pub fn region_pair_summary(
    d: &DifferenceMatrix,
    rm: &RegionMap,
    threshold: f64,
) -> Result<Vec<RegionPairSummary>> {
    if !(threshold >= 0.0) {
        return Err(CoreError::Config(format!(
            "counting threshold must be >= 0, got {threshold}"
        )));
    }
    let regions: Vec<Region> = d
        .channels
        .iter()
        .map(|ch| {
            if rm.is_excluded(ch) {
                return Err(CoreError::Input(format!(
                    "channel '{ch}' is excluded; drop it from the matrix before summarizing"
                )));
            }
            rm.region_for(ch)
                .ok_or_else(|| CoreError::Input(format!("channel '{ch}' missing from region map")))
        })
        .collect::<Result<_>>()?;

    let mut counts: BTreeMap<(Region, Region), (usize, f64)> = BTreeMap::new();
    for ra in Region::ALL {
        for rb in Region::ALL {
            if ra <= rb {
                counts.insert((ra, rb), (0, 0.0));
            }
        }
    }
    let n = d.channels.len();
    for i in 0..n {
        for j in i + 1..n {
            let v = d.values[i][j];
            if v.abs() > threshold {
                let key = if regions[i] <= regions[j] {
                    (regions[i], regions[j])
                } else {
                    (regions[j], regions[i])
                };
                let entry = counts.get_mut(&key).expect("all region pairs present");
                entry.0 += 1;
                entry.1 += v;
            }
        }
    }

    Ok(counts
        .into_iter()
        .map(|((region_a, region_b), (connections, sum))| RegionPairSummary {
            region_a,
            region_b,
            band: d.band.name,
            metric: d.metric,
            connections,
            mean_weight: if connections > 0 { sum / connections as f64 } else { 0.0 },
            threshold,
            empty: connections == 0,
        })
        .collect())
}

/// Full sweep output: per-condition matrices, condition differences and the
/// sorted summary table.
#[derive(Debug, Clone)]
pub struct BandSweepResult {
    pub matrices: Vec<ConnectivityMatrix>,
    pub differences: Vec<DifferenceMatrix>,
    pub summaries: Vec<RegionPairSummary>,
}

/// For every metric and band: connectivity matrices per condition, the
/// difference `condition_a - condition_b`, and its region-pair summary.
/// Summary rows are ordered by metric, then band (as given), then descending
/// connection count.
#[allow(clippy::too_many_arguments)]
pub fn band_sweep(
    epochs_by_condition: &BTreeMap<String, EpochSet>,
    condition_a: &str,
    condition_b: &str,
    metrics: &[MetricKind],
    bands: &[BandDefinition],
    rm: &RegionMap,
    threshold: f64,
    params: &ConnectivityParams,
) -> Result<BandSweepResult> {
    let ep_a = epochs_by_condition
        .get(condition_a)
        .ok_or_else(|| CoreError::Input(format!("missing condition '{condition_a}'")))?;
    let ep_b = epochs_by_condition
        .get(condition_b)
        .ok_or_else(|| CoreError::Input(format!("missing condition '{condition_b}'")))?;
    if bands.is_empty() {
        return Err(CoreError::Config("band list is empty".into()));
    }
    if metrics.is_empty() {
        return Err(CoreError::Config("metric list is empty".into()));
    }

    let mut matrices = Vec::new();
    let mut differences = Vec::new();
    let mut summaries = Vec::new();
    for band in bands {
        let ms_a = connectivity_matrices(ep_a, metrics, band, params)?;
        let ms_b = connectivity_matrices(ep_b, metrics, band, params)?;
        for (ma, mb) in ms_a.iter().zip(&ms_b) {
            let diff = condition_difference(ma, mb)?;
            summaries.extend(region_pair_summary(&diff, rm, threshold)?);
            differences.push(diff);
        }
        matrices.extend(ms_a);
        matrices.extend(ms_b);
    }

    let metric_rank = |m: MetricKind| metrics.iter().position(|&x| x == m).unwrap_or(usize::MAX);
    let band_rank =
        |b: BandName| bands.iter().position(|x| x.name == b).unwrap_or(usize::MAX);
    summaries.sort_by(|x, y| {
        metric_rank(x.metric)
            .cmp(&metric_rank(y.metric))
            .then(band_rank(x.band).cmp(&band_rank(y.band)))
            .then(y.connections.cmp(&x.connections))
            .then(x.region_a.cmp(&y.region_a))
            .then(x.region_b.cmp(&y.region_b))
    });

    Ok(BandSweepResult { matrices, differences, summaries })
}

/// Header of the summary CSV, column order fixed.
pub const SUMMARY_CSV_HEADER: &str =
    "region_a,region_b,band,metric,connections,mean_weight,threshold";

/// Format one summary row for the CSV table.
pub fn summary_csv_row(row: &RegionPairSummary) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        row.region_a,
        row.region_b,
        row.band,
        row.metric,
        row.connections,
        row.mean_weight,
        row.threshold
    )
}

/// The full summary table as CSV text.
pub fn summary_csv(rows: &[RegionPairSummary]) -> String {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&summary_csv_row(row));
        out.push('\n');
    }
    out
}
