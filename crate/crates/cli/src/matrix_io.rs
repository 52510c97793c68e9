//! Connectivity and difference matrices as labeled CSV grids.
//!
//! The first line is a `#` metadata comment carrying kind, metric, band and
//! condition(s); the grid itself has the channel labels as first row and
//! first column.

use crate::error::{PipelineError, PipelineResult};
use eegsync_core::bands::BandDefinition;
use eegsync_core::connectivity::{ConnectivityMatrix, DifferenceMatrix, MetricKind};
use std::path::Path;

/// Either matrix flavor, as read back from disk.
#[derive(Debug, Clone)]
pub enum MatrixFile {
    Connectivity(ConnectivityMatrix),
    Difference(DifferenceMatrix),
}

impl MatrixFile {
    pub fn channels(&self) -> &[String] {
        match self {
            MatrixFile::Connectivity(m) => &m.channels,
            MatrixFile::Difference(m) => &m.channels,
        }
    }

    pub fn values(&self) -> &[Vec<f64>] {
        match self {
            MatrixFile::Connectivity(m) => &m.values,
            MatrixFile::Difference(m) => &m.values,
        }
    }
}

fn grid(channels: &[String], values: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push(',');
    out.push_str(&channels.join(","));
    out.push('\n');
    for (label, row) in channels.iter().zip(values) {
        out.push_str(label);
        for v in row {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Serialize a connectivity matrix to CSV text.
pub fn connectivity_matrix_csv(m: &ConnectivityMatrix) -> String {
    format!(
        "# kind=connectivity metric={} band={} lo_hz={} hi_hz={} condition={}\n{}",
        m.metric,
        m.band.name,
        m.band.lo_hz,
        m.band.hi_hz,
        m.condition,
        grid(&m.channels, &m.values)
    )
}

/// Serialize a difference matrix to CSV text.
pub fn difference_matrix_csv(m: &DifferenceMatrix) -> String {
    format!(
        "# kind=difference metric={} band={} lo_hz={} hi_hz={} condition_a={} condition_b={}\n{}",
        m.metric,
        m.band.name,
        m.band.lo_hz,
        m.band.hi_hz,
        m.condition_a,
        m.condition_b,
        grid(&m.channels, &m.values)
    )
}

/// Write either matrix flavor to `path`.
pub fn save_matrix(matrix: &MatrixFile, path: &Path) -> PipelineResult<()> {
    let text = match matrix {
        MatrixFile::Connectivity(m) => connectivity_matrix_csv(m),
        MatrixFile::Difference(m) => difference_matrix_csv(m),
    };
    std::fs::write(path, text)
        .map_err(|e| PipelineError::new("write", format!("{}: {e}", path.display())))
}

fn parse_meta(line: &str, path: &Path) -> PipelineResult<std::collections::BTreeMap<String, String>> {
    let body = line.trim_start_matches('#').trim();
    let mut map = std::collections::BTreeMap::new();
    for token in body.split_whitespace() {
        let (k, v) = token.split_once('=').ok_or_else(|| {
            PipelineError::new(
                "load",
                format!("{}: malformed metadata token '{token}'", path.display()),
            )
        })?;
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

/// Read a matrix CSV written by [`save_matrix`].
pub fn load_matrix(path: &Path) -> PipelineResult<MatrixFile> {
    let fail = |msg: String| PipelineError::new("load", format!("{}: {msg}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
    let mut lines = text.lines();
    let meta_line = lines.next().ok_or_else(|| fail("empty file".into()))?;
    if !meta_line.starts_with('#') {
        return Err(fail("missing '#' metadata line".into()));
    }
    let meta = parse_meta(meta_line, path)?;
    let get = |key: &str| -> PipelineResult<&String> {
        meta.get(key).ok_or_else(|| fail(format!("metadata key '{key}' missing")))
    };

    let metric: MetricKind = get("metric")?.parse().map_err(|e| fail(format!("{e}")))?;
    let band = BandDefinition::new(
        get("band")?.parse().map_err(|e| fail(format!("{e}")))?,
        get("lo_hz")?.parse().map_err(|_| fail("bad lo_hz".into()))?,
        get("hi_hz")?.parse().map_err(|_| fail("bad hi_hz".into()))?,
    )
    .map_err(|e| fail(e.to_string()))?;

    let header = lines.next().ok_or_else(|| fail("missing header row".into()))?;
    let channels: Vec<String> = header
        .split(',')
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    if channels.is_empty() {
        return Err(fail("header row has no channels".into()));
    }
    let mut values = Vec::with_capacity(channels.len());
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let label = cells.next().unwrap_or_default().trim();
        if i >= channels.len() || label != channels[i] {
            return Err(fail(format!("row label '{label}' does not match header order")));
        }
        let row: Vec<f64> = cells
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| fail(format!("non-numeric cell in row '{label}'")))?;
        if row.len() != channels.len() {
            return Err(fail(format!(
                "row '{label}' has {} cells, expected {}",
                row.len(),
                channels.len()
            )));
        }
        values.push(row);
    }
    if values.len() != channels.len() {
        return Err(fail(format!(
            "{} data rows for {} channels",
            values.len(),
            channels.len()
        )));
    }

    match get("kind")?.as_str() {
        "connectivity" => Ok(MatrixFile::Connectivity(ConnectivityMatrix {
            channels,
            band,
            metric,
            condition: get("condition")?.clone(),
            values,
        })),
        "difference" => Ok(MatrixFile::Difference(DifferenceMatrix {
            channels,
            band,
            metric,
            condition_a: get("condition_a")?.clone(),
            condition_b: get("condition_b")?.clone(),
            values,
        })),
        other => Err(fail(format!("unknown matrix kind '{other}'"))),
    }
}
