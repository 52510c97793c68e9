//! Recording file formats: a compact binary container and a CSV
//! interoperability path.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       8     magic "EEGREC01"
//! 8       8     sampling rate, f64
//! 16      4     channel count, u32
//! 20      8     samples per channel, u64
//! 28      2     condition label byte length, u16
//! 30      ...   condition label, UTF-8
//!         ...   per channel: u16 label byte length + UTF-8 label
//!         ...   payload: channels x samples f32, channel-major
//! ```
//!
//! The CSV alternative holds the channel labels in the first row and one
//! sample per row thereafter; the sampling rate comes from the caller.

use crate::error::{PipelineError, PipelineResult};
use eegsync_core::recording::Recording;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 8] = b"EEGREC01";

/// A recording plus the condition label stored alongside it.
#[derive(Debug, Clone)]
pub struct LoadedRecording {
    pub recording: Recording,
    pub condition: String,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::new("load", format!("{}: {e}", path.display()))
}

/// Write a recording in the binary container format. Samples are stored as
/// f32.
pub fn save_recording(rec: &Recording, condition: &str, path: &Path) -> PipelineResult<()> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&rec.fs().to_le_bytes());
    buf.extend_from_slice(&(rec.n_channels() as u32).to_le_bytes());
    buf.extend_from_slice(&(rec.n_samples() as u64).to_le_bytes());
    let cond = condition.as_bytes();
    if cond.len() > u16::MAX as usize {
        return Err(PipelineError::new("save", "condition label too long"));
    }
    buf.extend_from_slice(&(cond.len() as u16).to_le_bytes());
    buf.extend_from_slice(cond);
    for label in rec.channels() {
        let bytes = label.as_bytes();
        if bytes.len() > u16::MAX as usize {
            return Err(PipelineError::new("save", format!("label '{label}' too long")));
        }
        buf.extend_from_slice(&(bytes.len() as u16).to_le_bytes());
        buf.extend_from_slice(bytes);
    }
    for channel in rec.data() {
        for &v in channel {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| PipelineError::new("save", format!("{}: {e}", path.display())))?;
    file.write_all(&buf)
        .map_err(|e| PipelineError::new("save", format!("{}: {e}", path.display())))?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> PipelineResult<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(io_err(
                self.path,
                format!(
                    "truncated while reading {what}: need {} bytes, file has {}",
                    self.pos + n,
                    self.bytes.len()
                ),
            ));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u16(&mut self, what: &str) -> PipelineResult<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn string(&mut self, what: &str) -> PipelineResult<String> {
        let len = self.u16(what)? as usize;
        let bytes = self.take(len, what)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| io_err(self.path, format!("{what} is not valid UTF-8")))
    }
}

fn load_binary(bytes: &[u8], path: &Path) -> PipelineResult<LoadedRecording> {
    let mut cur = Cursor { bytes, pos: MAGIC.len(), path };
    let fs = f64::from_le_bytes(cur.take(8, "sampling rate")?.try_into().unwrap());
    let n_channels =
        u32::from_le_bytes(cur.take(4, "channel count")?.try_into().unwrap()) as usize;
    let n_samples =
        u64::from_le_bytes(cur.take(8, "sample count")?.try_into().unwrap()) as usize;
    let condition = cur.string("condition label")?;
    let mut labels = Vec::with_capacity(n_channels);
    for i in 0..n_channels {
        labels.push(cur.string(&format!("label of channel {i}"))?);
    }

    let expected = n_channels
        .checked_mul(n_samples)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| io_err(path, "header describes an impossibly large payload"))?;
    let actual = bytes.len() - cur.pos;
    if actual != expected {
        return Err(io_err(
            path,
            format!(
                "payload length mismatch: header promises {n_channels} x {n_samples} samples \
                 ({expected} bytes), found {actual} bytes"
            ),
        ));
    }

    let mut data = Vec::with_capacity(n_channels);
    for _ in 0..n_channels {
        let mut channel = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            let raw = cur.take(4, "payload")?;
            channel.push(f32::from_le_bytes(raw.try_into().unwrap()) as f64);
        }
        data.push(channel);
    }

    let recording =
        Recording::new(labels, data, fs).map_err(|e| io_err(path, e))?;
    Ok(LoadedRecording { recording, condition })
}

fn load_csv(text: &str, fs: f64, path: &Path) -> PipelineResult<LoadedRecording> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| io_err(path, "empty CSV file"))?;
    let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    {
        let mut seen = std::collections::BTreeSet::new();
        for label in &labels {
            if !seen.insert(label.clone()) {
                return Err(io_err(path, format!("duplicate column label '{label}'")));
            }
        }
    }
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    for (row_idx, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != labels.len() {
            return Err(io_err(
                path,
                format!(
                    "row {} has {} cells, expected {}",
                    row_idx + 2,
                    cells.len(),
                    labels.len()
                ),
            ));
        }
        for (ch, cell) in cells.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                io_err(path, format!("row {}: '{cell}' is not a number", row_idx + 2))
            })?;
            data[ch].push(v);
        }
    }
    let recording = Recording::new(labels, data, fs).map_err(|e| io_err(path, e))?;
    Ok(LoadedRecording { recording, condition: String::new() })
}

/// Load a recording, sniffing the binary container by magic and falling back
/// to CSV. CSV needs `csv_fs`. Channels in `exclusions` are dropped
/// (case-insensitive match).
pub fn load_recording(
    path: &Path,
    csv_fs: Option<f64>,
    exclusions: &[String],
) -> PipelineResult<LoadedRecording> {
    let mut file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|e| io_err(path, e))?;

    let mut loaded = if bytes.len() >= MAGIC.len() && &bytes[..MAGIC.len()] == MAGIC {
        load_binary(&bytes, path)?
    } else {
        let fs = csv_fs.ok_or_else(|| {
            io_err(path, "CSV input needs an explicit sampling rate (fs)")
        })?;
        let text = String::from_utf8(bytes)
            .map_err(|_| io_err(path, "not a recording container and not UTF-8 CSV"))?;
        load_csv(&text, fs, path)?
    };

    let drop: Vec<String> = loaded
        .recording
        .channels()
        .iter()
        .filter(|ch| exclusions.iter().any(|e| e.eq_ignore_ascii_case(ch)))
        .cloned()
        .collect();
    if !drop.is_empty() {
        loaded.recording = loaded
            .recording
            .without_channels(&drop)
            .map_err(|e| io_err(path, e))?;
    }
    Ok(loaded)
}
