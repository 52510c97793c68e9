//! Segmentation of recordings into fixed-length trials.

use crate::error::{CoreError, Result};
use crate::recording::Recording;

/// Fixed-length trial segments cut from a recording, in temporal order.
///
/// `epochs[e][ch]` is the sample slice of channel `ch` in epoch `e`; every
/// epoch holds exactly `round(epoch_len_s * fs)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSet {
    pub epochs: Vec<Vec<Vec<f64>>>,
    pub epoch_len_s: f64,
    pub fs: f64,
    pub channels: Vec<String>,
    pub condition: String,
}

impl EpochSet {
    pub fn n_epochs(&self) -> usize {
        self.epochs.len()
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn samples_per_epoch(&self) -> usize {
        self.epochs.first().map_or(0, |e| e[0].len())
    }

    /// A set with the epochs of `self` followed by the epochs of `other`.
    /// Shapes, rate and channel labels must agree.
    pub fn concat(&self, other: &EpochSet) -> Result<EpochSet> {
        if self.channels != other.channels
            || self.fs != other.fs
            || self.samples_per_epoch() != other.samples_per_epoch()
        {
            return Err(CoreError::Input("cannot concatenate mismatched epoch sets".into()));
        }
        let mut epochs = self.epochs.clone();
        epochs.extend(other.epochs.iter().cloned());
        Ok(EpochSet { epochs, ..self.clone() })
    }
}

/// Cut a recording into epochs of `epoch_len_s` seconds, consecutive windows
/// separated by `epoch_len_s - overlap_s`. The trailing remainder is
/// dropped; samples are copied bit-identically.
pub fn epoch(
    rec: &Recording,
    epoch_len_s: f64,
    overlap_s: f64,
    condition: &str,
) -> Result<EpochSet> {
    if !(epoch_len_s > 0.0) {
        return Err(CoreError::Config(format!(
            "epoch length must be positive, got {epoch_len_s}"
        )));
    }
    if overlap_s < 0.0 || overlap_s >= epoch_len_s {
        return Err(CoreError::Config(format!(
            "overlap must satisfy 0 <= overlap < epoch length, got {overlap_s}"
        )));
    }
    let len = (epoch_len_s * rec.fs()).round() as usize;
    let overlap = (overlap_s * rec.fs()).round() as usize;
    if len == 0 {
        return Err(CoreError::Config("epoch length rounds to zero samples".into()));
    }
    let n = rec.n_samples();
    if len > n {
        return Err(CoreError::Input(format!(
            "recording of {n} samples is shorter than one {len}-sample epoch"
        )));
    }
    let hop = len - overlap;
    let n_epochs = (n - len) / hop + 1;

    let mut epochs = Vec::with_capacity(n_epochs);
    for e in 0..n_epochs {
        let start = e * hop;
        let segment: Vec<Vec<f64>> = rec
            .data()
            .iter()
            .map(|ch| ch[start..start + len].to_vec())
            .collect();
        epochs.push(segment);
    }

    Ok(EpochSet {
        epochs,
        epoch_len_s,
        fs: rec.fs(),
        channels: rec.channels().to_vec(),
        condition: condition.to_string(),
    })
}
