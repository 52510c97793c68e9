//! Multichannel recordings: the raw unit of ingestion.

use crate::error::{CoreError, Result};

/// A multichannel time series with a sampling rate and channel labels.
///
/// All channels hold the same number of samples (in microvolts), the label
/// set is unique, and `fs > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    channels: Vec<String>,
    data: Vec<Vec<f64>>,
    fs: f64,
}

impl Recording {
    /// Build a recording, validating the type invariants: equal per-channel
    /// sample counts (at least 2), unique labels, positive sampling rate and
    /// finite samples.
    pub fn new(channels: Vec<String>, data: Vec<Vec<f64>>, fs: f64) -> Result<Self> {
        if !(fs > 0.0) || !fs.is_finite() {
            return Err(CoreError::Config(format!(
                "sampling rate must be positive and finite, got {fs}"
            )));
        }
        if channels.is_empty() {
            return Err(CoreError::Input("recording has no channels".into()));
        }
        if channels.len() != data.len() {
            return Err(CoreError::Input(format!(
                "{} channel labels but {} data channels",
                channels.len(),
                data.len()
            )));
        }
        let n = data[0].len();
        if n < 2 {
            return Err(CoreError::Input(format!(
                "recording needs at least 2 samples per channel, got {n}"
            )));
        }
        for (label, ch) in channels.iter().zip(&data) {
            if ch.len() != n {
                return Err(CoreError::Input(format!(
                    "channel '{label}' has {} samples, expected {n}",
                    ch.len()
                )));
            }
            if let Some(bad) = ch.iter().find(|v| !v.is_finite()) {
                return Err(CoreError::Input(format!(
                    "channel '{label}' contains a non-finite sample ({bad})"
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for label in &channels {
            if !seen.insert(label.as_str()) {
                return Err(CoreError::Input(format!("duplicate channel label '{label}'")));
            }
        }
        Ok(Self { channels, data, fs })
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn n_samples(&self) -> usize {
        self.data[0].len()
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / self.fs
    }

    /// Samples of one channel by label.
    pub fn channel(&self, label: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .position(|c| c == label)
            .map(|i| self.data[i].as_slice())
    }

    /// A copy of this recording without the listed channels. Labels absent
    /// from the recording are ignored.
    pub fn without_channels(&self, drop: &[String]) -> Result<Recording> {
        let keep: Vec<usize> = (0..self.channels.len())
            .filter(|&i| !drop.contains(&self.channels[i]))
            .collect();
        if keep.is_empty() {
            return Err(CoreError::Input(
                "dropping the listed channels would leave an empty recording".into(),
            ));
        }
        Recording::new(
            keep.iter().map(|&i| self.channels[i].clone()).collect(),
            keep.iter().map(|&i| self.data[i].clone()).collect(),
            self.fs,
        )
    }

    /// Replace the sample data, keeping labels and rate. The new data must
    /// have the same shape.
    pub fn with_data(&self, data: Vec<Vec<f64>>) -> Result<Recording> {
        Recording::new(self.channels.clone(), data, self.fs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec2() -> Recording {
        Recording::new(
            vec!["C3".into(), "C4".into()],
            vec![vec![0.0, 1.0, 2.0], vec![3.0, 4.0, 5.0]],
            100.0,
        )
        .unwrap()
    }

    #[test]
    fn valid_recording() {
        let r = rec2();
        assert_eq!(r.n_channels(), 2);
        assert_eq!(r.n_samples(), 3);
        assert_eq!(r.channel("C4").unwrap(), &[3.0, 4.0, 5.0]);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let err = Recording::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![0.0]],
            100.0,
        )
        .unwrap_err();
        assert!(matches!(err, CoreError::Input(_)));
    }

    #[test]
    fn rejects_duplicate_labels() {
        let err = Recording::new(
            vec!["Cz".into(), "Cz".into()],
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            100.0,
        )
        .unwrap_err();
        assert!(err.to_string().contains("Cz"));
    }

    #[test]
    fn rejects_bad_fs() {
        assert!(Recording::new(vec!["a".into()], vec![vec![0.0, 1.0]], 0.0).is_err());
        assert!(Recording::new(vec!["a".into()], vec![vec![0.0, 1.0]], -1.0).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let err =
            Recording::new(vec!["a".into()], vec![vec![0.0, f64::NAN]], 10.0).unwrap_err();
        assert!(matches!(err, CoreError::Input(_)));
    }

    #[test]
    fn drop_channels() {
        let r = rec2().without_channels(&["C3".to_string()]).unwrap();
        assert_eq!(r.channels(), &["C4".to_string()]);
        assert!(rec2()
            .without_channels(&["C3".to_string(), "C4".to_string()])
            .is_err());
    }
}
