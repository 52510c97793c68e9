//! Short-time Fourier analysis and Welch cross-spectral estimation.

use crate::bands::BandDefinition;
use crate::error::{CoreError, Result};
use crate::hilbert::plan_forward;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Analysis window shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowFn {
    Rectangular,
    Hann,
}

impl WindowFn {
    /// Window coefficients (periodic form, the spectral-analysis
    /// convention).
    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        match self {
            WindowFn::Rectangular => vec![1.0; n],
            WindowFn::Hann => (0..n)
                .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos()))
                .collect(),
        }
    }
}

/// Time-frequency power map: one row of one-sided spectral power per window
/// position.
///
/// Power is energy-normalized: with a rectangular window covering the whole
/// signal, the row sum equals the signal's sum of squares (Parseval).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// Window-center timestamps in seconds.
    pub times: Vec<f64>,
    /// One-sided frequency bins in Hz, strictly increasing, bounded by fs/2.
    pub freqs: Vec<f64>,
    /// `power[w][k]` >= 0 for window `w`, frequency bin `k`.
    pub power: Vec<Vec<f64>>,
}

fn one_sided_freqs(n: usize, fs: f64) -> Vec<f64> {
    (0..=n / 2).map(|k| k as f64 * fs / n as f64).collect()
}

/// One-sided energy-normalized power of one windowed frame.
fn frame_power(frame: &[Complex64]) -> Vec<f64> {
    let n = frame.len();
    let n_bins = n / 2 + 1;
    let scale = 1.0 / n as f64;
    (0..n_bins)
        .map(|k| {
            let doubled = k != 0 && !(n % 2 == 0 && k == n / 2);
            let c = if doubled { 2.0 } else { 1.0 };
            c * frame[k].norm_sqr() * scale
        })
        .collect()
}

/// Short-time Fourier transform of a single-channel epoch.
pub fn stft(
    x: &[f64],
    fs: f64,
    window_len: usize,
    hop: usize,
    window: WindowFn,
) -> Result<Spectrogram> {
    if !(fs > 0.0) {
        return Err(CoreError::Config(format!("fs must be positive, got {fs}")));
    }
    if window_len == 0 || hop == 0 {
        return Err(CoreError::Config("window length and hop must be at least 1".into()));
    }
    if window_len > x.len() {
        return Err(CoreError::Input(format!(
            "window of {window_len} samples exceeds the {}-sample epoch",
            x.len()
        )));
    }

    let coeffs = window.coefficients(window_len);
    let fft = plan_forward(window_len);
    let mut times = Vec::new();
    let mut power = Vec::new();
    let mut start = 0;
    while start + window_len <= x.len() {
        let mut frame: Vec<Complex64> = x[start..start + window_len]
            .iter()
            .zip(&coeffs)
            .map(|(&v, &w)| Complex64::new(v * w, 0.0))
            .collect();
        fft.process(&mut frame);
        power.push(frame_power(&frame));
        times.push((start as f64 + window_len as f64 / 2.0) / fs);
        start += hop;
    }

    Ok(Spectrogram { times, freqs: one_sided_freqs(window_len, fs), power })
}

/// Per-window band power: entry `(w, b)` sums spectrogram power over bins
/// with `lo <= f < hi`.
pub fn band_power(spec: &Spectrogram, bands: &[BandDefinition]) -> Result<Vec<Vec<f64>>> {
    if bands.is_empty() {
        return Err(CoreError::Config("band list is empty".into()));
    }
    let mut bin_sets: Vec<Vec<usize>> = Vec::with_capacity(bands.len());
    for band in bands {
        let bins: Vec<usize> = spec
            .freqs
            .iter()
            .enumerate()
            .filter(|(_, &f)| band.contains(f))
            .map(|(k, _)| k)
            .collect();
        if bins.is_empty() {
            return Err(CoreError::Config(format!(
                "band {} [{}, {}) Hz contains no frequency bins",
                band.name, band.lo_hz, band.hi_hz
            )));
        }
        bin_sets.push(bins);
    }

    Ok(spec
        .power
        .iter()
        .map(|row| {
            bin_sets
                .iter()
                .map(|bins| bins.iter().map(|&k| row[k]).sum())
                .collect()
        })
        .collect())
}

/// Averaged cross- and auto-spectral densities of two equal-length epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSpectrum {
    pub freqs: Vec<f64>,
    pub sxy: Vec<Complex64>,
    pub sxx: Vec<f64>,
    pub syy: Vec<f64>,
}

impl CrossSpectrum {
    pub fn n_bins(&self) -> usize {
        self.freqs.len()
    }
}

/// Welch-style averaged modified periodograms.
///
/// `seg_overlap` is in samples. The cross term averages `conj(X) * Y` over
/// segments, so `|sxy|^2 <= sxx * syy` holds bin-wise (Cauchy-Schwarz).
/// Fewer than two segments would make coherence identically 1, so that case
/// is an estimation error.
pub fn cross_spectral_density(
    x: &[f64],
    y: &[f64],
    fs: f64,
    seg_len: usize,
    seg_overlap: usize,
    window: WindowFn,
) -> Result<CrossSpectrum> {
    if x.len() != y.len() {
        return Err(CoreError::Input(format!(
            "signals differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if !(fs > 0.0) {
        return Err(CoreError::Config(format!("fs must be positive, got {fs}")));
    }
    if seg_len < 2 {
        return Err(CoreError::Config("segment length must be at least 2".into()));
    }
    if seg_overlap >= seg_len {
        return Err(CoreError::Config(format!(
            "segment overlap ({seg_overlap}) must be smaller than segment length ({seg_len})"
        )));
    }
    if seg_len > x.len() {
        return Err(CoreError::Input(format!(
            "segment of {seg_len} samples exceeds the {}-sample signal",
            x.len()
        )));
    }
    let hop = seg_len - seg_overlap;
    let n_segments = (x.len() - seg_len) / hop + 1;
    if n_segments < 2 {
        return Err(CoreError::Estimation(format!(
            "averaged-periodogram estimation needs at least 2 segments, got {n_segments}"
        )));
    }

    let coeffs = window.coefficients(seg_len);
    let win_power: f64 = coeffs.iter().map(|w| w * w).sum();
    let norm = 1.0 / (fs * win_power);
    let fft = plan_forward(seg_len);
    let n_bins = seg_len / 2 + 1;

    let mut sxy = vec![Complex64::new(0.0, 0.0); n_bins];
    let mut sxx = vec![0.0; n_bins];
    let mut syy = vec![0.0; n_bins];
    let mut fx = vec![Complex64::new(0.0, 0.0); seg_len];
    let mut fy = vec![Complex64::new(0.0, 0.0); seg_len];
    for s in 0..n_segments {
        let start = s * hop;
        for k in 0..seg_len {
            fx[k] = Complex64::new(x[start + k] * coeffs[k], 0.0);
            fy[k] = Complex64::new(y[start + k] * coeffs[k], 0.0);
        }
        fft.process(&mut fx);
        fft.process(&mut fy);
        for k in 0..n_bins {
            sxy[k] += fx[k].conj() * fy[k];
            sxx[k] += fx[k].norm_sqr();
            syy[k] += fy[k].norm_sqr();
        }
    }
    let seg_scale = norm / n_segments as f64;
    for k in 0..n_bins {
        sxy[k] *= seg_scale;
        sxx[k] *= seg_scale;
        syy[k] *= seg_scale;
    }

    Ok(CrossSpectrum { freqs: one_sided_freqs(seg_len, fs), sxy, sxx, syy })
}

fn is_five_smooth(mut v: usize) -> bool {
    for p in [2, 3, 5] {
        while v % p == 0 {
            v /= p;
        }
    }
    v == 1
}

/// Segment length giving at least `n_segments` windows at the requested
/// fractional overlap within a signal of `n` samples. The length is rounded
/// down to a 5-smooth number so the segment FFTs stay on fast mixed-radix
/// paths.
pub fn welch_segment_len(n: usize, n_segments: usize, overlap: f64) -> Result<usize> {
    if n_segments < 2 {
        return Err(CoreError::Config("Welch estimation needs at least 2 segments".into()));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(CoreError::Config(format!(
            "Welch overlap fraction must be in [0, 1), got {overlap}"
        )));
    }
    let mut seg = (n as f64 / (1.0 + (n_segments - 1) as f64 * (1.0 - overlap))).floor() as usize;
    while seg >= 2 {
        let hop = seg - (seg as f64 * overlap).floor() as usize;
        if is_five_smooth(seg) && hop >= 1 && seg + (n_segments - 1) * hop <= n {
            return Ok(seg);
        }
        seg -= 1;
    }
    Err(CoreError::Input(format!(
        "cannot fit {n_segments} segments at overlap {overlap} into {n} samples"
    )))
}
