//! Deterministic synthetic recordings with known ground-truth coupling.
//!
//! Coupled channels share a carrier with a fixed phase lag; the remainder of
//! a partially-coupled channel is independent noise matched to the forgone
//! carrier amplitude, so phase metrics fall back to chance as the coupling
//! strength drops. Uncoupled channels are independent noise. Every random
//! draw comes from a per-channel, per-pair or per-group ChaCha stream, so
//! identical seeds give bit-identical output regardless of evaluation order.

use crate::epoch::{epoch, EpochSet};
use crate::error::{CoreError, Result};
use crate::montage::standard_128_labels;
use crate::recording::Recording;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

const PAIR_STREAM_BASE: u64 = 1 << 32;
const GROUP_STREAM_BASE: u64 = 1 << 33;

/// One coupled channel pair: `channel_b` carries `strength` parts of
/// `channel_a`'s carrier, delayed by `lag_rad`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPair {
    pub channel_a: usize,
    pub channel_b: usize,
    pub carrier_hz: f64,
    pub lag_rad: f64,
    /// Mixing weight in `[0, 1]`: 1 is a pure lagged copy, 0 fully
    /// independent.
    pub strength: f64,
}

/// Ground-truth layout of a synthetic recording.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    pub pairs: Vec<CoupledPair>,
    /// Standard deviation of the white noise added to every channel.
    pub noise_sigma: f64,
    /// Channel groups receiving one shared zero-lag source each (a
    /// volume-conduction surrogate).
    pub common_source_groups: Vec<Vec<usize>>,
    pub seed: u64,
}

fn channel_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn white(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// RMS of a unit-amplitude tone; the independent mixture component is white
/// noise scaled to this, keeping channel power comparable across strengths.
const TONE_RMS: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn validate(spec: &CouplingSpec, n_channels: usize, fs: f64) -> Result<()> {
    for (idx, pair) in spec.pairs.iter().enumerate() {
        if pair.channel_a >= n_channels || pair.channel_b >= n_channels {
            return Err(CoreError::Config(format!(
                "pair {idx}: channel index out of range ({}, {}) with {n_channels} channels",
                pair.channel_a, pair.channel_b
            )));
        }
        if pair.channel_a == pair.channel_b {
            return Err(CoreError::Config(format!(
                "pair {idx}: a channel cannot couple to itself"
            )));
        }
        if !(pair.carrier_hz > 0.0 && pair.carrier_hz < fs / 2.0) {
            return Err(CoreError::Config(format!(
                "pair {idx}: carrier {} Hz outside (0, fs/2)",
                pair.carrier_hz
            )));
        }
        if !(0.0..=1.0).contains(&pair.strength) {
            return Err(CoreError::Config(format!(
                "pair {idx}: coupling strength {} outside [0, 1]",
                pair.strength
            )));
        }
    }
    for (g, group) in spec.common_source_groups.iter().enumerate() {
        for &ch in group {
            if ch >= n_channels {
                return Err(CoreError::Config(format!(
                    "common source group {g}: channel index {ch} out of range"
                )));
            }
        }
    }
    if !(spec.noise_sigma >= 0.0) {
        return Err(CoreError::Config(format!(
            "noise sigma must be >= 0, got {}",
            spec.noise_sigma
        )));
    }
    Ok(())
}

/// Generate a synthetic recording with the first `n_channels` labels of the
/// shipped 128-channel montage (synthetic `S<i>` labels beyond that).
pub fn generate(
    spec: &CouplingSpec,
    n_channels: usize,
    fs: f64,
    duration_s: f64,
) -> Result<Recording> {
    let standard = standard_128_labels();
    let labels: Vec<String> = (0..n_channels)
        .map(|i| standard.get(i).cloned().unwrap_or_else(|| format!("S{i}")))
        .collect();
    generate_labeled(spec, &labels, fs, duration_s)
}

/// Generate a synthetic recording with explicit channel labels.
pub fn generate_labeled(
    spec: &CouplingSpec,
    labels: &[String],
    fs: f64,
    duration_s: f64,
) -> Result<Recording> {
    let n_channels = labels.len();
    if n_channels == 0 {
        return Err(CoreError::Config("at least one channel required".into()));
    }
    if !(fs > 0.0) || !(duration_s > 0.0) {
        return Err(CoreError::Config(format!(
            "fs and duration must be positive, got fs={fs}, duration={duration_s}"
        )));
    }
    let n = (duration_s * fs).round() as usize;
    if n < 2 {
        return Err(CoreError::Config("duration rounds to fewer than 2 samples".into()));
    }
    validate(spec, n_channels, fs)?;

    let mut data = vec![vec![0.0f64; n]; n_channels];

    for (idx, pair) in spec.pairs.iter().enumerate() {
        let mut rng = channel_rng(spec.seed, PAIR_STREAM_BASE + idx as u64);
        let phase0: f64 = rng.gen_range(-PI..PI);
        let w = 2.0 * PI * pair.carrier_hz / fs;
        for (k, v) in data[pair.channel_a].iter_mut().enumerate() {
            *v += (w * k as f64 + phase0).cos();
        }
        let coupled_phase = phase0 - pair.lag_rad;
        {
            let ch_b = &mut data[pair.channel_b];
            for (k, v) in ch_b.iter_mut().enumerate() {
                *v += pair.strength * (w * k as f64 + coupled_phase).cos();
            }
        }
        if pair.strength < 1.0 {
            let independent = white(&mut rng, n);
            let weight = (1.0 - pair.strength) * TONE_RMS;
            let ch_b = &mut data[pair.channel_b];
            for (k, v) in ch_b.iter_mut().enumerate() {
                *v += weight * independent[k];
            }
        }
    }

    for (g, group) in spec.common_source_groups.iter().enumerate() {
        let mut rng = channel_rng(spec.seed, GROUP_STREAM_BASE + g as u64);
        let source = white(&mut rng, n);
        for &ch in group {
            for (k, v) in data[ch].iter_mut().enumerate() {
                *v += source[k];
            }
        }
    }

    if spec.noise_sigma > 0.0 {
        for (ch, samples) in data.iter_mut().enumerate() {
            let mut rng = channel_rng(spec.seed, ch as u64);
            for v in samples.iter_mut() {
                *v += spec.noise_sigma * rng.sample::<f64, _>(StandardNormal);
            }
        }
    }

    Recording::new(labels.to_vec(), data, fs)
}

/// Shared layout of a two-condition synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionLayout {
    pub labels: Vec<String>,
    pub fs: f64,
    pub duration_s: f64,
    pub epoch_len_s: f64,
}

/// Generate two labeled epoch sets differing only in their coupling specs,
/// ready for condition differencing.
pub fn generate_condition_pair(
    spec_a: &CouplingSpec,
    spec_b: &CouplingSpec,
    layout: &ConditionLayout,
    condition_a: &str,
    condition_b: &str,
) -> Result<(EpochSet, EpochSet)> {
    if layout.duration_s + 1e-12 < layout.epoch_len_s {
        return Err(CoreError::Config(format!(
            "duration {} s is shorter than one {} s epoch",
            layout.duration_s, layout.epoch_len_s
        )));
    }
    let rec_a = generate_labeled(spec_a, &layout.labels, layout.fs, layout.duration_s)?;
    let rec_b = generate_labeled(spec_b, &layout.labels, layout.fs, layout.duration_s)?;
    Ok((
        epoch(&rec_a, layout.epoch_len_s, 0.0, condition_a)?,
        epoch(&rec_b, layout.epoch_len_s, 0.0, condition_b)?,
    ))
}
