//! Multichannel EEG functional-connectivity toolkit.
//!
//! The crate covers the full analysis path from raw multichannel recordings
//! to region-level connectivity tables:
//!
//! - [`filter`]: zero-phase Butterworth band-pass and IIR notch filtering
//! - [`epoch`]: segmentation into fixed-length trials
//! - [`hilbert`]: analytic signal and instantaneous phase
//! - [`spectral`]: STFT band power and Welch cross-spectral densities
//! - [`connectivity`]: PLV, PLI and magnitude-squared coherence matrices
//! - [`montage`]: 10-5 electrode parsing and cortical region mapping
//! - [`aggregate`]: region-pair connection counts and mean weights
//! - [`synth`]: seeded coupled-oscillator recordings with known ground truth

pub mod aggregate;
pub mod bands;
pub mod connectivity;
pub mod epoch;
pub mod error;
pub mod filter;
pub mod hilbert;
pub mod montage;
pub mod recording;
pub mod spectral;
pub mod synth;

pub use aggregate::{band_sweep, region_pair_summary, BandSweepResult, RegionPairSummary};
pub use bands::{canonical_bands, BandDefinition, BandName};
pub use connectivity::{
    coherence_band, condition_difference, connectivity_matrices, connectivity_matrix, pli, plv,
    top_pairs, ConnectivityMatrix, ConnectivityParams, DifferenceMatrix, MetricKind, RankSign,
};
pub use epoch::{epoch, EpochSet};
pub use error::{CoreError, Result};
pub use filter::{apply_bandpass, apply_notch, FilterKind, FilterSpec};
pub use hilbert::{analytic_phase, analytic_signal, PhaseSeries};
pub use montage::{
    build_region_map, build_region_map_with, parse_label, region_of, standard_128_labels,
    ElectrodeLabel, Region, RegionMap,
};
pub use recording::Recording;
pub use spectral::{
    band_power, cross_spectral_density, stft, CrossSpectrum, Spectrogram, WindowFn,
};
pub use synth::{generate, generate_condition_pair, ConditionLayout, CoupledPair, CouplingSpec};
