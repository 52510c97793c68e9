//! Pipeline configuration: a TOML file with a closed schema. Unknown keys
//! are rejected so a typo cannot silently change the analysis.

use crate::error::{PipelineError, PipelineResult};
use eegsync_core::bands::{BandDefinition, BandName};
use eegsync_core::connectivity::{ConnectivityParams, MetricKind};
use eegsync_core::montage::{standard_128_labels, Region};
use eegsync_core::spectral::WindowFn;
use eegsync_core::synth::{CoupledPair, CouplingSpec};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    /// Counting threshold for region-pair connections.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Base seed for synthetic conditions without their own seed.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Channels removed from analysis; matched case-insensitively. Defaults
    /// to the reference/ground pair.
    #[serde(default = "default_exclusions")]
    pub exclusions: Vec<String>,
    pub conditions: Vec<ConditionConfig>,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default)]
    pub epoch: EpochConfig,
    #[serde(default)]
    pub stft: StftConfig,
    #[serde(default)]
    pub welch: WelchConfig,
    /// Analysis bands; the canonical five when absent.
    #[serde(default = "default_bands")]
    pub bands: Vec<BandConfig>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<String>,
    /// Per-label region overrides applied on top of the prefix rule table.
    #[serde(default)]
    pub region_overrides: BTreeMap<String, String>,
    /// Channel layout shared by synthetic conditions.
    #[serde(default)]
    pub synth: Option<SynthLayoutConfig>,
}

fn default_threshold() -> f64 {
    0.02
}

fn default_exclusions() -> Vec<String> {
    vec!["FCz".to_string(), "FPz".to_string()]
}

fn default_metrics() -> Vec<String> {
    vec!["plv".to_string(), "pli".to_string(), "coh".to_string()]
}

fn default_bands() -> Vec<BandConfig> {
    eegsync_core::bands::canonical_bands()
        .into_iter()
        .map(|b| BandConfig { name: b.name.to_string(), lo_hz: b.lo_hz, hi_hz: b.hi_hz })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionConfig {
    pub name: String,
    /// Recording file (binary or CSV); exclusive with `synth`.
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Sampling rate, required for CSV inputs.
    #[serde(default)]
    pub fs: Option<f64>,
    /// Synthetic source; exclusive with `path`.
    #[serde(default)]
    pub synth: Option<SynthSpecConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpecConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    pub noise_sigma: f64,
    #[serde(default)]
    pub pairs: Vec<SynthPairConfig>,
    #[serde(default)]
    pub common_source_groups: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthPairConfig {
    pub a: String,
    pub b: String,
    pub carrier_hz: f64,
    pub lag_rad: f64,
    pub strength: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    #[serde(default)]
    pub bandpass: BandpassConfig,
    #[serde(default)]
    pub notch: NotchConfig,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { bandpass: BandpassConfig::default(), notch: NotchConfig::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandpassConfig {
    pub low_hz: f64,
    pub high_hz: f64,
    pub order: usize,
}

impl Default for BandpassConfig {
    fn default() -> Self {
        Self { low_hz: 0.5, high_hz: 125.0, order: 4 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NotchConfig {
    pub centers_hz: Vec<f64>,
    pub q: f64,
}

impl Default for NotchConfig {
    fn default() -> Self {
        Self { centers_hz: vec![60.0, 120.0], q: 35.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpochConfig {
    pub length_s: f64,
    pub overlap_s: f64,
}

impl Default for EpochConfig {
    fn default() -> Self {
        Self { length_s: 1.5, overlap_s: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StftConfig {
    pub window_s: f64,
    pub hop_s: f64,
    pub window: String,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self { window_s: 0.25, hop_s: 0.125, window: "hann".to_string() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WelchConfig {
    pub segments: usize,
    pub overlap: f64,
    pub window: String,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self { segments: 8, overlap: 0.5, window: "hann".to_string() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub name: String,
    pub lo_hz: f64,
    pub hi_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthLayoutConfig {
    /// Either the string "standard128" or an explicit label list.
    pub channels: ChannelsConfig,
    pub fs: f64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelsConfig {
    Named(String),
    List(Vec<String>),
}

fn parse_window(name: &str) -> PipelineResult<WindowFn> {
    match name.to_ascii_lowercase().as_str() {
        "hann" => Ok(WindowFn::Hann),
        "rectangular" | "rect" => Ok(WindowFn::Rectangular),
        other => Err(PipelineError::new("config", format!("unknown window '{other}'"))),
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> PipelineResult<Self> {
        let cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| PipelineError::new("config", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> PipelineResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            PipelineError::new("config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_toml(&text)
    }

    /// Full structural validation; runs before any signal processing.
    pub fn validate(&self) -> PipelineResult<()> {
        let fail = |msg: String| Err(PipelineError::new("config", msg));
        if self.conditions.is_empty() {
            return fail("at least one condition is required".into());
        }
        let mut names = std::collections::BTreeSet::new();
        for cond in &self.conditions {
            if !valid_name(&cond.name) {
                return fail(format!(
                    "condition name '{}' must be alphanumeric/underscore/dash",
                    cond.name
                ));
            }
            if !names.insert(cond.name.clone()) {
                return fail(format!("duplicate condition name '{}'", cond.name));
            }
            match (&cond.path, &cond.synth) {
                (Some(_), Some(_)) => {
                    return fail(format!(
                        "condition '{}' sets both path and synth",
                        cond.name
                    ))
                }
                (None, None) => {
                    return fail(format!(
                        "condition '{}' needs an input source (path or synth)",
                        cond.name
                    ))
                }
                _ => {}
            }
            if cond.synth.is_some() && self.synth.is_none() {
                return fail(format!(
                    "condition '{}' is synthetic but the [synth] layout is missing",
                    cond.name
                ));
            }
            if let Some(s) = &cond.synth {
                if s.seed.is_none() && self.seed.is_none() {
                    return fail(format!(
                        "condition '{}' has no seed and no top-level seed is set",
                        cond.name
                    ));
                }
            }
        }
        if self.bands.is_empty() {
            return fail("band list is empty".into());
        }
        for b in &self.bands {
            let name: BandName =
                b.name.parse().map_err(|e| PipelineError::new("config", e))?;
            BandDefinition::new(name, b.lo_hz, b.hi_hz)
                .map_err(|e| PipelineError::new("config", e))?;
        }
        if self.metrics.is_empty() {
            return fail("metric list is empty".into());
        }
        for m in &self.metrics {
            m.parse::<MetricKind>().map_err(|e| PipelineError::new("config", e))?;
        }
        if !(self.threshold >= 0.0) {
            return fail(format!("threshold must be >= 0, got {}", self.threshold));
        }
        if !(self.epoch.length_s > 0.0) || self.epoch.overlap_s < 0.0 {
            return fail("epoch length must be positive and overlap non-negative".into());
        }
        if self.epoch.overlap_s >= self.epoch.length_s {
            return fail("epoch overlap must be smaller than the epoch length".into());
        }
        if !(self.filter.bandpass.low_hz > 0.0)
            || self.filter.bandpass.low_hz >= self.filter.bandpass.high_hz
        {
            return fail("band-pass edges must satisfy 0 < low < high".into());
        }
        if self.filter.bandpass.order == 0 {
            return fail("band-pass order must be at least 1".into());
        }
        if !(self.filter.notch.q > 0.0) {
            return fail("notch q must be positive".into());
        }
        if !(self.stft.window_s > 0.0) || !(self.stft.hop_s > 0.0) {
            return fail("stft window and hop must be positive".into());
        }
        parse_window(&self.stft.window)?;
        if self.welch.segments < 2 {
            return fail("welch needs at least 2 segments".into());
        }
        if !(0.0..1.0).contains(&self.welch.overlap) {
            return fail("welch overlap must be in [0, 1)".into());
        }
        parse_window(&self.welch.window)?;
        for (label, region) in &self.region_overrides {
            region
                .parse::<Region>()
                .map_err(|e| PipelineError::new("config", format!("override {label}: {e}")))?;
        }
        if let Some(layout) = &self.synth {
            if !(layout.fs > 0.0) || !(layout.duration_s > 0.0) {
                return fail("synth layout needs positive fs and duration".into());
            }
            if let ChannelsConfig::List(list) = &layout.channels {
                if list.is_empty() {
                    return fail("synth channel list is empty".into());
                }
            }
            if let ChannelsConfig::Named(name) = &layout.channels {
                if name != "standard128" {
                    return fail(format!(
                        "unknown synth channel set '{name}' (expected \"standard128\" or a list)"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn band_definitions(&self) -> Vec<BandDefinition> {
        self.bands
            .iter()
            .map(|b| BandDefinition::new(b.name.parse().unwrap(), b.lo_hz, b.hi_hz).unwrap())
            .collect()
    }

    pub fn metric_kinds(&self) -> Vec<MetricKind> {
        self.metrics.iter().map(|m| m.parse().unwrap()).collect()
    }

    pub fn connectivity_params(&self) -> ConnectivityParams {
        ConnectivityParams {
            filter_order: self.filter.bandpass.order,
            welch_segments: self.welch.segments,
            welch_overlap: self.welch.overlap,
            window: parse_window(&self.welch.window).unwrap(),
        }
    }

    pub fn stft_window_fn(&self) -> WindowFn {
        parse_window(&self.stft.window).unwrap()
    }

    pub fn region_override_map(&self) -> BTreeMap<String, Region> {
        self.region_overrides
            .iter()
            .map(|(label, region)| (label.clone(), region.parse().unwrap()))
            .collect()
    }

    pub fn synth_labels(&self) -> PipelineResult<Vec<String>> {
        let layout = self
            .synth
            .as_ref()
            .ok_or_else(|| PipelineError::new("config", "no [synth] layout"))?;
        Ok(match &layout.channels {
            ChannelsConfig::Named(_) => standard_128_labels(),
            ChannelsConfig::List(list) => list.clone(),
        })
    }

    /// Resolve a condition's synth block into a core coupling spec against
    /// the shared layout labels.
    pub fn coupling_spec(
        &self,
        cond_index: usize,
        labels: &[String],
    ) -> PipelineResult<CouplingSpec> {
        let cond = &self.conditions[cond_index];
        let synth = cond
            .synth
            .as_ref()
            .ok_or_else(|| PipelineError::new("config", "condition is not synthetic"))?;
        let index_of = |label: &str| -> PipelineResult<usize> {
            labels.iter().position(|l| l == label).ok_or_else(|| {
                PipelineError::new(
                    "config",
                    format!("channel '{label}' is not in the synth layout"),
                )
            })
        };
        let mut pairs = Vec::with_capacity(synth.pairs.len());
        for p in &synth.pairs {
            pairs.push(CoupledPair {
                channel_a: index_of(&p.a)?,
                channel_b: index_of(&p.b)?,
                carrier_hz: p.carrier_hz,
                lag_rad: p.lag_rad,
                strength: p.strength,
            });
        }
        let mut groups = Vec::with_capacity(synth.common_source_groups.len());
        for group in &synth.common_source_groups {
            groups.push(group.iter().map(|l| index_of(l)).collect::<PipelineResult<_>>()?);
        }
        let seed = synth
            .seed
            .or_else(|| self.seed.map(|s| s.wrapping_add(cond_index as u64)))
            .expect("validated");
        Ok(CouplingSpec {
            pairs,
            noise_sigma: synth.noise_sigma,
            common_source_groups: groups,
            seed,
        })
    }
}
