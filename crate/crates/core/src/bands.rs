//! Frequency band definitions.

use crate::error::{CoreError, Result};
use std::fmt;
use std::str::FromStr;

/// The five canonical band names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BandName {
    Delta,
    Theta,
    Alpha,
    Beta,
    Gamma,
}

impl BandName {
    pub const ALL: [BandName; 5] = [
        BandName::Delta,
        BandName::Theta,
        BandName::Alpha,
        BandName::Beta,
        BandName::Gamma,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BandName::Delta => "delta",
            BandName::Theta => "theta",
            BandName::Alpha => "alpha",
            BandName::Beta => "beta",
            BandName::Gamma => "gamma",
        }
    }
}

impl fmt::Display for BandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BandName {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "delta" => Ok(BandName::Delta),
            "theta" => Ok(BandName::Theta),
            "alpha" => Ok(BandName::Alpha),
            "beta" => Ok(BandName::Beta),
            "gamma" => Ok(BandName::Gamma),
            other => Err(CoreError::Config(format!("unknown band name '{other}'"))),
        }
    }
}

/// A named frequency interval `[lo_hz, hi_hz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandDefinition {
    pub name: BandName,
    pub lo_hz: f64,
    pub hi_hz: f64,
}

impl BandDefinition {
    pub fn new(name: BandName, lo_hz: f64, hi_hz: f64) -> Result<Self> {
        if !(lo_hz.is_finite() && hi_hz.is_finite()) || lo_hz < 0.0 || lo_hz >= hi_hz {
            return Err(CoreError::Config(format!(
                "band {name}: edges must satisfy 0 <= lo < hi, got [{lo_hz}, {hi_hz})"
            )));
        }
        Ok(Self { name, lo_hz, hi_hz })
    }

    /// Half-open membership test: `lo <= f < hi`, so adjacent bands sharing
    /// an endpoint never double-count a bin.
    pub fn contains(&self, freq_hz: f64) -> bool {
        self.lo_hz <= freq_hz && freq_hz < self.hi_hz
    }
}

/// The canonical five-band set: delta 1-4, theta 4-8, alpha 8-12, beta 12-30,
/// gamma 30-45 Hz.
pub fn canonical_bands() -> Vec<BandDefinition> {
    vec![
        BandDefinition { name: BandName::Delta, lo_hz: 1.0, hi_hz: 4.0 },
        BandDefinition { name: BandName::Theta, lo_hz: 4.0, hi_hz: 8.0 },
        BandDefinition { name: BandName::Alpha, lo_hz: 8.0, hi_hz: 12.0 },
        BandDefinition { name: BandName::Beta, lo_hz: 12.0, hi_hz: 30.0 },
        BandDefinition { name: BandName::Gamma, lo_hz: 30.0, hi_hz: 45.0 },
    ]
}
