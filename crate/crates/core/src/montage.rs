//! 10-5 electrode label parsing and cortical region mapping.

use crate::error::{CoreError, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Cortical regions used for aggregation, in anterior-to-posterior order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    Prefrontal,
    Frontal,
    Central,
    Temporal,
    Parietal,
    Occipital,
}

impl Region {
    pub const ALL: [Region; 6] = [
        Region::Prefrontal,
        Region::Frontal,
        Region::Central,
        Region::Temporal,
        Region::Parietal,
        Region::Occipital,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Prefrontal => "Prefrontal",
            Region::Frontal => "Frontal",
            Region::Central => "Central",
            Region::Temporal => "Temporal",
            Region::Parietal => "Parietal",
            Region::Occipital => "Occipital",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Region {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prefrontal" => Ok(Region::Prefrontal),
            "frontal" => Ok(Region::Frontal),
            "central" => Ok(Region::Central),
            "temporal" => Ok(Region::Temporal),
            "parietal" => Ok(Region::Parietal),
            "occipital" => Ok(Region::Occipital),
            other => Err(CoreError::Config(format!("unknown region '{other}'"))),
        }
    }
}

/// Hemispheric index part of a 10-5 label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelIndex {
    /// 1..=10; odd left, even right.
    Numeric(u8),
    /// Midline "z", stored as written ('z' or 'Z').
    Midline(char),
}

/// A decomposed 10-5 electrode label: letter prefix, hemispheric index,
/// optional intermediate-position modifier "h".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectrodeLabel {
    raw: String,
    prefix: String,
    index: LabelIndex,
    modifier: Option<char>,
}

impl ElectrodeLabel {
    pub fn raw(&self) -> &str {
        &self.raw
    }

    /// Prefix as written (e.g. "Fp").
    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    /// Uppercased prefix used for classification (e.g. "FP").
    pub fn prefix_key(&self) -> String {
        self.prefix.to_ascii_uppercase()
    }

    pub fn index(&self) -> LabelIndex {
        self.index
    }

    pub fn modifier(&self) -> Option<char> {
        self.modifier
    }

    /// Reassemble the label from its parts; equals the parsed input.
    pub fn recompose(&self) -> String {
        let mut s = self.prefix.clone();
        match self.index {
            LabelIndex::Numeric(n) => s.push_str(&n.to_string()),
            LabelIndex::Midline(c) => s.push(c),
        }
        if let Some(m) = self.modifier {
            s.push(m);
        }
        s
    }
}

/// Parse a 10-5 label: one or more letters, then a number 1-10 or "z", then
/// an optional "h" modifier.
pub fn parse_label(raw: &str) -> Result<ElectrodeLabel> {
    let fail = |why: &str| {
        CoreError::LabelParse(format!("'{raw}' does not match the 10-5 grammar: {why}"))
    };
    if raw.is_empty() {
        return Err(fail("empty label"));
    }
    if !raw.chars().all(|c| c.is_ascii_alphanumeric()) {
        return Err(fail("contains non-alphanumeric characters"));
    }

    let mut rest = raw;
    let modifier = if let Some(head) = rest.strip_suffix('h') {
        rest = head;
        Some('h')
    } else {
        None
    };

    let index = if let Some(head) = rest.strip_suffix(['z', 'Z']) {
        let c = rest.chars().last().unwrap();
        rest = head;
        LabelIndex::Midline(c)
    } else {
        let digits_start = rest
            .char_indices()
            .rev()
            .take_while(|(_, c)| c.is_ascii_digit())
            .last()
            .map(|(i, _)| i)
            .ok_or_else(|| fail("missing index (number 1-10 or z)"))?;
        let digits = &rest[digits_start..];
        let value: u8 = digits
            .parse()
            .map_err(|_| fail("index is not a number"))?;
        if !(1..=10).contains(&value) {
            return Err(fail(&format!("index {value} outside 1-10")));
        }
        rest = &rest[..digits_start];
        LabelIndex::Numeric(value)
    };

    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_alphabetic()) {
        return Err(fail("prefix must be one or more letters"));
    }

    Ok(ElectrodeLabel {
        raw: raw.to_string(),
        prefix: rest.to_string(),
        index,
        modifier,
    })
}

/// Prefix classification table. FFT sits laterally next to the temporal
/// chain, so it groups Temporal; midline "z" electrodes inherit the prefix
/// region.
fn region_for_prefix(prefix_key: &str) -> Option<Region> {
    Some(match prefix_key {
        "FP" | "AFP" => Region::Prefrontal,
        "AF" | "F" | "AFF" | "FFC" => Region::Frontal,
        "FC" | "C" | "CP" | "FCC" | "CCP" => Region::Central,
        "T" | "FT" | "TP" | "FTT" | "TTP" | "TPP" | "FFT" => Region::Temporal,
        "P" | "CPP" | "PPO" => Region::Parietal,
        "PO" | "O" | "POO" | "I" | "OI" => Region::Occipital,
        _ => return None,
    })
}

/// Region of one parsed label; depends only on the prefix.
pub fn region_of(label: &ElectrodeLabel) -> Result<Region> {
    region_for_prefix(&label.prefix_key()).ok_or_else(|| {
        CoreError::Classification(vec![format!(
            "prefix '{}' (label '{}')",
            label.prefix_key(),
            label.raw()
        )])
    })
}

/// Channel-to-region assignment for a recording, with the labels removed
/// from analysis listed separately.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    assignments: BTreeMap<String, Region>,
    exclusions: Vec<String>,
}

impl RegionMap {
    pub fn region_for(&self, channel: &str) -> Option<Region> {
        self.assignments.get(channel).copied()
    }

    pub fn assignments(&self) -> &BTreeMap<String, Region> {
        &self.assignments
    }

    pub fn exclusions(&self) -> &[String] {
        &self.exclusions
    }

    pub fn is_excluded(&self, channel: &str) -> bool {
        self.exclusions.iter().any(|e| e == channel)
    }
}

/// Map every non-excluded channel to a region. Classification failures are
/// aggregated into a single error listing every offending label.
pub fn build_region_map(channels: &[String], exclusions: &[String]) -> Result<RegionMap> {
    build_region_map_with(channels, exclusions, &BTreeMap::new())
}

/// As [`build_region_map`], with per-label region overrides taking
/// precedence over the prefix rule table.
pub fn build_region_map_with(
    channels: &[String],
    exclusions: &[String],
    overrides: &BTreeMap<String, Region>,
) -> Result<RegionMap> {
    let mut seen = std::collections::BTreeSet::new();
    for label in channels {
        if !seen.insert(label.as_str()) {
            return Err(CoreError::Input(format!("duplicate channel label '{label}'")));
        }
    }

    let mut assignments = BTreeMap::new();
    let mut excluded = Vec::new();
    let mut failures = Vec::new();
    for label in channels {
        if exclusions.contains(label) {
            excluded.push(label.clone());
            continue;
        }
        if let Some(&region) = overrides.get(label) {
            assignments.insert(label.clone(), region);
            continue;
        }
        match parse_label(label).and_then(|l| region_of(&l)) {
            Ok(region) => {
                assignments.insert(label.clone(), region);
            }
            Err(CoreError::Classification(mut details)) => failures.append(&mut details),
            Err(CoreError::LabelParse(msg)) => failures.push(msg),
            Err(other) => return Err(other),
        }
    }
    if !failures.is_empty() {
        return Err(CoreError::Classification(failures));
    }
    Ok(RegionMap { assignments, exclusions: excluded })
}

/// The 128-channel 10-5 montage shipped with the toolkit, grouped
/// anterior-to-posterior. FCz and Fpz are present; reference/ground handling
/// is the caller's exclusion choice.
pub fn standard_128_labels() -> Vec<String> {
    const LABELS: [&str; 128] = [
        // prefrontal
        "Fp1", "Fpz", "Fp2", "AFp1", "AFp2",
        // frontal
        "AF7", "AF3", "AFz", "AF4", "AF8", "AFF5h", "AFF1h", "AFF2h", "AFF6h", "F9", "F7",
        "F5", "F3", "F1", "Fz", "F2", "F4", "F6", "F8", "F10", "FFC5h", "FFC3h", "FFC1h",
        "FFC2h", "FFC4h", "FFC6h",
        // central
        "FC5", "FC3", "FC1", "FCz", "FC2", "FC4", "FC6", "FCC5h", "FCC3h", "FCC1h", "FCC2h",
        "FCC4h", "FCC6h", "C5", "C3", "C1", "Cz", "C2", "C4", "C6", "CCP5h", "CCP3h",
        "CCP1h", "CCP2h", "CCP4h", "CCP6h", "CP5", "CP3", "CP1", "CPz", "CP2", "CP4", "CP6",
        // temporal
        "FFT7h", "FFT8h", "FFT9h", "FFT10h", "FT9", "FT7", "FT8", "FT10", "FTT7h", "FTT8h",
        "FTT9h", "FTT10h", "T7", "T8", "TTP7h", "TTP8h", "TP9", "TP7", "TP8", "TP10",
        "TPP7h", "TPP8h", "TPP9h", "TPP10h",
        // parietal
        "CPP5h", "CPP3h", "CPP1h", "CPP2h", "CPP4h", "CPP6h", "P9", "P7", "P5", "P3", "P1",
        "Pz", "P2", "P4", "P6", "P8", "P10", "PPO5h", "PPO1h", "PPO2h", "PPO6h",
        // occipital
        "PO9", "PO7", "PO3", "POz", "PO4", "PO8", "PO10", "POO1", "POO2", "O1", "Oz", "O2",
        "O9", "O10", "OI1h", "OI2h", "I1", "Iz", "I2",
    ];
    LABELS.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_lateral_label() {
        let l = parse_label("AF8").unwrap();
        assert_eq!(l.prefix(), "AF");
        assert_eq!(l.index(), LabelIndex::Numeric(8));
        assert_eq!(l.modifier(), None);
    }

    #[test]
    fn parses_intermediate_label() {
        let l = parse_label("FFT8h").unwrap();
        assert_eq!(l.prefix(), "FFT");
        assert_eq!(l.index(), LabelIndex::Numeric(8));
        assert_eq!(l.modifier(), Some('h'));
    }

    #[test]
    fn parses_midline_label() {
        let l = parse_label("Cz").unwrap();
        assert_eq!(l.prefix(), "C");
        assert!(matches!(l.index(), LabelIndex::Midline('z')));
    }

    #[test]
    fn parses_two_digit_index() {
        let l = parse_label("F10").unwrap();
        assert_eq!(l.index(), LabelIndex::Numeric(10));
    }

    #[test]
    fn rejects_malformed_labels() {
        for bad in ["", "8", "F0", "F11", "F-1", "h", "F8x"] {
            assert!(parse_label(bad).is_err(), "{bad} should fail");
        }
    }

    #[test]
    fn classifies_canonical_sites() {
        let cases = [
            ("Fp1", Region::Prefrontal),
            ("AFp1", Region::Prefrontal),
            ("F3", Region::Frontal),
            ("AFF5h", Region::Frontal),
            ("FC3", Region::Central),
            ("Cz", Region::Central),
            ("CP4", Region::Central),
            ("T8", Region::Temporal),
            ("FFT8h", Region::Temporal),
            ("TP9", Region::Temporal),
            ("P3", Region::Parietal),
            ("CPP3h", Region::Parietal),
            ("O1", Region::Occipital),
            ("POz", Region::Occipital),
            ("Iz", Region::Occipital),
        ];
        for (label, region) in cases {
            assert_eq!(region_of(&parse_label(label).unwrap()).unwrap(), region, "{label}");
        }
    }

    #[test]
    fn unknown_prefix_names_offender() {
        let err = region_of(&parse_label("XX9").unwrap()).unwrap_err();
        match err {
            CoreError::Classification(details) => {
                assert!(details[0].contains("XX"), "{details:?}")
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn region_map_basics() {
        let channels: Vec<String> =
            ["Fp1", "Cz", "O1"].iter().map(|s| s.to_string()).collect();
        let rm = build_region_map(&channels, &[]).unwrap();
        assert_eq!(rm.region_for("Fp1"), Some(Region::Prefrontal));
        assert_eq!(rm.region_for("Cz"), Some(Region::Central));
        assert_eq!(rm.region_for("O1"), Some(Region::Occipital));
    }

    #[test]
    fn excluded_reference_channel_is_listed_not_assigned() {
        let channels = vec!["FCz".to_string()];
        let rm = build_region_map(&channels, &["FCz".to_string()]).unwrap();
        assert!(rm.assignments().is_empty());
        assert_eq!(rm.exclusions(), &["FCz".to_string()]);
        assert!(rm.is_excluded("FCz"));
    }

    #[test]
    fn failures_are_aggregated() {
        let channels: Vec<String> =
            ["XX9", "Cz", "YY1", "Q"].iter().map(|s| s.to_string()).collect();
        let err = build_region_map(&channels, &[]).unwrap_err();
        match err {
            CoreError::Classification(details) => {
                assert_eq!(details.len(), 3);
                let joined = details.join("; ");
                assert!(joined.contains("XX") && joined.contains("YY") && joined.contains("Q"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn overrides_take_precedence() {
        let channels = vec!["FFT8h".to_string()];
        let mut overrides = BTreeMap::new();
        overrides.insert("FFT8h".to_string(), Region::Frontal);
        let rm = build_region_map_with(&channels, &[], &overrides).unwrap();
        assert_eq!(rm.region_for("FFT8h"), Some(Region::Frontal));
    }

    #[test]
    fn standard_montage_is_total_and_round_trips() {
        let labels = standard_128_labels();
        assert_eq!(labels.len(), 128);
        let mut seen = std::collections::BTreeSet::new();
        for label in &labels {
            assert!(seen.insert(label.clone()), "duplicate {label}");
            let parsed = parse_label(label).unwrap();
            assert_eq!(parsed.recompose(), *label, "round trip {label}");
            region_of(&parsed).unwrap_or_else(|e| panic!("{label}: {e}"));
        }
        // channels discussed alongside the montage must be present
        for needed in ["AF8", "F10", "Fp1", "Fp2", "F4", "AF7", "T8", "FFT8h", "FCz", "Fpz"] {
            assert!(labels.iter().any(|l| l == needed), "missing {needed}");
        }
    }

    #[test]
    fn classification_ignores_index_and_hemisphere() {
        for label in ["F1", "F2", "F7", "F8", "F9", "F10", "Fz"] {
            assert_eq!(
                region_of(&parse_label(label).unwrap()).unwrap(),
                Region::Frontal
            );
        }
    }
}
