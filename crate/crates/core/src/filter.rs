//! IIR filter design and zero-phase filtering.
//!
//! Band-pass filters are Butterworth designs (analog prototype, lowpass to
//! band-pass transform, bilinear transform) factored into second-order
//! sections. Notch filters are single biquads with a unit-circle zero at the
//! notch frequency. All filtering is applied forward-backward with
//! odd-reflection padding and steady-state initial conditions, so the net
//! phase response is zero.

use crate::error::{CoreError, Result};
use crate::recording::Recording;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Filter family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    BandPass,
    Notch,
}

/// Design parameters for [`apply_bandpass`] / [`apply_notch`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    /// Band-pass pass-band edges in Hz; unused for notch.
    pub edges: [f64; 2],
    /// Butterworth prototype order for band-pass; notch sections are always
    /// second order.
    pub order: usize,
    /// Notch quality factor; unused for band-pass.
    pub q: f64,
}

impl FilterSpec {
    /// Butterworth band-pass with the given pass-band edges.
    pub fn band_pass(low_hz: f64, high_hz: f64, order: usize) -> Self {
        Self { kind: FilterKind::BandPass, edges: [low_hz, high_hz], order, q: 0.0 }
    }

    /// Second-order IIR notch with quality factor `q`.
    pub fn notch(q: f64) -> Self {
        Self { kind: FilterKind::Notch, edges: [0.0, 0.0], order: 2, q }
    }
}

/// One second-order section with `a0` normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    /// Largest pole magnitude of this section.
    fn pole_radius(&self) -> f64 {
        // roots of z^2 + a1 z + a2
        let disc = self.a1 * self.a1 - 4.0 * self.a2;
        if disc >= 0.0 {
            let s = disc.sqrt();
            let r1 = (-self.a1 + s) / 2.0;
            let r2 = (-self.a1 - s) / 2.0;
            r1.abs().max(r2.abs())
        } else {
            // complex conjugate pair: |p|^2 = a2
            self.a2.abs().sqrt()
        }
    }

    /// Response at digital angular frequency `w` (rad/sample).
    fn response(&self, w: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -w);
        let z2 = Complex64::from_polar(1.0, -2.0 * w);
        (self.b0 + self.b1 * z1 + self.b2 * z2) / (Complex64::new(1.0, 0.0) + self.a1 * z1 + self.a2 * z2)
    }
}

/// Complex response of a section cascade at `freq_hz`.
pub fn sos_response(sections: &[Biquad], freq_hz: f64, fs: f64) -> Complex64 {
    let w = 2.0 * PI * freq_hz / fs;
    sections
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(w))
}

/// Magnitude response of a section cascade at `freq_hz`.
pub fn sos_magnitude(sections: &[Biquad], freq_hz: f64, fs: f64) -> f64 {
    sos_response(sections, freq_hz, fs).norm()
}

fn validate_band_edges(low_hz: f64, high_hz: f64, fs: f64) -> Result<()> {
    let nyquist = fs / 2.0;
    if !(low_hz > 0.0 && low_hz < high_hz && high_hz < nyquist) {
        return Err(CoreError::Config(format!(
            "band-pass edges must satisfy 0 < low < high < fs/2; got low={low_hz}, high={high_hz}, fs/2={nyquist}"
        )));
    }
    Ok(())
}

/// Butterworth band-pass as second-order sections.
///
/// `order` is the analog prototype order; the digital filter has `2 * order`
/// poles. Edges are prewarped so the -3 dB points land exactly on `low_hz`
/// and `high_hz`.
pub fn butter_bandpass(low_hz: f64, high_hz: f64, order: usize, fs: f64) -> Result<Vec<Biquad>> {
    validate_band_edges(low_hz, high_hz, fs)?;
    if order == 0 || order > 12 {
        return Err(CoreError::Config(format!(
            "band-pass prototype order must be in 1..=12, got {order}"
        )));
    }

    let fs2 = 2.0 * fs;
    let wl = fs2 * (PI * low_hz / fs).tan();
    let wh = fs2 * (PI * high_hz / fs).tan();
    let w0sq = wl * wh;
    let bw = wh - wl;

    // Analog prototype poles on the unit circle, left half plane.
    let prototype: Vec<Complex64> = (0..order)
        .map(|k| {
            let theta = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
            Complex64::from_polar(1.0, theta)
        })
        .collect();

    // Lowpass-to-bandpass: each prototype pole yields two analog poles; the
    // transform puts `order` zeros at s = 0 and leaves `order` at infinity.
    let mut analog_poles = Vec::with_capacity(2 * order);
    for p in prototype {
        let q = p * (bw / 2.0);
        let disc = (q * q - w0sq).sqrt();
        analog_poles.push(q + disc);
        analog_poles.push(q - disc);
    }

    // Bilinear transform. Digital zeros: `order` at z=+1 (from s=0) and
    // `order` at z=-1 (from s=infinity).
    let mut gain_num = Complex64::new(1.0, 0.0);
    let mut gain_den = Complex64::new(1.0, 0.0);
    for _ in 0..order {
        gain_num *= Complex64::new(fs2, 0.0); // (fs2 - 0) per analog zero
    }
    let digital_poles: Vec<Complex64> = analog_poles
        .iter()
        .map(|&p| {
            gain_den *= Complex64::new(fs2, 0.0) - p;
            (Complex64::new(fs2, 0.0) + p) / (Complex64::new(fs2, 0.0) - p)
        })
        .collect();
    let gain = (bw.powi(order as i32) * gain_num / gain_den).re;

    // Pair poles into sections. Conjugate pairs first, leftover real poles
    // paired among themselves.
    let mut remaining = digital_poles;
    let mut denominators: Vec<(f64, f64)> = Vec::with_capacity(order);
    let mut reals: Vec<f64> = Vec::new();
    while let Some(idx) = remaining
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.im.abs().total_cmp(&b.1.im.abs()))
        .map(|(i, _)| i)
    {
        let p = remaining.swap_remove(idx);
        if p.im.abs() > 1e-10 * p.norm().max(1.0) {
            // find the conjugate partner
            let partner = remaining
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - p.conj()).norm().total_cmp(&(b.1 - p.conj()).norm()))
                .map(|(i, _)| i)
                .ok_or_else(|| CoreError::Config("unpaired complex pole in design".into()))?;
            remaining.swap_remove(partner);
            denominators.push((-2.0 * p.re, p.norm_sqr()));
        } else {
            reals.push(p.re);
        }
    }
    reals.sort_by(f64::total_cmp);
    for pair in reals.chunks(2) {
        match *pair {
            [r1, r2] => denominators.push((-(r1 + r2), r1 * r2)),
            [r] => denominators.push((-r, 0.0)),
            _ => unreachable!(),
        }
    }
    // Most selective sections (poles nearest the unit circle) last.
    denominators.sort_by(|x, y| {
        let rx = Biquad { b0: 0.0, b1: 0.0, b2: 0.0, a1: x.0, a2: x.1 }.pole_radius();
        let ry = Biquad { b0: 0.0, b1: 0.0, b2: 0.0, a1: y.0, a2: y.1 }.pole_radius();
        rx.total_cmp(&ry)
    });

    // Each section takes one zero at +1 and one at -1: numerator z^2 - 1.
    let mut sections: Vec<Biquad> = denominators
        .into_iter()
        .map(|(a1, a2)| Biquad { b0: 1.0, b1: 0.0, b2: -1.0, a1, a2 })
        .collect();
    sections[0].b0 *= gain;
    sections[0].b1 *= gain;
    sections[0].b2 *= gain;
    Ok(sections)
}

/// Second-order notch at `center_hz` with quality factor `q`: unit gain far
/// from the notch, a true zero at the center frequency.
pub fn notch_biquad(center_hz: f64, q: f64, fs: f64) -> Result<Biquad> {
    if !(center_hz > 0.0 && center_hz < fs / 2.0) {
        return Err(CoreError::Config(format!(
            "notch center must satisfy 0 < center < fs/2; got {center_hz} at fs={fs}"
        )));
    }
    if !(q > 0.0) {
        return Err(CoreError::Config(format!("notch quality factor must be positive, got {q}")));
    }
    let w0 = 2.0 * PI * center_hz / fs;
    let beta = (w0 / (2.0 * q)).tan();
    let denom = 1.0 + beta;
    Ok(Biquad {
        b0: 1.0 / denom,
        b1: -2.0 * w0.cos() / denom,
        b2: 1.0 / denom,
        a1: -2.0 * w0.cos() / denom,
        a2: (1.0 - beta) / denom,
    })
}

/// Steady-state state vector of one section for a constant unit input,
/// direct-form II transposed. Scaling by the actual boundary sample gives
/// transient-free start-up.
fn steady_state_zi(s: &Biquad) -> (f64, f64, f64) {
    let dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    let z1 = dc - s.b0;
    let z2 = s.b2 - s.a2 * dc;
    (z1, z2, dc)
}

fn sosfilt_inplace(sections: &[Biquad], x: &mut [f64], x0: f64) {
    let mut input_dc = x0;
    for s in sections {
        let (z1u, z2u, dc) = steady_state_zi(s);
        let mut z1 = z1u * input_dc;
        let mut z2 = z2u * input_dc;
        for v in x.iter_mut() {
            let xin = *v;
            let y = s.b0 * xin + z1;
            z1 = s.b1 * xin - s.a1 * y + z2;
            z2 = s.b2 * xin - s.a2 * y;
            *v = y;
        }
        input_dc *= dc;
    }
}

/// One forward pass over a bank of equal-length buffers, cascading all
/// sections per sample. The biquad recurrences of the individual channels
/// are independent, so interleaving them fills the latency chain; each
/// channel sees exactly the arithmetic of [`sosfilt_inplace`].
fn sosfilt_bank_inplace(sections: &[Biquad], bufs: &mut [Vec<f64>], x0s: &[f64]) {
    let n_sec = sections.len();
    let zi_units: Vec<(f64, f64, f64)> = sections.iter().map(steady_state_zi).collect();
    let mut states = vec![[0.0f64; 2]; bufs.len() * n_sec];
    for (g, &x0) in x0s.iter().enumerate() {
        let mut u = x0;
        for (si, &(z1u, z2u, dc)) in zi_units.iter().enumerate() {
            states[g * n_sec + si] = [z1u * u, z2u * u];
            u *= dc;
        }
    }
    let len = bufs[0].len();
    let mut lanes: Vec<&mut [f64]> = bufs.iter_mut().map(|b| b.as_mut_slice()).collect();
    for k in 0..len {
        for (g, lane) in lanes.iter_mut().enumerate() {
            let mut v = lane[k];
            for (si, s) in sections.iter().enumerate() {
                let st = &mut states[g * n_sec + si];
                let y = s.b0 * v + st[0];
                st[0] = s.b1 * v - s.a1 * y + st[1];
                st[1] = s.b2 * v - s.a2 * y;
                v = y;
            }
            lane[k] = v;
        }
    }
}

/// Padding long enough for the slowest section transient to decay below
/// 1e-6, capped at `n - 1`.
fn pad_length(sections: &[Biquad], n: usize) -> usize {
    let r_max = sections
        .iter()
        .map(|s| s.pole_radius())
        .fold(0.0_f64, f64::max)
        .min(1.0 - 1e-12);
    let decay = if r_max > 0.0 {
        ((1e-6_f64).ln() / r_max.ln()).ceil() as usize
    } else {
        0
    };
    let floor = 3 * (2 * sections.len() + 1);
    decay.max(floor).min(n - 1)
}

/// Zero-phase forward-backward filtering of one channel.
///
/// The signal is odd-reflected at both ends before each pass; initial filter
/// states are the scaled steady-state response, so a constant input passes
/// without transient.
pub fn filtfilt(sections: &[Biquad], x: &[f64]) -> Result<Vec<f64>> {
    if sections.is_empty() {
        return Err(CoreError::Config("empty filter cascade".into()));
    }
    let n = x.len();
    let min_len = 3 * (2 * sections.len() + 1);
    if n <= min_len {
        return Err(CoreError::Input(format!(
            "signal of {n} samples is too short for a {}-section filter (need > {min_len})",
            sections.len()
        )));
    }
    for s in sections {
        if s.pole_radius() >= 1.0 {
            return Err(CoreError::Config("unstable filter section".into()));
        }
    }
    let pad = pad_length(sections, n);

    let mut ext = Vec::with_capacity(n + 2 * pad);
    for i in 0..pad {
        ext.push(2.0 * x[0] - x[pad - i]);
    }
    ext.extend_from_slice(x);
    for i in 0..pad {
        ext.push(2.0 * x[n - 1] - x[n - 2 - i]);
    }

    let first = ext[0];
    sosfilt_inplace(sections, &mut ext, first);
    ext.reverse();
    let first = ext[0];
    sosfilt_inplace(sections, &mut ext, first);
    ext.reverse();

    Ok(ext[pad..pad + n].to_vec())
}

/// Zero-phase filtering of several equal-length channels in one interleaved
/// sweep. Produces exactly the per-channel results of [`filtfilt`]; the bank
/// form exists because independent state chains keep the pipeline busy where
/// a single biquad recurrence would stall on its own latency.
pub fn filtfilt_bank(sections: &[Biquad], channels: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    if channels.is_empty() {
        return Ok(Vec::new());
    }
    if sections.is_empty() {
        return Err(CoreError::Config("empty filter cascade".into()));
    }
    let n = channels[0].len();
    if channels.iter().any(|c| c.len() != n) {
        return Err(CoreError::Input("bank channels differ in length".into()));
    }
    let min_len = 3 * (2 * sections.len() + 1);
    if n <= min_len {
        return Err(CoreError::Input(format!(
            "signal of {n} samples is too short for a {}-section filter (need > {min_len})",
            sections.len()
        )));
    }
    for s in sections {
        if s.pole_radius() >= 1.0 {
            return Err(CoreError::Config("unstable filter section".into()));
        }
    }
    let pad = pad_length(sections, n);

    let mut bufs: Vec<Vec<f64>> = channels
        .iter()
        .map(|x| {
            let mut ext = Vec::with_capacity(n + 2 * pad);
            for i in 0..pad {
                ext.push(2.0 * x[0] - x[pad - i]);
            }
            ext.extend_from_slice(x);
            for i in 0..pad {
                ext.push(2.0 * x[n - 1] - x[n - 2 - i]);
            }
            ext
        })
        .collect();

    let x0s: Vec<f64> = bufs.iter().map(|b| b[0]).collect();
    sosfilt_bank_inplace(sections, &mut bufs, &x0s);
    for b in &mut bufs {
        b.reverse();
    }
    let x0s: Vec<f64> = bufs.iter().map(|b| b[0]).collect();
    sosfilt_bank_inplace(sections, &mut bufs, &x0s);
    Ok(bufs
        .into_iter()
        .map(|mut b| {
            b.reverse();
            b[pad..pad + n].to_vec()
        })
        .collect())
}

/// Band-pass filter a whole recording (forward-backward, zero phase).
pub fn apply_bandpass(rec: &Recording, spec: &FilterSpec) -> Result<Recording> {
    if spec.kind != FilterKind::BandPass {
        return Err(CoreError::Config("apply_bandpass requires a band-pass FilterSpec".into()));
    }
    let sections = butter_bandpass(spec.edges[0], spec.edges[1], spec.order, rec.fs())?;
    let filtered: Result<Vec<Vec<f64>>> = rec
        .data()
        .par_iter()
        .map(|ch| filtfilt(&sections, ch))
        .collect();
    rec.with_data(filtered?)
}

/// Notch-filter a whole recording at each listed center frequency.
pub fn apply_notch(rec: &Recording, centers_hz: &[f64], spec: &FilterSpec) -> Result<Recording> {
    if spec.kind != FilterKind::Notch {
        return Err(CoreError::Config("apply_notch requires a notch FilterSpec".into()));
    }
    let sections: Vec<Biquad> = centers_hz
        .iter()
        .map(|&c| notch_biquad(c, spec.q, rec.fs()))
        .collect::<Result<_>>()?;
    if sections.is_empty() {
        return Ok(rec.clone());
    }
    let filtered: Result<Vec<Vec<f64>>> = rec
        .data()
        .par_iter()
        .map(|ch| filtfilt(&sections, ch))
        .collect();
    rec.with_data(filtered?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tone(freq: f64, fs: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * freq * i as f64 / fs).sin()).collect()
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    /// Reference magnitudes from scipy.signal.butter(4, [0.5, 125],
    /// btype='bandpass', fs=1000).
    #[test]
    fn bandpass_magnitude_matches_reference() {
        let sos = butter_bandpass(0.5, 125.0, 4, 1000.0).unwrap();
        assert_eq!(sos.len(), 4);
        let cases = [
            (0.5, 0.7071067812),
            (6.0, 1.0),
            (60.0, 0.9990984145),
            (125.0, 0.7071067812),
            (200.0, 0.1040001293),
        ];
        for (f, expected) in cases {
            assert_relative_eq!(sos_magnitude(&sos, f, 1000.0), expected, max_relative = 1e-6);
        }
    }

    #[test]
    fn bandpass_preserves_in_band_tone() {
        let fs = 1000.0;
        let x = tone(60.0, fs, 10_000);
        let rec = Recording::new(vec!["a".into()], vec![x.clone()], fs).unwrap();
        let out = apply_bandpass(&rec, &FilterSpec::band_pass(0.5, 125.0, 4)).unwrap();
        let ratio = rms(&out.data()[0]) / rms(&x);
        assert!((ratio - 1.0).abs() < 0.05, "in-band ratio {ratio}");
    }

    /// Steady-state RMS: the middle 60% of the output, away from the
    /// boundary ring that any finite forward-backward pass leaves behind.
    fn interior_rms(x: &[f64]) -> f64 {
        let m = x.len() / 5;
        rms(&x[m..x.len() - m])
    }

    #[test]
    fn bandpass_rejects_stop_band_tone() {
        // At fs=500 the 200 Hz tone sits deep in the stop band of the
        // 0.5-125 Hz design; the designed response is the oracle.
        let fs = 500.0;
        let x = tone(200.0, fs, 10_000);
        let sos = butter_bandpass(0.5, 125.0, 4, fs).unwrap();
        // forward-backward squares the single-pass magnitude
        let predicted = sos_magnitude(&sos, 200.0, fs).powi(2);
        assert!(predicted < 0.01, "designed response {predicted}");
        let y = filtfilt(&sos, &x).unwrap();
        let ratio = interior_rms(&y) / interior_rms(&x);
        assert!(ratio < 0.01, "stop-band ratio {ratio}");
    }

    #[test]
    fn bandpass_attenuation_matches_designed_response() {
        // Same check at fs=1000, where the designed response predicts the
        // measured attenuation directly.
        let fs = 1000.0;
        let x = tone(200.0, fs, 20_000);
        let sos = butter_bandpass(0.5, 125.0, 4, fs).unwrap();
        let y = filtfilt(&sos, &x).unwrap();
        let measured = interior_rms(&y) / interior_rms(&x);
        let predicted = sos_magnitude(&sos, 200.0, fs).powi(2);
        assert_relative_eq!(measured, predicted, max_relative = 0.05);
    }

    #[test]
    fn bandpass_kills_dc() {
        let fs = 1000.0;
        let x = vec![3.25; 5000];
        let rec = Recording::new(vec!["a".into()], vec![x], fs).unwrap();
        let out = apply_bandpass(&rec, &FilterSpec::band_pass(0.5, 125.0, 4)).unwrap();
        let peak = out.data()[0].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(peak < 1e-6, "residual DC peak {peak}");
    }

    #[test]
    fn bandpass_rejects_bad_edges() {
        let rec = Recording::new(vec!["a".into()], vec![vec![0.0; 100]], 100.0).unwrap();
        for (lo, hi) in [(0.0, 40.0), (10.0, 50.0), (10.0, 60.0), (20.0, 10.0)] {
            let err = apply_bandpass(&rec, &FilterSpec::band_pass(lo, hi, 4)).unwrap_err();
            assert!(matches!(err, CoreError::Config(_)), "({lo},{hi})");
        }
    }

    #[test]
    fn too_short_signal_is_input_error() {
        let sos = butter_bandpass(0.5, 125.0, 4, 1000.0).unwrap();
        let err = filtfilt(&sos, &[1.0; 20]).unwrap_err();
        assert!(matches!(err, CoreError::Input(_)));
    }

    /// scipy.signal.iirnotch(60, 35, fs=1000) reference coefficients.
    #[test]
    fn notch_matches_reference() {
        let nb = notch_biquad(60.0, 35.0, 1000.0).unwrap();
        assert_relative_eq!(nb.b0, 0.99464321, max_relative = 1e-7);
        assert_relative_eq!(nb.b1, -1.84959174, max_relative = 1e-7);
        assert_relative_eq!(nb.a2, 0.98928642, max_relative = 1e-7);
        assert!(sos_magnitude(&[nb], 60.0, 1000.0) < 1e-10);
        assert_relative_eq!(sos_magnitude(&[nb], 55.0, 1000.0), 0.9867716250, max_relative = 1e-6);
    }

    #[test]
    fn notch_attenuates_center_tone() {
        // A long window keeps boundary ringing from dominating the RMS; the
        // steady-state response at 60 Hz is an exact null.
        let fs = 1000.0;
        let x = tone(60.0, fs, 60_000);
        let rec = Recording::new(vec!["a".into()], vec![x.clone()], fs).unwrap();
        let out = apply_notch(&rec, &[60.0, 120.0], &FilterSpec::notch(35.0)).unwrap();
        let ratio = rms(&out.data()[0]) / rms(&x);
        assert!(ratio <= 0.032, "60 Hz residual {ratio}");
    }

    #[test]
    fn notch_passes_distant_tone() {
        let fs = 1000.0;
        let x = tone(10.0, fs, 20_000);
        let rec = Recording::new(vec!["a".into()], vec![x.clone()], fs).unwrap();
        let out = apply_notch(&rec, &[60.0, 120.0], &FilterSpec::notch(35.0)).unwrap();
        let ratio = rms(&out.data()[0]) / rms(&x);
        assert!(ratio > 0.707, "10 Hz ratio {ratio}"); // < 3 dB loss
    }

    #[test]
    fn notch_passes_5hz_neighbour_within_3db() {
        let fs = 1000.0;
        let x = tone(55.0, fs, 20_000);
        let rec = Recording::new(vec!["a".into()], vec![x.clone()], fs).unwrap();
        let out = apply_notch(&rec, &[60.0, 120.0], &FilterSpec::notch(35.0)).unwrap();
        let ratio = rms(&out.data()[0]) / rms(&x);
        assert!(ratio > 0.707, "55 Hz ratio {ratio}");
    }

    #[test]
    fn notch_of_zero_signal_is_zero() {
        let fs = 1000.0;
        let rec = Recording::new(vec!["a".into()], vec![vec![0.0; 2000]], fs).unwrap();
        let out = apply_notch(&rec, &[60.0, 120.0], &FilterSpec::notch(35.0)).unwrap();
        assert!(out.data()[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn notch_rejects_center_at_or_beyond_nyquist() {
        let rec = Recording::new(vec!["a".into()], vec![vec![0.0; 100]], 100.0).unwrap();
        let err = apply_notch(&rec, &[50.0], &FilterSpec::notch(35.0)).unwrap_err();
        assert!(matches!(err, CoreError::Config(_)));
    }

    #[test]
    fn filtfilt_is_linear() {
        let fs = 1000.0;
        let sos = butter_bandpass(1.0, 100.0, 4, fs).unwrap();
        let x = tone(7.0, fs, 2000);
        let y = tone(23.0, fs, 2000);
        let (a, b) = (2.5, -1.25);
        let combined: Vec<f64> = x.iter().zip(&y).map(|(xv, yv)| a * xv + b * yv).collect();
        let fx = filtfilt(&sos, &x).unwrap();
        let fy = filtfilt(&sos, &y).unwrap();
        let fc = filtfilt(&sos, &combined).unwrap();
        let scale = fc.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for i in 0..fc.len() {
            let expect = a * fx[i] + b * fy[i];
            assert!(
                (fc[i] - expect).abs() <= 1e-9 * scale.max(1.0),
                "sample {i}: {} vs {expect}",
                fc[i]
            );
        }
    }

    #[test]
    fn bank_matches_per_channel_filtering_exactly() {
        let fs = 1000.0;
        let sos = butter_bandpass(4.0, 8.0, 4, fs).unwrap();
        let chans: Vec<Vec<f64>> = (0..5)
            .map(|c| {
                (0..1500)
                    .map(|i| (2.0 * PI * (5.0 + c as f64) * i as f64 / fs).sin() + c as f64)
                    .collect()
            })
            .collect();
        let refs: Vec<&[f64]> = chans.iter().map(|c| c.as_slice()).collect();
        let banked = filtfilt_bank(&sos, &refs).unwrap();
        for (ch, out) in chans.iter().zip(&banked) {
            assert_eq!(out, &filtfilt(&sos, ch).unwrap());
        }
    }

    #[test]
    fn wrong_kind_is_config_error() {
        let rec = Recording::new(vec!["a".into()], vec![vec![0.0; 100]], 100.0).unwrap();
        assert!(apply_bandpass(&rec, &FilterSpec::notch(35.0)).is_err());
        assert!(apply_notch(&rec, &[25.0], &FilterSpec::band_pass(1.0, 40.0, 4)).is_err());
    }
}
