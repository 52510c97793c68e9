//! Pairwise functional connectivity: phase locking value, phase lag index
//! and magnitude-squared coherence, assembled into symmetric per-band
//! matrices.

use crate::bands::BandDefinition;
use crate::epoch::EpochSet;
use crate::error::{CoreError, Result};
use crate::filter::{butter_bandpass, filtfilt_bank, Biquad};
use crate::hilbert::{analytic_signal, PhaseSeries};
use crate::spectral::{welch_segment_len, WindowFn};
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

/// Numeric noise floor for the PLI sign function: phase differences whose
/// sine falls below this count as zero lag, so exact zero-lag copies yield
/// PLI 0 even when the two phase extractions differ in the last ulp.
const PLI_SIGN_EPS: f64 = 1e-12;

/// Connectivity metric selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Plv,
    Pli,
    Coherence,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Plv, MetricKind::Pli, MetricKind::Coherence];

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricKind::Plv => "plv",
            MetricKind::Pli => "pli",
            MetricKind::Coherence => "coh",
        }
    }

    /// Matrix diagonal value: self-connectivity is 1 for PLV and coherence,
    /// 0 for PLI (sign of a zero lag).
    pub fn diagonal(&self) -> f64 {
        match self {
            MetricKind::Plv | MetricKind::Coherence => 1.0,
            MetricKind::Pli => 0.0,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plv" => Ok(MetricKind::Plv),
            "pli" => Ok(MetricKind::Pli),
            "coh" | "coherence" => Ok(MetricKind::Coherence),
            other => Err(CoreError::Config(format!("unknown metric '{other}'"))),
        }
    }
}

/// Phase locking value: `|mean(exp(i * (phi_x - phi_y)))|`.
pub fn plv(px: &PhaseSeries, py: &PhaseSeries) -> Result<f64> {
    if px.len() != py.len() {
        return Err(CoreError::Input(format!(
            "phase series differ in length: {} vs {}",
            px.len(),
            py.len()
        )));
    }
    if px.is_empty() {
        return Err(CoreError::Input("phase series are empty".into()));
    }
    let m = px.len() as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    for (&a, &b) in px.phases.iter().zip(&py.phases) {
        let (s, c) = (a - b).sin_cos();
        re += c;
        im += s;
    }
    Ok((re / m).hypot(im / m))
}

#[inline]
fn sign_with_deadband(s: f64) -> f64 {
    if s > PLI_SIGN_EPS {
        1.0
    } else if s < -PLI_SIGN_EPS {
        -1.0
    } else {
        0.0
    }
}

/// Phase lag index: `|mean(sgn(sin(phi_x - phi_y)))|`. Zero-lag coupling
/// (shared sources, volume conduction) contributes sign zero and is
/// suppressed.
pub fn pli(px: &PhaseSeries, py: &PhaseSeries) -> Result<f64> {
    if px.len() != py.len() {
        return Err(CoreError::Input(format!(
            "phase series differ in length: {} vs {}",
            px.len(),
            py.len()
        )));
    }
    if px.is_empty() {
        return Err(CoreError::Input("phase series are empty".into()));
    }
    let mut acc = 0.0;
    for (&a, &b) in px.phases.iter().zip(&py.phases) {
        acc += sign_with_deadband((a - b).sin());
    }
    Ok((acc / px.len() as f64).abs())
}

/// Band-averaged magnitude-squared coherence
/// `|sxy(f)|^2 / (sxx(f) * syy(f))` over the bins with `lo <= f < hi`.
/// Bins with a vanishing auto-spectrum product are excluded from the mean.
pub fn coherence_band(cs: &crate::spectral::CrossSpectrum, band: &BandDefinition) -> Result<f64> {
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut in_band = 0usize;
    for k in 0..cs.n_bins() {
        if !band.contains(cs.freqs[k]) {
            continue;
        }
        in_band += 1;
        let denom = cs.sxx[k] * cs.syy[k];
        if denom > 0.0 {
            sum += cs.sxy[k].norm_sqr() / denom;
            used += 1;
        }
    }
    if in_band == 0 {
        return Err(CoreError::Config(format!(
            "band {} [{}, {}) Hz contains no frequency bins",
            band.name, band.lo_hz, band.hi_hz
        )));
    }
    if used == 0 {
        return Err(CoreError::Estimation(format!(
            "all {in_band} in-band bins of band {} are degenerate (zero auto-spectrum)",
            band.name
        )));
    }
    Ok(sum / used as f64)
}

/// Estimator settings for [`connectivity_matrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectivityParams {
    /// Butterworth prototype order of the band-limiting filter applied
    /// before phase extraction.
    pub filter_order: usize,
    /// Number of Welch segments per epoch for coherence.
    pub welch_segments: usize,
    /// Fractional overlap of Welch segments.
    pub welch_overlap: f64,
    /// Welch segment window.
    pub window: WindowFn,
}

impl Default for ConnectivityParams {
    fn default() -> Self {
        Self {
            filter_order: 4,
            welch_segments: 8,
            welch_overlap: 0.5,
            window: WindowFn::Hann,
        }
    }
}

/// Symmetric channels x channels matrix of one metric in one band for one
/// condition. Off-diagonal values lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix {
    pub channels: Vec<String>,
    pub band: BandDefinition,
    pub metric: MetricKind,
    pub condition: String,
    pub values: Vec<Vec<f64>>,
}

/// Elementwise difference of two connectivity matrices (condition a minus
/// condition b). Values lie in `[-1, 1]` and negate under argument swap.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceMatrix {
    pub channels: Vec<String>,
    pub band: BandDefinition,
    pub metric: MetricKind,
    pub condition_a: String,
    pub condition_b: String,
    pub values: Vec<Vec<f64>>,
}

fn pair_list(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Unit phasors of the band-limited analytic signal, split into re/im planes
/// for the pair loop.
struct Phasors {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

fn band_phasors(epoch: &[Vec<f64>], sections: &[Biquad]) -> Result<Phasors> {
    let per_chunk: Result<Vec<Vec<(Vec<f64>, Vec<f64>)>>> = epoch
        .par_chunks(4)
        .map(|chunk| {
            let lanes: Vec<&[f64]> = chunk.iter().map(|c| c.as_slice()).collect();
            let filtered = filtfilt_bank(sections, &lanes)?;
            filtered
                .iter()
                .map(|ch| {
                    let z = analytic_signal(ch)?;
                    let mut re = Vec::with_capacity(z.len());
                    let mut im = Vec::with_capacity(z.len());
                    for c in z {
                        let mag = (c.re * c.re + c.im * c.im).sqrt();
                        if mag > 0.0 {
                            re.push(c.re / mag);
                            im.push(c.im / mag);
                        } else {
                            re.push(1.0);
                            im.push(0.0);
                        }
                    }
                    Ok((re, im))
                })
                .collect()
        })
        .collect();
    let mut re = Vec::with_capacity(epoch.len());
    let mut im = Vec::with_capacity(epoch.len());
    for chunk in per_chunk? {
        for (r, i) in chunk {
            re.push(r);
            im.push(i);
        }
    }
    Ok(Phasors { re, im })
}

/// Per-epoch PLV and PLI of one channel pair from unit phasors. Four
/// independent accumulator lanes keep the reduction vectorizable and the
/// summation order fixed.
fn phase_pair_metrics(xr: &[f64], xi: &[f64], yr: &[f64], yi: &[f64]) -> (f64, f64) {
    let m = xr.len();
    let mut cre = [0.0f64; 4];
    let mut cim = [0.0f64; 4];
    let mut pos = [0.0f64; 4];
    let mut neg = [0.0f64; 4];
    let chunks = xr
        .chunks_exact(4)
        .zip(xi.chunks_exact(4))
        .zip(yr.chunks_exact(4).zip(yi.chunks_exact(4)));
    for ((ar, ai), (br, bi)) in chunks {
        for l in 0..4 {
            let re = ar[l] * br[l] + ai[l] * bi[l];
            let im = ai[l] * br[l] - ar[l] * bi[l];
            cre[l] += re;
            cim[l] += im;
            pos[l] += if im > PLI_SIGN_EPS { 1.0 } else { 0.0 };
            neg[l] += if im < -PLI_SIGN_EPS { 1.0 } else { 0.0 };
        }
    }
    let mut re_total = (cre[0] + cre[1]) + (cre[2] + cre[3]);
    let mut im_total = (cim[0] + cim[1]) + (cim[2] + cim[3]);
    let mut sgn_total =
        (pos[0] + pos[1] + pos[2] + pos[3]) - (neg[0] + neg[1] + neg[2] + neg[3]);
    for k in m / 4 * 4..m {
        let (ar, ai, br, bi) = (xr[k], xi[k], yr[k], yi[k]);
        let re = ar * br + ai * bi;
        let im = ai * br - ar * bi;
        re_total += re;
        im_total += im;
        sgn_total += ((im > PLI_SIGN_EPS) as i32 - (im < -PLI_SIGN_EPS) as i32) as f64;
    }
    let mf = m as f64;
    (
        (re_total / mf).hypot(im_total / mf),
        (sgn_total / mf).abs(),
    )
}

/// A 2x2 channel tile: the four pairs (x0,y0), (x0,y1), (x1,y0), (x1,y1) in
/// one sweep, so every loaded phasor feeds two pair products. Per pair the
/// arithmetic matches [`phase_pair_metrics`] up to summation order.
fn phase_pair_metrics_2x2(
    (x0r, x0i): (&[f64], &[f64]),
    (x1r, x1i): (&[f64], &[f64]),
    (y0r, y0i): (&[f64], &[f64]),
    (y1r, y1i): (&[f64], &[f64]),
) -> [(f64, f64); 4] {
    let m = x0r.len();
    let (x0r, x0i) = (&x0r[..m], &x0i[..m]);
    let (x1r, x1i) = (&x1r[..m], &x1i[..m]);
    let (y0r, y0i) = (&y0r[..m], &y0i[..m]);
    let (y1r, y1i) = (&y1r[..m], &y1i[..m]);
    let mut cre = [0.0f64; 4];
    let mut cim = [0.0f64; 4];
    let mut sgn = [0.0f64; 4];
    for k in 0..m {
        let (a0r, a0i, a1r, a1i) = (x0r[k], x0i[k], x1r[k], x1i[k]);
        let (b0r, b0i, b1r, b1i) = (y0r[k], y0i[k], y1r[k], y1i[k]);

        let re00 = a0r * b0r + a0i * b0i;
        let im00 = a0i * b0r - a0r * b0i;
        let re01 = a0r * b1r + a0i * b1i;
        let im01 = a0i * b1r - a0r * b1i;
        let re10 = a1r * b0r + a1i * b0i;
        let im10 = a1i * b0r - a1r * b0i;
        let re11 = a1r * b1r + a1i * b1i;
        let im11 = a1i * b1r - a1r * b1i;

        cre[0] += re00;
        cim[0] += im00;
        cre[1] += re01;
        cim[1] += im01;
        cre[2] += re10;
        cim[2] += im10;
        cre[3] += re11;
        cim[3] += im11;
        sgn[0] += if im00 > PLI_SIGN_EPS { 1.0 } else if im00 < -PLI_SIGN_EPS { -1.0 } else { 0.0 };
        sgn[1] += if im01 > PLI_SIGN_EPS { 1.0 } else if im01 < -PLI_SIGN_EPS { -1.0 } else { 0.0 };
        sgn[2] += if im10 > PLI_SIGN_EPS { 1.0 } else if im10 < -PLI_SIGN_EPS { -1.0 } else { 0.0 };
        sgn[3] += if im11 > PLI_SIGN_EPS { 1.0 } else if im11 < -PLI_SIGN_EPS { -1.0 } else { 0.0 };
    }
    let mf = m as f64;
    [0, 1, 2, 3].map(|p| ((cre[p] / mf).hypot(cim[p] / mf), (sgn[p] / mf).abs()))
}

/// Welch segment spectra of every channel, restricted to the in-band bins.
struct BandSegmentSpectra {
    /// `spectra[ch][seg * n_bins + bin]`
    spectra: Vec<Vec<Complex64>>,
    /// `auto[ch][bin]`: segment-averaged auto-spectrum.
    auto: Vec<Vec<f64>>,
    n_bins: usize,
    n_segments: usize,
}

fn band_segment_spectra(
    epoch: &[Vec<f64>],
    fs: f64,
    band: &BandDefinition,
    params: &ConnectivityParams,
) -> Result<BandSegmentSpectra> {
    let len = epoch[0].len();
    let seg_len = welch_segment_len(len, params.welch_segments, params.welch_overlap)?;
    let hop = seg_len - (seg_len as f64 * params.welch_overlap).floor() as usize;
    let n_segments = (len - seg_len) / hop + 1;
    let bins: Vec<usize> = (0..=seg_len / 2)
        .filter(|&k| band.contains(k as f64 * fs / seg_len as f64))
        .collect();
    if bins.is_empty() {
        return Err(CoreError::Config(format!(
            "band {} [{}, {}) Hz contains no frequency bins at segment length {seg_len}",
            band.name, band.lo_hz, band.hi_hz
        )));
    }
    let coeffs = params.window.coefficients(seg_len);
    let fft = crate::hilbert::plan_forward(seg_len);

    let per_channel: Vec<(Vec<Complex64>, Vec<f64>)> = epoch
        .par_iter()
        .map(|ch| {
            let mut spectra = Vec::with_capacity(n_segments * bins.len());
            let mut auto = vec![0.0; bins.len()];
            let mut frame = vec![Complex64::new(0.0, 0.0); seg_len];
            for s in 0..n_segments {
                let start = s * hop;
                for k in 0..seg_len {
                    frame[k] = Complex64::new(ch[start + k] * coeffs[k], 0.0);
                }
                fft.process(&mut frame);
                for (bi, &bin) in bins.iter().enumerate() {
                    spectra.push(frame[bin]);
                    auto[bi] += frame[bin].norm_sqr();
                }
            }
            for a in &mut auto {
                *a /= n_segments as f64;
            }
            (spectra, auto)
        })
        .collect();

    let mut spectra = Vec::with_capacity(epoch.len());
    let mut auto = Vec::with_capacity(epoch.len());
    for (s, a) in per_channel {
        spectra.push(s);
        auto.push(a);
    }
    Ok(BandSegmentSpectra { spectra, auto, n_bins: bins.len(), n_segments })
}

/// Per-epoch band coherence of one channel pair from precomputed segment
/// spectra. Produces the same value as `coherence_band` over
/// `cross_spectral_density` with identical Welch settings.
fn coherence_pair(spec: &BandSegmentSpectra, i: usize, j: usize) -> Result<f64> {
    let nb = spec.n_bins;
    let ns = spec.n_segments as f64;
    let mut sum = 0.0;
    let mut used = 0usize;
    for b in 0..nb {
        let mut sxy = Complex64::new(0.0, 0.0);
        for s in 0..spec.n_segments {
            sxy += spec.spectra[i][s * nb + b].conj() * spec.spectra[j][s * nb + b];
        }
        let sxy = sxy / ns;
        let denom = spec.auto[i][b] * spec.auto[j][b];
        if denom > 0.0 {
            sum += sxy.norm_sqr() / denom;
            used += 1;
        }
    }
    if used == 0 {
        return Err(CoreError::Estimation(
            "all in-band bins are degenerate (zero auto-spectrum)".into(),
        ));
    }
    Ok(sum / used as f64)
}

/// Compute several metrics over one band in a single pass, sharing the
/// band-limited phase extraction and the Welch segment FFTs across metrics.
pub fn connectivity_matrices(
    ep: &EpochSet,
    metrics: &[MetricKind],
    band: &BandDefinition,
    params: &ConnectivityParams,
) -> Result<Vec<ConnectivityMatrix>> {
    if ep.epochs.is_empty() {
        return Err(CoreError::Input("empty epoch set".into()));
    }
    if metrics.is_empty() {
        return Ok(Vec::new());
    }
    let n = ep.n_channels();
    if n < 1 {
        return Err(CoreError::Input("epoch set has no channels".into()));
    }
    let wants_phase = metrics.iter().any(|m| matches!(m, MetricKind::Plv | MetricKind::Pli));
    let wants_coh = metrics.contains(&MetricKind::Coherence);
    let sections = if wants_phase {
        Some(butter_bandpass(band.lo_hz, band.hi_hz, params.filter_order, ep.fs)?)
    } else {
        None
    };

    let pairs = pair_list(n);
    let mut plv_sum = vec![0.0f64; pairs.len()];
    let mut pli_sum = vec![0.0f64; pairs.len()];
    let mut coh_sum = vec![0.0f64; pairs.len()];

    let pair_index = |i: usize, j: usize| i * (2 * n - i - 1) / 2 + (j - i - 1);
    for epoch in &ep.epochs {
        if let Some(sections) = &sections {
            let ph = band_phasors(epoch, sections)?;
            // 2x2 channel tiles: four pair results per four-channel load,
            // so the pair sweep stays cache-resident
            let row_blocks: Vec<usize> = (0..n.saturating_sub(1)).step_by(2).collect();
            let per_block: Vec<Vec<(usize, f64, f64)>> = row_blocks
                .par_iter()
                .map(|&i| {
                    let mut out = Vec::new();
                    let has_second_row = i + 1 < n;
                    if has_second_row {
                        let (v, l) =
                            phase_pair_metrics(&ph.re[i], &ph.im[i], &ph.re[i + 1], &ph.im[i + 1]);
                        out.push((pair_index(i, i + 1), v, l));
                    }
                    let mut j = i + 2;
                    while j < n {
                        if has_second_row && j + 1 < n {
                            let tile = phase_pair_metrics_2x2(
                                (&ph.re[i], &ph.im[i]),
                                (&ph.re[i + 1], &ph.im[i + 1]),
                                (&ph.re[j], &ph.im[j]),
                                (&ph.re[j + 1], &ph.im[j + 1]),
                            );
                            out.push((pair_index(i, j), tile[0].0, tile[0].1));
                            out.push((pair_index(i, j + 1), tile[1].0, tile[1].1));
                            out.push((pair_index(i + 1, j), tile[2].0, tile[2].1));
                            out.push((pair_index(i + 1, j + 1), tile[3].0, tile[3].1));
                            j += 2;
                        } else {
                            let (v, l) =
                                phase_pair_metrics(&ph.re[i], &ph.im[i], &ph.re[j], &ph.im[j]);
                            out.push((pair_index(i, j), v, l));
                            if has_second_row {
                                let (v, l) = phase_pair_metrics(
                                    &ph.re[i + 1],
                                    &ph.im[i + 1],
                                    &ph.re[j],
                                    &ph.im[j],
                                );
                                out.push((pair_index(i + 1, j), v, l));
                            }
                            j += 1;
                        }
                    }
                    out
                })
                .collect();
            for block in per_block {
                for (p, plv_e, pli_e) in block {
                    plv_sum[p] += plv_e;
                    pli_sum[p] += pli_e;
                }
            }
        }
        if wants_coh {
            let spec = band_segment_spectra(epoch, ep.fs, band, params)?;
            let per_pair: Result<Vec<f64>> = pairs
                .par_iter()
                .map(|&(i, j)| coherence_pair(&spec, i, j))
                .collect();
            for (p, coh_e) in per_pair?.into_iter().enumerate() {
                coh_sum[p] += coh_e;
            }
        }
    }

    let n_epochs = ep.n_epochs() as f64;
    let build = |metric: MetricKind, sums: &[f64]| -> ConnectivityMatrix {
        let mut values = vec![vec![0.0; n]; n];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let v = sums[p] / n_epochs;
            values[i][j] = v;
            values[j][i] = v;
        }
        for (i, row) in values.iter_mut().enumerate() {
            row[i] = metric.diagonal();
        }
        ConnectivityMatrix {
            channels: ep.channels.clone(),
            band: *band,
            metric,
            condition: ep.condition.clone(),
            values,
        }
    };

    Ok(metrics
        .iter()
        .map(|&metric| match metric {
            MetricKind::Plv => build(metric, &plv_sum),
            MetricKind::Pli => build(metric, &pli_sum),
            MetricKind::Coherence => build(metric, &coh_sum),
        })
        .collect())
}

/// One metric over one band: per-pair value per epoch, averaged across
/// epochs into a symmetric matrix.
pub fn connectivity_matrix(
    ep: &EpochSet,
    metric: MetricKind,
    band: &BandDefinition,
    params: &ConnectivityParams,
) -> Result<ConnectivityMatrix> {
    Ok(connectivity_matrices(ep, &[metric], band, params)?
        .pop()
        .expect("one metric requested"))
}

/// Elementwise condition difference `a - b`.
pub fn condition_difference(
    a: &ConnectivityMatrix,
    b: &ConnectivityMatrix,
) -> Result<DifferenceMatrix> {
    if a.channels != b.channels {
        return Err(CoreError::Input("matrices have different channel sets".into()));
    }
    if a.band != b.band {
        return Err(CoreError::Input(format!(
            "matrices cover different bands ({} vs {})",
            a.band.name, b.band.name
        )));
    }
    if a.metric != b.metric {
        return Err(CoreError::Input(format!(
            "matrices hold different metrics ({} vs {})",
            a.metric, b.metric
        )));
    }
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect();
    Ok(DifferenceMatrix {
        channels: a.channels.clone(),
        band: a.band,
        metric: a.metric,
        condition_a: a.condition.clone(),
        condition_b: b.condition.clone(),
        values,
    })
}

/// Ranking direction for [`top_pairs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSign {
    Positive,
    Negative,
    Absolute,
}

/// The `k` most extreme unordered channel pairs of a difference matrix. Ties
/// break lexicographically on the channel-pair labels; if `k` exceeds the
/// number of pairs the full ranking is returned.
pub fn top_pairs(
    d: &DifferenceMatrix,
    k: usize,
    sign: RankSign,
) -> Result<Vec<(String, String, f64)>> {
    if k < 1 {
        return Err(CoreError::Config("top_pairs requires k >= 1".into()));
    }
    let n = d.channels.len();
    let mut entries: Vec<(String, String, f64)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            entries.push((d.channels[i].clone(), d.channels[j].clone(), d.values[i][j]));
        }
    }
    entries.sort_by(|a, b| {
        let key = |v: f64| match sign {
            RankSign::Positive => -v,
            RankSign::Negative => v,
            RankSign::Absolute => -v.abs(),
        };
        key(a.2)
            .total_cmp(&key(b.2))
            .then_with(|| a.0.cmp(&b.0))
            .then_with(|| a.1.cmp(&b.1))
    });
    entries.truncate(k);
    Ok(entries)
}
