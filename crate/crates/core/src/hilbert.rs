//! Analytic signal and instantaneous phase via the FFT Hilbert transform.

use crate::error::{CoreError, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
}

pub(crate) fn plan_forward(len: usize) -> Arc<dyn rustfft::Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

/// Per-sample instantaneous phase of one epoch, wrapped to `(-pi, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries {
    pub phases: Vec<f64>,
    pub fs: f64,
}

impl PhaseSeries {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Analytic signal `x + i*H[x]`: FFT, zero the negative frequencies, double
/// the positive ones, inverse FFT.
pub fn analytic_signal(x: &[f64]) -> Result<Vec<Complex64>> {
    let n = x.len();
    if n < 8 {
        return Err(CoreError::Input(format!(
            "analytic signal needs at least 8 samples, got {n}"
        )));
    }
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(CoreError::Input(format!("non-finite sample in input: {bad}")));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(CoreError::DegeneratePhase(
            "all-zero signal has no defined phase".into(),
        ));
    }

    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);

    let half = n / 2;
    if n % 2 == 0 {
        for v in &mut buf[1..half] {
            *v *= 2.0;
        }
        for v in &mut buf[half + 1..] {
            *v = Complex64::new(0.0, 0.0);
        }
    } else {
        for v in &mut buf[1..=half] {
            *v *= 2.0;
        }
        for v in &mut buf[half + 1..] {
            *v = Complex64::new(0.0, 0.0);
        }
    }

    fft_inverse(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    Ok(buf)
}

/// Wrap an angle returned by `atan2` into `(-pi, pi]`.
#[inline]
pub(crate) fn wrap_phase(p: f64) -> f64 {
    if p <= -PI {
        p + 2.0 * PI
    } else {
        p
    }
}

/// Instantaneous phase of one single-channel epoch.
pub fn analytic_phase(x: &[f64], fs: f64) -> Result<PhaseSeries> {
    if !(fs > 0.0) {
        return Err(CoreError::Config(format!("fs must be positive, got {fs}")));
    }
    let z = analytic_signal(x)?;
    let phases = z.iter().map(|c| wrap_phase(c.im.atan2(c.re))).collect();
    Ok(PhaseSeries { phases, fs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn unwrap_phases(p: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(p.len());
        out.push(p[0]);
        for i in 1..p.len() {
            let mut d = p[i] - p[i - 1];
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            out.push(out[i - 1] + d);
        }
        out
    }

    #[test]
    fn cosine_phase_advances_at_carrier_rate() {
        let fs = 1000.0;
        let n = 1500;
        let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * 6.0 * i as f64 / fs).cos()).collect();
        let ps = analytic_phase(&x, fs).unwrap();
        assert_eq!(ps.len(), n);
        let unwrapped = unwrap_phases(&ps.phases);
        // interior slope in rad/s
        let (lo, hi) = (n / 4, 3 * n / 4);
        let slope = (unwrapped[hi] - unwrapped[lo]) / ((hi - lo) as f64 / fs);
        assert!((slope - 2.0 * PI * 6.0).abs() < 0.05 * 2.0 * PI * 6.0, "slope {slope}");

        // instantaneous amplitude near 1 away from edges
        let z = analytic_signal(&x).unwrap();
        for c in &z[lo..hi] {
            assert!((c.norm() - 1.0).abs() < 0.02, "amplitude {}", c.norm());
        }
    }

    #[test]
    fn quadrature_pair_offsets_by_half_pi() {
        let fs = 1000.0;
        let n = 1500;
        let cos: Vec<f64> = (0..n).map(|i| (2.0 * PI * 6.0 * i as f64 / fs).cos()).collect();
        let sin: Vec<f64> = (0..n).map(|i| (2.0 * PI * 6.0 * i as f64 / fs).sin()).collect();
        let pc = analytic_phase(&cos, fs).unwrap();
        let ps = analytic_phase(&sin, fs).unwrap();
        for k in n / 4..3 * n / 4 {
            let mut d = ps.phases[k] - pc.phases[k];
            while d > PI {
                d -= 2.0 * PI;
            }
            while d <= -PI {
                d += 2.0 * PI;
            }
            assert!((d + PI / 2.0).abs() < 0.02, "sample {k}: diff {d}");
        }
    }

    #[test]
    fn noise_phases_stay_wrapped_over_seeds() {
        let fs = 1000.0;
        for seed in 0..100u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..512).map(|_| rng.gen::<f64>() - 0.5).collect();
            let ps = analytic_phase(&x, fs).unwrap();
            assert_eq!(ps.len(), 512);
            for &p in &ps.phases {
                assert!(p > -PI && p <= PI, "seed {seed}: phase {p} out of range");
            }
        }
    }

    #[test]
    fn all_zero_input_is_degenerate() {
        let err = analytic_phase(&[0.0; 64], 100.0).unwrap_err();
        assert!(matches!(err, CoreError::DegeneratePhase(_)));
    }

    #[test]
    fn short_input_is_rejected() {
        let err = analytic_phase(&[1.0; 4], 100.0).unwrap_err();
        assert!(matches!(err, CoreError::Input(_)));
    }

    #[test]
    fn odd_length_matches_even_behaviour() {
        let fs = 500.0;
        let x: Vec<f64> = (0..501).map(|i| (2.0 * PI * 11.0 * i as f64 / fs).cos()).collect();
        let z = analytic_signal(&x).unwrap();
        for c in &z[100..400] {
            assert!((c.norm() - 1.0).abs() < 0.05);
        }
    }
}
