//! Property tests for the estimator invariants: metric ranges and symmetry,
//! spectral Cauchy-Schwarz, filter linearity, epoch slicing, label round
//! trips and region-count conservation.

use eegsync_core::bands::{BandDefinition, BandName};
use eegsync_core::connectivity::{
    pli, plv, top_pairs, DifferenceMatrix, MetricKind, RankSign,
};
use proptest::prelude::*;

use eegsync_core::aggregate::region_pair_summary;
use eegsync_core::epoch::epoch;
use eegsync_core::filter::{butter_bandpass, filtfilt};
use eegsync_core::hilbert::{analytic_phase, PhaseSeries};
use eegsync_core::montage::{build_region_map, parse_label, Region};
use eegsync_core::recording::Recording;
use eegsync_core::spectral::{cross_spectral_density, WindowFn};

fn phases(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, len..=len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_range_and_symmetry(a in phases(256), b in phases(256)) {
        let pa = PhaseSeries { phases: a, fs: 1000.0 };
        let pb = PhaseSeries { phases: b, fs: 1000.0 };
        let v_ab = plv(&pa, &pb).unwrap();
        let v_ba = plv(&pb, &pa).unwrap();
        prop_assert!((0.0..=1.0).contains(&v_ab));
        prop_assert_eq!(v_ab, v_ba);
        let l_ab = pli(&pa, &pb).unwrap();
        let l_ba = pli(&pb, &pa).unwrap();
        prop_assert!((0.0..=1.0).contains(&l_ab));
        prop_assert_eq!(l_ab, l_ba);
    }

    #[test]
    fn pli_suppresses_scaled_copies(seed in 0u64..1000, scale in 0.001f64..1000.0) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..512).map(|_| rng.gen::<f64>() - 0.5).collect();
        let y: Vec<f64> = x.iter().map(|v| scale * v).collect();
        let px = analytic_phase(&x, 1000.0).unwrap();
        let py = analytic_phase(&y, 1000.0).unwrap();
        prop_assert_eq!(pli(&px, &py).unwrap(), 0.0);
        prop_assert!(plv(&px, &py).unwrap() > 0.999);
    }

    #[test]
    fn cross_spectrum_cauchy_schwarz(seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(700..2000);
        let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let seg = rng.gen_range(64..=n / 3);
        let cs = cross_spectral_density(&x, &y, 1000.0, seg, seg / 2, WindowFn::Hann).unwrap();
        for k in 0..cs.n_bins() {
            prop_assert!(cs.sxx[k] >= 0.0);
            prop_assert!(cs.syy[k] >= 0.0);
            prop_assert!(cs.sxy[k].norm_sqr() <= cs.sxx[k] * cs.syy[k] * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn phase_series_stays_wrapped(seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(8..800);
        let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 10.0 - 5.0).collect();
        let ps = analytic_phase(&x, 250.0).unwrap();
        prop_assert_eq!(ps.len(), n);
        for &p in &ps.phases {
            prop_assert!(p > -std::f64::consts::PI && p <= std::f64::consts::PI);
        }
    }

    #[test]
    fn epoch_count_and_slices(n in 100usize..5000, len in 10usize..200, overlap in 0usize..9) {
        prop_assume!(len <= n);
        let fs = 100.0;
        let data: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let rec = Recording::new(vec!["a".into()], vec![data.clone()], fs).unwrap();
        let overlap_samples = (overlap * len) / 10; // below len
        let set = epoch(&rec, len as f64 / fs, overlap_samples as f64 / fs, "c").unwrap();
        let hop = len - overlap_samples;
        prop_assert_eq!(set.n_epochs(), (n - len) / hop + 1);
        for (e, seg) in set.epochs.iter().enumerate() {
            let start = e * hop;
            prop_assert_eq!(seg[0].as_slice(), &data[start..start + len]);
        }
    }

    #[test]
    fn filtering_is_linear(seed in 0u64..200) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = 1200;
        let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let sos = butter_bandpass(2.0, 40.0, 4, 250.0).unwrap();
        let fx = filtfilt(&sos, &x).unwrap();
        let fy = filtfilt(&sos, &y).unwrap();
        let mix: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let fmix = filtfilt(&sos, &mix).unwrap();
        let scale = fmix.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            prop_assert!((fmix[k] - (a * fx[k] + b * fy[k])).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn label_round_trip(
        prefix in "(Fp|AFp|AF|AFF|F|FFC|FC|FCC|C|CCP|CP|CPP|P|PPO|PO|POO|O|OI|I|T|FT|FFT|FTT|TP|TTP|TPP)",
        idx in 1u8..=10,
        h in proptest::bool::ANY,
    ) {
        let label = format!("{prefix}{idx}{}", if h { "h" } else { "" });
        let parsed = parse_label(&label).unwrap();
        prop_assert_eq!(parsed.recompose(), label);
    }
}

/// Exhaustive enumeration oracle for region_pair_summary.
fn summary_oracle(
    channels: &[String],
    regions: &[Region],
    values: &[Vec<f64>],
    threshold: f64,
) -> std::collections::BTreeMap<(Region, Region), (usize, f64)> {
    let mut out = std::collections::BTreeMap::new();
    for i in 0..channels.len() {
        for j in i + 1..channels.len() {
            if values[i][j].abs() > threshold {
                let key = if regions[i] <= regions[j] {
                    (regions[i], regions[j])
                } else {
                    (regions[j], regions[i])
                };
                let e = out.entry(key).or_insert((0usize, 0.0f64));
                e.0 += 1;
                e.1 += values[i][j];
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn region_summary_matches_bruteforce(seed in 0u64..5000, threshold in 0.0f64..0.5) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pool = ["Fp1", "F3", "F4", "Cz", "C3", "T7", "P3", "O1"];
        let n = rng.gen_range(2..=8);
        let channels: Vec<String> = pool[..n].iter().map(|s| s.to_string()).collect();
        let mut values = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(-1.0..1.0);
                values[i][j] = v;
                values[j][i] = v;
            }
        }
        let rm = build_region_map(&channels, &[]).unwrap();
        let regions: Vec<Region> = channels.iter().map(|c| rm.region_for(c).unwrap()).collect();
        let band = BandDefinition::new(BandName::Theta, 4.0, 8.0).unwrap();
        let d = DifferenceMatrix {
            channels: channels.clone(),
            band,
            metric: MetricKind::Plv,
            condition_a: "a".into(),
            condition_b: "b".into(),
            values: values.clone(),
        };
        let rows = region_pair_summary(&d, &rm, threshold).unwrap();
        let oracle = summary_oracle(&channels, &regions, &values, threshold);

        // exact agreement with the enumeration oracle
        for row in &rows {
            match oracle.get(&(row.region_a, row.region_b)) {
                Some(&(count, sum)) => {
                    prop_assert_eq!(row.connections, count);
                    prop_assert!((row.mean_weight - sum / count as f64).abs() < 1e-12);
                }
                None => {
                    prop_assert_eq!(row.connections, 0);
                    prop_assert_eq!(row.mean_weight, 0.0);
                    prop_assert!(row.empty);
                }
            }
        }

        // count conservation
        let total: usize = rows.iter().map(|r| r.connections).sum();
        let exceed = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| values[i][j].abs() > threshold)
            .count();
        prop_assert_eq!(total, exceed);

        // raising the threshold never raises a count
        let rows_hi = region_pair_summary(&d, &rm, threshold + 0.1).unwrap();
        for (lo, hi) in rows.iter().zip(&rows_hi) {
            prop_assert!(hi.connections <= lo.connections);
        }

        // mean weight lies between the surviving extremes
        for row in rows.iter().filter(|r| r.connections > 0) {
            let surviving: Vec<f64> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .filter(|&(i, j)| {
                    values[i][j].abs() > threshold && {
                        let key = if regions[i] <= regions[j] {
                            (regions[i], regions[j])
                        } else {
                            (regions[j], regions[i])
                        };
                        key == (row.region_a, row.region_b)
                    }
                })
                .map(|(i, j)| values[i][j])
                .collect();
            let lo = surviving.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = surviving.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(row.mean_weight >= lo - 1e-12 && row.mean_weight <= hi + 1e-12);
        }
    }

    #[test]
    fn top_pairs_is_a_prefix_of_the_full_ranking(seed in 0u64..2000, k in 1usize..12) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = 6;
        let mut values = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(-1.0..1.0);
                values[i][j] = v;
                values[j][i] = v;
            }
        }
        let band = BandDefinition::new(BandName::Theta, 4.0, 8.0).unwrap();
        let d = DifferenceMatrix {
            channels: (0..n).map(|i| format!("CH{i}")).collect(),
            band,
            metric: MetricKind::Plv,
            condition_a: "a".into(),
            condition_b: "b".into(),
            values,
        };
        let full = top_pairs(&d, n * (n - 1) / 2, RankSign::Absolute).unwrap();
        let got = top_pairs(&d, k, RankSign::Absolute).unwrap();
        prop_assert_eq!(&full[..got.len()], got.as_slice());
        for w in full.windows(2) {
            prop_assert!(w[0].2.abs() >= w[1].2.abs());
        }
    }
}
