//! End-to-end pipeline: ingestion, preprocessing, epoching, band-power
//! features, connectivity sweep, aggregation and emission.
//!
//! All computation finishes before anything is written; a failure after the
//! first write removes the partial outputs.

use crate::config::PipelineConfig;
use crate::error::{at_stage, PipelineError, PipelineResult};
use crate::matrix_io::{connectivity_matrix_csv, difference_matrix_csv, MatrixFile};
use crate::recording_io::load_recording;
use crate::render::render_circular;
use eegsync_core::aggregate::{band_sweep, summary_csv, BandSweepResult};
use eegsync_core::connectivity::{top_pairs, RankSign};
use eegsync_core::epoch::{epoch, EpochSet};
use eegsync_core::filter::{apply_bandpass, apply_notch, FilterSpec};
use eegsync_core::montage::{build_region_map_with, RegionMap};
use eegsync_core::recording::Recording;
use eegsync_core::spectral::{band_power, stft};
use eegsync_core::synth::generate_labeled;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

/// Chords drawn per circular graph.
const RENDER_TOP_K: usize = 200;
/// Rows in the per-band top-pair tables.
const TOP_PAIRS_K: usize = 20;

/// What `run` produced: the manifest, the files written and the sweep
/// results kept in memory for callers that want them.
pub struct RunReport {
    pub manifest_path: PathBuf,
    pub written: Vec<PathBuf>,
    pub sweep: BandSweepResult,
    pub summary_csv: String,
}

struct StageTimer {
    timings: Vec<(String, u128)>,
}

impl StageTimer {
    fn new() -> Self {
        Self { timings: Vec::new() }
    }

    fn time<T>(
        &mut self,
        stage: &'static str,
        f: impl FnOnce() -> PipelineResult<T>,
    ) -> PipelineResult<T> {
        let start = Instant::now();
        let out = f()?;
        self.timings.push((stage.to_string(), start.elapsed().as_millis()));
        Ok(out)
    }
}

fn synth_recording(cfg: &PipelineConfig, cond_index: usize) -> PipelineResult<Recording> {
    let layout = cfg.synth.as_ref().expect("validated");
    let labels = cfg.synth_labels()?;
    let spec = cfg.coupling_spec(cond_index, &labels)?;
    at_stage(
        "load",
        generate_labeled(&spec, &labels, layout.fs, layout.duration_s),
    )
}

/// Generate every synthetic condition and write it as a recording file.
/// This is the `synth` subcommand.
pub fn write_synth_recordings(cfg: &PipelineConfig) -> PipelineResult<Vec<PathBuf>> {
    std::fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| PipelineError::new("write", format!("{}: {e}", cfg.output_dir.display())))?;
    let mut written = Vec::new();
    for (idx, cond) in cfg.conditions.iter().enumerate() {
        if cond.synth.is_none() {
            continue;
        }
        let rec = synth_recording(cfg, idx)?;
        let path = cfg.output_dir.join(format!("{}.eeg", cond.name));
        crate::recording_io::save_recording(&rec, &cond.name, &path)?;
        written.push(path);
    }
    if written.is_empty() {
        return Err(PipelineError::new("config", "no synthetic conditions to generate"));
    }
    Ok(written)
}

fn drop_excluded(rec: Recording, exclusions: &[String]) -> PipelineResult<Recording> {
    let drop: Vec<String> = rec
        .channels()
        .iter()
        .filter(|ch| exclusions.iter().any(|e| e.eq_ignore_ascii_case(ch)))
        .cloned()
        .collect();
    if drop.is_empty() {
        Ok(rec)
    } else {
        at_stage("load", rec.without_channels(&drop))
    }
}

fn features_csv(cfg: &PipelineConfig, set: &EpochSet) -> PipelineResult<String> {
    let window_len = (cfg.stft.window_s * set.fs).round() as usize;
    let hop = (cfg.stft.hop_s * set.fs).round().max(1.0) as usize;
    let bands = cfg.band_definitions();
    let mut out = String::from("channel,epoch,window");
    for b in &bands {
        out.push(',');
        out.push_str(&b.name.to_string());
    }
    out.push('\n');
    for (e, segment) in set.epochs.iter().enumerate() {
        for (ch, samples) in segment.iter().enumerate() {
            let sg = at_stage(
                "features",
                stft(samples, set.fs, window_len, hop, cfg.stft_window_fn()),
            )?;
            let bp = at_stage("features", band_power(&sg, &bands))?;
            for (w, row) in bp.iter().enumerate() {
                out.push_str(&set.channels[ch]);
                out.push_str(&format!(",{e},{w}"));
                for v in row {
                    out.push(',');
                    out.push_str(&v.to_string());
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn regions_csv(rm: &RegionMap) -> String {
    let mut out = String::from("channel,region\n");
    for (channel, region) in rm.assignments() {
        out.push_str(&format!("{channel},{region}\n"));
    }
    out
}

/// Run the full pipeline described by a validated config.
pub fn run_pipeline(cfg: &PipelineConfig) -> PipelineResult<RunReport> {
    let mut timer = StageTimer::new();
    timer.time("config", || at_stage("config", cfg.validate().map_err(|e| e.message)))?;
    if cfg.conditions.len() != 2 {
        return Err(PipelineError::new(
            "config",
            format!("run needs exactly two conditions, got {}", cfg.conditions.len()),
        ));
    }

    // ingestion: files or synthetic sources, exclusions dropped
    let recordings: Vec<(String, Recording)> = timer.time("load", || {
        cfg.conditions
            .iter()
            .enumerate()
            .map(|(idx, cond)| {
                let rec = if cond.synth.is_some() {
                    synth_recording(cfg, idx)?
                } else {
                    let path = cond.path.as_ref().expect("validated");
                    load_recording(path, cond.fs, &[])?.recording
                };
                Ok((cond.name.clone(), drop_excluded(rec, &cfg.exclusions)?))
            })
            .collect()
    })?;

    // preprocessing: band-pass then notch, forward-backward
    let preprocessed: Vec<(String, Recording)> = timer.time("preprocess", || {
        let bp = FilterSpec::band_pass(
            cfg.filter.bandpass.low_hz,
            cfg.filter.bandpass.high_hz,
            cfg.filter.bandpass.order,
        );
        let notch = FilterSpec::notch(cfg.filter.notch.q);
        recordings
            .iter()
            .map(|(name, rec)| {
                let rec = at_stage("preprocess", apply_bandpass(rec, &bp))?;
                let rec = at_stage(
                    "preprocess",
                    apply_notch(&rec, &cfg.filter.notch.centers_hz, &notch),
                )?;
                Ok((name.clone(), rec))
            })
            .collect()
    })?;

    let epochs: BTreeMap<String, EpochSet> = timer.time("epoch", || {
        preprocessed
            .iter()
            .map(|(name, rec)| {
                Ok((
                    name.clone(),
                    at_stage(
                        "epoch",
                        epoch(rec, cfg.epoch.length_s, cfg.epoch.overlap_s, name),
                    )?,
                ))
            })
            .collect()
    })?;

    let rm = timer.time("regions", || {
        let channels = preprocessed[0].1.channels().to_vec();
        at_stage(
            "regions",
            build_region_map_with(&channels, &[], &cfg.region_override_map()),
        )
    })?;

    let feature_files: Vec<(String, String)> = timer.time("features", || {
        epochs
            .iter()
            .map(|(name, set)| Ok((name.clone(), features_csv(cfg, set)?)))
            .collect()
    })?;

    let sweep = timer.time("connectivity", || {
        at_stage(
            "connectivity",
            band_sweep(
                &epochs,
                &cfg.conditions[0].name,
                &cfg.conditions[1].name,
                &cfg.metric_kinds(),
                &cfg.band_definitions(),
                &rm,
                cfg.threshold,
                &cfg.connectivity_params(),
            ),
        )
    })?;

    // render figures and rank tables
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let summary = summary_csv(&sweep.summaries);
    timer.time("render", || {
        files.push((cfg.output_dir.join("summary.csv"), summary.clone().into_bytes()));
        files.push((cfg.output_dir.join("regions.csv"), regions_csv(&rm).into_bytes()));
        for (name, text) in &feature_files {
            files.push((
                cfg.output_dir.join(format!("features_{name}.csv")),
                text.clone().into_bytes(),
            ));
        }
        for m in &sweep.matrices {
            let stem = format!("matrix_{}_{}_{}", m.metric, m.band.name, m.condition);
            files.push((
                cfg.output_dir.join(format!("{stem}.csv")),
                connectivity_matrix_csv(m).into_bytes(),
            ));
            let svg = render_circular(&MatrixFile::Connectivity(m.clone()), &rm, RENDER_TOP_K)?;
            files.push((
                cfg.output_dir.join(format!("circular_{}_{}_{}.svg", m.metric, m.band.name, m.condition)),
                svg.into_bytes(),
            ));
        }
        for d in &sweep.differences {
            let stem = format!("diff_{}_{}", d.metric, d.band.name);
            files.push((
                cfg.output_dir.join(format!("{stem}.csv")),
                difference_matrix_csv(d).into_bytes(),
            ));
            let svg = render_circular(&MatrixFile::Difference(d.clone()), &rm, RENDER_TOP_K)?;
            files.push((
                cfg.output_dir.join(format!("circular_{stem}.svg")),
                svg.into_bytes(),
            ));
            let ranked = at_stage("render", top_pairs(d, TOP_PAIRS_K, RankSign::Absolute))?;
            let mut table = String::from("rank,channel_a,channel_b,value\n");
            for (rank, (a, b, v)) in ranked.iter().enumerate() {
                table.push_str(&format!("{},{a},{b},{v}\n", rank + 1));
            }
            files.push((
                cfg.output_dir.join(format!("top_pairs_{}_{}.csv", d.metric, d.band.name)),
                table.into_bytes(),
            ));
        }
        Ok(())
    })?;

    // single writer, manifest last; undo partial output on failure
    let mut written: Vec<PathBuf> = Vec::new();
    let write_all = |files: &[(PathBuf, Vec<u8>)],
                     written: &mut Vec<PathBuf>|
     -> PipelineResult<()> {
        std::fs::create_dir_all(&cfg.output_dir).map_err(|e| {
            PipelineError::new("write", format!("{}: {e}", cfg.output_dir.display()))
        })?;
        for (path, bytes) in files {
            std::fs::write(path, bytes)
                .map_err(|e| PipelineError::new("write", format!("{}: {e}", path.display())))?;
            written.push(path.clone());
        }
        Ok(())
    };
    if let Err(e) = write_all(&files, &mut written) {
        for path in &written {
            let _ = std::fs::remove_file(path);
        }
        return Err(e);
    }

    let manifest_path = cfg.output_dir.join("manifest.json");
    let manifest = serde_json::json!({
        "tool": { "name": "eegsync", "version": env!("CARGO_PKG_VERSION") },
        "config": cfg,
        "conditions": cfg.conditions.iter().map(|c| {
            serde_json::json!({
                "name": c.name,
                "epochs": epochs[&c.name].n_epochs(),
                "channels": epochs[&c.name].n_channels(),
            })
        }).collect::<Vec<_>>(),
        "results": {
            "summary_rows": sweep.summaries.len(),
            "matrices": sweep.matrices.len(),
            "differences": sweep.differences.len(),
        },
        "outputs": written.iter().map(|p| p.file_name().unwrap().to_string_lossy()).collect::<Vec<_>>(),
        "timings_ms": timer.timings.iter().map(|(s, ms)| serde_json::json!({"stage": s, "ms": ms})).collect::<Vec<_>>(),
    });
    let manifest_bytes = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| PipelineError::new("write", e.to_string()))?;
    if let Err(e) = std::fs::write(&manifest_path, &manifest_bytes) {
        for path in &written {
            let _ = std::fs::remove_file(path);
        }
        return Err(PipelineError::new("write", format!("{}: {e}", manifest_path.display())));
    }
    written.push(manifest_path.clone());

    Ok(RunReport { manifest_path, written, sweep, summary_csv: summary })
}
