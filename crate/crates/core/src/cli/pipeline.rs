use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;

use super::produced::{OutputDir, ProducedManifest};
use super::{CliError, Command, RunConfig, UsageError};
use crate::audio_io::encode_wav;
use crate::classify::{evaluate_loocv, evaluate_split, EvalReport, Protocol};
use crate::dataset::{
    analyze_track, feature_names, feature_table_json, fmt_sig9, load_and_preprocess, load_manifest,
    read_feature_csv, resolve_feature_subset, summarize_by_genre, write_feature_csv, FeatureRow,
    LabeledDataset, TrackAnalysis, TrackRecord,
};
use crate::features::FrameSeries;
use crate::{Error, Result};

/// A manifest row with its path resolved and a unique, file-name-safe id.
struct Track {
    id: String,
    record: TrackRecord,
}

pub(super) fn run(cfg: &RunConfig) -> Result<ProducedManifest, CliError> {
    let mut out = OutputDir::create(&cfg.output_dir)?;
    match cfg.command {
        Command::Preprocess => preprocess(cfg, &mut out)?,
        Command::Extract => {
            let tracks = load_tracks(manifest(cfg)?)?;
            let rows = feature_rows(&tracks, &analyze_all(&tracks, cfg, false)?);
            write_features(&mut out, &rows)?;
        }
        Command::Summarize => {
            let tracks = load_tracks(manifest(cfg)?)?;
            let analyses = analyze_all(&tracks, cfg, true)?;
            write_summary(&mut out, &tracks, &analyses)?;
        }
        Command::Classify => {
            let rows = match &cfg.features_table {
                Some(table) => read_table(table)?,
                None => {
                    let tracks = load_tracks(manifest(cfg)?)?;
                    feature_rows(&tracks, &analyze_all(&tracks, cfg, false)?)
                }
            };
            write_classification(&mut out, cfg, &rows)?;
        }
        Command::Report => {
            let tracks = load_tracks(manifest(cfg)?)?;
            let analyses = analyze_all(&tracks, cfg, true)?;
            let rows = feature_rows(&tracks, &analyses);
            write_features(&mut out, &rows)?;
            write_summary(&mut out, &tracks, &analyses)?;
            write_classification(&mut out, cfg, &rows)?;
        }
    }
    Ok(out.finish(cfg.command.name())?)
}

fn manifest(cfg: &RunConfig) -> Result<&Path, UsageError> {
    cfg.manifest_path
        .as_deref()
        .ok_or_else(|| UsageError(format!("{} requires --manifest", cfg.command.name())))
}

/// Relative track paths are resolved against the manifest's directory.
fn load_tracks(manifest_path: &Path) -> Result<Vec<Track>> {
    let text = std::fs::read_to_string(manifest_path)
        .map_err(|e| Error::io(manifest_path, e).in_track(manifest_path, "manifest"))?;
    let records = load_manifest(&text).map_err(|e| e.in_track(manifest_path, "manifest"))?;
    if records.is_empty() {
        return Err(
            Error::Schema("manifest lists no tracks".into()).in_track(manifest_path, "manifest")
        );
    }
    let base = manifest_path.parent().unwrap_or(Path::new(""));
    let mut seen: HashMap<String, usize> = HashMap::new();
    Ok(records
        .into_iter()
        .enumerate()
        .map(|(i, mut record)| {
            if record.path.is_relative() {
                record.path = base.join(&record.path);
            }
            let mut id = track_id(&record.path);
            let count = seen.entry(id.clone()).or_insert(0);
            *count += 1;
            if *count > 1 {
                id = format!("{id}_{}", i + 2);
            }
            Track { id, record }
        })
        .collect())
}

fn track_id(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let id: String = stem
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    if id.is_empty() {
        "track".into()
    } else {
        id
    }
}

/// Per-track work in parallel; results and the reported error follow
/// manifest order.
fn par_map<T: Send>(
    tracks: &[Track],
    f: impl Fn(&Track) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let results: Vec<Result<T>> = tracks.par_iter().map(&f).collect();
    results.into_iter().collect()
}

fn analyze_all(tracks: &[Track], cfg: &RunConfig, keep_series: bool) -> Result<Vec<TrackAnalysis>> {
    par_map(tracks, |t| {
        let mut a = analyze_track(&t.record.path, &cfg.extract)?;
        if !keep_series {
            for s in [&mut a.zcr, &mut a.centroid, &mut a.chroma, &mut a.mfcc] {
                s.values = ndarray::Array2::zeros((s.dim(), 0));
            }
            a.tempo.onset_envelope = Vec::new();
        }
        Ok(a)
    })
}

fn feature_rows(tracks: &[Track], analyses: &[TrackAnalysis]) -> Vec<FeatureRow> {
    tracks
        .iter()
        .zip(analyses)
        .map(|(t, a)| FeatureRow {
            track_id: t.id.clone(),
            features: a.features.clone(),
            genre: t.record.genre,
        })
        .collect()
}

fn read_table(path: &Path) -> Result<Vec<FeatureRow>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path, e).in_track(path, "table"))?;
    read_feature_csv(&text).map_err(|e| e.in_track(path, "table"))
}

fn json_bytes(value: &impl serde::Serialize) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn preprocess(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let tracks = load_tracks(manifest(cfg)?)?;
    let encoded = par_map(&tracks, |t| {
        let clip = load_and_preprocess(&t.record.path, &cfg.extract.preprocess)?;
        Ok(encode_wav(&clip, cfg.wav_format))
    })?;
    let mut manifest = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::invalid(format!("cannot write manifest: {e}"));
    manifest
        .write_record(["path", "game", "genre", "title"])
        .map_err(csv_err)?;
    for (t, bytes) in tracks.iter().zip(encoded) {
        let rel = format!("audio/{}.wav", t.id);
        out.write(&rel, &bytes)?;
        manifest
            .write_record([
                rel.as_str(),
                &t.record.game,
                t.record.genre.slug(),
                &t.record.title,
            ])
            .map_err(csv_err)?;
    }
    let manifest = manifest
        .into_inner()
        .map_err(|e| Error::invalid(format!("cannot write manifest: {e}")))?;
    Ok(out.write("manifest.csv", &manifest)?)
}

fn write_features(out: &mut OutputDir, rows: &[FeatureRow]) -> Result<()> {
    out.write("features.csv", write_feature_csv(rows)?.as_bytes())?;
    out.write("features.json", &json_bytes(&feature_table_json(rows)?)?)
}

fn series_csv(series: &FrameSeries, columns: &[String]) -> String {
    let mut s = String::from("frame,time_s");
    for c in columns {
        s.push(',');
        s.push_str(c);
    }
    s.push('\n');
    for (i, frame) in series.values.columns().into_iter().enumerate() {
        s.push_str(&format!(
            "{i},{}",
            fmt_sig9(i as f64 / series.frame_rate_hz)
        ));
        for v in frame {
            s.push(',');
            s.push_str(&fmt_sig9(*v));
        }
        s.push('\n');
    }
    s
}

fn onset_csv(envelope: &[f64], frame_rate_hz: f64) -> String {
    let mut s = String::from("frame,time_s,onset_strength\n");
    for (i, v) in envelope.iter().enumerate() {
        s.push_str(&format!(
            "{i},{},{}\n",
            fmt_sig9(i as f64 / frame_rate_hz),
            fmt_sig9(*v)
        ));
    }
    s
}

fn write_summary(out: &mut OutputDir, tracks: &[Track], analyses: &[TrackAnalysis]) -> Result<()> {
    let labeled: Vec<_> = tracks
        .iter()
        .zip(analyses)
        .map(|(t, a)| (a.features.clone(), t.record.genre))
        .collect();
    let summary = summarize_by_genre(&labeled)?;
    out.write("genre_summary.csv", summary.to_csv().as_bytes())?;
    out.write("genre_ranges.csv", summary.ranges_csv().as_bytes())?;
    let json = serde_json::json!({
        "feature_names": summary.feature_names,
        "genres": summary.genres,
        "ranges": summary.range_comparison(),
    });
    out.write("summary.json", &json_bytes(&json)?)?;

    let names = feature_names(analyses[0].features.n_mfcc());
    let chroma_cols: Vec<String> = names
        .iter()
        .filter_map(|n| n.strip_prefix("chroma_mean_"))
        .map(str::to_string)
        .collect();
    let mfcc_cols: Vec<String> = (0..analyses[0].mfcc.dim())
        .map(|i| format!("mfcc_{i:02}"))
        .collect();
    for (t, a) in tracks.iter().zip(analyses) {
        let dir = format!("series/{}", t.id);
        out.write(
            &format!("{dir}/zcr.csv"),
            series_csv(&a.zcr, &["zcr".into()]).as_bytes(),
        )?;
        out.write(
            &format!("{dir}/centroid.csv"),
            series_csv(&a.centroid, &["centroid_hz".into()]).as_bytes(),
        )?;
        out.write(
            &format!("{dir}/chroma.csv"),
            series_csv(&a.chroma, &chroma_cols).as_bytes(),
        )?;
        out.write(
            &format!("{dir}/mfcc.csv"),
            series_csv(&a.mfcc, &mfcc_cols).as_bytes(),
        )?;
        out.write(
            &format!("{dir}/onset.csv"),
            onset_csv(&a.tempo.onset_envelope, a.mfcc.frame_rate_hz).as_bytes(),
        )?;
    }
    Ok(())
}

fn evaluate(cfg: &RunConfig, ds: &LabeledDataset) -> Result<EvalReport> {
    match cfg.knn.protocol {
        Protocol::Split => evaluate_split(ds, cfg.knn.test_fraction, cfg.knn.seed, cfg.knn.k),
        Protocol::Loocv => evaluate_loocv(ds, cfg.knn.k),
    }
}

fn write_classification(
    out: &mut OutputDir,
    cfg: &RunConfig,
    rows: &[FeatureRow],
) -> Result<(), CliError> {
    let mut ds = LabeledDataset::from_rows(rows)?;
    if let Some(subset) = &cfg.feature_subset {
        let columns = resolve_feature_subset(&ds.feature_names, subset)
            .map_err(|e| UsageError(e.to_string()))?;
        ds = ds.select_features(&columns)?;
    }
    let report = evaluate(cfg, &ds)?;
    out.write("report.json", report.to_json()?.as_bytes())?;
    let mut text = report.to_string();
    text.push_str(&format!(
        "\nfeatures ({}): {}\n",
        ds.dim(),
        ds.feature_names.join(", ")
    ));
    out.write("report.txt", text.as_bytes())?;
    Ok(())
}
