//! Labeled corpus handling: manifests in, per-track feature tables out, and
//! per-genre summaries.

mod extract;
mod format;
mod manifest;
mod summary;
mod table;

pub use extract::{
    analyze_buffer, analyze_track, extract_track, load_and_preprocess, ExtractConfig, TrackAnalysis,
};
pub use format::fmt_sig9;
pub use manifest::{load_manifest, TrackRecord};
pub use summary::{summarize_by_genre, GenreStats, GenreSummary, RangeComparison};
pub use table::{
    feature_table_json, read_feature_csv, write_feature_csv, FeatureRow, LabeledDataset,
};

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// The three RPG sub-genres, with stable integer codes 0/1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenreLabel {
    AdventureRpg = 0,
    ActionRpg = 1,
    StrategyRpg = 2,
}

impl GenreLabel {
    pub const ALL: [GenreLabel; 3] = [
        GenreLabel::AdventureRpg,
        GenreLabel::ActionRpg,
        GenreLabel::StrategyRpg,
    ];

    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<Self> {
        Self::ALL.get(code).copied()
    }

    /// Manifest spelling, e.g. `adventure_rpg`.
    pub fn slug(self) -> &'static str {
        match self {
            GenreLabel::AdventureRpg => "adventure_rpg",
            GenreLabel::ActionRpg => "action_rpg",
            GenreLabel::StrategyRpg => "strategy_rpg",
        }
    }
}

impl fmt::Display for GenreLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for GenreLabel {
    type Err = Error;

    /// Accepts the slug in any case, or the integer code.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(g) = GenreLabel::ALL
            .iter()
            .find(|g| g.slug().eq_ignore_ascii_case(t))
        {
            return Ok(*g);
        }
        t.parse::<usize>()
            .ok()
            .and_then(GenreLabel::from_code)
            .ok_or_else(|| Error::invalid(format!("unknown genre {t:?}")))
    }
}

impl Serialize for GenreLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.slug())
    }
}

pub const N_CHROMA: usize = 12;
/// Default number of cepstral coefficients.
pub const N_MFCC: usize = 13;
/// Scalars ahead of the MFCC block: tempo, ZCR mean/std, centroid mean/std,
/// 12 chroma means.
const N_LEADING: usize = 1 + 2 + 2 + N_CHROMA;
/// Scalars per track with the default MFCC count: the leading block plus
/// 13 MFCC means and 13 MFCC ranges.
pub const FEATURE_DIM: usize = N_LEADING + 2 * N_MFCC;

const CHROMA_COLUMN_NAMES: [&str; N_CHROMA] = [
    "c", "cs", "d", "ds", "e", "f", "fs", "g", "gs", "a", "as", "b",
];

/// Column names of the feature vector, in vector order.
pub fn feature_names(n_mfcc: usize) -> Vec<String> {
    let mut names: Vec<String> = [
        "tempo_bpm",
        "zcr_mean",
        "zcr_std",
        "centroid_mean_hz",
        "centroid_std_hz",
    ]
    .map(String::from)
    .into();
    names.extend(
        CHROMA_COLUMN_NAMES
            .iter()
            .map(|c| format!("chroma_mean_{c}")),
    );
    names.extend((0..n_mfcc).map(|k| format!("mfcc_mean_{k:02}")));
    names.extend((0..n_mfcc).map(|k| format!("mfcc_range_{k:02}")));
    names
}

/// Expand a feature selection (exact column names or group names such as
/// `chroma`, `mfcc_mean`, `mfcc`) into indices of `names`, keeping vector order.
pub fn resolve_feature_subset(names: &[String], selection: &[String]) -> Result<Vec<usize>> {
    let mut chosen = vec![false; names.len()];
    for item in selection {
        let key = item.trim().to_ascii_lowercase();
        let prefix = match key.as_str() {
            "tempo" => Some("tempo_"),
            "zcr" => Some("zcr_"),
            "centroid" => Some("centroid_"),
            "chroma" => Some("chroma_"),
            "mfcc" => Some("mfcc_"),
            "mfcc_mean" => Some("mfcc_mean_"),
            "mfcc_range" => Some("mfcc_range_"),
            _ => None,
        };
        let mut hit = false;
        for (i, n) in names.iter().enumerate() {
            if prefix.map_or(*n == key, |p| n.starts_with(p)) {
                chosen[i] = true;
                hit = true;
            }
        }
        if !hit {
            return Err(Error::invalid(format!("unknown feature {item:?}")));
        }
    }
    let idx: Vec<usize> = (0..names.len()).filter(|&i| chosen[i]).collect();
    if idx.is_empty() {
        return Err(Error::invalid("feature selection is empty"));
    }
    Ok(idx)
}

/// Aggregated per-track feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackFeatures {
    pub tempo_bpm: f64,
    pub zcr_mean: f64,
    pub zcr_std: f64,
    pub centroid_mean_hz: f64,
    pub centroid_std_hz: f64,
    pub chroma_mean: [f64; N_CHROMA],
    pub mfcc_mean: Vec<f64>,
    /// Per-coefficient `max - min` over frames.
    pub mfcc_range: Vec<f64>,
}

impl TrackFeatures {
    pub fn n_mfcc(&self) -> usize {
        self.mfcc_mean.len()
    }

    pub fn dim(&self) -> usize {
        N_LEADING + 2 * self.n_mfcc()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.extend([
            self.tempo_bpm,
            self.zcr_mean,
            self.zcr_std,
            self.centroid_mean_hz,
            self.centroid_std_hz,
        ]);
        v.extend_from_slice(&self.chroma_mean);
        v.extend_from_slice(&self.mfcc_mean);
        v.extend_from_slice(&self.mfcc_range);
        v
    }

    /// Inverse of [`TrackFeatures::to_vec`]; the MFCC count is inferred from the length.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() < N_LEADING + 2 || !(v.len() - N_LEADING).is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "feature vector has {} values",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("feature vector contains non-finite values"));
        }
        let n_mfcc = (v.len() - N_LEADING) / 2;
        let chroma: [f64; N_CHROMA] = v[5..N_LEADING].try_into().expect("length checked");
        Ok(Self {
            tempo_bpm: v[0],
            zcr_mean: v[1],
            zcr_std: v[2],
            centroid_mean_hz: v[3],
            centroid_std_hz: v[4],
            chroma_mean: chroma,
            mfcc_mean: v[N_LEADING..N_LEADING + n_mfcc].to_vec(),
            mfcc_range: v[N_LEADING + n_mfcc..].to_vec(),
        })
    }
}
