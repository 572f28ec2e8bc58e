//! The per-track feature table: CSV with `track_id`, one column per feature
//! and a trailing `genre` column, plus a JSON rendering of the same rows.

use serde_json::{Map, Value};

use super::format::fmt_sig9;
use super::{feature_names, GenreLabel, TrackFeatures};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub track_id: String,
    pub features: TrackFeatures,
    pub genre: GenreLabel,
}

fn common_n_mfcc(rows: &[FeatureRow]) -> Result<usize> {
    let n = rows.first().map_or(super::N_MFCC, |r| r.features.n_mfcc());
    if rows.iter().any(|r| r.features.n_mfcc() != n) {
        return Err(Error::invalid(
            "rows disagree on the number of MFCC coefficients",
        ));
    }
    Ok(n)
}

/// Serialize rows with every float at 9 significant digits.
pub fn write_feature_csv(rows: &[FeatureRow]) -> Result<String> {
    let names = feature_names(common_n_mfcc(rows)?);
    let mut out = String::new();
    out.push_str("track_id,");
    out.push_str(&names.join(","));
    out.push_str(",genre\n");
    for row in rows {
        if row.track_id.contains([',', '"', '\n', '\r']) {
            return Err(Error::invalid(format!(
                "track id {:?} is not CSV-safe",
                row.track_id
            )));
        }
        out.push_str(&row.track_id);
        for v in row.features.to_vec() {
            out.push(',');
            out.push_str(&fmt_sig9(v));
        }
        out.push(',');
        out.push_str(row.genre.slug());
        out.push('\n');
    }
    Ok(out)
}

/// Parse a feature table written by [`write_feature_csv`]. The header must
/// match the fixed schema exactly (any MFCC count).
pub fn read_feature_csv(text: &str) -> Result<Vec<FeatureRow>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Schema(format!("unreadable header: {e}")))?
        .iter()
        .map(String::from)
        .collect();
    if header.len() < 3 || header[0] != "track_id" || header[header.len() - 1] != "genre" {
        return Err(Error::Schema(
            "feature table must start with track_id and end with genre".into(),
        ));
    }
    let n_features = header.len() - 2;
    let n_mfcc = n_features.checked_sub(17).map(|r| r / 2).unwrap_or(0);
    if n_mfcc == 0 || header[1..header.len() - 1] != feature_names(n_mfcc)[..] {
        return Err(Error::Schema(
            "feature columns do not match the expected schema".into(),
        ));
    }

    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            reason: e.to_string(),
        })?;
        let values = (1..=n_features)
            .map(|c| {
                let cell = &rec[c];
                cell.trim().parse::<f64>().map_err(|_| Error::Parse {
                    row,
                    reason: format!("column {} is not a number: {cell:?}", header[c]),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let features = TrackFeatures::from_slice(&values).map_err(|e| Error::Parse {
            row,
            reason: e.to_string(),
        })?;
        let genre = rec[header.len() - 1]
            .parse::<GenreLabel>()
            .map_err(|e| Error::Parse {
                row,
                reason: e.to_string(),
            })?;
        rows.push(FeatureRow {
            track_id: rec[0].to_string(),
            features,
            genre,
        });
    }
    Ok(rows)
}

/// JSON array with one object per row, keys in CSV column order.
pub fn feature_table_json(rows: &[FeatureRow]) -> Result<Value> {
    let names = feature_names(common_n_mfcc(rows)?);
    let items = rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            obj.insert("track_id".into(), Value::String(row.track_id.clone()));
            for (name, v) in names.iter().zip(row.features.to_vec()) {
                let rounded: f64 = fmt_sig9(v).parse().expect("formatted float");
                obj.insert(name.clone(), serde_json::json!(rounded));
            }
            obj.insert("genre".into(), Value::String(row.genre.slug().into()));
            Value::Object(obj)
        })
        .collect();
    Ok(Value::Array(items))
}

/// Feature matrix with labels, ready for classification.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub track_ids: Vec<String>,
    pub feature_names: Vec<String>,
    /// One row per track, `feature_names.len()` columns.
    pub matrix: Vec<Vec<f64>>,
    pub labels: Vec<GenreLabel>,
}

impl LabeledDataset {
    pub fn new(
        track_ids: Vec<String>,
        feature_names: Vec<String>,
        matrix: Vec<Vec<f64>>,
        labels: Vec<GenreLabel>,
    ) -> Result<Self> {
        if track_ids.len() != matrix.len() || labels.len() != matrix.len() {
            return Err(Error::invalid("track ids, rows and labels differ in count"));
        }
        if matrix.iter().any(|r| r.len() != feature_names.len()) {
            return Err(Error::invalid(
                "every row must have one value per feature name",
            ));
        }
        if matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature matrix contains non-finite values"));
        }
        Ok(Self {
            track_ids,
            feature_names,
            matrix,
            labels,
        })
    }

    pub fn from_rows(rows: &[FeatureRow]) -> Result<Self> {
        let names = feature_names(common_n_mfcc(rows)?);
        Self::new(
            rows.iter().map(|r| r.track_id.clone()).collect(),
            names,
            rows.iter().map(|r| r.features.to_vec()).collect(),
            rows.iter().map(|r| r.genre).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    /// Keep only the given feature columns.
    pub fn select_features(&self, columns: &[usize]) -> Result<Self> {
        if let Some(c) = columns.iter().find(|&&c| c >= self.dim()) {
            return Err(Error::invalid(format!("feature column {c} out of range")));
        }
        Ok(Self {
            track_ids: self.track_ids.clone(),
            feature_names: columns
                .iter()
                .map(|&c| self.feature_names[c].clone())
                .collect(),
            matrix: self
                .matrix
                .iter()
                .map(|r| columns.iter().map(|&c| r[c]).collect())
                .collect(),
            labels: self.labels.clone(),
        })
    }

    /// Same features with replaced labels.
    pub fn with_labels(&self, labels: Vec<GenreLabel>) -> Result<Self> {
        Self::new(
            self.track_ids.clone(),
            self.feature_names.clone(),
            self.matrix.clone(),
            labels,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::FEATURE_DIM;
    use proptest::prelude::*;

    fn row(id: &str, seed: f64, genre: GenreLabel) -> FeatureRow {
        let v: Vec<f64> = (0..FEATURE_DIM)
            .map(|i| (seed + i as f64).sin() * 10f64.powi(i as i32 % 5 - 2))
            .collect();
        FeatureRow {
            track_id: id.into(),
            features: TrackFeatures::from_slice(&v).unwrap(),
            genre,
        }
    }

    #[test]
    fn header_layout() {
        let csv = write_feature_csv(&[row("t0", 1.0, GenreLabel::ActionRpg)]).unwrap();
        let header = csv.lines().next().unwrap();
        let cols: Vec<&str> = header.split(',').collect();
        assert_eq!(cols.len(), FEATURE_DIM + 2);
        assert_eq!(cols[0], "track_id");
        assert_eq!(cols[1], "tempo_bpm");
        assert_eq!(*cols.last().unwrap(), "genre");
        assert!(csv.lines().nth(1).unwrap().ends_with(",action_rpg"));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            read_feature_csv("id,genre\n"),
            Err(Error::Schema(_))
        ));
        let good = write_feature_csv(&[row("t0", 1.0, GenreLabel::ActionRpg)]).unwrap();
        let bad_num = good.replacen("t0,", "t0,abc", 1);
        assert!(matches!(
            read_feature_csv(&bad_num),
            Err(Error::Parse { row: 2, .. })
        ));
        let bad_genre = good.replace("action_rpg", "jrpg");
        assert!(matches!(
            read_feature_csv(&bad_genre),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(write_feature_csv(&[row("a,b", 1.0, GenreLabel::ActionRpg)]).is_err());
    }

    #[test]
    fn json_mirrors_columns() {
        let rows = [row("t0", 1.0, GenreLabel::StrategyRpg)];
        let json = feature_table_json(&rows).unwrap();
        let obj = json[0].as_object().unwrap();
        let keys: Vec<&String> = obj.keys().collect();
        let csv = write_feature_csv(&rows).unwrap();
        let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
        assert_eq!(keys.len(), header.len());
        for (k, h) in keys.iter().zip(&header) {
            assert_eq!(k.as_str(), *h);
        }
        assert_eq!(obj["genre"], "strategy_rpg");
    }

    #[test]
    fn dataset_selection() {
        let rows = [
            row("a", 1.0, GenreLabel::AdventureRpg),
            row("b", 2.0, GenreLabel::ActionRpg),
        ];
        let ds = LabeledDataset::from_rows(&rows).unwrap();
        assert_eq!(ds.dim(), FEATURE_DIM);
        let sub = ds.select_features(&[0, 5]).unwrap();
        assert_eq!(sub.feature_names, vec!["tempo_bpm", "chroma_mean_c"]);
        assert_eq!(sub.matrix[1], vec![ds.matrix[1][0], ds.matrix[1][5]]);
        assert!(ds.select_features(&[FEATURE_DIM]).is_err());
        assert!(LabeledDataset::new(
            vec!["x".into()],
            vec!["f".into()],
            vec![vec![f64::NAN]],
            vec![GenreLabel::ActionRpg]
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_byte_identical(
            vals in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, FEATURE_DIM), 0..6),
        ) {
            let rows: Vec<FeatureRow> = vals
                .iter()
                .enumerate()
                .map(|(i, v)| FeatureRow {
                    track_id: format!("track_{i:03}"),
                    features: TrackFeatures::from_slice(v).unwrap(),
                    genre: GenreLabel::from_code(i % 3).unwrap(),
                })
                .collect();
            let first = write_feature_csv(&rows).unwrap();
            let parsed = read_feature_csv(&first).unwrap();
            prop_assert_eq!(parsed.len(), rows.len());
            let second = write_feature_csv(&parsed).unwrap();
            prop_assert_eq!(first, second);
        }
    }
}
