use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::knn::KnnModel;
use super::rng::SplitMix64;
use crate::dataset::{GenreLabel, LabeledDataset};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Split,
    Loocv,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Split => "split",
            Protocol::Loocv => "loocv",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemPrediction {
    pub track_id: String,
    #[serde(rename = "true")]
    pub truth: GenreLabel,
    pub predicted: GenreLabel,
}

/// Outcome of one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub protocol: Protocol,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_fraction: Option<f64>,
    pub n_train: usize,
    pub n_eval: usize,
    pub accuracy: f64,
    /// Rows are true genres, columns predicted, both in genre-code order.
    pub confusion: [[usize; 3]; 3],
    pub per_item: Vec<ItemPrediction>,
}

impl EvalReport {
    fn from_predictions(
        protocol: Protocol,
        k: usize,
        n_train: usize,
        per_item: Vec<ItemPrediction>,
    ) -> Self {
        let mut confusion = [[0usize; 3]; 3];
        for p in &per_item {
            confusion[p.truth.code()][p.predicted.code()] += 1;
        }
        let correct: usize = (0..3).map(|i| confusion[i][i]).sum();
        let accuracy = if per_item.is_empty() {
            0.0
        } else {
            correct as f64 / per_item.len() as f64
        };
        Self {
            protocol,
            k,
            seed: None,
            test_fraction: None,
            n_train,
            n_eval: per_item.len(),
            accuracy,
            confusion,
            per_item,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "protocol: {}  k: {}", self.protocol, self.k)?;
        if let (Some(seed), Some(frac)) = (self.seed, self.test_fraction) {
            writeln!(f, "seed: {seed}  test fraction: {frac}")?;
        }
        let correct: usize = (0..3).map(|i| self.confusion[i][i]).sum();
        writeln!(
            f,
            "accuracy: {:.4} ({correct}/{})",
            self.accuracy, self.n_eval
        )?;
        writeln!(f)?;
        writeln!(
            f,
            "{:>16} | {:>13} {:>13} {:>13}",
            "true \\ pred", "adventure_rpg", "action_rpg", "strategy_rpg"
        )?;
        for g in GenreLabel::ALL {
            let row = &self.confusion[g.code()];
            writeln!(
                f,
                "{:>16} | {:>13} {:>13} {:>13}",
                g.slug(),
                row[0],
                row[1],
                row[2]
            )?;
        }
        writeln!(f)?;
        for p in &self.per_item {
            let mark = if p.truth == p.predicted { ' ' } else { '*' };
            writeln!(
                f,
                "{mark} {:<24} {:<14} -> {}",
                p.track_id,
                p.truth.slug(),
                p.predicted.slug()
            )?;
        }
        Ok(())
    }
}

/// Stratified split: per class (in code order) the class members, in dataset
/// order, are shuffled with one shared [`SplitMix64`] stream and the first
/// `round(test_fraction * n_class)` become test items. Returns sorted
/// (train, test) index lists.
pub fn stratified_split(
    labels: &[GenreLabel],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for genre in GenreLabel::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == genre).collect();
        if members.is_empty() {
            continue;
        }
        let n_test = (test_fraction * members.len() as f64).round() as usize;
        if n_test == 0 || n_test >= members.len() {
            return Err(Error::invalid(format!(
                "class {genre} has {} tracks: too few for a {test_fraction} test split",
                members.len()
            )));
        }
        rng.shuffle(&mut members);
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

fn rows(ds: &LabeledDataset, idx: &[usize]) -> (Vec<Vec<f64>>, Vec<GenreLabel>) {
    (
        idx.iter().map(|&i| ds.matrix[i].clone()).collect(),
        idx.iter().map(|&i| ds.labels[i]).collect(),
    )
}

/// Train on a stratified split and evaluate on the held-out part.
/// Standardization is fitted on training rows only.
pub fn evaluate_split(
    ds: &LabeledDataset,
    test_fraction: f64,
    seed: u64,
    k: usize,
) -> Result<EvalReport> {
    let (train_idx, test_idx) = stratified_split(&ds.labels, test_fraction, seed)?;
    let (train, labels) = rows(ds, &train_idx);
    let model = KnnModel::fit(&train, &labels, k)?;
    let per_item = test_idx
        .iter()
        .map(|&i| {
            Ok(ItemPrediction {
                track_id: ds.track_ids[i].clone(),
                truth: ds.labels[i],
                predicted: model.predict(&ds.matrix[i])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = EvalReport::from_predictions(Protocol::Split, k, train_idx.len(), per_item);
    report.seed = Some(seed);
    report.test_fraction = Some(test_fraction);
    Ok(report)
}

/// Leave-one-out: every item is predicted by a model fitted (standardization
/// included) on all the others.
pub fn evaluate_loocv(ds: &LabeledDataset, k: usize) -> Result<EvalReport> {
    let n = ds.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "leave-one-out needs at least 2 items, got {n}"
        )));
    }
    if k == 0 || k > n - 1 {
        return Err(Error::invalid(format!(
            "k must be in 1..={} for leave-one-out, got {k}",
            n - 1
        )));
    }
    let per_item = (0..n)
        .into_par_iter()
        .map(|held| {
            let idx: Vec<usize> = (0..n).filter(|&i| i != held).collect();
            let (train, labels) = rows(ds, &idx);
            let model = KnnModel::fit(&train, &labels, k)?;
            Ok(ItemPrediction {
                track_id: ds.track_ids[held].clone(),
                truth: ds.labels[held],
                predicted: model.predict(&ds.matrix[held])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_predictions(
        Protocol::Loocv,
        k,
        n - 1,
        per_item,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use GenreLabel::*;

    fn dataset(matrix: Vec<Vec<f64>>, labels: Vec<GenreLabel>) -> LabeledDataset {
        let ids = (0..matrix.len()).map(|i| format!("t{i}")).collect();
        let names = (0..matrix[0].len()).map(|j| format!("f{j}")).collect();
        LabeledDataset::new(ids, names, matrix, labels).unwrap()
    }

    fn corpus_labels() -> Vec<GenreLabel> {
        (0..27)
            .map(|i| GenreLabel::from_code(i / 9).unwrap())
            .collect()
    }

    #[test]
    fn split_shape_for_27_tracks() {
        let (train, test) = stratified_split(&corpus_labels(), 1.0 / 3.0, 42).unwrap();
        assert_eq!(test.len(), 9);
        assert_eq!(train.len(), 18);
        let labels = corpus_labels();
        for g in GenreLabel::ALL {
            assert_eq!(test.iter().filter(|&&i| labels[i] == g).count(), 3);
        }
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort();
        assert_eq!(all, (0..27).collect::<Vec<_>>());
    }

    #[test]
    fn split_depends_on_seed_only() {
        let a = stratified_split(&corpus_labels(), 1.0 / 3.0, 5).unwrap();
        let b = stratified_split(&corpus_labels(), 1.0 / 3.0, 5).unwrap();
        let c = stratified_split(&corpus_labels(), 1.0 / 3.0, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn small_class_rejected_by_name() {
        let labels = vec![ActionRpg, ActionRpg, ActionRpg, StrategyRpg];
        let err = stratified_split(&labels, 1.0 / 3.0, 1).unwrap_err();
        assert!(err.to_string().contains("strategy_rpg"), "{err}");
        assert!(stratified_split(&labels, 0.0, 1).is_err());
        assert!(stratified_split(&labels, 1.0, 1).is_err());
    }

    #[test]
    fn loocv_two_items_always_wrong() {
        let ds = dataset(vec![vec![0.0], vec![1.0]], vec![ActionRpg, StrategyRpg]);
        let r = evaluate_loocv(&ds, 1).unwrap();
        assert_eq!(r.accuracy, 0.0);
        assert_eq!(r.confusion[1][2], 1);
        assert_eq!(r.confusion[2][1], 1);
    }

    #[test]
    fn loocv_duplicated_dataset_is_perfect() {
        let base: Vec<Vec<f64>> = (0..9)
            .map(|i| vec![(i * 7 % 5) as f64, (i * 3 % 4) as f64 + 0.1 * i as f64])
            .collect();
        let matrix: Vec<Vec<f64>> = base.iter().chain(&base).cloned().collect();
        let labels: Vec<GenreLabel> = (0..18)
            .map(|i| GenreLabel::from_code((i % 9) % 3).unwrap())
            .collect();
        let r = evaluate_loocv(&dataset(matrix, labels), 1).unwrap();
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn loocv_argument_checks() {
        let ds = dataset(vec![vec![0.0]], vec![ActionRpg]);
        assert!(evaluate_loocv(&ds, 1).is_err());
        let ds = dataset(vec![vec![0.0], vec![1.0], vec![2.0]], vec![ActionRpg; 3]);
        assert!(evaluate_loocv(&ds, 3).is_err());
    }

    #[test]
    fn report_invariants_and_json() {
        let matrix: Vec<Vec<f64>> = (0..27)
            .map(|i| vec![(i / 9) as f64 * 10.0 + (i % 9) as f64 * 0.1])
            .collect();
        let ds = dataset(matrix, corpus_labels());
        let r = evaluate_split(&ds, 1.0 / 3.0, 3, 3).unwrap();
        assert_eq!(r.accuracy, 1.0);
        let total: usize = r.confusion.iter().flatten().sum();
        assert_eq!(total, r.per_item.len());
        for g in GenreLabel::ALL {
            assert_eq!(r.confusion[g.code()].iter().sum::<usize>(), 3);
        }
        let json: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(json["protocol"], "split");
        assert_eq!(json["accuracy"], 1.0);
        assert_eq!(json["per_item"][0]["true"], "adventure_rpg");
        assert_eq!(json["confusion"][0][0], 3);
        let text = r.to_string();
        assert!(text.contains("accuracy: 1.0000 (9/9)"));
    }
}
