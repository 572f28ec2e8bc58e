use serde::Serialize;

use crate::{Error, Result};

/// Per-column mean and population standard deviation of a training matrix.
/// Columns with zero spread are only centered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandardizationParams {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StandardizationParams {
    /// Two-pass statistics over at least one row.
    pub(crate) fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::invalid("no rows to standardize"))?;
        let dim = first.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("rows differ in length"));
        }
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { v - m })
            .collect()
    }
}

/// Fit z-score parameters; needs at least two rows.
pub fn fit_standardization(matrix: &[Vec<f64>]) -> Result<StandardizationParams> {
    if matrix.len() < 2 {
        return Err(Error::invalid(format!(
            "standardization needs at least 2 rows, got {}",
            matrix.len()
        )));
    }
    StandardizationParams::from_rows(matrix)
}
