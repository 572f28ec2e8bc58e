use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::standardize::StandardizationParams;
use crate::dataset::GenreLabel;
use crate::{Error, Result};

/// A training row close to a query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
    pub label: GenreLabel,
}

/// Heap entry ordered by (squared distance, training index).
#[derive(PartialEq)]
struct Candidate {
    dist2: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// k-nearest-neighbour classifier over z-scored features.
///
/// Neighbours are the `k` rows with the smallest Euclidean distance, ties at
/// equal distance going to the lower training index. The vote is a plain
/// majority; classes tied on votes are separated by the smallest summed
/// neighbour distance, then by the smallest genre code.
#[derive(Debug, Clone)]
pub struct KnnModel {
    k: usize,
    train: Vec<Vec<f64>>,
    labels: Vec<GenreLabel>,
    standardization: StandardizationParams,
}

impl KnnModel {
    /// Standardize `rows` with statistics fitted on `rows` and keep them.
    /// A single training row is allowed (its standardization centers only).
    pub fn fit(rows: &[Vec<f64>], labels: &[GenreLabel], k: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::invalid("training rows and labels differ in count"));
        }
        if k == 0 || k > rows.len() {
            return Err(Error::invalid(format!(
                "k must be in 1..={}, got {k}",
                rows.len()
            )));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("training data contains non-finite values"));
        }
        let standardization = StandardizationParams::from_rows(rows)?;
        let train = rows.iter().map(|r| standardization.apply(r)).collect();
        Ok(Self {
            k,
            train,
            labels: labels.to_vec(),
            standardization,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_train(&self) -> usize {
        self.train.len()
    }

    pub fn standardization(&self) -> &StandardizationParams {
        &self.standardization
    }

    /// The `k` nearest training rows in ascending (distance, index) order.
    pub fn neighbors(&self, x: &[f64]) -> Result<Vec<Neighbor>> {
        if x.len() != self.standardization.dim() {
            return Err(Error::invalid(format!(
                "query has {} features, model expects {}",
                x.len(),
                self.standardization.dim()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("query contains non-finite values"));
        }
        let q = self.standardization.apply(x);
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(self.k + 1);
        for (index, row) in self.train.iter().enumerate() {
            let dist2: f64 = row.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum();
            let cand = Candidate { dist2, index };
            if heap.len() < self.k {
                heap.push(cand);
            } else if let Some(worst) = heap.peek() {
                if cand < *worst {
                    heap.pop();
                    heap.push(cand);
                }
            }
        }
        Ok(heap
            .into_sorted_vec()
            .into_iter()
            .map(|c| Neighbor {
                index: c.index,
                distance: c.dist2.sqrt(),
                label: self.labels[c.index],
            })
            .collect())
    }

    pub fn predict(&self, x: &[f64]) -> Result<GenreLabel> {
        Ok(vote(&self.neighbors(x)?))
    }
}

/// Majority label; ties by smallest summed distance, then smallest code.
pub(crate) fn vote(neighbors: &[Neighbor]) -> GenreLabel {
    let mut votes = [0usize; 3];
    let mut dist = [0.0f64; 3];
    for n in neighbors {
        votes[n.label.code()] += 1;
        dist[n.label.code()] += n.distance;
    }
    let best = (0..3)
        .filter(|&c| votes[c] > 0)
        .min_by(|&a, &b| {
            votes[b]
                .cmp(&votes[a])
                .then(dist[a].total_cmp(&dist[b]))
                .then(a.cmp(&b))
        })
        .expect("at least one neighbour");
    GenreLabel::from_code(best).expect("code in range")
}

/// Convenience wrapper matching the model method.
pub fn knn_predict(model: &KnnModel, x: &[f64]) -> Result<GenreLabel> {
    model.predict(x)
}
