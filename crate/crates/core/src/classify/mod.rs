//! Genre classification: z-score standardization, k-nearest neighbours and
//! the two evaluation protocols (seeded stratified split, leave-one-out).

mod eval;
mod knn;
mod rng;
mod standardize;

pub use eval::{
    evaluate_loocv, evaluate_split, stratified_split, EvalReport, ItemPrediction, Protocol,
};
pub use knn::{knn_predict, KnnModel, Neighbor};
pub use rng::SplitMix64;
pub use standardize::{fit_standardization, StandardizationParams};
