use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vgmfeat::classify::{
    evaluate_loocv, evaluate_split, fit_standardization, KnnModel, SplitMix64,
};
use vgmfeat::dataset::{GenreLabel, LabeledDataset};

/// Sort every training row by (distance, index), vote, break ties.
fn brute_force(rows: &[Vec<f64>], labels: &[GenreLabel], k: usize, q: &[f64]) -> GenreLabel {
    let params = fit_standardization(rows).unwrap();
    let z = |x: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(params.mean.iter().zip(&params.std))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { v - m })
            .collect()
    };
    let zq = z(q);
    let mut d: Vec<(f64, usize)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            (
                z(r).iter()
                    .zip(&zq)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>(),
                i,
            )
        })
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut votes = [0usize; 3];
    let mut dist = [0.0; 3];
    for &(d2, i) in &d[..k] {
        votes[labels[i].code()] += 1;
        dist[labels[i].code()] += d2.sqrt();
    }
    let mut best = None;
    for c in 0..3 {
        if votes[c] == 0 {
            continue;
        }
        best = match best {
            None => Some(c),
            Some(b) if votes[c] > votes[b] || (votes[c] == votes[b] && dist[c] < dist[b]) => {
                Some(c)
            }
            keep => keep,
        };
    }
    GenreLabel::from_code(best.unwrap()).unwrap()
}

fn label(i: u64) -> GenreLabel {
    GenreLabel::from_code((i % 3) as usize).unwrap()
}

fn clusters(n_per_class: usize, dim: usize, sigma: f64, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = Vec::new();
    let mut labels = Vec::new();
    for c in 0..3 {
        for _ in 0..n_per_class {
            matrix.push((0..dim).map(|j| if j % 3 == c { 10.0 } else { 0.0 } + sigma * rng.random_range(-1.0..1.0)).collect());
            labels.push(GenreLabel::from_code(c).unwrap());
        }
    }
    let ids = (0..matrix.len()).map(|i| format!("t{i}")).collect();
    let names = (0..dim).map(|j| format!("f{j}")).collect();
    LabeledDataset::new(ids, names, matrix, labels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_brute_force(
        seed in any::<u64>(),
        n in 4usize..40,
        dim in 1usize..6,
        k in 1usize..6,
        grid in prop::bool::ANY,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = k.min(n);
        // A coarse grid forces equal distances and vote ties.
        let draw = |rng: &mut ChaCha8Rng| if grid { rng.random_range(0..3) as f64 } else { rng.random_range(-5.0..5.0) };
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| draw(&mut rng)).collect()).collect();
        let labels: Vec<GenreLabel> = (0..n).map(|_| label(rng.random_range(0..3))).collect();
        prop_assume!(rows.iter().any(|r| r != &rows[0]));
        let model = KnnModel::fit(&rows, &labels, k).unwrap();
        for _ in 0..10 {
            let q: Vec<f64> = (0..dim).map(|_| draw(&mut rng)).collect();
            prop_assert_eq!(model.predict(&q).unwrap(), brute_force(&rows, &labels, k, &q));
        }
    }

    #[test]
    fn invariant_under_positive_affine_rescaling(
        seed in any::<u64>(),
        scale in prop::collection::vec(0.01f64..100.0, 4),
        shift in prop::collection::vec(-1e3f64..1e3, 4),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..30).map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let labels: Vec<GenreLabel> = (0..30).map(label).collect();
        let affine = |r: &Vec<f64>| -> Vec<f64> { r.iter().enumerate().map(|(j, v)| v * scale[j] + shift[j]).collect() };
        let moved: Vec<Vec<f64>> = rows.iter().map(affine).collect();
        let a = KnnModel::fit(&rows, &labels, 3).unwrap();
        let b = KnnModel::fit(&moved, &labels, 3).unwrap();
        for _ in 0..10 {
            let q: Vec<f64> = (0..4).map(|_| rng.random_range(-1.2..1.2)).collect();
            let na: Vec<usize> = a.neighbors(&q).unwrap().iter().map(|n| n.index).collect();
            let nb: Vec<usize> = b.neighbors(&affine(&q)).unwrap().iter().map(|n| n.index).collect();
            prop_assert_eq!(na, nb);
            prop_assert_eq!(a.predict(&q).unwrap(), b.predict(&affine(&q)).unwrap());
        }
    }
}

#[test]
fn separable_clusters() {
    let ds = clusters(9, 6, 0.5, 1);
    assert_eq!(evaluate_split(&ds, 1.0 / 3.0, 11, 3).unwrap().accuracy, 1.0);
    let ds = clusters(10, 6, 0.5, 2);
    assert!(evaluate_loocv(&ds, 3).unwrap().accuracy >= 0.9);
}

#[test]
fn shuffled_labels_are_at_chance() {
    let ds = clusters(9, 6, 0.5, 3);
    let mut total = 0.0;
    for seed in 0..1000u64 {
        let mut labels = ds.labels.clone();
        SplitMix64::new(seed ^ 0x5eed).shuffle(&mut labels);
        total += evaluate_split(&ds.with_labels(labels).unwrap(), 1.0 / 3.0, seed, 3)
            .unwrap()
            .accuracy;
    }
    let mean = total / 1000.0;
    assert!((mean - 1.0 / 3.0).abs() <= 0.05, "{mean}");
}

#[test]
fn report_invariants() {
    let ds = clusters(9, 5, 6.0, 4);
    for r in [
        evaluate_split(&ds, 1.0 / 3.0, 1, 3).unwrap(),
        evaluate_loocv(&ds, 3).unwrap(),
    ] {
        let total: usize = r.confusion.iter().flatten().sum();
        assert_eq!(total, r.per_item.len());
        let trace: usize = (0..3).map(|i| r.confusion[i][i]).sum();
        assert!((r.accuracy - trace as f64 / total as f64).abs() < 1e-12);
        let agree = r.per_item.iter().filter(|p| p.truth == p.predicted).count();
        assert_eq!(agree, trace);
    }
}
