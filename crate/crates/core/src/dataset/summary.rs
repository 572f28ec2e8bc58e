use serde::Serialize;

use super::format::fmt_sig9;
use super::{feature_names, GenreLabel, TrackFeatures};
use crate::{Error, Result};

/// Element-wise statistics of one genre's feature vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenreStats {
    pub genre: GenreLabel,
    pub track_count: usize,
    pub mean: Vec<f64>,
    /// Population standard deviation.
    pub std: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl GenreStats {
    /// `max - min` per feature.
    pub fn range_width(&self) -> Vec<f64> {
        self.max
            .iter()
            .zip(&self.min)
            .map(|(hi, lo)| hi - lo)
            .collect()
    }
}

/// Per-feature comparison of range widths across genres.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeComparison {
    pub feature: String,
    /// One width per summarized genre, in genre-code order.
    pub widths: Vec<(GenreLabel, f64)>,
    pub widest: GenreLabel,
    pub narrowest: GenreLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenreSummary {
    pub feature_names: Vec<String>,
    /// Genres that have at least one track, in genre-code order.
    pub genres: Vec<GenreStats>,
}

/// Sum in sorted order so the result does not depend on input order.
fn ordered_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

/// Per-genre mean, standard deviation, minimum and maximum of every feature.
pub fn summarize_by_genre(tracks: &[(TrackFeatures, GenreLabel)]) -> Result<GenreSummary> {
    if tracks.is_empty() {
        return Err(Error::invalid("cannot summarize an empty feature set"));
    }
    let n_mfcc = tracks[0].0.n_mfcc();
    if tracks.iter().any(|(f, _)| f.n_mfcc() != n_mfcc) {
        return Err(Error::invalid(
            "tracks disagree on the number of MFCC coefficients",
        ));
    }
    let names = feature_names(n_mfcc);
    let dim = names.len();

    let mut genres = Vec::new();
    for genre in GenreLabel::ALL {
        let vecs: Vec<Vec<f64>> = tracks
            .iter()
            .filter(|(_, g)| *g == genre)
            .map(|(f, _)| f.to_vec())
            .collect();
        if vecs.is_empty() {
            continue;
        }
        let n = vecs.len() as f64;
        let mut stats = GenreStats {
            genre,
            track_count: vecs.len(),
            mean: Vec::with_capacity(dim),
            std: Vec::with_capacity(dim),
            min: Vec::with_capacity(dim),
            max: Vec::with_capacity(dim),
        };
        let mut column = Vec::with_capacity(vecs.len());
        for j in 0..dim {
            column.clear();
            column.extend(vecs.iter().map(|v| v[j]));
            let mean = ordered_sum(&mut column) / n;
            let mut sq: Vec<f64> = column.iter().map(|v| (v - mean).powi(2)).collect();
            stats.mean.push(mean);
            stats.std.push((ordered_sum(&mut sq) / n).sqrt());
            stats.min.push(column[0]);
            stats.max.push(column[column.len() - 1]);
        }
        genres.push(stats);
    }
    Ok(GenreSummary {
        feature_names: names,
        genres,
    })
}

impl GenreSummary {
    pub fn get(&self, genre: GenreLabel) -> Option<&GenreStats> {
        self.genres.iter().find(|g| g.genre == genre)
    }

    /// Which genre spans the widest and the narrowest range for each feature.
    /// Ties go to the lower genre code.
    pub fn range_comparison(&self) -> Vec<RangeComparison> {
        let widths: Vec<Vec<f64>> = self.genres.iter().map(GenreStats::range_width).collect();
        self.feature_names
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let per: Vec<(GenreLabel, f64)> = self
                    .genres
                    .iter()
                    .zip(&widths)
                    .map(|(g, w)| (g.genre, w[j]))
                    .collect();
                let widest = per
                    .iter()
                    .fold(per[0], |b, c| if c.1 > b.1 { *c } else { b })
                    .0;
                let narrowest = per
                    .iter()
                    .fold(per[0], |b, c| if c.1 < b.1 { *c } else { b })
                    .0;
                RangeComparison {
                    feature: name.clone(),
                    widths: per,
                    widest,
                    narrowest,
                }
            })
            .collect()
    }

    /// One row per genre: `genre,track_count` then `<feature>_{mean,std,min,max}`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("genre,track_count");
        for n in &self.feature_names {
            for stat in ["mean", "std", "min", "max"] {
                out.push_str(&format!(",{n}_{stat}"));
            }
        }
        out.push('\n');
        for g in &self.genres {
            out.push_str(&format!("{},{}", g.genre, g.track_count));
            for j in 0..self.feature_names.len() {
                for v in [g.mean[j], g.std[j], g.min[j], g.max[j]] {
                    out.push(',');
                    out.push_str(&fmt_sig9(v));
                }
            }
            out.push('\n');
        }
        out
    }

    /// One row per feature with each genre's range width and the extremes.
    pub fn ranges_csv(&self) -> String {
        let mut out = String::from("feature");
        for g in &self.genres {
            out.push_str(&format!(",{}_width", g.genre));
        }
        out.push_str(",widest,narrowest\n");
        for row in self.range_comparison() {
            out.push_str(&row.feature);
            for (_, w) in &row.widths {
                out.push(',');
                out.push_str(&fmt_sig9(*w));
            }
            out.push_str(&format!(",{},{}\n", row.widest, row.narrowest));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::FEATURE_DIM;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn feat(v: Vec<f64>) -> TrackFeatures {
        TrackFeatures::from_slice(&v).unwrap()
    }

    #[test]
    fn single_track_per_genre() {
        let tracks: Vec<_> = GenreLabel::ALL
            .iter()
            .enumerate()
            .map(|(i, g)| {
                (
                    feat((0..FEATURE_DIM).map(|j| (i * 100 + j) as f64).collect()),
                    *g,
                )
            })
            .collect();
        let s = summarize_by_genre(&tracks).unwrap();
        assert_eq!(s.genres.len(), 3);
        for (g, (f, _)) in s.genres.iter().zip(&tracks) {
            assert_eq!(g.track_count, 1);
            assert_eq!(g.mean, f.to_vec());
            assert_eq!(g.min, f.to_vec());
            assert_eq!(g.max, f.to_vec());
            assert!(g.std.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn identical_tracks_have_zero_spread() {
        let f = feat((0..FEATURE_DIM).map(|j| j as f64 * 0.1).collect());
        let s = summarize_by_genre(&[
            (f.clone(), GenreLabel::ActionRpg),
            (f, GenreLabel::ActionRpg),
        ])
        .unwrap();
        assert_eq!(s.genres.len(), 1);
        assert!(s
            .get(GenreLabel::ActionRpg)
            .unwrap()
            .std
            .iter()
            .all(|v| *v == 0.0));
        assert!(s.get(GenreLabel::AdventureRpg).is_none());
    }

    #[test]
    fn empty_input_rejected() {
        assert!(summarize_by_genre(&[]).is_err());
    }

    /// Spreadsheet-style recomputation: plain accumulation in input order.
    #[test]
    fn matches_independent_aggregation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let tracks: Vec<_> = (0..27)
            .map(|i| {
                let v: Vec<f64> = (0..FEATURE_DIM)
                    .map(|_| rng.random_range(-100.0..100.0))
                    .collect();
                (feat(v), GenreLabel::from_code(i / 9).unwrap())
            })
            .collect();
        let s = summarize_by_genre(&tracks).unwrap();
        for stats in &s.genres {
            let members: Vec<Vec<f64>> = tracks
                .iter()
                .filter(|(_, g)| *g == stats.genre)
                .map(|(f, _)| f.to_vec())
                .collect();
            assert_eq!(members.len(), 9);
            for j in 0..FEATURE_DIM {
                let mut total = 0.0;
                let mut lo = f64::MAX;
                let mut hi = f64::MIN;
                for m in &members {
                    total += m[j];
                    lo = lo.min(m[j]);
                    hi = hi.max(m[j]);
                }
                let mean = total / 9.0;
                let mut dev = 0.0;
                for m in &members {
                    dev += (m[j] - mean) * (m[j] - mean);
                }
                let std = (dev / 9.0).sqrt();
                assert!((stats.mean[j] - mean).abs() <= 1e-12 * mean.abs().max(1.0));
                assert!((stats.std[j] - std).abs() <= 1e-12 * std.max(1.0));
                assert_eq!(stats.min[j], lo);
                assert_eq!(stats.max[j], hi);
                assert!(stats.min[j] <= stats.mean[j] && stats.mean[j] <= stats.max[j]);
            }
        }
        let counts: usize = s.genres.iter().map(|g| g.track_count).sum();
        assert_eq!(counts, 27);
    }

    #[test]
    fn range_comparison_and_csv() {
        let mk = |w: f64, g| {
            vec![
                (feat(vec![0.0; FEATURE_DIM]), g),
                (feat(vec![w; FEATURE_DIM]), g),
            ]
        };
        let tracks: Vec<_> = [
            mk(3.0, GenreLabel::AdventureRpg),
            mk(2.0, GenreLabel::ActionRpg),
            mk(1.0, GenreLabel::StrategyRpg),
        ]
        .concat();
        let s = summarize_by_genre(&tracks).unwrap();
        let cmp = s.range_comparison();
        assert_eq!(cmp.len(), FEATURE_DIM);
        assert!(cmp.iter().all(
            |c| c.widest == GenreLabel::AdventureRpg && c.narrowest == GenreLabel::StrategyRpg
        ));

        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0].split(',').count(), 2 + 4 * FEATURE_DIM);
        assert!(lines[1].starts_with("adventure_rpg,2,1.5,1.5,0,3"));
        let ranges = s.ranges_csv();
        assert!(ranges
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("tempo_bpm,3,2,1,adventure_rpg,strategy_rpg"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn permutation_invariant(
            vals in prop::collection::vec((prop::collection::vec(-1e3f64..1e3, FEATURE_DIM), 0usize..3), 1..15),
            seed in any::<u64>(),
        ) {
            let tracks: Vec<_> = vals.into_iter().map(|(v, g)| (feat(v), GenreLabel::from_code(g).unwrap())).collect();
            let mut shuffled = tracks.clone();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.random_range(0..=i));
            }
            prop_assert_eq!(summarize_by_genre(&tracks).unwrap(), summarize_by_genre(&shuffled).unwrap());
        }
    }
}
