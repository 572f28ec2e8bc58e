use std::path::PathBuf;

use super::GenreLabel;
use crate::{Error, Result};

/// One manifest row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackRecord {
    pub path: PathBuf,
    pub game: String,
    pub genre: GenreLabel,
    pub title: String,
}

const REQUIRED: [&str; 4] = ["path", "game", "genre", "title"];

/// Parse a `path,game,genre,title` CSV. Columns may appear in any order and
/// extra columns are ignored. Row numbers in errors count the header as row 1.
pub fn load_manifest(text: &str) -> Result<Vec<TrackRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("unreadable header: {e}")))?
        .clone();
    let mut cols = [0usize; 4];
    for (slot, name) in cols.iter_mut().zip(REQUIRED) {
        *slot = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Schema(format!("manifest is missing column {name:?}")))?;
    }

    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            reason: e.to_string(),
        })?;
        let field = |c: usize| rec.get(c).unwrap_or("").to_string();
        let path = field(cols[0]);
        if path.is_empty() {
            return Err(Error::Parse {
                row,
                reason: "empty path".into(),
            });
        }
        let genre_text = field(cols[2]);
        let genre = genre_text
            .parse::<GenreLabel>()
            .ok()
            .filter(|_| genre_text.parse::<usize>().is_err())
            .ok_or_else(|| Error::Parse {
                row,
                reason: format!(
                    "unknown genre {genre_text:?} (expected adventure_rpg, action_rpg or strategy_rpg)"
                ),
            })?;
        out.push(TrackRecord {
            path: PathBuf::from(path),
            game: field(cols[1]),
            genre,
            title: field(cols[3]),
        });
    }
    Ok(out)
}
