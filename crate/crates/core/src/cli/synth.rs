//! Labeled synthetic corpus for end-to-end runs: 9 games x 3 tracks, three
//! genres separated by tempo band and tone register.
//!
//! Each track is a click on every beat plus a decaying harmonic note drawn
//! from the game's major triad. All randomness flows from one ChaCha8 stream
//! seeded by [`SynthSpec::seed`].

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio_io::{encode_wav, AudioBuffer, WavFormat};
use crate::dataset::{GenreLabel, TrackRecord};
use crate::{Error, Result};

pub const GAMES_PER_GENRE: usize = 3;
pub const TRACKS_PER_GAME: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub duration_s: f64,
    pub sample_rate_hz: u32,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            duration_s: 20.0,
            sample_rate_hz: 44_100,
        }
    }
}

/// Inclusive tempo band in BPM.
pub fn tempo_band(genre: GenreLabel) -> (f64, f64) {
    match genre {
        GenreLabel::AdventureRpg => (70.0, 85.0),
        GenreLabel::StrategyRpg => (95.0, 110.0),
        GenreLabel::ActionRpg => (130.0, 150.0),
    }
}

/// Inclusive MIDI range for the root note of a game's triad.
pub fn root_register(genre: GenreLabel) -> (u32, u32) {
    match genre {
        GenreLabel::AdventureRpg => (40, 44),
        GenreLabel::StrategyRpg => (55, 59),
        GenreLabel::ActionRpg => (70, 74),
    }
}

fn midi_hz(m: u32) -> f64 {
    440.0 * 2f64.powf((m as f64 - 69.0) / 12.0)
}

/// One track: `bpm` clicks with notes from the triad on `root_midi`.
pub fn synth_track(
    bpm: f64,
    root_midi: u32,
    spec: &SynthSpec,
    rng: &mut impl Rng,
) -> Result<AudioBuffer> {
    if !(bpm > 0.0 && spec.duration_s > 0.0 && spec.sample_rate_hz > 0) {
        return Err(Error::invalid(
            "synthetic track needs positive bpm, duration and sample rate",
        ));
    }
    let sr = spec.sample_rate_hz as f64;
    let n = (spec.duration_s * sr).round() as usize;
    let period = 60.0 / bpm;
    let mut x = vec![0.0; n];
    let click_len = (0.010 * sr) as usize;
    let mut beat = rng.random_range(0.0..period);
    while beat < spec.duration_s {
        let start = (beat * sr).round() as usize;
        for i in 0..click_len.min(n.saturating_sub(start)) {
            x[start + i] += 0.6 * rng.random_range(-1.0..1.0) * (-(i as f64) / (0.002 * sr)).exp();
        }
        let note = root_midi + [0, 4, 7, 12][rng.random_range(0..4)];
        let f = midi_hz(note);
        let len = ((period * sr) as usize).min(n.saturating_sub(start));
        for i in 0..len {
            let t = i as f64 / sr;
            let env = (-t / (0.25 * period)).exp();
            let w = TAU * f * t;
            x[start + i] += 0.35 * env * (w.sin() + 0.5 * (2.0 * w).sin() + 0.25 * (3.0 * w).sin());
        }
        beat += period;
    }
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        x.iter_mut().for_each(|v| *v *= 0.9 / peak);
    }
    AudioBuffer::new(x, spec.sample_rate_hz)
}

/// A generated track before it is written to disk.
#[derive(Debug, Clone)]
pub struct SynthTrack {
    pub file_name: String,
    pub game: String,
    pub genre: GenreLabel,
    pub title: String,
    pub bpm: f64,
    pub audio: AudioBuffer,
}

/// Generate the whole corpus in manifest order (genre code, game, track).
pub fn synth_corpus(spec: &SynthSpec) -> Result<Vec<SynthTrack>> {
    let mut master = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::new();
    for genre in GenreLabel::ALL {
        let (lo, hi) = tempo_band(genre);
        let (rlo, rhi) = root_register(genre);
        for game in 0..GAMES_PER_GENRE {
            let game_bpm = master.random_range(lo + 2.0..=hi - 2.0);
            let root = master.random_range(rlo..=rhi);
            let game_name = format!("{}_game_{}", genre.slug(), game + 1);
            for track in 0..TRACKS_PER_GAME {
                let bpm = (game_bpm + master.random_range(-2.0..=2.0)).clamp(lo, hi);
                let mut rng = ChaCha8Rng::seed_from_u64(master.next_u64());
                out.push(SynthTrack {
                    file_name: format!("{game_name}_track_{}.wav", track + 1),
                    game: game_name.clone(),
                    genre,
                    title: format!("Track {}", track + 1),
                    bpm,
                    audio: synth_track(bpm, root, spec, &mut rng)?,
                });
            }
        }
    }
    Ok(out)
}

/// Write the corpus as PCM16 WAVs plus `manifest.csv` into `dir`.
pub fn write_corpus(dir: &Path, spec: &SynthSpec) -> Result<Vec<TrackRecord>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = String::from("path,game,genre,title\n");
    let mut records = Vec::new();
    for t in synth_corpus(spec)? {
        let path = dir.join(&t.file_name);
        std::fs::write(&path, encode_wav(&t.audio, WavFormat::Pcm16))
            .map_err(|e| Error::io(&path, e))?;
        manifest.push_str(&format!(
            "{},{},{},{}\n",
            t.file_name,
            t.game,
            t.genre.slug(),
            t.title
        ));
        records.push(TrackRecord {
            path,
            game: t.game,
            genre: t.genre,
            title: t.title,
        });
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
    Ok(records)
}
