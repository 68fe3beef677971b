//! Sensor stream types, the CSV stream file format, and a synthetic
//! multi-subject recording generator.
//!
//! A recording on disk is a JSON manifest plus one CSV per sensor:
//!
//! ```text
//! session1.json        {"subject_id", "session_id", "accel_path", "gyro_path"}
//! session1_accel.csv   timestamp_ms,x,y,z
//! session1_gyro.csv    timestamp_ms,x,y,z
//! ```
//!
//! Values are stored in the units captured (m/s² for the accelerometer,
//! rad/s for the gyroscope); nothing downstream depends on them because every
//! segment is normalized before use.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Nominal device sampling rate.
pub const NOMINAL_RATE_HZ: u32 = 50;

pub const CSV_HEADER: [&str; 4] = ["timestamp_ms", "x", "y", "z"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensorKind {
    Accelerometer,
    Gyroscope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSample {
    pub timestamp_ms: i64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl RawSample {
    pub fn new(timestamp_ms: i64, x: f64, y: f64, z: f64) -> Self {
        Self {
            timestamp_ms,
            x,
            y,
            z,
        }
    }

    pub fn axis(&self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis index {axis} out of range"),
        }
    }
}

/// Time-ordered samples from one sensor. Sampling is nominally 50 Hz but the
/// interval between samples is irregular.
#[derive(Debug, Clone, PartialEq)]
pub struct RawStream {
    pub kind: SensorKind,
    pub samples: Vec<RawSample>,
}

impl RawStream {
    pub fn new(kind: SensorKind, samples: Vec<RawSample>) -> Self {
        Self { kind, samples }
    }

    pub fn nominal_rate_hz(&self) -> u32 {
        NOMINAL_RATE_HZ
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first_ms(&self) -> Option<i64> {
        self.samples.first().map(|s| s.timestamp_ms)
    }

    pub fn last_ms(&self) -> Option<i64> {
        self.samples.last().map(|s| s.timestamp_ms)
    }

    /// Index of the first pair of samples whose timestamps do not increase.
    pub fn first_non_increasing(&self) -> Option<usize> {
        self.samples
            .windows(2)
            .position(|w| w[1].timestamp_ms <= w[0].timestamp_ms)
            .map(|i| i + 1)
    }
}

/// One data-collection interval for one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub subject_id: String,
    pub session_id: String,
    pub accel: RawStream,
    pub gyro: RawStream,
}

/// On-disk manifest tying the two sensor CSVs of a recording together.
/// Paths are relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingManifest {
    pub subject_id: String,
    pub session_id: String,
    pub accel_path: PathBuf,
    pub gyro_path: PathBuf,
}

/// Read a recording from its manifest file.
pub fn read_recording(manifest_path: &Path) -> Result<Recording> {
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: RecordingManifest =
        serde_json::from_str(&text).map_err(|e| Error::json(manifest_path, e))?;
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let accel = read_stream_csv(&dir.join(&manifest.accel_path), SensorKind::Accelerometer)?;
    let gyro = read_stream_csv(&dir.join(&manifest.gyro_path), SensorKind::Gyroscope)?;
    Ok(Recording {
        subject_id: manifest.subject_id,
        session_id: manifest.session_id,
        accel,
        gyro,
    })
}

/// Write a recording as `<stem>.json` + `<stem>_accel.csv` + `<stem>_gyro.csv`.
pub fn write_recording(rec: &Recording, manifest_path: &Path) -> Result<()> {
    let stem = manifest_path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Input(format!("bad manifest path {}", manifest_path.display())))?;
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let accel_name = PathBuf::from(format!("{stem}_accel.csv"));
    let gyro_name = PathBuf::from(format!("{stem}_gyro.csv"));
    write_stream_csv(&rec.accel, &dir.join(&accel_name))?;
    write_stream_csv(&rec.gyro, &dir.join(&gyro_name))?;
    let manifest = RecordingManifest {
        subject_id: rec.subject_id.clone(),
        session_id: rec.session_id.clone(),
        accel_path: accel_name,
        gyro_path: gyro_name,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::json(manifest_path, e))?;
    crate::harness::write_atomic(manifest_path, (json + "\n").as_bytes())
}

pub fn read_stream_csv(path: &Path, kind: SensorKind) -> Result<RawStream> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header {:?}, found {:?}", CSV_HEADER.join(","), headers),
        });
    }
    let mut samples: Vec<RawSample> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if record.len() != 4 {
            return Err(parse_err(format!("expected 4 fields, found {}", record.len())));
        }
        let timestamp_ms: i64 = record[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad timestamp {:?}", &record[0])))?;
        let mut xyz = [0.0; 3];
        for (axis, v) in xyz.iter_mut().enumerate() {
            let field = record[axis + 1].trim();
            *v = field
                .parse()
                .map_err(|_| parse_err(format!("bad value {field:?}")))?;
        }
        if let Some(prev) = samples.last() {
            if timestamp_ms <= prev.timestamp_ms {
                return Err(Error::Integrity {
                    path: path.to_path_buf(),
                    line,
                    previous: prev.timestamp_ms,
                    current: timestamp_ms,
                });
            }
        }
        samples.push(RawSample::new(timestamp_ms, xyz[0], xyz[1], xyz[2]));
    }
    Ok(RawStream::new(kind, samples))
}

pub fn write_stream_csv(stream: &RawStream, path: &Path) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(CSV_HEADER).map_err(|e| csv_error(path, e))?;
    for s in &stream.samples {
        // `Display` for f64 prints the shortest representation that parses
        // back to the same bits.
        writer
            .write_record([
                s.timestamp_ms.to_string(),
                s.x.to_string(),
                s.y.to_string(),
                s.z.to_string(),
            ])
            .map_err(|e| csv_error(path, e))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    crate::harness::write_atomic(path, &bytes)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

/// One harmonic of the synthetic cardiac pulse on one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    /// Multiple of the heart rate.
    pub harmonic: u32,
    pub amplitude: f64,
    /// Radians.
    pub phase: f64,
}

/// Parameters of one synthetic subject. Channels are ordered accel x, y, z
/// then gyro x, y, z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSubjectProfile {
    pub heart_rate_hz: f64,
    pub pulse_shape_coeffs: [Vec<HarmonicTerm>; 6],
    pub noise_std: f64,
    /// Linear baseline drift per channel, units per second.
    pub drift_rate: [f64; 6],
    /// Inclusive range of inter-sample intervals, ms.
    pub jitter_ms_range: (u32, u32),
}

/// Band the synthetic pulse energy is placed in.
pub const SYNTH_BAND_HZ: (f64, f64) = (4.0, 11.0);

impl SynthSubjectProfile {
    /// Draw a random subject: heart rate in [1.0, 1.5) Hz and, on every
    /// channel, random amplitude and phase for each heart-rate harmonic that
    /// falls inside 4-11 Hz.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, noise_std: f64) -> Self {
        let heart_rate_hz = rng.random_range(1.0..1.5);
        let k_lo = (SYNTH_BAND_HZ.0 / heart_rate_hz).ceil() as u32;
        let k_hi = (SYNTH_BAND_HZ.1 / heart_rate_hz).floor() as u32;
        let pulse_shape_coeffs = std::array::from_fn(|_| {
            (k_lo..=k_hi)
                .map(|harmonic| HarmonicTerm {
                    harmonic,
                    amplitude: rng.random_range(0.1..1.0),
                    phase: rng.random_range(0.0..2.0 * PI),
                })
                .collect()
        });
        let drift_rate = std::array::from_fn(|_| rng.random_range(-0.02..0.02));
        Self {
            heart_rate_hz,
            pulse_shape_coeffs,
            noise_std,
            drift_rate,
            jitter_ms_range: (16, 20),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.jitter_ms_range;
        if !(self.heart_rate_hz > 0.0 && self.heart_rate_hz.is_finite()) {
            return Err(Error::Config("heart_rate_hz must be positive".into()));
        }
        if !(self.noise_std >= 0.0) {
            return Err(Error::Config("noise_std must be non-negative".into()));
        }
        if !(5 <= lo && lo <= hi && hi <= 20) {
            return Err(Error::Config(format!(
                "jitter_ms_range {:?} must lie within [5, 20] ms",
                self.jitter_ms_range
            )));
        }
        Ok(())
    }

    /// Noise-free pulse value on `channel` at time `t_s` seconds.
    pub fn pulse(&self, channel: usize, t_s: f64) -> f64 {
        self.pulse_shape_coeffs[channel]
            .iter()
            .map(|h| {
                h.amplitude
                    * (2.0 * PI * h.harmonic as f64 * self.heart_rate_hz * t_s + h.phase).sin()
            })
            .sum()
    }
}

/// Generate a recording from a subject profile. Pure in `(profile,
/// duration_s, seed)`.
///
/// Both streams start within the first `jitter_max` ms and run past
/// `duration_s`, so the aligned recording covers at least `duration_s`.
pub fn synth_recording(
    profile: &SynthSubjectProfile,
    subject_id: &str,
    session_id: &str,
    duration_s: f64,
    seed: u64,
) -> Result<Recording> {
    profile.validate()?;
    if !(duration_s > 0.0) {
        return Err(Error::Config("duration_s must be positive".into()));
    }
    let mut phase_rng = stream_rng(seed, Stream::Synth, 0, 0);
    // Start somewhere in the cardiac cycle.
    let cycle_offset_s = phase_rng.random_range(0.0..1.0 / profile.heart_rate_hz);
    let accel = synth_stream(profile, SensorKind::Accelerometer, duration_s, cycle_offset_s, seed, 1);
    let gyro = synth_stream(profile, SensorKind::Gyroscope, duration_s, cycle_offset_s, seed, 2);
    Ok(Recording {
        subject_id: subject_id.to_string(),
        session_id: session_id.to_string(),
        accel,
        gyro,
    })
}

fn synth_stream(
    profile: &SynthSubjectProfile,
    kind: SensorKind,
    duration_s: f64,
    cycle_offset_s: f64,
    seed: u64,
    stream_index: u64,
) -> RawStream {
    let mut rng = stream_rng(seed, Stream::Synth, stream_index, 0);
    let (jmin, jmax) = profile.jitter_ms_range;
    let noise = Normal::new(0.0, profile.noise_std).expect("validated noise_std");
    let channel_base = match kind {
        SensorKind::Accelerometer => 0,
        SensorKind::Gyroscope => 3,
    };
    let end_ms = (duration_s * 1000.0).ceil() as i64 + 3 * jmax as i64;
    let mut t_ms = rng.random_range(0..jmax as i64);
    let mut samples = Vec::with_capacity((end_ms / jmin as i64) as usize + 1);
    while t_ms <= end_ms {
        let t_s = t_ms as f64 / 1000.0;
        let mut xyz = [0.0; 3];
        for (axis, v) in xyz.iter_mut().enumerate() {
            let c = channel_base + axis;
            *v = profile.pulse(c, t_s + cycle_offset_s) + profile.drift_rate[c] * t_s;
            if profile.noise_std > 0.0 {
                *v += noise.sample(&mut rng);
            }
        }
        samples.push(RawSample::new(t_ms, xyz[0], xyz[1], xyz[2]));
        t_ms += rng.random_range(jmin as i64..=jmax as i64);
    }
    RawStream::new(kind, samples)
}
