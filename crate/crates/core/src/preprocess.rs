//! Truncation, interpolation and alignment of the two raw sensor streams
//! onto one shared 50 Hz grid.

use crate::error::{Error, Result};
use crate::sensor::{RawSample, RawStream, Recording, SensorKind};

/// Grid step of the resampled streams.
pub const GRID_STEP_MS: i64 = 20;
pub const RATE_HZ: u32 = 50;

/// Three equal-length channels sampled every 20 ms from `start_ms`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformStream {
    pub start_ms: i64,
    pub channels: [Vec<f64>; 3],
}

impl UniformStream {
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn timestamp_ms(&self, i: usize) -> i64 {
        self.start_ms + i as i64 * GRID_STEP_MS
    }

    /// Back to raw form, e.g. to feed an aligned stream through `align` again.
    pub fn to_raw(&self, kind: SensorKind) -> RawStream {
        let samples = (0..self.len())
            .map(|i| {
                RawSample::new(
                    self.timestamp_ms(i),
                    self.channels[0][i],
                    self.channels[1][i],
                    self.channels[2][i],
                )
            })
            .collect();
        RawStream::new(kind, samples)
    }
}

/// Accelerometer and gyroscope on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    pub accel: UniformStream,
    pub gyro: UniformStream,
}

impl AlignedPair {
    pub fn len(&self) -> usize {
        self.accel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start_ms(&self) -> i64 {
        self.accel.start_ms
    }

    /// Duration covered by the samples, seconds (`len / 50`).
    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / RATE_HZ as f64
    }

    /// Channel `c` in accel x, y, z, gyro x, y, z order.
    pub fn channel(&self, c: usize) -> &[f64] {
        if c < 3 {
            &self.accel.channels[c]
        } else {
            &self.gyro.channels[c - 3]
        }
    }
}

fn range_of(stream: &RawStream) -> Result<(i64, i64)> {
    match (stream.first_ms(), stream.last_ms()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::TooShort(format!("{:?} stream is empty", stream.kind))),
    }
}

fn check_monotonic(stream: &RawStream) -> Result<()> {
    match stream.first_non_increasing() {
        None => Ok(()),
        Some(i) => Err(Error::Input(format!(
            "{:?} timestamps not strictly increasing at sample {i}",
            stream.kind
        ))),
    }
}

/// Keep only the samples of each stream inside the common time window
/// `[max(first), min(last)]`.
pub fn truncate_overlap(accel: &RawStream, gyro: &RawStream) -> Result<(RawStream, RawStream)> {
    check_monotonic(accel)?;
    check_monotonic(gyro)?;
    let ra = range_of(accel)?;
    let rg = range_of(gyro)?;
    let lo = ra.0.max(rg.0);
    let hi = ra.1.min(rg.1);
    if lo > hi {
        return Err(Error::NoOverlap { accel: ra, gyro: rg });
    }
    let cut = |s: &RawStream| {
        let samples: Vec<RawSample> = s
            .samples
            .iter()
            .filter(|x| (lo..=hi).contains(&x.timestamp_ms))
            .copied()
            .collect();
        RawStream::new(s.kind, samples)
    };
    let (a, g) = (cut(accel), cut(gyro));
    if a.is_empty() || g.is_empty() {
        return Err(Error::NoOverlap { accel: ra, gyro: rg });
    }
    Ok((a, g))
}

/// Linearly interpolate `stream` at `start_ms + 20·i` for `i < n_samples`.
/// Grid instants that coincide with a raw timestamp return the raw value.
pub fn resample_uniform(stream: &RawStream, grid_start_ms: i64, n_samples: usize) -> Result<UniformStream> {
    let (first, last) = range_of(stream)?;
    let grid_end = grid_start_ms + (n_samples as i64 - 1).max(0) * GRID_STEP_MS;
    for instant_ms in [grid_start_ms, grid_end] {
        if n_samples > 0 && !(first..=last).contains(&instant_ms) {
            return Err(Error::Extrapolation {
                instant_ms,
                first_ms: first,
                last_ms: last,
            });
        }
    }
    let samples = &stream.samples;
    let mut channels: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(n_samples));
    // index of the last raw sample at or before the current grid instant
    let mut k = 0;
    for i in 0..n_samples {
        let t = grid_start_ms + i as i64 * GRID_STEP_MS;
        while k + 1 < samples.len() && samples[k + 1].timestamp_ms <= t {
            k += 1;
        }
        let left = &samples[k];
        if left.timestamp_ms == t {
            for (axis, ch) in channels.iter_mut().enumerate() {
                ch.push(left.axis(axis));
            }
            continue;
        }
        let right = &samples[k + 1];
        let frac = (t - left.timestamp_ms) as f64 / (right.timestamp_ms - left.timestamp_ms) as f64;
        for (axis, ch) in channels.iter_mut().enumerate() {
            let (a, b) = (left.axis(axis), right.axis(axis));
            ch.push(a + frac * (b - a));
        }
    }
    Ok(UniformStream {
        start_ms: grid_start_ms,
        channels,
    })
}

/// Truncate both streams to their overlap and resample them on a common grid
/// that starts at the overlap start.
pub fn align(rec: &Recording) -> Result<AlignedPair> {
    let (a, g) = truncate_overlap(&rec.accel, &rec.gyro)?;
    let start = a.first_ms().max(g.first_ms()).expect("non-empty");
    let end = a.last_ms().min(g.last_ms()).expect("non-empty");
    let span = end - start;
    if span < GRID_STEP_MS {
        return Err(Error::TooShort(format!(
            "stream overlap of {span} ms is shorter than one {GRID_STEP_MS} ms grid step"
        )));
    }
    let n = (span / GRID_STEP_MS) as usize + 1;
    Ok(AlignedPair {
        accel: resample_uniform(&a, start, n)?,
        gyro: resample_uniform(&g, start, n)?,
    })
}
