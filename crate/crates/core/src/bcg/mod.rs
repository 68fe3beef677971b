//! BCG waveform derivation.
//!
//! An aligned recording is cut into `w`-second segments that advance by one
//! second. Each of the six channels of a segment is then
//!
//! 1. normalized to zero mean and unit variance,
//! 2. detrended by subtracting a centered 35-sample rolling average,
//! 3. band-passed with a 4th-order Butterworth filter (4-11 Hz),
//!
//! and the six results are packed into a `2 × 3 × (w·50)` tensor.

mod filter;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use filter::BandPassFilter;

use crate::error::{Error, Result};
use crate::preprocess::AlignedPair;

pub const CHANNELS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Segment length, seconds.
    pub w_s: usize,
    pub rate_hz: u32,
    /// Rolling-average window, samples. Must be odd so it can be centered.
    pub rolling_window: usize,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub filter_order: usize,
    /// Channels with variance below this are zeroed instead of normalized.
    pub norm_epsilon: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            w_s: 3,
            rate_hz: 50,
            rolling_window: 35,
            band_low_hz: 4.0,
            band_high_hz: 11.0,
            filter_order: 4,
            norm_epsilon: 1e-10,
        }
    }
}

impl PipelineConfig {
    pub fn with_w(w_s: usize) -> Self {
        Self {
            w_s,
            ..Self::default()
        }
    }

    pub fn segment_len(&self) -> usize {
        self.w_s * self.rate_hz as usize
    }

    pub fn validate(&self) -> Result<()> {
        let nyquist = self.rate_hz as f64 / 2.0;
        if self.rate_hz != 50 {
            return Err(Error::Config("rate_hz is fixed at 50".into()));
        }
        if self.w_s < 1 {
            return Err(Error::Config("w_s must be at least 1 second".into()));
        }
        if !(0.0 < self.band_low_hz && self.band_low_hz < self.band_high_hz && self.band_high_hz < nyquist) {
            return Err(Error::Config(format!(
                "band [{}, {}] Hz must satisfy 0 < low < high < {nyquist}",
                self.band_low_hz, self.band_high_hz
            )));
        }
        if self.rolling_window == 0 || self.rolling_window.is_multiple_of(2) {
            return Err(Error::Config("rolling_window must be odd".into()));
        }
        if self.rolling_window > self.segment_len() {
            return Err(Error::Config(format!(
                "rolling_window {} exceeds segment length {}",
                self.rolling_window,
                self.segment_len()
            )));
        }
        if !(self.norm_epsilon > 0.0) {
            return Err(Error::Config("norm_epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// `w` seconds of the six aligned channels (accel x, y, z, gyro x, y, z).
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Start second within the aligned recording.
    pub index: usize,
    pub channels: [Vec<f64>; CHANNELS],
    /// Channels zeroed by normalization because they had no variance.
    pub degenerate: [bool; CHANNELS],
}

impl Segment {
    pub fn new(index: usize, channels: [Vec<f64>; CHANNELS]) -> Self {
        Self {
            index,
            channels,
            degenerate: [false; CHANNELS],
        }
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn map_channels(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Segment {
        Segment {
            index: self.index,
            channels: std::array::from_fn(|c| f(&self.channels[c])),
            degenerate: self.degenerate,
        }
    }
}

/// Cut an aligned pair into overlapping `w`-second segments with a 1 s hop.
pub fn segmentize(pair: &AlignedPair, cfg: &PipelineConfig) -> Result<Vec<Segment>> {
    let rate = cfg.rate_hz as usize;
    let seg_len = cfg.segment_len();
    let whole_seconds = pair.len() / rate;
    if whole_seconds < cfg.w_s {
        return Err(Error::TooShort(format!(
            "{:.2} s of aligned data is shorter than one {} s segment",
            pair.duration_s(),
            cfg.w_s
        )));
    }
    let count = whole_seconds - cfg.w_s + 1;
    Ok((0..count)
        .map(|i| {
            let start = i * rate;
            Segment::new(i, std::array::from_fn(|c| pair.channel(c)[start..start + seg_len].to_vec()))
        })
        .collect())
}

/// Zero mean, unit (population) variance per channel.
pub fn normalize_segment(seg: &Segment, cfg: &PipelineConfig) -> Segment {
    let mut out = seg.clone();
    for (c, ch) in out.channels.iter_mut().enumerate() {
        let n = ch.len() as f64;
        if ch.is_empty() {
            continue;
        }
        let mean = ch.iter().sum::<f64>() / n;
        let var = ch.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        if var < cfg.norm_epsilon {
            ch.iter_mut().for_each(|v| *v = 0.0);
            out.degenerate[c] = true;
        } else {
            let sd = var.sqrt();
            ch.iter_mut().for_each(|v| *v = (*v - mean) / sd);
        }
    }
    out
}

/// Subtract a centered rolling mean; the window is clipped at the edges.
pub fn rolling_average_detrend(seg: &Segment, cfg: &PipelineConfig) -> Result<Segment> {
    let window = cfg.rolling_window;
    if seg.len() < window {
        return Err(Error::TooShort(format!(
            "segment of {} samples is shorter than the {window}-sample rolling window",
            seg.len()
        )));
    }
    let half = window / 2;
    Ok(seg.map_channels(|x| {
        let n = x.len();
        let mut out = Vec::with_capacity(n);
        // running sum over [lo, hi)
        let (mut lo, mut hi, mut sum) = (0usize, 0usize, 0.0);
        for i in 0..n {
            let want_lo = i.saturating_sub(half);
            let want_hi = (i + half + 1).min(n);
            while hi < want_hi {
                sum += x[hi];
                hi += 1;
            }
            while lo < want_lo {
                sum -= x[lo];
                lo += 1;
            }
            out.push(x[i] - sum / (hi - lo) as f64);
        }
        out
    }))
}

pub fn design_bandpass(cfg: &PipelineConfig) -> Result<BandPassFilter> {
    BandPassFilter::design(cfg.filter_order, cfg.band_low_hz, cfg.band_high_hz, cfg.rate_hz as f64)
}

/// Filter every channel independently from a zero state.
pub fn apply_filter(filter: &BandPassFilter, seg: &Segment) -> Segment {
    seg.map_channels(|x| filter.apply(x))
}

/// Normalize, detrend, band-pass.
pub fn derive_bcg(seg: &Segment, filter: &BandPassFilter, cfg: &PipelineConfig) -> Result<Segment> {
    let normalized = normalize_segment(seg, cfg);
    let detrended = rolling_average_detrend(&normalized, cfg)?;
    Ok(apply_filter(filter, &detrended))
}

/// A `2 × 3 × T` array: sensor source, axis, time. Row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentTensor {
    time_len: usize,
    data: Vec<f64>,
}

impl SegmentTensor {
    pub fn shape(&self) -> (usize, usize, usize) {
        (2, 3, self.time_len)
    }

    pub fn time_len(&self) -> usize {
        self.time_len
    }

    pub fn get(&self, source: usize, axis: usize, t: usize) -> f64 {
        self.data[(source * 3 + axis) * self.time_len + t]
    }

    /// Flat data, channel-major (`[source][axis][time]`).
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn from_flat(time_len: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != CHANNELS * time_len {
            return Err(Error::Shape(format!(
                "{} values do not fill a 2x3x{time_len} tensor",
                data.len()
            )));
        }
        Ok(Self { time_len, data })
    }

    pub fn to_channels(&self) -> [Vec<f64>; CHANNELS] {
        std::array::from_fn(|c| self.data[c * self.time_len..(c + 1) * self.time_len].to_vec())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Pack the six waveforms into a tensor; `expected_len` is `w·50`.
pub fn to_tensor(bcg: &Segment, expected_len: usize) -> Result<SegmentTensor> {
    if bcg.channels.iter().any(|c| c.len() != expected_len) {
        return Err(Error::Shape(format!(
            "segment channels have lengths {:?}, expected {expected_len}",
            bcg.channels.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let data: Vec<f64> = bcg.channels.iter().flatten().copied().collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite value in BCG segment".into()));
    }
    SegmentTensor::from_flat(expected_len, data)
}

/// Ready-made pipeline: holds the config and its designed filter.
#[derive(Debug, Clone)]
pub struct BcgPipeline {
    pub cfg: PipelineConfig,
    pub filter: BandPassFilter,
}

impl BcgPipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        let filter = design_bandpass(&cfg)?;
        Ok(Self { cfg, filter })
    }

    /// BCG tensors for every segment of an aligned recording.
    pub fn tensors(&self, pair: &AlignedPair) -> Result<Vec<SegmentTensor>> {
        segmentize(pair, &self.cfg)?
            .iter()
            .map(|seg| {
                let bcg = derive_bcg(seg, &self.filter, &self.cfg)?;
                to_tensor(&bcg, self.cfg.segment_len())
            })
            .collect()
    }
}

/// Dump one segment's channels as CSV (`sample_index,ax,ay,az,gx,gy,gz`).
pub fn write_segment_csv(seg: &Segment, path: &Path) -> Result<()> {
    let mut out = String::from("sample_index,ax,ay,az,gx,gy,gz\n");
    for i in 0..seg.len() {
        out.push_str(&i.to_string());
        for ch in &seg.channels {
            out.push(',');
            out.push_str(&ch[i].to_string());
        }
        out.push('\n');
    }
    crate::harness::write_atomic(path, out.as_bytes())
}
