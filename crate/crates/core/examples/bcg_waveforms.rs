//! Follow one segment through normalization, detrending and band-pass
//! filtering, and write each stage as CSV.
//!
//! ```text
//! cargo run --example bcg_waveforms -- [out_dir]
//! ```

use std::path::PathBuf;

use bcgauth::bcg::{
    apply_filter, design_bandpass, normalize_segment, rolling_average_detrend, segmentize, write_segment_csv,
    BcgPipeline, PipelineConfig, Segment,
};
use bcgauth::preprocess::align;
use bcgauth::rng::{stream_rng, Stream};
use bcgauth::sensor::{synth_recording, SynthSubjectProfile};

fn rms(seg: &Segment, c: usize) -> f64 {
    (seg.channels[c].iter().map(|v| v * v).sum::<f64>() / seg.len() as f64).sqrt()
}

fn main() -> bcgauth::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/bcg_waveforms".into()));
    let cfg = PipelineConfig::default();
    let profile = SynthSubjectProfile::random(&mut stream_rng(3, Stream::Profile, 0, 0), 0.5);
    let pair = align(&synth_recording(&profile, "v01", "s1", 20.0, 3)?)?;

    let segments = segmentize(&pair, &cfg)?;
    println!("{} s of data → {} segments of {} samples", pair.duration_s() as usize, segments.len(), cfg.segment_len());

    let filter = design_bandpass(&cfg)?;
    let raw = &segments[5];
    let normalized = normalize_segment(raw, &cfg);
    let detrended = rolling_average_detrend(&normalized, &cfg)?;
    let bcg = apply_filter(&filter, &detrended);
    for (name, seg) in [("raw", raw), ("normalized", &normalized), ("detrended", &detrended), ("bcg", &bcg)] {
        let path = out.join(format!("{name}.csv"));
        write_segment_csv(seg, &path)?;
        println!("{name:>10}: accel-x rms {:.4}, gyro-z rms {:.4} → {}", rms(seg, 0), rms(seg, 5), path.display());
    }

    let tensors = BcgPipeline::new(cfg)?.tensors(&pair)?;
    println!("tensor shape {:?} × {}", tensors[0].shape(), tensors.len());
    Ok(())
}
