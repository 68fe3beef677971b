//! Generate one synthetic recording, then trim and resample it onto the
//! shared 50 Hz grid.
//!
//! ```text
//! cargo run --example synth_and_align
//! ```

use bcgauth::preprocess::{align, GRID_STEP_MS};
use bcgauth::rng::{stream_rng, Stream};
use bcgauth::sensor::{synth_recording, SynthSubjectProfile};

fn main() -> bcgauth::Result<()> {
    let profile = SynthSubjectProfile::random(&mut stream_rng(1, Stream::Profile, 0, 0), 0.5);
    println!("heart rate {:.2} Hz, jitter {:?} ms", profile.heart_rate_hz, profile.jitter_ms_range);

    let rec = synth_recording(&profile, "v01", "s1", 30.0, 7)?;
    for (name, s) in [("accel", &rec.accel), ("gyro", &rec.gyro)] {
        println!(
            "{name}: {} samples, {:?}..{:?} ms",
            s.len(),
            s.first_ms().unwrap_or_default(),
            s.last_ms().unwrap_or_default()
        );
    }

    let pair = align(&rec)?;
    println!(
        "aligned: {} samples every {GRID_STEP_MS} ms from {} ms ({:.2} s)",
        pair.len(),
        pair.start_ms(),
        pair.duration_s()
    );
    for c in 0..6 {
        let ch = pair.channel(c);
        let mean = ch.iter().sum::<f64>() / ch.len() as f64;
        println!("  channel {c}: first {:+.4}, mean {:+.4}", ch[0], mean);
    }
    Ok(())
}
