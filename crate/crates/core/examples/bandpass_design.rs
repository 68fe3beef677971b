//! Design the 4-11 Hz Butterworth band-pass and print its response.
//!
//! ```text
//! cargo run --example bandpass_design
//! ```

use bcgauth::bcg::{design_bandpass, PipelineConfig};

fn main() -> bcgauth::Result<()> {
    let filter = design_bandpass(&PipelineConfig::default())?;
    println!("stable: {}", filter.is_stable());
    for p in filter.poles() {
        println!("pole {:+.5} {:+.5}i  |p| = {:.5}", p.re, p.im, p.norm());
    }
    println!("\n freq_hz   |H|       dB");
    for f in [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 7.5, 9.0, 11.0, 13.0, 16.0, 20.0, 25.0] {
        let m = filter.magnitude(f);
        println!("{f:>7.1}  {m:.6}  {:>8.2}", 20.0 * m.max(1e-300).log10());
    }

    let impulse: Vec<f64> = (0..200).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
    let h = filter.apply(&impulse);
    let tail: f64 = h[150..].iter().map(|v| v.abs()).sum();
    println!("\nimpulse response: h[0..4] = {:?}, |tail after 3 s| = {tail:.2e}", &h[..4]);
    Ok(())
}
