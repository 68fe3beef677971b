//! Train a one-vs-all verifier for one synthetic subject against four others
//! and score held-out segments.
//!
//! ```text
//! cargo run --release --example train_verifier
//! ```

use bcgauth::bcg::{BcgPipeline, PipelineConfig, SegmentTensor};
use bcgauth::nn::{train, CnnGenome, CnnModel, TrainSet};
use bcgauth::preprocess::align;
use bcgauth::rng::{stream_rng, Stream};
use bcgauth::sensor::{synth_recording, SynthSubjectProfile};

fn subject_tensors(k: u64, pipeline: &BcgPipeline) -> bcgauth::Result<Vec<SegmentTensor>> {
    let profile = SynthSubjectProfile::random(&mut stream_rng(11, Stream::Profile, k, 0), 0.5);
    pipeline.tensors(&align(&synth_recording(&profile, "s", "s1", 120.0, k)?)?)
}

fn main() -> bcgauth::Result<()> {
    let pipeline = BcgPipeline::new(PipelineConfig::default())?;
    let mut set = TrainSet::default();
    let mut held_pos = Vec::new();
    let mut held_neg = Vec::new();
    for k in 0..5 {
        let mut t = subject_tensors(k, &pipeline)?;
        let held = t.split_off(90);
        if k == 0 {
            set.positives = t;
            held_pos = held;
        } else {
            set.negatives.extend(t);
            held_neg.extend(held);
        }
    }

    let genome = CnnGenome::default();
    let mut model = CnnModel::build(&genome, 3, 5)?;
    println!("{genome:?}\n{} parameters", model.n_params());
    let report = train(&mut model, &set, 5)?;
    for (e, l) in report.loss_curve.iter().enumerate().step_by(10) {
        println!("epoch {e:>3}: loss {l:.5}");
    }

    let pos = model.predict(&held_pos)?;
    let neg = model.predict(&held_neg)?;
    let tar = pos.iter().filter(|&&c| c > 0.5).count() as f64 / pos.len() as f64;
    let far = neg.iter().filter(|&&c| c > 0.5).count() as f64 / neg.len() as f64;
    println!("held out at T = 0.5: TAR {tar:.3} over {} windows, FAR {far:.3} over {}", pos.len(), neg.len());
    Ok(())
}
