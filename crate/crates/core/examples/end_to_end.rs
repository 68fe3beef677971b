//! Synthesize a small dataset, enroll every subject, and print the
//! session × attempts report. Everything lands under the output directory.
//!
//! ```text
//! cargo run --release --example end_to_end -- [out_dir]
//! ```

use std::path::PathBuf;

use bcgauth::harness::{cmd_enroll, cmd_report, cmd_synth, ExperimentConfig};
use bcgauth::nn::CnnGenome;

fn main() -> bcgauth::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/end_to_end".into()));
    let mut cfg = ExperimentConfig {
        dataset_root: out.join("data"),
        enroll_minutes: 2.0,
        tune_minutes: 1.0,
        seed: 2,
        ..ExperimentConfig::default()
    };
    cfg.synth.n_validation = 4;
    cfg.synth.n_external = 3;
    cfg.synth.sessions = 2;
    cfg.synth.session_minutes = 3.0;
    cfg.genome = CnnGenome {
        filters_per_layer: 4,
        dense_units: 16,
        ..CnnGenome::default()
    };

    let synth = cmd_synth(&cfg, &cfg.dataset_root, true)?;
    println!("{} recordings under {}", synth.recordings, synth.root.display());
    let enrolled = cmd_enroll(&cfg, None, &cfg.genome, &out.join("models"))?;
    for m in &enrolled.models {
        println!("{}: {} positive / {} negative, final loss {:.4}", m.subject, m.n_positive, m.n_negative, m.final_loss);
    }
    let report = cmd_report(&cfg, &out.join("models"), &out.join("report"))?;
    println!("\nsession  s    EER     AUC    accuracy");
    for c in &report.cells {
        println!("{:>7} {:>2}  {:.4}  {:.4}  {:.4}", c.session, c.s, c.eer, c.auc, c.accuracy);
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
