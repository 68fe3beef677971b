//! Turn per-segment confidences into s-attempt decisions, an ROC curve, AUC
//! and EER, using simulated scores.
//!
//! ```text
//! cargo run --example evaluate_roc
//! ```

use bcgauth::evaluation::{session_report, Category, ScoreRecord};
use bcgauth::rng::{stream_rng, Stream};
use rand::Rng;
use rand_distr::{Beta, Distribution};

fn main() -> bcgauth::Result<()> {
    let mut rng = stream_rng(9, Stream::Synth, 0, 0);
    let genuine = Beta::<f64>::new(5.0, 2.0).expect("valid shape");
    let impostor = Beta::<f64>::new(2.0, 5.0).expect("valid shape");
    let subjects = ["a", "b", "c"];
    let mut records = Vec::new();
    for claimed in subjects {
        for true_subject in subjects.iter().copied().chain(["x1", "x2"]) {
            let category = match true_subject {
                t if t == claimed => Category::ValidationPositive,
                t if t.starts_with('x') => Category::NegativeExternal,
                _ => Category::ValidationNegative,
            };
            let dist = if category == Category::ValidationPositive { genuine } else { impostor };
            for i in 0..200 {
                records.push(ScoreRecord {
                    claimed_subject: claimed.into(),
                    true_subject: true_subject.into(),
                    session_id: "s1".into(),
                    segment_index: i,
                    confidence: dist.sample(&mut rng).clamp(0.0, 1.0) * rng.random_range(0.98..1.0),
                    category,
                });
            }
        }
    }

    let report = session_report(&records, &["s1".into()], &[1, 3, 5, 7])?;
    println!("  s    EER   (T*)     AUC    FAR    FRR   accuracy");
    for c in &report.cells {
        println!(
            "{:>3}  {:.4} ({:.3})  {:.4}  {:.4}  {:.4}  {:.4}",
            c.s, c.eer, c.eer_threshold, c.auc, c.far, c.frr, c.accuracy
        );
    }
    let one = &report.cells[0];
    println!("\nROC at s = 1 ({} points):", one.roc.points.len());
    for p in one.roc.points.iter().step_by(one.roc.points.len() / 8 + 1) {
        println!("  T {:?}: FAR {:.3} TAR {:.3}", p.threshold.map(|t| (t * 1000.0).round() / 1000.0), p.far, p.tar);
    }
    Ok(())
}
