use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{bce_with_logit, sigmoid, CnnModel, Trace};
use crate::bcg::SegmentTensor;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Fixed training length.
pub const EPOCHS: usize = 100;
pub const MOMENTUM: f64 = 0.9;

/// One-vs-all training data: the enrolled subject against everyone else.
#[derive(Debug, Clone, Default)]
pub struct TrainSet {
    pub positives: Vec<SegmentTensor>,
    pub negatives: Vec<SegmentTensor>,
}

impl TrainSet {
    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn example(&self, i: usize) -> (&SegmentTensor, f64) {
        if i < self.positives.len() {
            (&self.positives[i], 1.0)
        } else {
            (&self.negatives[i - self.positives.len()], 0.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    /// Mean weighted loss of each epoch, as seen during that epoch's updates.
    pub loss_curve: Vec<f64>,
    pub final_loss: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub epochs: usize,
    pub momentum: f64,
    pub class_weighted: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            epochs: EPOCHS,
            momentum: MOMENTUM,
            class_weighted: true,
        }
    }
}

/// Per-example weights giving each present class the same total weight,
/// scaled so the weights average to 1.
pub fn class_weights(labels: &[bool]) -> Vec<f64> {
    let n = labels.len() as f64;
    let pos = labels.iter().filter(|&&l| l).count() as f64;
    let neg = n - pos;
    let classes = (pos > 0.0) as u8 as f64 + (neg > 0.0) as u8 as f64;
    labels
        .iter()
        .map(|&l| n / (classes * if l { pos } else { neg }))
        .collect()
}

/// Train for 100 epochs with class-weighted cross-entropy and momentum SGD.
pub fn train(model: &mut CnnModel, data: &TrainSet, seed: u64) -> Result<TrainReport> {
    train_with(model, data, seed, TrainOptions::default())
}

pub fn train_with(model: &mut CnnModel, data: &TrainSet, seed: u64, opts: TrainOptions) -> Result<TrainReport> {
    if data.positives.is_empty() || data.negatives.is_empty() {
        return Err(Error::Training(format!(
            "need both classes, got {} positives and {} negatives",
            data.positives.len(),
            data.negatives.len()
        )));
    }
    for x in data.positives.iter().chain(&data.negatives) {
        model.check_input(x)?;
    }
    let n = data.len();
    let labels: Vec<bool> = (0..n).map(|i| i < data.positives.len()).collect();
    let weights = if opts.class_weighted {
        class_weights(&labels)
    } else {
        vec![1.0; n]
    };

    let genome = *model.genome();
    let mut shuffle_rng = stream_rng(seed, Stream::Shuffle, 0, 0);
    let mut dropout_rng = stream_rng(seed, Stream::Shuffle, 1, 0);
    let mut order: Vec<usize> = (0..n).collect();
    let mut grad = vec![0.0; model.n_params()];
    let mut velocity = vec![0.0; model.n_params()];
    let mut trace = Trace::default();
    let mut loss_curve = Vec::with_capacity(opts.epochs);

    for _ in 0..opts.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(genome.batch_size) {
            grad.fill(0.0);
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let (x, y) = data.example(i);
                model.forward_trace(x.as_slice(), &mut trace, Some(&mut dropout_rng));
                epoch_loss += weights[i] * bce_with_logit(trace.logit, y);
                let dlogit = weights[i] * (sigmoid(trace.logit) - y);
                model.backward(&trace, dlogit, scale, &mut grad);
            }
            for ((p, v), g) in model.params.iter_mut().zip(velocity.iter_mut()).zip(&grad) {
                *v = opts.momentum * *v - genome.learning_rate * g;
                *p += *v;
            }
        }
        loss_curve.push(epoch_loss / n as f64);
    }
    if model.params.iter().any(|p| !p.is_finite()) {
        return Err(Error::Training("parameters diverged to non-finite values".into()));
    }
    Ok(TrainReport {
        epochs_run: opts.epochs,
        final_loss: loss_curve.last().copied().unwrap_or(f64::NAN),
        loss_curve,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub checked: usize,
    /// Parameters skipped because a finite-difference probe crossed a ReLU
    /// hinge or changed a pooling winner, or both gradients were below 1e-8.
    pub skipped: usize,
}

/// Central-difference step.
pub const GRAD_CHECK_STEP: f64 = 1e-5;
/// Gradients smaller than this on both sides are not compared.
pub const GRAD_CHECK_FLOOR: f64 = 1e-8;

/// Compare backprop gradients of the unweighted loss on one example against
/// central finite differences, on up to `max_params` randomly chosen
/// parameters. Dropout is off.
pub fn grad_check(
    model: &CnnModel,
    x: &SegmentTensor,
    label: bool,
    max_params: usize,
    seed: u64,
) -> Result<GradCheckReport> {
    model.check_input(x)?;
    let y = if label { 1.0 } else { 0.0 };
    let act = model.genome().activation;
    let mut trace = Trace::default();
    model.forward_trace(x.as_slice(), &mut trace, None::<&mut ChaCha8Rng>);
    let base_pattern = trace.kink_pattern(act);
    let mut analytic = vec![0.0; model.n_params()];
    model.backward(&trace, sigmoid(trace.logit) - y, 1.0, &mut analytic);

    let mut rng = stream_rng(seed, Stream::GradCheck, 0, 0);
    let picks = rand::seq::index::sample(&mut rng, model.n_params(), max_params.min(model.n_params()));
    let mut probe = model.clone();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        checked: 0,
        skipped: 0,
    };
    for k in picks.iter() {
        let orig = model.params[k];
        let mut eval = |v: f64| {
            probe.params[k] = v;
            probe.forward_trace(x.as_slice(), &mut trace, None::<&mut ChaCha8Rng>);
            (bce_with_logit(trace.logit, y), trace.kink_pattern(act))
        };
        let (plus, pat_plus) = eval(orig + GRAD_CHECK_STEP);
        let (minus, pat_minus) = eval(orig - GRAD_CHECK_STEP);
        probe.params[k] = orig;
        if pat_plus != base_pattern || pat_minus != base_pattern {
            report.skipped += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * GRAD_CHECK_STEP);
        let a = analytic[k];
        let mag = a.abs().max(numeric.abs());
        if mag < GRAD_CHECK_FLOOR {
            report.skipped += 1;
            continue;
        }
        report.max_rel_error = report.max_rel_error.max((a - numeric).abs() / mag);
        report.checked += 1;
    }
    Ok(report)
}
