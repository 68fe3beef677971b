//! Verification metrics: the s-attempt decision rule, FAR/FRR/TAR/TRR,
//! ROC curves with AUC, and the equal error rate.
//!
//! Any-accept over a window of `s` segments is the same as comparing the
//! window's maximum confidence against `T`, so curves are built from
//! per-window maxima.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    /// Enrolled subject scored by its own model.
    ValidationPositive,
    /// Another enrolled subject scored by this model.
    ValidationNegative,
    /// A subject no model was trained on.
    NegativeExternal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub claimed_subject: String,
    pub true_subject: String,
    pub session_id: String,
    pub segment_index: usize,
    pub confidence: f64,
    pub category: Category,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuthPolicy {
    pub threshold: f64,
    pub attempts: usize,
    pub w_s: usize,
}

impl AuthPolicy {
    /// Seconds of sensor data needed for `attempts` overlapping segments.
    pub fn required_seconds(&self) -> usize {
        self.attempts + self.w_s - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.attempts == 0 || self.w_s == 0 {
            return Err(Error::Policy("attempts and w_s must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Policy(format!("threshold {} outside [0, 1]", self.threshold)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn is_accept(self) -> bool {
        self == Decision::Accept
    }
}

/// Accept iff any of the `s` confidences is strictly above `T`.
pub fn decide(window: &[f64], policy: &AuthPolicy) -> Result<Decision> {
    if window.len() != policy.attempts {
        return Err(Error::Policy(format!(
            "window has {} scores, policy needs {}",
            window.len(),
            policy.attempts
        )));
    }
    Ok(if window.iter().any(|&c| c > policy.threshold) {
        Decision::Accept
    } else {
        Decision::Reject
    })
}

/// Maximum of every length-`s` window, stride 1.
pub fn window_maxima(confidences: &[f64], s: usize) -> Result<Vec<f64>> {
    if s == 0 {
        return Err(Error::Policy("attempts must be at least 1".into()));
    }
    if confidences.len() < s {
        return Err(Error::TooShort(format!(
            "stream of {} segments is shorter than {s} attempts",
            confidences.len()
        )));
    }
    Ok(confidences.windows(s).map(|w| w.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect())
}

/// Slide a length-`s` window over one contiguous stream and decide each.
pub fn windowed_outcomes(records: &[ScoreRecord], policy: &AuthPolicy) -> Result<Vec<Decision>> {
    check_stream(records)?;
    let conf: Vec<f64> = records.iter().map(|r| r.confidence).collect();
    if conf.len() < policy.attempts {
        return Err(Error::TooShort(format!(
            "stream of {} segments is shorter than {} attempts",
            conf.len(),
            policy.attempts
        )));
    }
    conf.windows(policy.attempts).map(|w| decide(w, policy)).collect()
}

fn check_stream(records: &[ScoreRecord]) -> Result<()> {
    let Some(first) = records.first() else {
        return Ok(());
    };
    for (k, r) in records.iter().enumerate() {
        if r.claimed_subject != first.claimed_subject
            || r.true_subject != first.true_subject
            || r.session_id != first.session_id
        {
            return Err(Error::Input("records mix several streams".into()));
        }
        if r.segment_index != first.segment_index + k {
            return Err(Error::Input(format!(
                "segment indices not contiguous at position {k} ({} after {})",
                r.segment_index,
                first.segment_index + k - 1
            )));
        }
    }
    Ok(())
}

/// Rates from decision lists. Either negative list may be empty, in which
/// case its TRR is `None` and the combined FAR uses the other one alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub tar: f64,
    pub frr: f64,
    pub trr_validation: Option<f64>,
    pub trr_external: Option<f64>,
    /// Mean of the two negative categories' FARs.
    pub far_combined: f64,
    /// `(tar + trr)/2`, using validation TRR when present.
    pub accuracy: f64,
}

pub fn rates(pos: &[Decision], val_neg: &[Decision], ext: &[Decision]) -> Result<Rates> {
    let acc = |d: &[Decision]| d.iter().filter(|d| d.is_accept()).count() as f64 / d.len() as f64;
    from_fractions(
        (!pos.is_empty()).then(|| acc(pos)),
        (!val_neg.is_empty()).then(|| acc(val_neg)),
        (!ext.is_empty()).then(|| acc(ext)),
    )
}

fn from_fractions(tar: Option<f64>, far_val: Option<f64>, far_ext: Option<f64>) -> Result<Rates> {
    let tar = tar.ok_or_else(|| Error::UndefinedRate("no positive outcomes".into()))?;
    let far_combined = match (far_val, far_ext) {
        (Some(v), Some(e)) => (v + e) / 2.0,
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return Err(Error::UndefinedRate("no negative outcomes".into())),
    };
    let trr_validation = far_val.map(|f| 1.0 - f);
    let trr_external = far_ext.map(|f| 1.0 - f);
    let trr = trr_validation.or(trr_external).expect("one negative category present");
    Ok(Rates {
        tar,
        frr: 1.0 - tar,
        trr_validation,
        trr_external,
        far_combined,
        accuracy: (tar + trr) / 2.0,
    })
}

/// Window-maximum scores split by category, for one `s`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WindowScores {
    pub positive: Vec<f64>,
    pub validation_negative: Vec<f64>,
    pub external: Vec<f64>,
}

impl WindowScores {
    fn push(&mut self, category: Category, values: Vec<f64>) {
        match category {
            Category::ValidationPositive => self.positive.extend(values),
            Category::ValidationNegative => self.validation_negative.extend(values),
            Category::NegativeExternal => self.external.extend(values),
        }
    }

    /// Rates at threshold `t` (accept iff score `> t`).
    pub fn rates_at(&self, t: f64) -> Result<Rates> {
        let frac = |v: &[f64]| (!v.is_empty()).then(|| v.iter().filter(|&&c| c > t).count() as f64 / v.len() as f64);
        from_fractions(frac(&self.positive), frac(&self.validation_negative), frac(&self.external))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// `None` for the synthetic (1, 1) end point when no threshold reaches it.
    pub threshold: Option<f64>,
    pub far: f64,
    pub frr: f64,
    pub tar: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// Ordered by decreasing threshold, so far and tar are non-decreasing.
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// Exact ROC: `T` takes every distinct score plus 0 and 1.
pub fn roc_curve(scores: &WindowScores) -> Result<RocCurve> {
    if scores.positive.is_empty() {
        return Err(Error::UndefinedRate("no positive scores".into()));
    }
    if scores.validation_negative.is_empty() && scores.external.is_empty() {
        return Err(Error::UndefinedRate("no negative scores".into()));
    }
    let mut thresholds: Vec<f64> = scores
        .positive
        .iter()
        .chain(&scores.validation_negative)
        .chain(&scores.external)
        .copied()
        .chain([0.0, 1.0])
        .collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    let (pos, val, ext) = (
        sorted(&scores.positive),
        sorted(&scores.validation_negative),
        sorted(&scores.external),
    );
    let above = |v: &[f64], t: f64| {
        (!v.is_empty()).then(|| (v.len() - v.partition_point(|&c| c <= t)) as f64 / v.len() as f64)
    };
    let mut points = Vec::with_capacity(thresholds.len() + 1);
    for t in thresholds {
        let r = from_fractions(above(&pos, t), above(&val, t), above(&ext, t))?;
        points.push(RocPoint {
            threshold: Some(t),
            far: r.far_combined,
            frr: r.frr,
            tar: r.tar,
        });
    }
    let last = points.last().expect("thresholds non-empty");
    if last.far < 1.0 || last.tar < 1.0 {
        points.push(RocPoint {
            threshold: None,
            far: 1.0,
            frr: 0.0,
            tar: 1.0,
        });
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].far - w[0].far) * (w[1].tar + w[0].tar) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EerResult {
    pub eer: f64,
    pub threshold: f64,
    /// True when far − frr never changes sign along the sweep.
    pub degenerate: bool,
}

/// Equal error rate from a threshold sweep of `(T, far, frr)`.
///
/// Finds the adjacent pair (by increasing `T`) where `far − frr` goes from
/// `≥ 0` to `≤ 0` and interpolates linearly between them; the rate is the
/// mean of the interpolated far and frr.
pub fn eer(sweep: &[(f64, f64, f64)]) -> Result<EerResult> {
    if sweep.is_empty() {
        return Err(Error::UndefinedRate("empty threshold sweep".into()));
    }
    let mut pts = sweep.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pts.windows(2) {
        let (t0, far0, frr0) = w[0];
        let (t1, far1, frr1) = w[1];
        let (d0, d1) = (far0 - frr0, far1 - frr1);
        if d0 >= 0.0 && d1 <= 0.0 {
            let alpha = if d0 == d1 { 0.0 } else { d0 / (d0 - d1) };
            let far = far0 + alpha * (far1 - far0);
            let frr = frr0 + alpha * (frr1 - frr0);
            return Ok(EerResult {
                eer: (far + frr) / 2.0,
                threshold: t0 + alpha * (t1 - t0),
                degenerate: false,
            });
        }
    }
    let &(t, far, frr) = pts
        .iter()
        .min_by(|a, b| (a.1 - a.2).abs().total_cmp(&(b.1 - b.2).abs()))
        .expect("non-empty");
    Ok(EerResult {
        eer: (far + frr) / 2.0,
        threshold: t,
        degenerate: far != frr,
    })
}

/// EER of an ROC curve's thresholded points.
pub fn curve_eer(curve: &RocCurve) -> Result<EerResult> {
    let sweep: Vec<(f64, f64, f64)> = curve
        .points
        .iter()
        .filter_map(|p| p.threshold.map(|t| (t, p.far, p.frr)))
        .collect();
    eer(&sweep)
}

/// Pool window maxima by category. Records are grouped into streams by
/// (claimed, true, session) and windowed per stream.
pub fn pooled_window_scores(records: &[ScoreRecord], s: usize) -> Result<WindowScores> {
    let mut out = WindowScores::default();
    for ((_, _, _, cat), conf) in streams(records)? {
        out.push(cat, window_maxima(&conf, s)?);
    }
    Ok(out)
}

type StreamKey<'a> = (&'a str, &'a str, &'a str, Category);

fn streams(records: &[ScoreRecord]) -> Result<BTreeMap<StreamKey<'_>, Vec<f64>>> {
    let mut grouped: BTreeMap<StreamKey<'_>, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in records {
        grouped
            .entry((&r.claimed_subject, &r.true_subject, &r.session_id, r.category))
            .or_default()
            .push(r);
    }
    grouped
        .into_iter()
        .map(|(k, mut rs)| {
            rs.sort_by_key(|r| r.segment_index);
            for (a, b) in rs.iter().zip(rs.iter().skip(1)) {
                if b.segment_index != a.segment_index + 1 {
                    return Err(Error::Input(format!(
                        "stream {k:?} has a gap between segments {} and {}",
                        a.segment_index, b.segment_index
                    )));
                }
            }
            Ok((k, rs.iter().map(|r| r.confidence).collect()))
        })
        .collect()
}

/// Metrics for one (session, s) cell, reported at that cell's pooled EER
/// threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub session: String,
    pub s: usize,
    pub far: f64,
    pub frr: f64,
    pub tar: f64,
    pub trr_validation: Option<f64>,
    pub trr_external: Option<f64>,
    pub accuracy: f64,
    pub eer: f64,
    pub eer_threshold: f64,
    pub eer_degenerate: bool,
    /// Mean over claimed subjects of each subject's own EER.
    pub eer_per_subject_mean: f64,
    pub auc: f64,
    pub n_positive_windows: usize,
    pub n_validation_negative_windows: usize,
    pub n_external_windows: usize,
    #[serde(skip)]
    pub roc: RocCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReports {
    pub cells: Vec<EvalReport>,
    pub warnings: Vec<String>,
}

/// One report per (session, s). Sessions with no positive or no negative
/// records are skipped with a warning.
pub fn session_report(records: &[ScoreRecord], sessions: &[String], s_values: &[usize]) -> Result<SessionReports> {
    let mut cells = Vec::new();
    let mut warnings = Vec::new();
    for session in sessions {
        let recs: Vec<ScoreRecord> = records.iter().filter(|r| &r.session_id == session).cloned().collect();
        let has = |c: Category| recs.iter().any(|r| r.category == c);
        if !has(Category::ValidationPositive)
            || !(has(Category::ValidationNegative) || has(Category::NegativeExternal))
        {
            warnings.push(format!("session {session}: no usable records, omitted"));
            continue;
        }
        for &s in s_values {
            match cell(session, &recs, s) {
                Ok(c) => cells.push(c),
                Err(Error::TooShort(msg)) => warnings.push(format!("session {session}, s={s}: {msg}")),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(SessionReports { cells, warnings })
}

fn cell(session: &str, recs: &[ScoreRecord], s: usize) -> Result<EvalReport> {
    let pooled = pooled_window_scores(recs, s)?;
    let roc = roc_curve(&pooled)?;
    let e = curve_eer(&roc)?;
    let at = pooled.rates_at(e.threshold)?;

    let mut claimed: Vec<&str> = recs.iter().map(|r| r.claimed_subject.as_str()).collect();
    claimed.sort();
    claimed.dedup();
    let mut per_subject = Vec::new();
    for c in claimed {
        let own: Vec<ScoreRecord> = recs.iter().filter(|r| r.claimed_subject == c).cloned().collect();
        let ws = pooled_window_scores(&own, s)?;
        if ws.positive.is_empty() || (ws.validation_negative.is_empty() && ws.external.is_empty()) {
            continue;
        }
        per_subject.push(curve_eer(&roc_curve(&ws)?)?.eer);
    }
    let eer_per_subject_mean = if per_subject.is_empty() {
        f64::NAN
    } else {
        per_subject.iter().sum::<f64>() / per_subject.len() as f64
    };
    Ok(EvalReport {
        session: session.to_string(),
        s,
        far: at.far_combined,
        frr: at.frr,
        tar: at.tar,
        trr_validation: at.trr_validation,
        trr_external: at.trr_external,
        accuracy: at.accuracy,
        eer: e.eer,
        eer_threshold: e.threshold,
        eer_degenerate: e.degenerate,
        eer_per_subject_mean,
        auc: roc.auc,
        n_positive_windows: pooled.positive.len(),
        n_validation_negative_windows: pooled.validation_negative.len(),
        n_external_windows: pooled.external.len(),
        roc,
    })
}

/// ROC points as CSV: `threshold,far,frr,tar`. The unthresholded end point
/// has an empty threshold field.
pub fn roc_csv(curve: &RocCurve) -> String {
    let mut out = String::from("threshold,far,frr,tar\n");
    for p in &curve.points {
        let t = p.threshold.map(|t| t.to_string()).unwrap_or_default();
        out.push_str(&format!("{t},{},{},{}\n", p.far, p.frr, p.tar));
    }
    out
}

/// Probability that a random positive outscores a random negative, ties
/// counted half.
pub fn pairwise_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &p in pos {
        for &n in neg {
            wins += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};
    use proptest::prelude::*;
    use rand::Rng as _;

    fn policy(t: f64, s: usize) -> AuthPolicy {
        AuthPolicy {
            threshold: t,
            attempts: s,
            w_s: 3,
        }
    }

    fn stream(conf: &[f64], cat: Category) -> Vec<ScoreRecord> {
        conf.iter()
            .enumerate()
            .map(|(i, &c)| ScoreRecord {
                claimed_subject: "a".into(),
                true_subject: if cat == Category::ValidationPositive { "a" } else { "b" }.into(),
                session_id: "s1".into(),
                segment_index: i,
                confidence: c,
                category: cat,
            })
            .collect()
    }

    #[test]
    fn decide_examples() {
        assert_eq!(decide(&[0.1, 0.6, 0.2], &policy(0.5, 3)).unwrap(), Decision::Accept);
        assert_eq!(decide(&[0.4, 0.5, 0.49], &policy(0.5, 3)).unwrap(), Decision::Reject);
        assert_eq!(decide(&[0.51], &policy(0.5, 1)).unwrap(), Decision::Accept);
        assert!(matches!(decide(&[0.9, 0.9], &policy(0.5, 3)), Err(Error::Policy(_))));
    }

    #[test]
    fn required_seconds() {
        assert_eq!(policy(0.5, 7).required_seconds(), 9);
        assert_eq!(policy(0.5, 1).required_seconds(), 3);
    }

    #[test]
    fn window_counts_and_spike() {
        let conf = vec![0.0; 598];
        let out = windowed_outcomes(&stream(&conf, Category::ValidationPositive), &policy(0.5, 7)).unwrap();
        assert_eq!(out.len(), 592);
        assert!(out.iter().all(|d| *d == Decision::Reject));

        for spike in [0, 3, 300, 597] {
            let mut conf = vec![0.1; 598];
            conf[spike] = 0.9;
            let out = windowed_outcomes(&stream(&conf, Category::ValidationPositive), &policy(0.5, 7)).unwrap();
            let covering = (0..592).filter(|&w| w <= spike && spike < w + 7).count();
            assert_eq!(out.iter().filter(|d| d.is_accept()).count(), covering);
        }
        assert!(matches!(
            windowed_outcomes(&stream(&[0.1; 5], Category::ValidationPositive), &policy(0.5, 7)),
            Err(Error::TooShort(_))
        ));
    }

    #[test]
    fn windowing_rejects_gaps() {
        let mut recs = stream(&[0.1; 10], Category::ValidationPositive);
        recs.remove(4);
        assert!(windowed_outcomes(&recs, &policy(0.5, 2)).is_err());
        assert!(pooled_window_scores(&recs, 2).is_err());
    }

    #[test]
    fn rates_examples() {
        use Decision::*;
        let trr = |acc: usize, n: usize| (0..n).map(|i| if i < acc { Accept } else { Reject }).collect::<Vec<_>>();
        let r = rates(&trr(10, 10), &trr(1, 10), &trr(2, 10)).unwrap();
        assert!((r.far_combined - 0.15).abs() < 1e-15);
        assert_eq!(r.trr_validation, Some(0.9));
        assert_eq!(r.trr_external, Some(0.8));
        let r = rates(&trr(5, 5), &trr(0, 5), &trr(0, 5)).unwrap();
        assert_eq!((r.tar, r.frr, r.far_combined, r.accuracy), (1.0, 0.0, 0.0, 1.0));
        let r = rates(&trr(97, 100), &trr(2, 100), &[]).unwrap();
        assert!((r.accuracy - 0.975).abs() < 1e-12);
        assert!(matches!(rates(&[], &trr(0, 3), &[]), Err(Error::UndefinedRate(_))));
    }

    #[test]
    fn separable_scores_give_perfect_curve() {
        let ws = WindowScores {
            positive: vec![0.9, 0.8, 0.95],
            validation_negative: vec![0.1, 0.2],
            external: vec![0.05],
        };
        let roc = roc_curve(&ws).unwrap();
        assert_eq!(roc.auc, 1.0);
        let e = curve_eer(&roc).unwrap();
        assert_eq!(e.eer, 0.0);
        assert!(!e.degenerate);
        assert!(e.threshold >= 0.2 && e.threshold < 0.8);
    }

    #[test]
    fn eer_hand_interpolation() {
        let e = eer(&[(0.4, 0.2, 0.1), (0.6, 0.05, 0.3)]).unwrap();
        // d goes 0.1 → −0.25, alpha = 0.1/0.35
        let a: f64 = 0.1 / 0.35;
        let far = 0.2 + a * (0.05 - 0.2);
        let frr = 0.1 + a * (0.3 - 0.1);
        assert!((far - frr).abs() < 1e-12);
        assert!((e.eer - far).abs() < 1e-12);
        assert!((e.threshold - (0.4 + a * 0.2)).abs() < 1e-12);
        assert!(e.eer > 0.1 && e.eer < 0.2);
    }

    #[test]
    fn eer_without_crossing_is_degenerate() {
        let e = eer(&[(0.2, 0.9, 0.1), (0.5, 0.6, 0.2), (0.8, 0.5, 0.3)]).unwrap();
        assert!(e.degenerate);
        assert_eq!(e.threshold, 0.8);
    }

    #[test]
    fn matched_distributions_give_half_auc() {
        let mut rng = stream_rng(0, Stream::GradCheck, 1, 2);
        let ws = WindowScores {
            positive: (0..2000).map(|_| rng.random::<f64>()).collect(),
            validation_negative: (0..2000).map(|_| rng.random::<f64>()).collect(),
            external: vec![],
        };
        assert!((roc_curve(&ws).unwrap().auc - 0.5).abs() < 0.05);
    }

    #[test]
    fn session_report_grid_and_empty_session() {
        let mut recs = stream(&(0..40).map(|i| 0.5 + i as f64 / 100.0).collect::<Vec<_>>(), Category::ValidationPositive);
        recs.extend(stream(&(0..40).map(|i| i as f64 / 100.0).collect::<Vec<_>>(), Category::ValidationNegative));
        let report = session_report(&recs, &["s1".into(), "s2".into()], &[1, 3, 5, 7]).unwrap();
        assert_eq!(report.cells.len(), 4);
        assert_eq!(report.warnings.len(), 1);
        for c in &report.cells {
            assert_eq!(c.auc, 1.0);
            assert_eq!(c.eer, 0.0);
            assert_eq!(c.n_positive_windows, 40 - c.s + 1);
        }
    }

    #[test]
    fn roc_csv_layout() {
        let ws = WindowScores {
            positive: vec![0.0],
            validation_negative: vec![0.0],
            external: vec![],
        };
        let csv = roc_csv(&roc_curve(&ws).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "threshold,far,frr,tar");
        assert_eq!(*lines.last().unwrap(), ",1,0,1");
    }

    fn scores_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        // coarse grid values so ties are common
        let v = prop::collection::vec((0u32..=20).prop_map(|k| k as f64 / 20.0), 1..40);
        (v.clone(), v.clone(), prop::collection::vec((0u32..=20).prop_map(|k| k as f64 / 20.0), 0..40))
    }

    proptest! {
        #[test]
        fn trapezoid_auc_equals_pairwise((pos, neg, _) in scores_strategy()) {
            let ws = WindowScores { positive: pos.clone(), validation_negative: neg.clone(), external: vec![] };
            let auc = roc_curve(&ws).unwrap().auc;
            prop_assert!((auc - pairwise_auc(&pos, &neg)).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&auc));
        }

        #[test]
        fn combined_auc_is_mean_of_pairwise((pos, neg, ext) in scores_strategy()) {
            prop_assume!(!ext.is_empty());
            let ws = WindowScores { positive: pos.clone(), validation_negative: neg.clone(), external: ext.clone() };
            let want = (pairwise_auc(&pos, &neg) + pairwise_auc(&pos, &ext)) / 2.0;
            prop_assert!((roc_curve(&ws).unwrap().auc - want).abs() < 1e-9);
        }

        #[test]
        fn far_and_tar_non_increasing_in_t((pos, neg, ext) in scores_strategy()) {
            let ws = WindowScores { positive: pos, validation_negative: neg, external: ext };
            let roc = roc_curve(&ws).unwrap();
            for w in roc.points.windows(2) {
                prop_assert!(w[1].far >= w[0].far && w[1].tar >= w[0].tar);
            }
            let mut prev = ws.rates_at(0.0).unwrap();
            for k in 1..=20 {
                let r = ws.rates_at(k as f64 / 20.0).unwrap();
                prop_assert!(r.tar <= prev.tar && r.far_combined <= prev.far_combined);
                prev = r;
            }
        }

        #[test]
        fn eer_brackets((pos, neg, ext) in scores_strategy()) {
            let ws = WindowScores { positive: pos, validation_negative: neg, external: ext };
            let roc = roc_curve(&ws).unwrap();
            let e = curve_eer(&roc).unwrap();
            let mut sweep: Vec<(f64, f64, f64)> = roc.points.iter().filter_map(|p| p.threshold.map(|t| (t, p.far, p.frr))).collect();
            sweep.sort_by(|a, b| a.0.total_cmp(&b.0));
            if !e.degenerate {
                let k = sweep.windows(2).position(|w| w[0].1 - w[0].2 >= 0.0 && w[1].1 - w[1].2 <= 0.0).unwrap();
                let (a, b) = (sweep[k], sweep[k + 1]);
                prop_assert!(a.0 <= e.threshold && e.threshold <= b.0);
                let gap = ((a.1 - a.2) - (b.1 - b.2)).abs();
                let r = ws.rates_at(e.threshold).unwrap();
                prop_assert!((r.far_combined - r.frr).abs() <= gap + 1e-12);
                prop_assert!(e.eer >= a.1.min(b.1).min(a.2.min(b.2)) - 1e-12);
                prop_assert!(e.eer <= a.1.max(b.1).max(a.2.max(b.2)) + 1e-12);
            }
        }

        #[test]
        fn accept_monotone_in_s(conf in prop::collection::vec(0.0f64..1.0, 10..60), t in 0.0f64..1.0, s in 1usize..8) {
            let recs = stream(&conf, Category::ValidationPositive);
            let a = windowed_outcomes(&recs, &policy(t, s)).unwrap();
            let b = windowed_outcomes(&recs, &policy(t, s + 1)).unwrap();
            prop_assert_eq!(a.len(), conf.len() - s + 1);
            // window i of s+1 contains window i of s
            for i in 0..b.len() {
                prop_assert!(!a[i].is_accept() || b[i].is_accept());
            }
        }

        #[test]
        fn rates_match_recount(p in prop::collection::vec(any::<bool>(), 1..50), v in prop::collection::vec(any::<bool>(), 1..50), x in prop::collection::vec(any::<bool>(), 1..50)) {
            let d = |b: &[bool]| b.iter().map(|&a| if a { Decision::Accept } else { Decision::Reject }).collect::<Vec<_>>();
            let r = rates(&d(&p), &d(&v), &d(&x)).unwrap();
            let cnt = |b: &[bool]| b.iter().filter(|&&a| a).count() as f64 / b.len() as f64;
            prop_assert_eq!(r.tar, cnt(&p));
            prop_assert_eq!(r.trr_validation, Some(1.0 - cnt(&v)));
            prop_assert_eq!(r.far_combined, (cnt(&v) + cnt(&x)) / 2.0);
        }
    }
}
