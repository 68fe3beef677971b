use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::dataset::{split_enrollment, Dataset, DatasetManifest, EnrollSplit, MANIFEST_FILE};
use super::{write_atomic, write_json};
use crate::bcg::{BcgPipeline, PipelineConfig, SegmentTensor};
use crate::error::{Error, Result};
use crate::evaluation::{
    decide, roc_csv, session_report, AuthPolicy, Category, Decision, EvalReport, ScoreRecord,
};
use crate::evolution::{far_frr, run_ga, GaConfig, ScoredGenome};
use crate::nn::{train, CnnGenome, CnnModel, TrainReport, TrainSet};
use crate::preprocess::align;
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::sensor::{read_recording, synth_recording, write_recording, SynthSubjectProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthOutcome {
    pub root: PathBuf,
    pub validation_subjects: Vec<String>,
    pub external_subjects: Vec<String>,
    pub recordings: usize,
}

/// Write a synthetic dataset: `v01..` validation subjects with
/// `cfg.synth.sessions` sessions each and `x01..` external subjects with one.
/// Refuses a non-empty `root` unless `force`.
pub fn cmd_synth(cfg: &ExperimentConfig, root: &Path, force: bool) -> Result<SynthOutcome> {
    cfg.validate()?;
    if root.exists() {
        let mut entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
        if entries.next().is_some() && !force {
            return Err(Error::Dataset(format!(
                "{} is not empty; pass --force to overwrite",
                root.display()
            )));
        }
    }
    let sc = &cfg.synth;
    let validation: Vec<String> = (1..=sc.n_validation).map(|i| format!("v{i:02}")).collect();
    let external: Vec<String> = (1..=sc.n_external).map(|i| format!("x{i:02}")).collect();
    let mut recordings = BTreeMap::new();
    let mut count = 0;
    for (k, subject) in validation.iter().chain(&external).enumerate() {
        let profile = SynthSubjectProfile::random(&mut stream_rng(cfg.seed, Stream::Profile, k as u64, 0), sc.noise_std);
        let n_sessions = if k < validation.len() { sc.sessions } else { 1 };
        let mut per_session = BTreeMap::new();
        for j in 0..n_sessions {
            let session = format!("s{}", j + 1);
            let seed = derive_seed(cfg.seed, Stream::Synth, k as u64, j as u64);
            let rec = synth_recording(&profile, subject, &session, sc.session_minutes * 60.0, seed)?;
            let rel = PathBuf::from(subject).join(format!("{session}.json"));
            write_recording(&rec, &root.join(&rel))?;
            per_session.insert(session, rel);
            count += 1;
        }
        recordings.insert(subject.clone(), per_session);
    }
    let manifest = DatasetManifest {
        validation_subjects: validation.clone(),
        external_subjects: external.clone(),
        recordings,
    };
    manifest.validate()?;
    write_json(&root.join(MANIFEST_FILE), &manifest)?;
    Ok(SynthOutcome {
        root: root.to_path_buf(),
        validation_subjects: validation,
        external_subjects: external,
        recordings: count,
    })
}

/// Session-1 training/tuning splits for every validation subject.
struct EnrollData {
    subjects: Vec<String>,
    splits: Vec<EnrollSplit>,
}

impl EnrollData {
    fn load(ds: &Dataset, cfg: &ExperimentConfig, pipeline: &BcgPipeline) -> Result<Self> {
        let subjects = ds.manifest.validation_subjects.clone();
        let splits = subjects
            .iter()
            .map(|s| {
                let t = ds.tensors(s, &cfg.enroll_session, pipeline)?;
                split_enrollment(t, pipeline.cfg.w_s, cfg.enroll_seconds(), cfg.tune_seconds())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { subjects, splits })
    }

    fn index_of(&self, subject: &str) -> Result<usize> {
        self.subjects
            .iter()
            .position(|s| s == subject)
            .ok_or_else(|| Error::Dataset(format!("{subject} is not a validation subject")))
    }

    fn one_vs_all(&self, k: usize, part: impl Fn(&EnrollSplit) -> &Vec<SegmentTensor>) -> TrainSet {
        TrainSet {
            positives: part(&self.splits[k]).clone(),
            negatives: self
                .splits
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .flat_map(|(_, s)| part(s).iter().cloned())
                .collect(),
        }
    }

    fn train_set(&self, k: usize) -> TrainSet {
        self.one_vs_all(k, |s| &s.train)
    }

    fn tune_set(&self, k: usize) -> TrainSet {
        self.one_vs_all(k, |s| &s.tune)
    }
}

fn pipeline_for(cfg: &ExperimentConfig, w_s: usize) -> Result<BcgPipeline> {
    BcgPipeline::new(PipelineConfig {
        w_s,
        ..cfg.pipeline.clone()
    })
}

/// Train subject `k`'s verifier with seeds derived from the experiment seed.
fn train_subject(cfg: &ExperimentConfig, data: &EnrollData, k: usize, genome: &CnnGenome, w_s: usize) -> Result<(CnnModel, TrainReport)> {
    let (k64, w64) = (k as u64, w_s as u64);
    let mut model = CnnModel::build(genome, w_s, derive_seed(cfg.seed, Stream::Init, k64, w64))?;
    let report = train(&mut model, &data.train_set(k), derive_seed(cfg.seed, Stream::Shuffle, k64, w64))?;
    Ok((model, report))
}

pub fn model_path(dir: &Path, subject: &str) -> PathBuf {
    dir.join(format!("{subject}.model.json"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrolledModel {
    pub subject: String,
    pub model_path: PathBuf,
    pub n_positive: usize,
    pub n_negative: usize,
    pub final_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrollOutcome {
    pub genome: CnnGenome,
    pub w_s: usize,
    pub models: Vec<EnrolledModel>,
}

/// Train one-vs-all verifiers (one subject, or all validation subjects) and
/// write `<subject>.model.json` plus `<subject>.train.json` into `out_dir`.
pub fn cmd_enroll(cfg: &ExperimentConfig, subject: Option<&str>, genome: &CnnGenome, out_dir: &Path) -> Result<EnrollOutcome> {
    cfg.validate()?;
    let w_s = cfg.pipeline.w_s;
    genome.validate(w_s)?;
    let ds = Dataset::open(&cfg.dataset_root)?;
    let data = EnrollData::load(&ds, cfg, &pipeline_for(cfg, w_s)?)?;
    let targets: Vec<usize> = match subject {
        Some(s) => vec![data.index_of(s)?],
        None => (0..data.subjects.len()).collect(),
    };
    let mut models = Vec::new();
    for k in targets {
        let subject = &data.subjects[k];
        let (model, report) = train_subject(cfg, &data, k, genome, w_s)?;
        let path = model_path(out_dir, subject);
        model.save(&path)?;
        write_json(&out_dir.join(format!("{subject}.train.json")), &report)?;
        let n_positive = data.splits[k].train.len();
        models.push(EnrolledModel {
            subject: subject.clone(),
            model_path: path,
            n_positive,
            n_negative: data.splits.iter().map(|s| s.train.len()).sum::<usize>() - n_positive,
            final_loss: report.final_loss,
        });
    }
    Ok(EnrollOutcome {
        genome: *genome,
        w_s,
        models,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthOutcome {
    pub claimed_subject: String,
    pub decision: Decision,
    pub confidences: Vec<f64>,
    pub threshold: f64,
    pub attempts: usize,
    pub w_s: usize,
    pub required_seconds: usize,
}

/// Score the first `attempts` segments of a recording against a model and
/// apply the any-accept rule.
pub fn cmd_auth(
    cfg: &ExperimentConfig,
    model_file: &Path,
    recording_manifest: &Path,
    claimed: &str,
    threshold: f64,
    attempts: usize,
) -> Result<AuthOutcome> {
    let model = CnnModel::load(model_file)?;
    let policy = AuthPolicy {
        threshold,
        attempts,
        w_s: model.w_s(),
    };
    policy.validate()?;
    let pair = align(&read_recording(recording_manifest)?)?;
    let need = policy.required_seconds();
    if pair.len() / 50 < need {
        return Err(Error::TooShort(format!(
            "{attempts} attempts with w={} need s + w - 1 = {need} seconds of sensor data, recording has {:.2} s",
            model.w_s(),
            pair.duration_s()
        )));
    }
    let tensors = pipeline_for(cfg, model.w_s())?.tensors(&pair)?;
    let confidences = model.predict(&tensors[..attempts])?;
    Ok(AuthOutcome {
        claimed_subject: claimed.to_string(),
        decision: decide(&confidences, &policy)?,
        confidences,
        threshold,
        attempts,
        w_s: model.w_s(),
        required_seconds: need,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaOutcome {
    pub subject: String,
    pub best: ScoredGenome,
    pub best_so_far: Vec<f64>,
    pub genome_path: PathBuf,
    pub log_path: PathBuf,
    pub evaluations: usize,
}

/// Genetic search for one subject on its enrollment split. Writes
/// `<subject>.genome.json` (loadable by `enroll --genome`) and
/// `<subject>.ga_log.jsonl`.
pub fn cmd_ga(cfg: &ExperimentConfig, subject: &str, out_dir: &Path) -> Result<GaOutcome> {
    cfg.validate()?;
    let w_s = cfg.pipeline.w_s;
    let ds = Dataset::open(&cfg.dataset_root)?;
    let data = EnrollData::load(&ds, cfg, &pipeline_for(cfg, w_s)?)?;
    let k = data.index_of(subject)?;
    let ga = GaConfig {
        seed: derive_seed(cfg.seed, Stream::Ga, k as u64, 0),
        ..cfg.ga.clone()
    };
    let run = run_ga(&ga, &data.train_set(k), &data.tune_set(k), w_s)?;
    let mut log = String::new();
    for r in &run.log {
        log.push_str(&serde_json::to_string(r).map_err(|e| Error::json(out_dir, e))?);
        log.push('\n');
    }
    let log_path = out_dir.join(format!("{subject}.ga_log.jsonl"));
    write_atomic(&log_path, log.as_bytes())?;
    let genome_path = out_dir.join(format!("{subject}.genome.json"));
    write_json(&genome_path, &run.best.genome)?;
    Ok(GaOutcome {
        subject: subject.to_string(),
        best: run.best,
        best_so_far: run.best_so_far,
        genome_path,
        log_path,
        evaluations: run.log.iter().filter(|r| !r.cached).count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub w_s: usize,
    /// Mean over subjects of `(tar + trr)/2` at T = 0.5, s = 1.
    pub accuracy: f64,
    pub per_subject: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub genome: CnnGenome,
    pub rows: Vec<SweepRow>,
}

/// Segment-length sweep: for each `w`, train every subject on its enrollment
/// split and measure single-segment accuracy on the tuning split. Writes
/// `sweep_w.json`.
pub fn cmd_sweep_w(cfg: &ExperimentConfig, w_values: &[usize], out_dir: &Path) -> Result<SweepTable> {
    cfg.validate()?;
    if w_values.is_empty() {
        return Err(Error::Config("no w values to sweep".into()));
    }
    let ds = Dataset::open(&cfg.dataset_root)?;
    let mut rows = Vec::new();
    for &w_s in w_values {
        cfg.genome.validate(w_s)?;
        let data = EnrollData::load(&ds, cfg, &pipeline_for(cfg, w_s)?)?;
        let mut per_subject = BTreeMap::new();
        for k in 0..data.subjects.len() {
            let (model, _) = train_subject(cfg, &data, k, &cfg.genome, w_s)?;
            let tune = data.tune_set(k);
            let (far, frr) = far_frr(&model.predict(&tune.positives)?, &model.predict(&tune.negatives)?);
            per_subject.insert(data.subjects[k].clone(), ((1.0 - frr) + (1.0 - far)) / 2.0);
        }
        let accuracy = per_subject.values().sum::<f64>() / per_subject.len() as f64;
        rows.push(SweepRow {
            w_s,
            accuracy,
            per_subject,
        });
    }
    let table = SweepTable {
        genome: cfg.genome,
        rows,
    };
    write_json(&out_dir.join("sweep_w.json"), &table)?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOutcome {
    pub w_s: usize,
    pub sessions: Vec<String>,
    pub cells: Vec<EvalReport>,
    pub warnings: Vec<String>,
    /// Relative to the output directory.
    pub roc_files: Vec<PathBuf>,
}

/// Score every session with every enrolled model and write `report.json`
/// plus `roc/<session>_s<s>.csv` per grid cell.
///
/// In the enrollment session only the tuning span is scored; later sessions
/// are scored whole. External subjects' first session is scored in every
/// session's report.
pub fn cmd_report(cfg: &ExperimentConfig, models_dir: &Path, out_dir: &Path) -> Result<ReportOutcome> {
    cfg.validate()?;
    let ds = Dataset::open(&cfg.dataset_root)?;
    let subjects = ds.manifest.validation_subjects.clone();
    let models = subjects
        .iter()
        .map(|s| {
            let p = model_path(models_dir, s);
            if !p.exists() {
                return Err(Error::Dataset(format!("missing model {}", p.display())));
            }
            CnnModel::load(&p)
        })
        .collect::<Result<Vec<_>>>()?;
    let w_s = models[0].w_s();
    if models.iter().any(|m| m.w_s() != w_s) {
        return Err(Error::Dataset("models were trained with different segment lengths".into()));
    }
    let pipeline = pipeline_for(cfg, w_s)?;
    let sessions = if cfg.sessions.is_empty() {
        ds.manifest.validation_sessions()
    } else {
        cfg.sessions.clone()
    };

    let mut external: Vec<(String, Vec<SegmentTensor>)> = Vec::new();
    for x in &ds.manifest.external_subjects {
        let first = ds.sessions_of(x).into_iter().next().expect("validated non-empty");
        external.push((x.clone(), ds.tensors(x, &first, &pipeline)?));
    }

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for session in &sessions {
        let mut data: Vec<Option<(usize, Vec<SegmentTensor>)>> = Vec::new();
        for s in &subjects {
            if !ds.has_session(s, session) {
                warnings.push(format!("subject {s} has no session {session}"));
                data.push(None);
                continue;
            }
            let t = ds.tensors(s, session, &pipeline)?;
            data.push(Some(if *session == cfg.enroll_session {
                let split = split_enrollment(t, w_s, cfg.enroll_seconds(), cfg.tune_seconds())?;
                (split.tune_start, split.tune)
            } else {
                (0, t)
            }));
        }
        for (k, model) in models.iter().enumerate() {
            let mut score = |true_subject: &str, start: usize, tensors: &[SegmentTensor], category| -> Result<()> {
                for (i, c) in model.predict(tensors)?.into_iter().enumerate() {
                    records.push(ScoreRecord {
                        claimed_subject: subjects[k].clone(),
                        true_subject: true_subject.to_string(),
                        session_id: session.clone(),
                        segment_index: start + i,
                        confidence: c,
                        category,
                    });
                }
                Ok(())
            };
            for (j, d) in data.iter().enumerate() {
                if let Some((start, t)) = d {
                    let cat = if j == k {
                        Category::ValidationPositive
                    } else {
                        Category::ValidationNegative
                    };
                    score(&subjects[j], *start, t, cat)?;
                }
            }
            for (x, t) in &external {
                score(x, 0, t, Category::NegativeExternal)?;
            }
        }
    }

    let report = session_report(&records, &sessions, &cfg.s_values)?;
    warnings.extend(report.warnings);
    let mut roc_files = Vec::new();
    for c in &report.cells {
        let rel = Path::new("roc").join(format!("{}_s{}.csv", c.session, c.s));
        write_atomic(&out_dir.join(&rel), roc_csv(&c.roc).as_bytes())?;
        roc_files.push(rel);
    }
    let outcome = ReportOutcome {
        w_s,
        sessions,
        cells: report.cells,
        warnings,
        roc_files,
    };
    write_json(&out_dir.join("report.json"), &outcome)?;
    Ok(outcome)
}
