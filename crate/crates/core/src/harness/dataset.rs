use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bcg::{BcgPipeline, SegmentTensor};
use crate::error::{Error, Result};
use crate::preprocess::align;
use crate::sensor::{read_recording, Recording};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Which subjects exist, how they are split, and where each session's
/// recording lives (relative to the dataset root).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub validation_subjects: Vec<String>,
    pub external_subjects: Vec<String>,
    /// subject → session → recording manifest path.
    pub recordings: BTreeMap<String, BTreeMap<String, PathBuf>>,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        let val: BTreeSet<&String> = self.validation_subjects.iter().collect();
        let ext: BTreeSet<&String> = self.external_subjects.iter().collect();
        if val.len() != self.validation_subjects.len() || ext.len() != self.external_subjects.len() {
            return Err(Error::Dataset("duplicate subject id in manifest".into()));
        }
        if let Some(both) = val.intersection(&ext).next() {
            return Err(Error::Dataset(format!("subject {both} is in both the validation and external sets")));
        }
        if val.len() < 2 {
            return Err(Error::Dataset("need at least 2 validation subjects".into()));
        }
        for s in val.iter().chain(ext.iter()) {
            if self.recordings.get(*s).is_none_or(|r| r.is_empty()) {
                return Err(Error::Dataset(format!("subject {s} has no recordings")));
            }
        }
        for s in self.recordings.keys() {
            if !val.contains(s) && !ext.contains(s) {
                return Err(Error::Dataset(format!("recordings listed for unknown subject {s}")));
            }
        }
        Ok(())
    }

    /// Every session id appearing for a validation subject, sorted.
    pub fn validation_sessions(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self
            .validation_subjects
            .iter()
            .filter_map(|s| self.recordings.get(s))
            .flat_map(|r| r.keys())
            .collect();
        set.into_iter().cloned().collect()
    }
}

/// A dataset on disk.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub manifest: DatasetManifest,
}

impl Dataset {
    pub fn open(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST_FILE);
        if !path.exists() {
            return Err(Error::Dataset(format!("no {MANIFEST_FILE} under {}", root.display())));
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: DatasetManifest = serde_json::from_str(&text).map_err(|e| Error::json(&path, e))?;
        manifest.validate()?;
        Ok(Self {
            root: root.to_path_buf(),
            manifest,
        })
    }

    pub fn has_session(&self, subject: &str, session: &str) -> bool {
        self.manifest.recordings.get(subject).is_some_and(|r| r.contains_key(session))
    }

    pub fn recording(&self, subject: &str, session: &str) -> Result<Recording> {
        let rel = self
            .manifest
            .recordings
            .get(subject)
            .and_then(|r| r.get(session))
            .ok_or_else(|| Error::Dataset(format!("no recording for subject {subject} session {session}")))?;
        read_recording(&self.root.join(rel))
    }

    /// Sessions of `subject` in sorted order.
    pub fn sessions_of(&self, subject: &str) -> Vec<String> {
        self.manifest
            .recordings
            .get(subject)
            .map(|r| r.keys().cloned().collect())
            .unwrap_or_default()
    }

    /// BCG tensors for every segment of one recording.
    pub fn tensors(&self, subject: &str, session: &str, pipeline: &BcgPipeline) -> Result<Vec<SegmentTensor>> {
        let rec = self.recording(subject, session)?;
        pipeline.tensors(&align(&rec)?)
    }
}

/// Training and tuning segments cut from one enrollment recording.
///
/// Segment `i` covers seconds `[i, i + w)`. Training segments lie entirely in
/// the first `enroll_s` seconds and tuning segments entirely in the next
/// `tune_s`, so the two never share data; the `w − 1` segments straddling
/// the boundary are dropped.
#[derive(Debug, Clone)]
pub struct EnrollSplit {
    pub train: Vec<SegmentTensor>,
    pub tune: Vec<SegmentTensor>,
    /// Segment index of `tune[0]` in the recording.
    pub tune_start: usize,
}

pub fn split_enrollment(mut tensors: Vec<SegmentTensor>, w_s: usize, enroll_s: usize, tune_s: usize) -> Result<EnrollSplit> {
    let need = enroll_s + tune_s - w_s + 1;
    if tensors.len() < need {
        return Err(Error::Dataset(format!(
            "enrollment recording has {} segments, {enroll_s} s + {tune_s} s at w={w_s} needs {need}",
            tensors.len()
        )));
    }
    tensors.truncate(need);
    let tune = tensors.split_off(enroll_s);
    tensors.truncate(enroll_s - w_s + 1);
    Ok(EnrollSplit {
        train: tensors,
        tune,
        tune_start: enroll_s,
    })
}
