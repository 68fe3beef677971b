//! Experiment orchestration behind the `bcgauth` command line: config, the
//! on-disk dataset layout, and one function per subcommand.

mod commands;
mod config;
mod dataset;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use commands::{
    cmd_auth, cmd_enroll, cmd_ga, cmd_report, cmd_sweep_w, cmd_synth, model_path, AuthOutcome, EnrollOutcome,
    GaOutcome, ReportOutcome, SweepRow, SweepTable, SynthOutcome,
};
pub use config::{ExperimentConfig, SynthConfig};
pub use dataset::{split_enrollment, Dataset, DatasetManifest, EnrollSplit, MANIFEST_FILE};

use crate::error::{Error, Result};

/// Write via a temporary sibling file and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut json = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    json.push('\n');
    write_atomic(path, json.as_bytes())
}
