use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bcgauth::harness::{self, ExperimentConfig};
use bcgauth::nn::CnnGenome;
use bcgauth::Error;
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "bcgauth", version, about = "BCG-based wearer verification from head-mounted IMU data")]
struct Cli {
    /// Experiment config (JSON). Defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (for `synth`, the dataset root).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Dataset root; overrides the config.
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multi-subject dataset.
    Synth {
        #[arg(long)]
        validation: Option<usize>,
        #[arg(long)]
        external: Option<usize>,
        #[arg(long)]
        sessions: Option<usize>,
        /// Session length in minutes.
        #[arg(long)]
        minutes: Option<f64>,
        /// Write into a non-empty directory.
        #[arg(long)]
        force: bool,
    },
    /// Train one-vs-all verifiers on the enrollment session.
    Enroll {
        /// Only this subject; default is every validation subject.
        #[arg(long)]
        subject: Option<String>,
        /// Genome JSON, e.g. from `ga-search`.
        #[arg(long)]
        genome: Option<PathBuf>,
    },
    /// Score a recording against a model with the s-attempt rule.
    Auth {
        #[arg(long)]
        model: PathBuf,
        /// Recording manifest JSON.
        #[arg(long)]
        recording: PathBuf,
        #[arg(long)]
        claimed: String,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, default_value_t = 1)]
        attempts: usize,
    },
    /// Genetic hyperparameter search for one subject.
    GaSearch {
        #[arg(long)]
        subject: String,
    },
    /// Accuracy for each segment length.
    SweepW {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        w: Vec<usize>,
    },
    /// Session × attempts metric grid and ROC curves.
    Report {
        /// Directory holding `<subject>.model.json` files.
        #[arg(long)]
        models: PathBuf,
    },
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    let json = serde_json::to_string(&ErrorJson { error: kind, message }).expect("plain strings serialize");
    eprintln!("{json}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim_end().to_string(), 2),
    };
    match run(cli) {
        Ok(json) => {
            println!("{json}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), e.to_string(), 1),
    }
}

fn to_json<T: Serialize>(v: &T) -> bcgauth::Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Input(e.to_string()))
}

fn run(cli: Cli) -> bcgauth::Result<String> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(d) = cli.dataset {
        cfg.dataset_root = d;
    }
    let out_given = cli.out.is_some();
    let out = cli.out.unwrap_or_else(|| PathBuf::from("out"));
    match cli.command {
        Command::Synth {
            validation,
            external,
            sessions,
            minutes,
            force,
        } => {
            let s = &mut cfg.synth;
            s.n_validation = validation.unwrap_or(s.n_validation);
            s.n_external = external.unwrap_or(s.n_external);
            s.sessions = sessions.unwrap_or(s.sessions);
            s.session_minutes = minutes.unwrap_or(s.session_minutes);
            let root = if out_given { out } else { cfg.dataset_root.clone() };
            to_json(&harness::cmd_synth(&cfg, &root, force)?)
        }
        Command::Enroll { subject, genome } => {
            let genome = match genome {
                Some(p) => read_genome(&p)?,
                None => cfg.genome,
            };
            to_json(&harness::cmd_enroll(&cfg, subject.as_deref(), &genome, &out)?)
        }
        Command::Auth {
            model,
            recording,
            claimed,
            threshold,
            attempts,
        } => to_json(&harness::cmd_auth(&cfg, &model, &recording, &claimed, threshold, attempts)?),
        Command::GaSearch { subject } => to_json(&harness::cmd_ga(&cfg, &subject, &out)?),
        Command::SweepW { w } => to_json(&harness::cmd_sweep_w(&cfg, &w, &out)?),
        Command::Report { models } => {
            let r = harness::cmd_report(&cfg, &models, &out)?;
            to_json(&serde_json::json!({
                "report": out.join("report.json"),
                "cells": r.cells.len(),
                "warnings": r.warnings,
            }))
        }
    }
}

fn read_genome(path: &Path) -> bcgauth::Result<CnnGenome> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}
