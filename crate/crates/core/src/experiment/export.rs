use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agents::persist;

use super::{write_curve_csv, Experiment, ExperimentConfig, ExperimentError, Variant};

/// Written next to the curve; reloading `config` reproduces the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub started_at: String,
    pub finished_at: String,
    pub code_version: String,
    pub map_hash: String,
    pub reference_pairing: bool,
    /// Seed whose tables are stored in `tables.bin`.
    pub tables_seed: u64,
    pub final_success_rate: f64,
    pub mean_reward: f64,
}

/// Output directory created before training starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputDir {
    pub path: PathBuf,
    pub started_at: String,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Output { path: path.to_owned(), source }
}

/// Creates `root/<variant>/<timestamp>/` and checks it is writable, so a bad
/// path fails before any training time is spent.
pub fn prepare_output(root: &Path, variant: Variant) -> Result<OutputDir, ExperimentError> {
    let now = chrono::Utc::now();
    let base = root.join(variant.slug()).join(now.format("%Y%m%dT%H%M%S%.3fZ").to_string());
    let mut path = base.clone();
    let mut n = 1;
    while path.exists() {
        path = PathBuf::from(format!("{}-{n}", base.display()));
        n += 1;
    }
    fs::create_dir_all(&path).map_err(io_err(&path))?;
    let probe = path.join(".write-check");
    fs::write(&probe, b"").map_err(io_err(&probe))?;
    fs::remove_file(&probe).map_err(io_err(&probe))?;
    Ok(OutputDir { path, started_at: now.to_rfc3339() })
}

/// Writes `curve.csv`, `runs.csv` (per-run, per-episode metrics),
/// `manifest.json` and `tables.bin` (the first seed's tables).
pub fn export_results(exp: &Experiment, out: &OutputDir) -> Result<Manifest, ExperimentError> {
    let curve_path = out.path.join("curve.csv");
    write_curve_csv(&exp.curve, BufWriter::new(File::create(&curve_path).map_err(io_err(&curve_path))?))?;

    let runs_path = out.path.join("runs.csv");
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&runs_path).map_err(io_err(&runs_path))?));
    w.write_record(["seed", "episode", "total_reward", "discounted_return", "steps", "collisions", "success"])
        .map_err(|e| ExperimentError::Curve(e.to_string()))?;
    for run in &exp.runs {
        for (e, m) in run.episodes.iter().enumerate() {
            w.write_record([
                run.seed.to_string(),
                e.to_string(),
                m.total_reward.to_string(),
                m.discounted_return.to_string(),
                m.steps.to_string(),
                m.collisions.to_string(),
                m.success.to_string(),
            ])
            .map_err(|e| ExperimentError::Curve(e.to_string()))?;
        }
    }
    w.flush().map_err(io_err(&runs_path))?;

    let first = exp.runs.first().ok_or_else(|| ExperimentError::Config("experiment has no runs".into()))?;
    let tables_path = out.path.join("tables.bin");
    persist::save(&tables_path, &first.agent, &exp.world, exp.config.variant.attention(), exp.config.reward_mode)
        .map_err(|e| ExperimentError::Output { path: tables_path.clone(), source: std::io::Error::other(e) })?;

    let manifest = Manifest {
        config: exp.config.clone(),
        seeds: exp.runs.iter().map(|r| r.seed).collect(),
        started_at: out.started_at.clone(),
        finished_at: chrono::Utc::now().to_rfc3339(),
        code_version: env!("CARGO_PKG_VERSION").to_owned(),
        map_hash: exp.world.content_hash(),
        reference_pairing: exp.config.is_reference_pairing(),
        tables_seed: first.seed,
        final_success_rate: exp.curve.final_success_rate(100),
        mean_reward: exp.curve.overall_mean_reward(),
    };
    let manifest_path = out.path.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, json).map_err(io_err(&manifest_path))?;
    Ok(manifest)
}
