use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::{ExperimentRun, ExperimentSpec};
use crate::error::{Error, Result};
use crate::metrics::MetricsRecord;

/// Environment variable naming the directory for artifacts when a spec has
/// no `output_path`. Defaults to `./out`.
pub const OUTPUT_DIR_ENV: &str = "INTDA_OUTPUT_DIR";

pub const RNG_DESCRIPTION: &str = "ChaCha8Rng::seed_from_u64; replication seed = \
    splitmix64(base_seed + 0x9e3779b97f4a7c15 * (replication + 1))";

pub fn default_output_path(file_name: &str) -> PathBuf {
    let dir = std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"));
    dir.join(file_name)
}

/// Files written for one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub manifest: PathBuf,
}

impl Artifacts {
    /// `dir/name.csv` becomes `dir/name.summary.csv` and `dir/name.manifest.json`.
    pub fn beside(csv: &Path) -> Self {
        let stem = csv
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into());
        Artifacts {
            csv: csv.to_path_buf(),
            summary: csv.with_file_name(format!("{stem}.summary.csv")),
            manifest: csv.with_file_name(format!("{stem}.manifest.json")),
        }
    }
}

pub(crate) fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Output {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

pub(crate) fn manifest<S: Serialize>(
    kind: &str,
    spec: &S,
    seeds: &[u64],
    rows: usize,
) -> serde_json::Value {
    json!({
        "kind": kind,
        "version": env!("CARGO_PKG_VERSION"),
        "rng": RNG_DESCRIPTION,
        "spec": spec,
        "seeds": seeds,
        "rows": rows,
    })
}

impl ExperimentRun {
    pub fn to_csv(&self) -> Result<String> {
        to_csv(&self.records)
    }

    pub fn summary_csv(&self) -> Result<String> {
        to_csv(&self.summary)
    }

    pub fn manifest(&self) -> serde_json::Value {
        manifest("experiment", &self.spec, &self.seeds, self.records.len())
    }

    /// Writes the per-replication CSV at `csv_path` plus summary and manifest
    /// next to it.
    pub fn write(&self, csv_path: &Path) -> Result<Artifacts> {
        let a = Artifacts::beside(csv_path);
        write_file(&a.csv, &self.to_csv()?)?;
        write_file(&a.summary, &self.summary_csv()?)?;
        write_file(
            &a.manifest,
            &serde_json::to_string_pretty(&self.manifest())?,
        )?;
        Ok(a)
    }

    /// `spec.output_path`, or `<output dir>/<default_name>`.
    pub fn output_path(spec: &ExperimentSpec, default_name: &str) -> PathBuf {
        spec.output_path
            .clone()
            .unwrap_or_else(|| default_output_path(default_name))
    }
}

/// Parses a per-replication CSV written by [`ExperimentRun::write`].
pub fn read_records(path: &Path) -> Result<Vec<MetricsRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}
