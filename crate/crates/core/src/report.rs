//! Report bundles: the design, its metrics, one CSV per data series, a
//! Markdown summary and the pipeline history, written to a fresh directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::experiments::{ExperimentKey, ExperimentParams, MetricSet, Series};
use crate::optical_model::{serialize_setup, OpticalSetup};
use crate::pipeline::RunRecord;

pub const DESIGN_FILE: &str = "design.json";
pub const METRICS_FILE: &str = "metrics.json";
pub const SUMMARY_FILE: &str = "summary.md";
pub const HISTORY_FILE: &str = "history.json";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}: output directory exists and is not empty")]
    NotEmpty(PathBuf),
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Everything a bundle is written from.
pub struct BundleInput<'a> {
    pub setup: &'a OpticalSetup,
    pub key: ExperimentKey,
    pub params: &'a ExperimentParams,
    pub metrics: &'a MetricSet,
    pub history: &'a [RunRecord],
    pub seed: u64,
}

/// Paths written, in write order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportBundle {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    experiment: ExperimentKey,
    seed: u64,
    params: serde_json::Value,
    scalars: &'a BTreeMap<String, f64>,
    series: BTreeMap<&'a str, String>,
    inputs: &'a BTreeMap<String, f64>,
    notes: &'a [String],
}

pub fn series_file_name(name: &str) -> String {
    format!("{name}.csv")
}

fn prepare_dir(dir: &Path) -> Result<(), ReportError> {
    if dir.exists() {
        let mut entries = fs::read_dir(dir).map_err(io_err(dir))?;
        if entries.next().is_some() {
            return Err(ReportError::NotEmpty(dir.to_path_buf()));
        }
    }
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_series(path: &Path, series: &Series) -> Result<(), ReportError> {
    let csv_err = |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record([series.axis_name.as_str(), "value"]).map_err(csv_err)?;
    for (x, y) in series.axis.iter().zip(&series.values) {
        w.write_record([x.to_string(), y.to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

fn summary(input: &BundleInput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}\n", input.setup.title);
    let _ = writeln!(s, "{}\n", input.setup.description);
    let _ = writeln!(s, "- experiment: `{}`", input.key);
    let _ = writeln!(s, "- seed: {}", input.seed);
    if let Some(best) = input.history.iter().max_by_key(|r| (r.score(), std::cmp::Reverse(r.iteration))) {
        let _ = writeln!(s, "- alignment score: {}/10 (iteration {} of {})", best.score(), best.iteration, input.history.len());
    }
    let _ = writeln!(s, "\n## Scalars\n\n| metric | value |\n|---|---|");
    for (name, v) in &input.metrics.scalars {
        let _ = writeln!(s, "| {name} | {v} |");
    }
    if !input.metrics.series.is_empty() {
        let _ = writeln!(s, "\n## Series\n");
        for (name, series) in &input.metrics.series {
            let _ = writeln!(s, "- `{}`: {} points over {}", series_file_name(name), series.values.len(), series.axis_name);
        }
    }
    if !input.metrics.notes.is_empty() {
        let _ = writeln!(s, "\n## Notes\n");
        for n in &input.metrics.notes {
            let _ = writeln!(s, "- {n}");
        }
    }
    let concerns: Vec<&String> = input.history.iter().flat_map(|r| &r.concerns).collect();
    if !concerns.is_empty() {
        let _ = writeln!(s, "\n## Review\n");
        for r in input.history {
            for c in &r.concerns {
                let _ = writeln!(s, "- iteration {}: {c}", r.iteration);
            }
        }
    }
    s
}

/// Writes a bundle into `dir`, which must be absent or empty.
pub fn write_bundle(dir: &Path, input: &BundleInput) -> Result<ReportBundle, ReportError> {
    prepare_dir(dir)?;
    let mut files = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<(), ReportError> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(io_err(&path))?;
        files.push(path);
        Ok(())
    };
    put(DESIGN_FILE, &serialize_setup(input.setup))?;

    let metrics = MetricsFile {
        experiment: input.key,
        seed: input.seed,
        params: input.params.to_json_value(),
        scalars: &input.metrics.scalars,
        series: input.metrics.series.keys().map(|k| (k.as_str(), series_file_name(k))).collect(),
        inputs: &input.metrics.inputs,
        notes: &input.metrics.notes,
    };
    let mut json = serde_json::to_vec_pretty(&metrics).expect("metrics serialize");
    json.push(b'\n');
    put(METRICS_FILE, &json)?;
    put(SUMMARY_FILE, summary(input).as_bytes())?;
    let mut history = serde_json::to_vec_pretty(input.history).expect("history serializes");
    history.push(b'\n');
    put(HISTORY_FILE, &history)?;

    for (name, series) in &input.metrics.series {
        let path = dir.join(series_file_name(name));
        write_series(&path, series)?;
        files.push(path);
    }
    Ok(ReportBundle {
        dir: dir.to_path_buf(),
        files,
    })
}
