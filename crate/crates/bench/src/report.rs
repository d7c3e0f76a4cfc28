//! Run reports: one JSON record per line, header first and summary last.
//!
//! Reports hold only quantities that are a pure function of the run
//! configuration, so repeated runs produce identical files. Wall-clock
//! timings go to a separate sidecar file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use pack3d_core::{value_to_f64, Value};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const ENGINE: &str = "pack3d-core";
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub engine: String,
    pub engine_version: String,
    pub label: String,
    /// SHA-256 of the dataset in file form, whether it was read or generated.
    pub dataset_sha256: String,
    pub config: RunConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLine {
    pub index: usize,
    pub seed: u64,
    /// Items offered to the solver.
    pub items_offered: usize,
    pub items_packed: usize,
    /// Mean over bins of packed volume over bin volume, exact.
    pub utilization: Value,
    pub items_per_bin: Value,
    pub decisions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub episodes: usize,
    pub mean_utilization: Value,
    pub mean_items: Value,
    /// Same two means as decimals, for reading.
    pub mean_utilization_pct: f64,
    pub mean_items_f64: f64,
}

impl Summary {
    pub fn from_episodes(episodes: &[EpisodeLine]) -> Self {
        let n = Value::from_integer(episodes.len().max(1) as i64);
        let util: Value = episodes.iter().map(|e| e.utilization).sum::<Value>() / n;
        let items: Value = episodes.iter().map(|e| e.items_per_bin).sum::<Value>() / n;
        Self {
            episodes: episodes.len(),
            mean_utilization: util,
            mean_items: items,
            mean_utilization_pct: (value_to_f64(&util) * 1e6).round() / 1e4,
            mean_items_f64: (value_to_f64(&items) * 1e4).round() / 1e4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Record {
    Header(Header),
    Episode(EpisodeLine),
    Summary(Summary),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub header: Header,
    pub episodes: Vec<EpisodeLine>,
    pub summary: Summary,
}

impl RunReport {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |r: Record| {
            out.push_str(&serde_json::to_string(&r).expect("report records serialize"));
            out.push('\n');
        };
        push(Record::Header(self.header.clone()));
        for e in &self.episodes {
            push(Record::Episode(e.clone()));
        }
        push(Record::Summary(self.summary.clone()));
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut header = None;
        let mut episodes = Vec::new();
        let mut summary = None;
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let record: Record = serde_json::from_str(line).with_context(|| format!("report line {}", n + 1))?;
            match record {
                Record::Header(h) if header.is_none() => header = Some(h),
                Record::Episode(e) => episodes.push(e),
                Record::Summary(s) if summary.is_none() => summary = Some(s),
                _ => bail!("report line {}: duplicate header or summary", n + 1),
            }
        }
        let (Some(header), Some(summary)) = (header, summary) else {
            bail!("report is missing its header or summary");
        };
        Ok(Self { header, episodes, summary })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_jsonl(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fixed-width table of the per-episode records and the means.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}  ({} episodes)", self.header.label, self.summary.episodes);
        let _ = writeln!(out, "{:>6} {:>8} {:>8} {:>9}", "ep", "offered", "packed", "uti. %");
        for e in &self.episodes {
            let _ = writeln!(
                out,
                "{:>6} {:>8} {:>8} {:>9.2}",
                e.index,
                e.items_offered,
                e.items_packed,
                100.0 * value_to_f64(&e.utilization)
            );
        }
        let _ = writeln!(
            out,
            "mean: {:.2} items / {:.2}% uti.",
            self.summary.mean_items_f64, self.summary.mean_utilization_pct
        );
        out
    }
}

/// Per-episode wall-clock timings, kept out of the report proper.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingLine {
    pub index: usize,
    pub decisions: usize,
    pub decision_time_ns: u64,
    pub mean_decision_time_ns: u64,
}

impl TimingLine {
    pub fn new(index: usize, decisions: usize, total: Duration) -> Self {
        let ns = total.as_nanos() as u64;
        Self { index, decisions, decision_time_ns: ns, mean_decision_time_ns: ns / decisions.max(1) as u64 }
    }
}

pub fn sidecar_path(report: &Path) -> PathBuf {
    let mut name = report.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".timings.jsonl");
    report.with_file_name(name)
}

pub fn timings_jsonl(lines: &[TimingLine]) -> String {
    lines
        .iter()
        .map(|t| serde_json::to_string(t).expect("timings serialize") + "\n")
        .collect()
}
