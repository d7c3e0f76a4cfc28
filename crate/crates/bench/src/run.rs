//! Runs a configured solver over every sequence of a dataset.

use std::path::Path;

use anyhow::{Context, Result};
use pack3d_core::policies::Policy;
use pack3d_core::state::Item;
use rayon::prelude::*;

use crate::config::{PolicySpec, RunConfig};
use crate::dataset::{self, Loaded};
use crate::report::{self, EpisodeLine, Header, RunReport, Summary, TimingLine, ENGINE, ENGINE_VERSION};
use crate::solver::{build_policy, episode_seed, play, EpisodeOutcome};

/// Item stream of episode `index`: its own sequence for one bin, otherwise
/// `stream_factor x bins` consecutive sequences, wrapping around the dataset.
pub fn episode_items(loaded: &Loaded, index: usize, bins: usize, stream_factor: usize) -> Vec<Item> {
    let n = loaded.sequences.len();
    let parts = if bins == 1 { 1 } else { stream_factor * bins };
    (0..parts).flat_map(|j| loaded.sequences[(index + j) % n].items.iter().copied()).collect()
}

/// Plays every episode. Episodes run in parallel except with a bridge
/// policy, which shares one child process.
pub fn run(config: &RunConfig) -> Result<(RunReport, Vec<TimingLine>)> {
    let solver = &config.solver;
    solver.check()?;
    let loaded = dataset::load(&config.bin, &config.dataset)?;
    let n = loaded.sequences.len();

    let one = |index: usize, policy: &mut dyn Policy| -> Result<(EpisodeLine, TimingLine)> {
        let seed = episode_seed(solver, index);
        let items = episode_items(&loaded, index, solver.bins, solver.stream_factor);
        let out: EpisodeOutcome =
            play(solver, &config.bin, &items, policy, seed).with_context(|| format!("episode {index}"))?;
        let line = EpisodeLine {
            index,
            seed,
            items_offered: out.items_offered,
            items_packed: out.items_packed,
            utilization: out.utilization,
            items_per_bin: out.items_per_bin,
            decisions: out.decisions,
        };
        Ok((line, TimingLine::new(index, out.decisions, out.decision_time)))
    };

    let results: Vec<(EpisodeLine, TimingLine)> = if matches!(solver.policy, PolicySpec::External { .. }) {
        let mut policy = build_policy(&solver.policy, &loaded.item_set, solver.seed)?;
        (0..n).map(|i| one(i, policy.as_mut())).collect::<Result<_>>()?
    } else {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut policy = build_policy(&solver.policy, &loaded.item_set, episode_seed(solver, i))?;
                one(i, policy.as_mut())
            })
            .collect::<Result<_>>()?
    };
    let (episodes, timings): (Vec<_>, Vec<_>) = results.into_iter().unzip();

    let summary = Summary::from_episodes(&episodes);
    let header = Header {
        engine: ENGINE.into(),
        engine_version: ENGINE_VERSION.into(),
        label: solver.label(),
        dataset_sha256: loaded.sha256,
        // where the report lands is not an input of the run
        config: RunConfig { output: None, ..config.clone() },
    };
    Ok((RunReport { header, episodes, summary }, timings))
}

/// Runs and writes the report plus its timing sidecar when an output path is set.
pub fn run_and_write(config: &RunConfig) -> Result<RunReport> {
    let (report, timings) = run(config)?;
    if let Some(out) = &config.output {
        write_report(out, &report, &timings)?;
    }
    Ok(report)
}

pub fn write_report(path: &Path, report: &RunReport, timings: &[TimingLine]) -> Result<()> {
    std::fs::write(path, report.to_jsonl()).with_context(|| format!("writing {}", path.display()))?;
    let side = report::sidecar_path(path);
    std::fs::write(&side, report::timings_jsonl(timings)).with_context(|| format!("writing {}", side.display()))?;
    Ok(())
}
