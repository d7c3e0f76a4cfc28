//! Side-by-side tables of several run reports.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use crate::report::RunReport;

/// One column per report, `# items / % uti.`, after checking that every
/// report ran on the same bin and dataset.
pub fn compare(reports: &[RunReport]) -> Result<String> {
    let Some(first) = reports.first() else {
        bail!("nothing to compare");
    };
    for r in &reports[1..] {
        if r.header.config.bin != first.header.config.bin {
            bail!("`{}` and `{}` use different bins", first.header.label, r.header.label);
        }
        if r.header.dataset_sha256 != first.header.dataset_sha256 {
            bail!("`{}` and `{}` ran on different datasets", first.header.label, r.header.label);
        }
    }
    let width = reports.iter().map(|r| r.header.label.len()).max().unwrap_or(0).max(16);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>8}  {:>18}", "solver", "episodes", "# items / % uti.");
    for r in reports {
        let s = &r.summary;
        let cell = format!("{:.1} / {:.1}%", s.mean_items_f64, s.mean_utilization_pct);
        let _ = writeln!(out, "{:<width$}  {:>8}  {:>18}", r.header.label, s.episodes, cell);
    }
    Ok(out)
}
