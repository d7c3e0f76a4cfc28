use serde::{Deserialize, Serialize};

use super::sequence::{ItemSequence, Origin};
use crate::state::{EpisodeConfig, EpisodeState, PackedItem, RewardMode};
use crate::Value;

/// Findings from replaying or checking a sequence. Never an error: problems are listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub origin: Origin,
    pub items: usize,
    /// Utilization reached by the ground-truth replay (CUT only).
    pub utilization: Option<Value>,
    pub feasibility_failures: usize,
    /// Pieces listed before one of the pieces they rest on.
    pub dependency_violations: usize,
    pub length_mismatch: bool,
    /// RS stopping rule: enough volume, and the last item was the first to reach it.
    pub volume_rule: Option<bool>,
    pub findings: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.feasibility_failures == 0
            && self.dependency_violations == 0
            && !self.length_mismatch
            && self.volume_rule != Some(false)
            && self.utilization.is_none_or(|u| u == Value::from_integer(1))
    }
}

pub fn validate_sequence(seq: &ItemSequence) -> ValidationReport {
    let mut report = ValidationReport {
        origin: seq.origin,
        items: seq.items.len(),
        utilization: None,
        feasibility_failures: 0,
        dependency_violations: 0,
        length_mismatch: false,
        volume_rule: None,
        findings: Vec::new(),
    };
    match (&seq.ground_truth, seq.origin) {
        (None, Origin::RS) => check_volume_rule(seq, &mut report),
        (None, _) => {
            report.length_mismatch = true;
            report.findings.push("cut sequence without ground truth".into());
        }
        (Some(gt), _) => replay(seq, gt, &mut report),
    }
    report
}

fn check_volume_rule(seq: &ItemSequence, report: &mut ValidationReport) {
    let bin_volume = seq.bin.volume();
    let total = seq.total_volume();
    let last = seq.items.last().map_or(0, |i| i.volume());
    let ok = total >= bin_volume && total - last < bin_volume;
    if !ok {
        report.findings.push(format!("total volume {total} breaks the stopping rule for bin volume {bin_volume}"));
    }
    report.volume_rule = Some(ok);
}

fn replay(seq: &ItemSequence, gt: &[PackedItem], report: &mut ValidationReport) {
    if gt.len() != seq.items.len() {
        report.length_mismatch = true;
        report.findings.push(format!("{} items but {} ground-truth placements", seq.items.len(), gt.len()));
    }
    for (i, (item, placed)) in seq.items.iter().zip(gt).enumerate() {
        if placed.item != *item {
            report.findings.push(format!("item {i}: {item} does not match ground truth {}", placed.item));
        }
    }
    report.dependency_violations = count_dependency_violations(gt);

    let config = EpisodeConfig::new(seq.bin);
    let mut state = EpisodeState::new(config, seq.items.clone());
    for (i, placed) in gt.iter().enumerate().take(seq.items.len()) {
        if state.is_done() {
            report.feasibility_failures += 1;
            report.findings.push(format!("item {i}: episode ended before it could be placed"));
            break;
        }
        match state.step(placed.action(), RewardMode::StepWise) {
            Ok(out) => {
                let z = out.state.packed().last().map(|p| p.z);
                if z != Some(placed.z) {
                    report.findings.push(format!("item {i}: rests at z={z:?}, expected {}", placed.z));
                }
                state = out.state;
            }
            Err(e) => {
                report.feasibility_failures += 1;
                report.findings.push(format!("item {i}: {e}"));
                break;
            }
        }
    }
    report.utilization = Some(state.utilization());
}

fn count_dependency_violations(gt: &[PackedItem]) -> usize {
    let mut violations = 0;
    for (i, upper) in gt.iter().enumerate() {
        let (ul, uw, _) = upper.extents();
        for lower in &gt[i + 1..] {
            let (ll, lw, lh) = lower.extents();
            let touches = lower.z + lh == upper.z
                && lower.x < upper.x + ul
                && upper.x < lower.x + ll
                && lower.y < upper.y + uw
                && upper.y < lower.y + lw;
            if touches {
                violations += 1;
            }
        }
    }
    violations
}
