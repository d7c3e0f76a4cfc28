//! Line-oriented dataset text format.
//!
//! ```text
//! bin 10 10 10 | CUT2 | 8817293
//! 3 2 5 0 0 0
//! 2 4 5 3 0 0
//! ```
//!
//! Each sequence starts with a header line; every following line is one item
//! as `l w h`, extended with its ground-truth `x y z` for CUT datasets.
//! A dataset file is a concatenation of sequences.

use std::fmt::Write as _;

use super::sequence::{ItemSequence, Origin};
use crate::error::DatagenError;
use crate::state::{BinConfig, Item, Orientation, PackedItem};

pub fn write_sequence(seq: &ItemSequence, out: &mut String) {
    let b = &seq.bin;
    writeln!(out, "bin {} {} {} | {} | {}", b.length, b.width, b.height, seq.origin, seq.seed).unwrap();
    for (i, item) in seq.items.iter().enumerate() {
        match seq.ground_truth.as_ref().and_then(|gt| gt.get(i)) {
            Some(p) => writeln!(out, "{} {} {} {} {} {}", item.l, item.w, item.h, p.x, p.y, p.z),
            None => writeln!(out, "{} {} {}", item.l, item.w, item.h),
        }
        .unwrap();
    }
}

pub fn write_dataset(sequences: &[ItemSequence]) -> String {
    let mut out = String::new();
    for seq in sequences {
        write_sequence(seq, &mut out);
    }
    out
}

fn format_err(line: usize, reason: impl Into<String>) -> DatagenError {
    DatagenError::Format { line, reason: reason.into() }
}

fn parse_header(line_no: usize, line: &str) -> Result<(BinConfig, Origin, u64), DatagenError> {
    let parts: Vec<&str> = line.split(" | ").collect();
    let [dims, origin, seed] = parts.as_slice() else {
        return Err(format_err(line_no, "header must be `bin L W H | origin | seed`"));
    };
    let dims: Vec<&str> = dims.split(' ').collect();
    if dims.len() != 4 || dims[0] != "bin" {
        return Err(format_err(line_no, "header must start with `bin L W H`"));
    }
    let num = |s: &str| s.parse::<u32>().map_err(|e| format_err(line_no, format!("`{s}`: {e}")));
    let bin = BinConfig::new(num(dims[1])?, num(dims[2])?, num(dims[3])?)
        .map_err(|e| format_err(line_no, e.to_string()))?;
    let origin = origin.parse::<Origin>().map_err(|e| format_err(line_no, e))?;
    let seed = seed.parse::<u64>().map_err(|e| format_err(line_no, format!("seed: {e}")))?;
    Ok((bin, origin, seed))
}

pub fn parse_dataset(text: &str) -> Result<Vec<ItemSequence>, DatagenError> {
    let mut sequences: Vec<ItemSequence> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.starts_with("bin ") {
            let (bin, origin, seed) = parse_header(line_no, line)?;
            let ground_truth = (origin != Origin::RS).then(Vec::new);
            sequences.push(ItemSequence { bin, items: Vec::new(), ground_truth, seed, origin });
            continue;
        }
        let seq = sequences
            .last_mut()
            .ok_or_else(|| format_err(line_no, "item line before any header"))?;
        let fields = line
            .split(' ')
            .map(|f| f.parse::<u32>().map_err(|e| format_err(line_no, format!("`{f}`: {e}"))))
            .collect::<Result<Vec<u32>, _>>()?;
        let item = |f: &[u32]| Item::new(f[0], f[1], f[2]).map_err(|e| format_err(line_no, e.to_string()));
        match (fields.len(), seq.ground_truth.as_mut()) {
            (3, None) => seq.items.push(item(&fields)?),
            (6, Some(gt)) => {
                let it = item(&fields)?;
                seq.items.push(it);
                gt.push(PackedItem {
                    item: it,
                    orientation: Orientation::Identity,
                    x: fields[3],
                    y: fields[4],
                    z: fields[5],
                });
            }
            (n, gt) => {
                let want = if gt.is_some() { 6 } else { 3 };
                return Err(format_err(line_no, format!("expected {want} fields, found {n}")));
            }
        }
    }
    Ok(sequences)
}
