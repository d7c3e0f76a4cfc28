//! Dataset generation, loading and fingerprinting.

use std::path::Path;

use anyhow::{bail, Context, Result};
use pack3d_core::datagen::{parse_dataset, write_dataset, ItemSequence, ItemSet, SequenceSpec};
use pack3d_core::rng::derive_seed;
use pack3d_core::state::BinConfig;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{DatasetSource, DatasetSpec};

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Sequence `i` is generated from `derive_seed(spec.seed, i)`.
pub fn generate(bin: &BinConfig, spec: &DatasetSpec) -> Result<Vec<ItemSequence>> {
    let seq_spec = spec.sequence_spec(bin);
    seq_spec.item_set().context("invalid item thresholds")?;
    (0..spec.count)
        .into_par_iter()
        .map(|i| {
            seq_spec
                .generate(derive_seed(spec.seed, i as u64))
                .with_context(|| format!("generating sequence {i}"))
        })
        .collect()
}

/// Writes a generated dataset and returns its SHA-256.
pub fn write(path: &Path, sequences: &[ItemSequence]) -> Result<String> {
    let text = write_dataset(sequences);
    std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    Ok(sha256_hex(text.as_bytes()))
}

pub fn read(path: &Path) -> Result<(Vec<ItemSequence>, String)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let sequences = parse_dataset(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok((sequences, sha256_hex(text.as_bytes())))
}

/// Sequences of a run plus the hash of their file form.
pub struct Loaded {
    pub sequences: Vec<ItemSequence>,
    pub sha256: String,
    /// Item set the heuristic rates spare space against.
    pub item_set: ItemSet,
}

pub fn load(bin: &BinConfig, source: &DatasetSource) -> Result<Loaded> {
    let (sequences, sha256, spec) = match source {
        DatasetSource::File { path, sha256 } => {
            let (sequences, actual) = read(path)?;
            if !sha256.is_empty() && *sha256 != actual {
                bail!("{} has SHA-256 {actual}, the config pins {sha256}", path.display());
            }
            let origin = sequences.first().map(|s| s.origin).context("dataset has no sequences")?;
            (sequences, actual, SequenceSpec::standard(origin, *bin))
        }
        DatasetSource::Generated(spec) => {
            let sequences = generate(bin, spec)?;
            let sha = sha256_hex(write_dataset(&sequences).as_bytes());
            (sequences, sha, spec.sequence_spec(bin))
        }
    };
    if let Some((i, seq)) = sequences.iter().enumerate().find(|(_, s)| s.bin != *bin) {
        let b = seq.bin;
        bail!(
            "sequence {i} is for a {}x{}x{} bin but the run uses {}x{}x{}",
            b.length, b.width, b.height, bin.length, bin.width, bin.height
        );
    }
    if sequences.is_empty() {
        bail!("dataset has no sequences");
    }
    let item_set = spec.item_set().context("invalid item thresholds")?;
    Ok(Loaded { sequences, sha256, item_set })
}
