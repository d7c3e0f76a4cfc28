//! Item catalogues and the RS / CUT-1 / CUT-2 sequence generators.

mod cut;
mod format;
mod items;
mod sequence;
mod validate;

pub use cut::{cut_bin, Cut, MAX_RESTARTS, SPLIT_RETRIES};
pub use format::{parse_dataset, write_dataset, write_sequence};
pub use items::{check_thresholds, predefined_item_set, ItemSet};
pub use sequence::{cut1_sequence, cut2_sequence, rs_sequence, ItemSequence, Origin, SequenceSpec};
pub use validate::{validate_sequence, ValidationReport};
