//! Dataset-level watermarking on top of `amuse-core`: embed a message across
//! a directory of images, persist a manifest, recover the message from any
//! leaked subset, and run seeded experiment sweeps to CSV.

pub mod dataset;
pub mod error;
pub mod manifest;
pub mod sweep;
pub mod table;

pub use dataset::{attack_subset, embed_dataset, extract_dataset, EmbedOutcome, ExtractOutcome, ParamChoice};
pub use error::{PipelineError, Result};
pub use manifest::{message_digest, BackendConfig, Manifest};
pub use sweep::{run_length_sweep, run_subset_sweep, summarize, ExperimentConfig, Protection, SweepRow};
pub use table::emit_csv;
