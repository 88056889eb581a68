//! Adaptive multi-segment dataset watermarking.
//!
//! A watermark message is split into chunks, chunk combinations are spread
//! over the samples of a dataset, and the message is rebuilt by majority vote
//! from whatever subset of samples survives.
//!
//! - [`codec`]: message to sub-messages and back
//! - [`select`]: shortest sub-messages for a given leak threshold
//! - [`backend`]: per-sample embedding (blind DCT-DWT for images, synthetic)
//! - [`channel`]: subset leaks and bit-flip noise
//! - [`metrics`]: bit and word accuracy

pub mod backend;
pub mod bits;
pub mod channel;
pub mod codec;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod select;

pub use bits::BitString;
pub use codec::{decode, encode, DecodeResult, EncodingParams};
pub use error::{Error, Result};
pub use select::{select_params, ProtectionSpec, Ratio, Selection};
