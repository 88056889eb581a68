use serde::{Deserialize, Serialize};

use super::WatermarkBackend;
use crate::bits::BitString;
use crate::error::Result;

/// A sample that is nothing but its embedded payload.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticRecord {
    pub payload: BitString,
}

/// Stores bits verbatim. Noise, if any, comes from a channel applied to the
/// record between embedding and extraction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Synthetic;

impl WatermarkBackend for Synthetic {
    type Sample = SyntheticRecord;

    fn id(&self) -> &'static str {
        "synthetic"
    }

    fn embed(&self, _record: &SyntheticRecord, bits: &BitString) -> Result<SyntheticRecord> {
        Ok(SyntheticRecord {
            payload: bits.clone(),
        })
    }

    /// Returns the stored payload as is; a length mismatch is left for the
    /// decoder to reject.
    fn extract(&self, record: &SyntheticRecord, _expected_len: usize) -> Result<BitString> {
        Ok(record.payload.clone())
    }
}
