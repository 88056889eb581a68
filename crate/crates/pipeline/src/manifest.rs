//! The JSON record that travels with a watermarked dataset.
//!
//! It holds everything extraction needs (encoding parameters, backend
//! settings, sample order) and a digest of the message instead of the message
//! itself, so a recipient of the dataset cannot read the watermark off it.

use std::fs;
use std::path::Path;

use amuse_core::backend::{DctDwt, DctDwtParams};
use amuse_core::codec::{ASSIGNMENT_RULE, COMBINATION_ORDER};
use amuse_core::{BitString, EncodingParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io_err, PipelineError, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const BIT_PACKING: &str = "msb_first_hex";

/// SHA-256 over the length as a big-endian `u64` followed by the packed,
/// right-aligned MSB-first bytes. Lower-case hex.
pub fn message_digest(message: &BitString) -> String {
    let mut h = Sha256::new();
    h.update((message.len() as u64).to_be_bytes());
    h.update(message.to_packed_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", content = "params", deny_unknown_fields)]
pub enum BackendConfig {
    #[serde(rename = "dctdwt")]
    DctDwt(DctDwtParams),
    #[serde(rename = "synthetic")]
    Synthetic {},
}

impl BackendConfig {
    pub fn dctdwt(scale: f64) -> Result<Self> {
        Ok(Self::DctDwt(DctDwtParams::new(scale)?))
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::DctDwt(_) => "dctdwt",
            Self::Synthetic {} => "synthetic",
        }
    }

    pub fn scale(&self) -> Option<f64> {
        match self {
            Self::DctDwt(p) => Some(p.scale),
            Self::Synthetic {} => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::DctDwt(p) = self {
            DctDwt::new(*p)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conventions {
    pub combination_order: String,
    pub assignment: String,
    pub bit_packing: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            combination_order: COMBINATION_ORDER.into(),
            assignment: ASSIGNMENT_RULE.into(),
            bit_packing: BIT_PACKING.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    /// 1-based position; sample `j` carries combination `C - (j mod C) - 1`.
    pub sample_id: usize,
    pub file: String,
    /// Only for the synthetic backend, which has no pixels to hide bits in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<BitString>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u32,
    pub message_digest: String,
    pub encoding: EncodingParams,
    pub backend: BackendConfig,
    pub conventions: Conventions,
    pub samples: Vec<SampleRecord>,
}

impl Manifest {
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(PipelineError::Mismatch(format!(
                "format_version {} is not supported (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.conventions != Conventions::default() {
            return Err(PipelineError::Mismatch(format!(
                "unsupported conventions {:?}",
                self.conventions
            )));
        }
        self.encoding.validate()?;
        self.backend.validate()?;
        if self.samples.len() != self.encoding.samples {
            return Err(PipelineError::Mismatch(format!(
                "{} sample records but encoding says n = {}",
                self.samples.len(),
                self.encoding.samples
            )));
        }
        for (i, s) in self.samples.iter().enumerate() {
            if s.sample_id != i + 1 {
                return Err(PipelineError::Mismatch(format!(
                    "sample record {} has sample_id {}",
                    i + 1,
                    s.sample_id
                )));
            }
            let synthetic = matches!(self.backend, BackendConfig::Synthetic {});
            if synthetic != s.payload.is_some() {
                return Err(PipelineError::Mismatch(format!(
                    "sample {}: payload must be present exactly for the synthetic backend",
                    s.file
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest is always serializable");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(io_err(path))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|source| PipelineError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        m.validate()?;
        Ok(m)
    }

    pub fn verifies(&self, message: &BitString) -> bool {
        message.len() == self.encoding.message_len && message_digest(message) == self.message_digest
    }
}
