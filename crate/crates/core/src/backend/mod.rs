//! Per-sample watermark backends.
//!
//! The codec only needs a way to put a bit string into one sample and read it
//! back blindly. [`DctDwt`] does that for RGB images; [`Synthetic`] stores
//! the bits verbatim so codec experiments can run without images.

mod dctdwt;
mod image;
pub mod qim;
mod synthetic;
pub mod transform;

pub use self::dctdwt::{DctDwt, DctDwtParams};
pub use self::image::{psnr, RgbImage};
pub use self::synthetic::{Synthetic, SyntheticRecord};

use crate::bits::BitString;
use crate::error::Result;

pub trait WatermarkBackend {
    type Sample;

    /// Short stable identifier, recorded in manifests.
    fn id(&self) -> &'static str;

    fn embed(&self, sample: &Self::Sample, bits: &BitString) -> Result<Self::Sample>;

    /// Reads `expected_len` bits without access to the original sample.
    fn extract(&self, sample: &Self::Sample, expected_len: usize) -> Result<BitString>;
}
