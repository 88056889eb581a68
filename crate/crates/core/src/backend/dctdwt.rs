//! Blind DCT-DWT image watermarking.
//!
//! Pipeline, fixed so that any implementation produces identical pixels:
//!
//! 1. center-crop to the largest width and height divisible by 8,
//! 2. RGB to full-range YCbCr (Rec.601), keep the luma plane,
//! 3. one level of orthonormal Haar DWT,
//! 4. tile the LL band into 4x4 blocks in raster order,
//! 5. block `j` carries bit `j mod |bits|` by QIM on DCT coefficient
//!    `coeff_pos` with step `scale`,
//! 6. invert both transforms, recombine with the untouched chroma,
//!    clamp to `[0, 255]` and round.
//!
//! Every LL block maps onto its own 8x8 pixel tile, so each bit is repeated
//! about `blocks / |bits|` times and extraction takes a per-position
//! majority vote (ties to 0).

use serde::{Deserialize, Serialize};

use super::image::RgbImage;
use super::qim::{qim_embed, qim_extract};
use super::transform::{
    block_dct4, block_idct4, haar_dwt_1level, haar_idwt_1level, Plane,
};
use super::WatermarkBackend;
use crate::bits::BitString;
use crate::error::{Error, Result};

const TILE: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DctDwtParams {
    /// QIM step; larger is more robust and less transparent.
    pub scale: f64,
    /// `(row, col)` inside the 4x4 DCT block.
    pub coeff_pos: (usize, usize),
}

impl DctDwtParams {
    pub const DEFAULT_COEFF_POS: (usize, usize) = (1, 2);

    pub fn new(scale: f64) -> Result<Self> {
        Self::with_position(scale, Self::DEFAULT_COEFF_POS)
    }

    pub fn with_position(scale: f64, coeff_pos: (usize, usize)) -> Result<Self> {
        let p = Self { scale, coeff_pos };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::invalid(format!("scale must be positive, got {}", self.scale)));
        }
        let (r, c) = self.coeff_pos;
        if r >= 4 || c >= 4 || (r, c) == (0, 0) {
            return Err(Error::invalid(format!(
                "coefficient position {:?} must be a non-DC entry of a 4x4 block",
                self.coeff_pos
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DctDwt {
    params: DctDwtParams,
}

/// Offset and size of the center crop used for embedding.
fn crop(width: u32, height: u32) -> (u32, u32, u32, u32) {
    let cw = width - width % TILE;
    let ch = height - height % TILE;
    ((width - cw) / 2, (height - ch) / 2, cw, ch)
}

fn rgb_to_ycbcr([r, g, b]: [u8; 3]) -> [f64; 3] {
    let (r, g, b) = (f64::from(r), f64::from(g), f64::from(b));
    [
        0.299 * r + 0.587 * g + 0.114 * b,
        128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b,
        128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b,
    ]
}

fn ycbcr_to_rgb([y, cb, cr]: [f64; 3]) -> [u8; 3] {
    let (cb, cr) = (cb - 128.0, cr - 128.0);
    let px = |v: f64| v.clamp(0.0, 255.0).round() as u8;
    [
        px(y + 1.402 * cr),
        px(y - 0.344136 * cb - 0.714136 * cr),
        px(y + 1.772 * cb),
    ]
}

impl DctDwt {
    pub fn new(params: DctDwtParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &DctDwtParams {
        &self.params
    }

    /// Number of 4x4 LL blocks, i.e. the longest embeddable message.
    pub fn capacity(width: u32, height: u32) -> usize {
        let (_, _, cw, ch) = crop(width, height);
        (cw / TILE) as usize * (ch / TILE) as usize
    }

    fn check_len(&self, len: usize, capacity: usize) -> Result<()> {
        if len == 0 {
            return Err(Error::invalid("cannot embed an empty bit string"));
        }
        if len > capacity {
            return Err(Error::Capacity {
                bits: len,
                capacity,
            });
        }
        Ok(())
    }

    /// Embeds into a luma plane whose sides are multiples of 8.
    pub fn embed_luma(&self, luma: &Plane, bits: &BitString) -> Result<Plane> {
        let mut bands = haar_dwt_1level(luma)?;
        let (bw, bh) = (bands.ll.width() / 4, bands.ll.height() / 4);
        self.check_len(bits.len(), bw * bh)?;
        let (r, c) = self.params.coeff_pos;
        for by in 0..bh {
            for bx in 0..bw {
                let j = by * bw + bx;
                let mut coeffs = block_dct4(&bands.ll.block4(bx, by));
                coeffs[r][c] = qim_embed(coeffs[r][c], bits[j % bits.len()], self.params.scale);
                bands.ll.set_block4(bx, by, &block_idct4(&coeffs));
            }
        }
        haar_idwt_1level(&bands)
    }

    /// Per-block bits of a luma plane, in raster order.
    pub fn block_bits(&self, luma: &Plane) -> Result<Vec<bool>> {
        let bands = haar_dwt_1level(luma)?;
        let (bw, bh) = (bands.ll.width() / 4, bands.ll.height() / 4);
        let (r, c) = self.params.coeff_pos;
        let mut out = Vec::with_capacity(bw * bh);
        for by in 0..bh {
            for bx in 0..bw {
                let coeffs = block_dct4(&bands.ll.block4(bx, by));
                out.push(qim_extract(coeffs[r][c], self.params.scale));
            }
        }
        Ok(out)
    }

    pub fn extract_luma(&self, luma: &Plane, expected_len: usize) -> Result<BitString> {
        let blocks = self.block_bits(luma)?;
        self.check_len(expected_len, blocks.len())?;
        let mut ones = vec![0usize; expected_len];
        let mut total = vec![0usize; expected_len];
        for (j, &bit) in blocks.iter().enumerate() {
            ones[j % expected_len] += usize::from(bit);
            total[j % expected_len] += 1;
        }
        Ok(ones.iter().zip(&total).map(|(&o, &t)| 2 * o > t).collect())
    }

    /// Cropped luma plane and its origin in the image.
    pub fn luma_plane(img: &RgbImage) -> (Plane, u32, u32) {
        let (x0, y0, cw, ch) = crop(img.width(), img.height());
        let mut plane = Plane::zeros(cw as usize, ch as usize);
        for y in 0..ch {
            for x in 0..cw {
                plane.set(x as usize, y as usize, rgb_to_ycbcr(img.pixel(x0 + x, y0 + y))[0]);
            }
        }
        (plane, x0, y0)
    }
}

impl WatermarkBackend for DctDwt {
    type Sample = RgbImage;

    fn id(&self) -> &'static str {
        "dctdwt"
    }

    fn embed(&self, img: &RgbImage, bits: &BitString) -> Result<RgbImage> {
        self.check_len(bits.len(), Self::capacity(img.width(), img.height()))?;
        let (luma, x0, y0) = Self::luma_plane(img);
        let marked = self.embed_luma(&luma, bits)?;
        let mut out = img.clone();
        for y in 0..luma.height() {
            for x in 0..luma.width() {
                let (px, py) = (x0 + x as u32, y0 + y as u32);
                let [_, cb, cr] = rgb_to_ycbcr(img.pixel(px, py));
                out.set_pixel(px, py, ycbcr_to_rgb([marked.get(x, y), cb, cr]));
            }
        }
        Ok(out)
    }

    fn extract(&self, img: &RgbImage, expected_len: usize) -> Result<BitString> {
        self.check_len(expected_len, Self::capacity(img.width(), img.height()))?;
        let (luma, _, _) = Self::luma_plane(img);
        self.extract_luma(&luma, expected_len)
    }
}
