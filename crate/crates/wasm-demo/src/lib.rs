//! Three interactive operations for the browser page in `www/`:
//! parameter selection, a leak simulation and a DCT-DWT watermark preview.
//!
//! Results cross the boundary as JSON strings, images as RGBA bytes ready
//! for `ImageData`. Every function also works natively, which is how the
//! tests call them.

use amuse_core::backend::{psnr, DctDwt, DctDwtParams, RgbImage, WatermarkBackend};
use amuse_core::channel::{apply_subset, random_message, SubsetAttack};
use amuse_core::codec::{binomial, CombinationTable};
use amuse_core::corpus::natural_image;
use amuse_core::metrics::bit_accuracy;
use amuse_core::select::{select_params, ProtectionSpec, Ratio};
use amuse_core::{decode, encode, EncodingParams};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[derive(Serialize)]
struct SelectRow {
    tau: String,
    chunks: usize,
    excluded: usize,
    combinations: String,
    length: usize,
    saving: f64,
}

/// Selection for each threshold in a comma-separated list such as
/// `"20%,40%,60%,80%"`.
pub fn select_table(length: usize, samples: usize, taus: &str) -> Result<String, String> {
    let mut rows = Vec::new();
    for t in taus.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let tau: Ratio = t.parse().map_err(|e| format!("{t}: {e}"))?;
        let s = select_params(&ProtectionSpec::new(tau, length, samples).map_err(|e| e.to_string())?);
        rows.push(SelectRow {
            tau: t.to_string(),
            chunks: s.chunks,
            excluded: s.excluded,
            combinations: binomial(s.chunks as u64, (s.chunks - s.excluded) as u64)
                .map_or_else(|| "overflow".into(), |c| c.to_string()),
            length: s.length,
            saving: 1.0 - s.length as f64 / length as f64,
        });
    }
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = selectTable)]
pub fn select_table_js(length: usize, samples: usize, taus: &str) -> Result<String, JsError> {
    select_table(length, samples, taus).map_err(js_err)
}

#[derive(Serialize)]
struct LeakResult {
    chunks: usize,
    excluded: usize,
    leaked: usize,
    guarantee: usize,
    /// Leaked samples per combination index.
    per_combination: Vec<usize>,
    combinations: Vec<Vec<usize>>,
    chunk_votes: Vec<usize>,
    complete: bool,
    ba: f64,
}

/// Embeds a random message in `samples` error-free sub-messages, leaks
/// `round(ratio * samples)` of them and decodes.
pub fn leak(length: usize, samples: usize, tau: &str, ratio: f64, seed: u64) -> Result<String, String> {
    let e = |e: amuse_core::Error| e.to_string();
    let tau: Ratio = tau.parse().map_err(e)?;
    let sel = select_params(&ProtectionSpec::new(tau, length, samples).map_err(e)?);
    let params = EncodingParams::new(length, sel.chunks, sel.excluded, samples).map_err(e)?;
    if params.combinations > 5000 {
        return Err(format!("{} combinations is too many to draw", params.combinations));
    }
    let m = random_message(length, seed);
    let subs: Vec<_> = encode(&m, &params).map_err(e)?.iter().collect();
    let leaked = apply_subset(&subs, &SubsetAttack::new(ratio, seed ^ 0x5eed).map_err(e)?).map_err(e)?;
    let mut per_combination = vec![0; params.combinations];
    for s in &leaked {
        per_combination[s.ordering_index] += 1;
    }
    let raws: Vec<_> = leaked.iter().map(|s| s.raw.clone()).collect();
    let d = decode(&raws, &params).map_err(e)?;
    let table = CombinationTable::new(params.chunks, params.excluded).map_err(e)?;
    let result = LeakResult {
        chunks: params.chunks,
        excluded: params.excluded,
        leaked: leaked.len(),
        guarantee: samples * params.excluded / params.chunks.max(1) + 1,
        per_combination,
        combinations: table.entries().to_vec(),
        chunk_votes: d.vote_counts.clone(),
        complete: d.complete,
        ba: bit_accuracy(&d.message, &m).map_err(e)?,
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = leak)]
pub fn leak_js(length: usize, samples: usize, tau: &str, ratio: f64, seed: u64) -> Result<String, JsError> {
    leak(length, samples, tau, ratio, seed).map_err(js_err)
}

/// A procedural image before and after watermarking.
#[wasm_bindgen]
pub struct WatermarkPreview {
    size: u32,
    original: Vec<u8>,
    marked: Vec<u8>,
    difference: Vec<u8>,
    psnr: f64,
    ba: f64,
    repeats: usize,
}

#[wasm_bindgen]
impl WatermarkPreview {
    #[wasm_bindgen(getter)]
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn original(&self) -> Vec<u8> {
        self.original.clone()
    }

    pub fn marked(&self) -> Vec<u8> {
        self.marked.clone()
    }

    /// Absolute luma-ish difference, amplified so it is visible.
    pub fn difference(&self) -> Vec<u8> {
        self.difference.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn psnr(&self) -> f64 {
        self.psnr
    }

    #[wasm_bindgen(getter)]
    pub fn ba(&self) -> f64 {
        self.ba
    }

    /// Minimum number of blocks carrying each bit.
    #[wasm_bindgen(getter)]
    pub fn repeats(&self) -> usize {
        self.repeats
    }
}

fn rgba(img: &RgbImage) -> Vec<u8> {
    img.as_raw().chunks(3).flat_map(|p| [p[0], p[1], p[2], 255]).collect()
}

#[wasm_bindgen(js_name = watermarkPreview)]
pub fn watermark_preview(size: u32, scale: f64, length: usize, seed: u64) -> Result<WatermarkPreview, JsError> {
    let img = natural_image(size, size, seed).map_err(js_err)?;
    let dw = DctDwt::new(DctDwtParams::new(scale).map_err(js_err)?).map_err(js_err)?;
    let m = random_message(length, seed.wrapping_add(1));
    let marked = dw.embed(&img, &m).map_err(js_err)?;
    let recovered = dw.extract(&marked, length).map_err(js_err)?;
    let difference = img
        .as_raw()
        .chunks(3)
        .zip(marked.as_raw().chunks(3))
        .flat_map(|(a, b)| {
            let d = a.iter().zip(b).map(|(&x, &y)| x.abs_diff(y)).max().unwrap_or(0);
            let v = d.saturating_mul(16);
            [v, v, v, 255]
        })
        .collect();
    Ok(WatermarkPreview {
        size,
        original: rgba(&img),
        marked: rgba(&marked),
        difference,
        psnr: psnr(&img, &marked).map_err(js_err)?,
        ba: bit_accuracy(&recovered, &m).map_err(js_err)?,
        repeats: DctDwt::capacity(size, size) / length,
    })
}
