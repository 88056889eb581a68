//! Directory-level embed, extract and subset operations.
//!
//! A dataset is a directory of files. Sample order is the lexicographic order
//! of file names; it is frozen into the manifest at embed time so a later
//! directory listing in a different order cannot shift the sample index.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use amuse_core::backend::{psnr, DctDwt, RgbImage, WatermarkBackend};
use amuse_core::channel::{apply_subset, SubsetAttack};
use amuse_core::codec::binomial;
use amuse_core::metrics::{bit_accuracy, EvalReport};
use amuse_core::select::{coverage_ratio, select_params, ProtectionSpec, Ratio, Selection};
use amuse_core::{decode, encode, BitString, DecodeResult, EncodingParams};
use rayon::prelude::*;

use crate::error::{io_err, PipelineError, Result};
use crate::manifest::{message_digest, BackendConfig, Conventions, Manifest, SampleRecord, FORMAT_VERSION};

pub fn load_png(path: &Path) -> Result<RgbImage> {
    let img = image::open(path)
        .map_err(|source| PipelineError::Image {
            path: path.to_path_buf(),
            source,
        })?
        .into_rgb8();
    let (w, h) = img.dimensions();
    RgbImage::from_raw(w, h, img.into_raw()).map_err(|source| PipelineError::Sample {
        file: path.display().to_string(),
        source,
    })
}

pub fn save_png(path: &Path, img: &RgbImage) -> Result<()> {
    image::save_buffer_with_format(
        path,
        img.as_raw(),
        img.width(),
        img.height(),
        image::ExtendedColorType::Rgb8,
        image::ImageFormat::Png,
    )
    .map_err(|source| PipelineError::Image {
        path: path.to_path_buf(),
        source,
    })
}

fn is_png(name: &str) -> bool {
    Path::new(name)
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Regular files in `dir` sorted by name; only PNGs when `png_only`.
pub fn list_files(dir: &Path, png_only: bool) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        if !entry.file_type().map_err(io_err(entry.path()))?.is_file() {
            continue;
        }
        let name = entry.file_name().into_string().map_err(|raw| {
            PipelineError::Config(format!("file name {raw:?} is not valid UTF-8"))
        })?;
        if !png_only || is_png(&name) {
            names.push(name);
        }
    }
    names.sort();
    Ok(names)
}

fn sample_files(dir: &Path, backend: &BackendConfig) -> Result<Vec<String>> {
    list_files(dir, matches!(backend, BackendConfig::DctDwt(_)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamChoice {
    /// Shortest sub-messages whose coverage ratio stays within the threshold.
    Tau(Ratio),
    /// `(N, K)` given directly.
    Forced { chunks: usize, excluded: usize },
}

#[derive(Debug, Clone)]
pub struct EmbedOutcome {
    pub manifest: Manifest,
    pub selection: Selection,
    /// Mean over images whose PSNR is finite.
    pub mean_psnr: Option<f64>,
    pub warnings: Vec<String>,
}

/// Resolves `(N, K)` for `n` samples, falling back to one chunk when no pair
/// fits.
pub fn resolve_params(
    message_len: usize,
    samples: usize,
    choice: ParamChoice,
) -> Result<(EncodingParams, Selection, Vec<String>)> {
    let mut warnings = Vec::new();
    let selection = match choice {
        ParamChoice::Tau(tau) => {
            let sel = select_params(&ProtectionSpec::new(tau, message_len, samples)?);
            if sel.is_pass_through() {
                warnings.push(format!(
                    "no (N, K) with coverage <= {tau} fits {samples} samples; every sample carries the full message"
                ));
            }
            sel
        }
        ParamChoice::Forced { chunks, excluded } => {
            if chunks == 0 || excluded >= chunks {
                return Err(PipelineError::Config(format!("need 0 <= K < N, got N={chunks} K={excluded}")));
            }
            let c = binomial(chunks as u64, (chunks - excluded) as u64).unwrap_or(u128::MAX);
            if chunks > 1 && c > samples as u128 {
                warnings.push(format!(
                    "N={chunks} K={excluded} needs {c} distinct samples but only {samples} exist; every sample carries the full message"
                ));
                Selection {
                    chunks: 1,
                    excluded: 0,
                    length: message_len,
                    tau: coverage_ratio(1, 0),
                }
            } else {
                let length = amuse_core::codec::submessage_length(message_len, chunks, excluded)?;
                Selection {
                    chunks,
                    excluded,
                    length,
                    tau: coverage_ratio(chunks, excluded),
                }
            }
        }
    };
    let params = EncodingParams::new(message_len, selection.chunks, selection.excluded, samples)?;
    Ok((params, selection, warnings))
}

fn same_dir(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// Writes watermarked copies of every sample in `input` to `output` and
/// returns the manifest (not yet saved). Any failing sample aborts the run.
pub fn embed_dataset(
    input: &Path,
    output: &Path,
    message: &BitString,
    choice: ParamChoice,
    backend: &BackendConfig,
) -> Result<EmbedOutcome> {
    backend.validate()?;
    if message.is_empty() {
        return Err(PipelineError::Config("message is empty".into()));
    }
    let files = sample_files(input, backend)?;
    if files.is_empty() {
        return Err(PipelineError::NoSamples(input.to_path_buf()));
    }
    fs::create_dir_all(output).map_err(io_err(output))?;
    if same_dir(input, output) {
        return Err(PipelineError::Config("output directory must differ from the input".into()));
    }

    let (params, selection, warnings) = resolve_params(message.len(), files.len(), choice)?;
    let encoder = encode(message, &params)?;

    let per_sample: Vec<Result<(SampleRecord, Option<f64>)>> = files
        .par_iter()
        .enumerate()
        .map(|(i, file)| {
            let sub = encoder.submessage(i + 1)?;
            let (src, dst) = (input.join(file), output.join(file));
            let (payload, quality) = match backend {
                BackendConfig::DctDwt(p) => {
                    let img = load_png(&src)?;
                    let marked = DctDwt::new(*p)?
                        .embed(&img, &sub.raw)
                        .map_err(|source| PipelineError::Sample {
                            file: file.clone(),
                            source,
                        })?;
                    save_png(&dst, &marked)?;
                    (None, Some(psnr(&img, &marked)?))
                }
                BackendConfig::Synthetic {} => {
                    fs::copy(&src, &dst).map_err(io_err(&src))?;
                    (Some(sub.raw), None)
                }
            };
            let record = SampleRecord {
                sample_id: i + 1,
                file: file.clone(),
                payload,
            };
            Ok((record, quality))
        })
        .collect();

    let mut samples = Vec::with_capacity(files.len());
    let mut finite = Vec::new();
    for r in per_sample {
        let (record, quality) = r?;
        samples.push(record);
        finite.extend(quality.filter(|q| q.is_finite()));
    }
    let mean_psnr = (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64);

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        message_digest: message_digest(message),
        encoding: params,
        backend: backend.clone(),
        conventions: Conventions::default(),
        samples,
    };
    Ok(EmbedOutcome {
        manifest,
        selection,
        mean_psnr,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct ExtractOutcome {
    pub decoded: DecodeResult,
    /// `(sample_id, file)` of every sample that was found and read.
    pub used: Vec<(usize, String)>,
    /// Files in the directory that the manifest does not list.
    pub ignored: Vec<String>,
    /// Whether the decoded message hashes to the manifest digest.
    pub digest_match: bool,
    /// Present when a reference message was supplied.
    pub report: Option<EvalReport>,
}

/// Decodes the message from whichever manifest samples are present in `dir`.
/// A supplied reference message must match the manifest digest.
pub fn extract_dataset(dir: &Path, manifest: &Manifest, reference: Option<&BitString>) -> Result<ExtractOutcome> {
    manifest.validate()?;
    if let Some(r) = reference {
        if !manifest.verifies(r) {
            return Err(PipelineError::Mismatch(
                "reference message does not match the manifest digest".into(),
            ));
        }
    }
    let present: BTreeSet<String> = sample_files(dir, &manifest.backend)?.into_iter().collect();
    let listed: BTreeSet<&str> = manifest.samples.iter().map(|s| s.file.as_str()).collect();
    let ignored: Vec<String> = present.iter().filter(|f| !listed.contains(f.as_str())).cloned().collect();
    let available: Vec<&SampleRecord> = manifest.samples.iter().filter(|s| present.contains(&s.file)).collect();
    if available.is_empty() {
        return Err(PipelineError::NoSamples(dir.to_path_buf()));
    }

    let expected = manifest.encoding.submessage_len();
    let extracted: Vec<Result<BitString>> = available
        .par_iter()
        .map(|s| {
            let bits = match &manifest.backend {
                BackendConfig::DctDwt(p) => {
                    let img = load_png(&dir.join(&s.file))?;
                    DctDwt::new(*p)?.extract(&img, expected).map_err(|source| PipelineError::Sample {
                        file: s.file.clone(),
                        source,
                    })?
                }
                BackendConfig::Synthetic {} => s.payload.clone().expect("validated manifest"),
            };
            if bits.len() != expected {
                return Err(PipelineError::Mismatch(format!(
                    "sample {} holds {} bits, expected {expected}",
                    s.file,
                    bits.len()
                )));
            }
            Ok(bits)
        })
        .collect();
    let extracted = extracted.into_iter().collect::<Result<Vec<_>>>()?;

    let decoded = decode(&extracted, &manifest.encoding)?;
    let digest_match = manifest.verifies(&decoded.message);
    let report = match reference {
        Some(r) => Some(
            EvalReport::new(bit_accuracy(&decoded.message, r)?, decoded.coverage_rate())
                .with("backend", manifest.backend.id())
                .with("chunks", manifest.encoding.chunks)
                .with("excluded", manifest.encoding.excluded)
                .with("samples_used", available.len()),
        ),
        None => None,
    };
    Ok(ExtractOutcome {
        decoded,
        used: available.iter().map(|s| (s.sample_id, s.file.clone())).collect(),
        ignored,
        digest_match,
        report,
    })
}

/// Copies a random `round(ratio * n)` of the files in `input` to `output`.
/// Returns the copied names.
pub fn attack_subset(input: &Path, output: &Path, ratio: f64, seed: u64) -> Result<Vec<String>> {
    let files = list_files(input, false)?;
    if files.is_empty() {
        return Err(PipelineError::NoSamples(input.to_path_buf()));
    }
    fs::create_dir_all(output).map_err(io_err(output))?;
    if same_dir(input, output) {
        return Err(PipelineError::Config("output directory must differ from the input".into()));
    }
    let kept = apply_subset(&files, &SubsetAttack::new(ratio, seed)?)?;
    for f in &kept {
        fs::copy(input.join(f), output.join(f)).map_err(io_err(input.join(f)))?;
    }
    Ok(kept)
}

/// Writes `count` procedural test images named `img_0000.png`, ...
pub fn write_corpus(dir: &Path, count: usize, size: u32, seed: u64) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let images = amuse_core::corpus::natural_corpus(count, size, seed)?;
    images
        .iter()
        .enumerate()
        .map(|(i, img)| {
            let p = dir.join(format!("img_{i:04}.png"));
            save_png(&p, img)?;
            Ok(p)
        })
        .collect()
}
