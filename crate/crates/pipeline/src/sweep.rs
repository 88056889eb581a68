//! Cartesian experiment sweeps over message length, protection level,
//! backend strength, channel noise and leak ratio.
//!
//! Each trial draws a fresh message; the image corpus is fixed per config.
//! Seeds for every draw are derived from the config seed and the cell
//! coordinates that should share randomness, so the baseline and the AMUSE
//! configurations of one trial see the same message, the same leaked sample
//! indices and the same noise stream.

use std::cmp::Ordering;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use amuse_core::backend::{psnr, DctDwt, DctDwtParams, RgbImage, WatermarkBackend};
use amuse_core::channel::{
    apply_bitflips, length_scaled_flip_prob, mix_seed, random_message, BitFlipChannel, SubsetAttack,
};
use amuse_core::metrics::{aggregate, bit_accuracy, EvalReport};
use amuse_core::select::Ratio;
use amuse_core::{decode, encode, BitString};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{resolve_params, ParamChoice};
use crate::error::{io_err, PipelineError, Result};

const TAG_CORPUS: u64 = 1;
const TAG_MESSAGE: u64 = 2;
const TAG_SUBSET: u64 = 3;
const TAG_CHANNEL: u64 = 4;

/// Baseline embeds the whole message in every sample; `Tau` runs parameter
/// selection with that coverage threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Protection {
    Baseline,
    Tau(Ratio),
}

impl Protection {
    pub fn choice(self) -> ParamChoice {
        match self {
            Self::Baseline => ParamChoice::Forced {
                chunks: 1,
                excluded: 0,
            },
            Self::Tau(t) => ParamChoice::Tau(t),
        }
    }

    pub fn is_baseline(self) -> bool {
        self == Self::Baseline
    }
}

impl fmt::Display for Protection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Baseline => f.write_str("baseline"),
            Self::Tau(t) if (100 * t.numer()) % t.denom() == 0 => {
                write!(f, "{}%", 100 * t.numer() / t.denom())
            }
            Self::Tau(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for Protection {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("baseline") {
            return Ok(Self::Baseline);
        }
        Ok(Self::Tau(s.parse()?))
    }
}

impl TryFrom<String> for Protection {
    type Error = PipelineError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Protection> for String {
    fn from(p: Protection) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", deny_unknown_fields)]
pub enum SweepBackend {
    /// Procedural images, one per sample, regenerated from the config seed.
    #[serde(rename = "dctdwt")]
    DctDwt {
        scales: Vec<f64>,
        #[serde(default = "default_image_size")]
        image_size: u32,
    },
    #[serde(rename = "synthetic")]
    Synthetic {},
}

fn default_image_size() -> u32 {
    256
}

impl SweepBackend {
    pub fn id(&self) -> &'static str {
        match self {
            Self::DctDwt { .. } => "dctdwt",
            Self::Synthetic {} => "synthetic",
        }
    }
}

/// Flips every extracted bit with probability `min(0.5, p0 * l / l_ref)`,
/// `l` being the embedded sub-message length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub base_probs: Vec<f64>,
    pub reference_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub message_lengths: Vec<usize>,
    pub protections: Vec<Protection>,
    /// Dataset size `n`.
    pub samples: usize,
    pub backend: SweepBackend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelConfig>,
    /// Only for subset sweeps; a length sweep always uses the full dataset.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subset_ratios: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Default CSV path when the CLI gets none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|source| PipelineError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    fn validate(&self, kind: SweepKind) -> Result<()> {
        let bad = |m: &str| Err(PipelineError::Config(m.into()));
        if self.message_lengths.is_empty() || self.message_lengths.contains(&0) {
            return bad("message_lengths must be non-empty and positive");
        }
        if self.protections.is_empty() {
            return bad("protections must be non-empty");
        }
        if self.samples == 0 || self.trials == 0 {
            return bad("samples and trials must be positive");
        }
        if let SweepBackend::DctDwt { scales, image_size } = &self.backend {
            if scales.is_empty() {
                return bad("dctdwt sweeps need at least one scale");
            }
            for &s in scales {
                DctDwtParams::new(s)?;
            }
            let capacity = DctDwt::capacity(*image_size, *image_size);
            if let Some(&l) = self.message_lengths.iter().find(|&&l| l > capacity) {
                return Err(PipelineError::Config(format!(
                    "message length {l} exceeds the {capacity}-bit capacity of {image_size}px images"
                )));
            }
        }
        if let Some(ch) = &self.channel {
            if ch.base_probs.is_empty() || ch.reference_length == 0 {
                return bad("channel needs base_probs and a positive reference_length");
            }
            for &p in &ch.base_probs {
                length_scaled_flip_prob(1, p, 1)?;
            }
        }
        match kind {
            SweepKind::Subset if self.subset_ratios.is_empty() => bad("subset sweeps need subset_ratios"),
            SweepKind::Length if !self.subset_ratios.is_empty() => {
                bad("length sweeps run on the full dataset; drop subset_ratios")
            }
            _ => {
                for &s in &self.subset_ratios {
                    SubsetAttack::new(s, 0)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Subset,
    Length,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Subset => "subset",
            Self::Length => "length",
        }
    }
}

/// One trial of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub experiment: &'static str,
    pub backend: &'static str,
    pub seed: u64,
    pub message_len: usize,
    pub protection: Protection,
    pub chunks: usize,
    pub excluded: usize,
    pub submessage_len: usize,
    pub samples: usize,
    pub scale: Option<f64>,
    pub base_prob: Option<f64>,
    pub flip_prob: Option<f64>,
    pub subset_ratio: f64,
    pub trial: usize,
    pub samples_used: usize,
    pub ba: f64,
    pub wa: u8,
    pub coverage: f64,
    pub complete: bool,
    /// Mean over the dataset's watermarked images.
    pub psnr: Option<f64>,
}

impl SweepRow {
    fn cell_cmp(&self, other: &Self) -> Ordering {
        let opt = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => a.total_cmp(&b),
            (a, b) => a.is_some().cmp(&b.is_some()),
        };
        self.message_len
            .cmp(&other.message_len)
            .then(self.protection.cmp(&other.protection))
            .then(opt(self.scale, other.scale))
            .then(opt(self.base_prob, other.base_prob))
            .then(self.subset_ratio.total_cmp(&other.subset_ratio))
    }

    pub fn same_cell(&self, other: &Self) -> bool {
        self.cell_cmp(other) == Ordering::Equal
    }

    pub fn to_report(&self) -> EvalReport {
        let mut r = EvalReport::new(self.ba, self.coverage)
            .with("message_len", self.message_len)
            .with("protection", self.protection)
            .with("subset_ratio", self.subset_ratio);
        if let Some(s) = self.scale {
            r = r.with("scale", s);
        }
        if let Some(p) = self.base_prob {
            r = r.with("base_prob", p);
        }
        if let Some(q) = self.psnr {
            r = r.with_psnr(q);
        }
        r
    }
}

/// Mean metrics of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub message_len: usize,
    pub protection: Protection,
    pub chunks: usize,
    pub excluded: usize,
    pub submessage_len: usize,
    pub scale: Option<f64>,
    pub base_prob: Option<f64>,
    pub subset_ratio: f64,
    pub trials: usize,
    pub mean_ba: f64,
    pub mean_wa: f64,
    pub mean_coverage: f64,
    pub mean_psnr: Option<f64>,
}

/// Groups sorted rows by cell.
pub fn summarize(rows: &[SweepRow]) -> Vec<CellSummary> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let first = &rows[start];
        let end = start + rows[start..].iter().take_while(|r| r.same_cell(first)).count();
        let reports: Vec<EvalReport> = rows[start..end].iter().map(SweepRow::to_report).collect();
        let s = aggregate(&reports).expect("cell is non-empty");
        out.push(CellSummary {
            message_len: first.message_len,
            protection: first.protection,
            chunks: first.chunks,
            excluded: first.excluded,
            submessage_len: first.submessage_len,
            scale: first.scale,
            base_prob: first.base_prob,
            subset_ratio: first.subset_ratio,
            trials: s.trials,
            mean_ba: s.mean_ba,
            mean_wa: s.mean_wa,
            mean_coverage: s.mean_coverage,
            mean_psnr: s.mean_psnr,
        });
        start = end;
    }
    out
}

struct Job {
    message_len: usize,
    protection: Protection,
    scale: Option<f64>,
    base_prob: Option<f64>,
    trial: usize,
}

pub fn run_subset_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    run_sweep(cfg, SweepKind::Subset)
}

pub fn run_length_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    run_sweep(cfg, SweepKind::Length)
}

/// Runs every cell of the grid and returns rows sorted by cell, then trial.
pub fn run_sweep(cfg: &ExperimentConfig, kind: SweepKind) -> Result<Vec<SweepRow>> {
    cfg.validate(kind)?;
    let corpus = match &cfg.backend {
        SweepBackend::DctDwt { image_size, .. } => amuse_core::corpus::natural_corpus(
            cfg.samples,
            *image_size,
            mix_seed(cfg.seed, &[TAG_CORPUS]),
        )?,
        SweepBackend::Synthetic {} => Vec::new(),
    };
    let scales: Vec<Option<f64>> = match &cfg.backend {
        SweepBackend::DctDwt { scales, .. } => scales.iter().copied().map(Some).collect(),
        SweepBackend::Synthetic {} => vec![None],
    };
    let probs: Vec<Option<f64>> = match &cfg.channel {
        Some(ch) => ch.base_probs.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let ratios = match kind {
        SweepKind::Subset => cfg.subset_ratios.clone(),
        SweepKind::Length => vec![1.0],
    };

    let mut jobs = Vec::new();
    for &message_len in &cfg.message_lengths {
        for &protection in &cfg.protections {
            for &scale in &scales {
                for &base_prob in &probs {
                    for trial in 0..cfg.trials {
                        jobs.push(Job {
                            message_len,
                            protection,
                            scale,
                            base_prob,
                            trial,
                        });
                    }
                }
            }
        }
    }

    let per_job: Vec<Result<Vec<SweepRow>>> = jobs
        .par_iter()
        .map(|job| run_job(cfg, kind, job, &corpus, &ratios))
        .collect();
    let mut rows = Vec::with_capacity(jobs.len() * ratios.len());
    for r in per_job {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| a.cell_cmp(b).then(a.trial.cmp(&b.trial)));
    Ok(rows)
}

fn run_job(
    cfg: &ExperimentConfig,
    kind: SweepKind,
    job: &Job,
    corpus: &[RgbImage],
    ratios: &[f64],
) -> Result<Vec<SweepRow>> {
    let len = job.message_len;
    let trial = job.trial as u64;
    let message = random_message(len, mix_seed(cfg.seed, &[TAG_MESSAGE, len as u64, trial]));
    let (params, selection, _) = resolve_params(len, cfg.samples, job.protection.choice())?;
    let raws: Vec<BitString> = encode(&message, &params)?.iter().map(|s| s.raw).collect();
    let l = params.submessage_len();

    let (mut extracted, psnr_mean) = match job.scale {
        Some(scale) => {
            let dw = DctDwt::new(DctDwtParams::new(scale)?)?;
            let mut bits = Vec::with_capacity(raws.len());
            let mut total = 0.0;
            let mut finite = 0usize;
            for (img, raw) in corpus.iter().zip(&raws) {
                let marked = dw.embed(img, raw)?;
                let q = psnr(img, &marked)?;
                if q.is_finite() {
                    total += q;
                    finite += 1;
                }
                bits.push(dw.extract(&marked, l)?);
            }
            (bits, (finite > 0).then(|| total / finite as f64))
        }
        None => (raws, None),
    };

    let flip_prob = match (job.base_prob, &cfg.channel) {
        (Some(p0), Some(ch)) => {
            let p = length_scaled_flip_prob(l, p0, ch.reference_length)?;
            let channel = BitFlipChannel::new(
                p,
                mix_seed(cfg.seed, &[TAG_CHANNEL, len as u64, trial, p0.to_bits()]),
            )?;
            for (i, bits) in extracted.iter_mut().enumerate() {
                *bits = apply_bitflips(bits, &channel.for_sample(i as u64));
            }
            Some(p)
        }
        _ => None,
    };

    ratios
        .iter()
        .map(|&ratio| {
            let attack = SubsetAttack::new(
                ratio,
                mix_seed(cfg.seed, &[TAG_SUBSET, len as u64, trial, ratio.to_bits()]),
            )?;
            let leaked: Vec<BitString> = attack
                .indices(extracted.len())?
                .into_iter()
                .map(|i| extracted[i].clone())
                .collect();
            let decoded = decode(&leaked, &params)?;
            let ba = bit_accuracy(&decoded.message, &message)?;
            Ok(SweepRow {
                experiment: kind.name(),
                backend: cfg.backend.id(),
                seed: cfg.seed,
                message_len: len,
                protection: job.protection,
                chunks: selection.chunks,
                excluded: selection.excluded,
                submessage_len: l,
                samples: cfg.samples,
                scale: job.scale,
                base_prob: job.base_prob,
                flip_prob,
                subset_ratio: ratio,
                trial: job.trial,
                samples_used: leaked.len(),
                ba,
                wa: u8::from(ba == 1.0),
                coverage: decoded.coverage_rate(),
                complete: decoded.complete,
                psnr: psnr_mean,
            })
        })
        .collect()
}
