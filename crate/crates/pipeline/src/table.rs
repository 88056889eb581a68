//! CSV output for sweeps.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use amuse_core::channel::RNG_ALGORITHM;

use crate::dataset::ExtractOutcome;
use crate::error::{io_err, Result};
use crate::manifest::Manifest;
use crate::sweep::SweepRow;

pub const COLUMNS: [&str; 22] = [
    "experiment",
    "backend",
    "rng",
    "seed",
    "message_len",
    "protection",
    "tau",
    "chunks",
    "excluded",
    "submessage_len",
    "samples",
    "scale",
    "base_prob",
    "flip_prob",
    "subset_ratio",
    "trial",
    "samples_used",
    "ba",
    "wa",
    "coverage",
    "complete",
    "psnr",
];

/// Six significant digits; plain notation for exponents in `[-4, 6)`,
/// scientific otherwise.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

fn record(r: &SweepRow) -> Vec<String> {
    let tau = match r.chunks {
        0 => String::new(),
        n => sig6(r.excluded as f64 / n as f64),
    };
    vec![
        r.experiment.to_string(),
        r.backend.to_string(),
        RNG_ALGORITHM.to_string(),
        r.seed.to_string(),
        r.message_len.to_string(),
        r.protection.to_string(),
        tau,
        r.chunks.to_string(),
        r.excluded.to_string(),
        r.submessage_len.to_string(),
        r.samples.to_string(),
        opt(r.scale),
        opt(r.base_prob),
        opt(r.flip_prob),
        sig6(r.subset_ratio),
        r.trial.to_string(),
        r.samples_used.to_string(),
        sig6(r.ba),
        r.wa.to_string(),
        sig6(r.coverage),
        u8::from(r.complete).to_string(),
        opt(r.psnr),
    ]
}

pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(record(r))?;
    }
    w.flush().map_err(io_err("<csv>"))?;
    Ok(())
}

pub fn emit_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_csv(file, rows)
}

/// One-row CSV summarizing an extraction.
pub fn emit_extract_csv(path: &Path, outcome: &ExtractOutcome, manifest: &Manifest) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record([
        "backend",
        "message_len",
        "chunks",
        "excluded",
        "samples",
        "samples_used",
        "coverage",
        "complete",
        "digest_match",
        "ba",
        "wa",
    ])?;
    let (ba, wa) = match &outcome.report {
        Some(r) => (sig6(r.ba), r.wa().to_string()),
        None => (String::new(), String::new()),
    };
    let e = &manifest.encoding;
    w.write_record([
        manifest.backend.id().to_string(),
        e.message_len.to_string(),
        e.chunks.to_string(),
        e.excluded.to_string(),
        e.samples.to_string(),
        outcome.used.len().to_string(),
        sig6(outcome.decoded.coverage_rate()),
        u8::from(outcome.decoded.complete).to_string(),
        u8::from(outcome.digest_match).to_string(),
        ba,
        wa,
    ])?;
    w.flush().map_err(io_err(path))?;
    Ok(())
}
