//! Bit accuracy, word accuracy and their averages over trials.

use std::collections::BTreeMap;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Fraction of positions where the two messages agree.
pub fn bit_accuracy(recovered: &BitString, original: &BitString) -> Result<f64> {
    if original.is_empty() {
        return Err(Error::invalid("bit accuracy of an empty message"));
    }
    let wrong = recovered.hamming_distance(original)?;
    Ok((original.len() - wrong) as f64 / original.len() as f64)
}

/// 1 for an exact match, 0 otherwise.
pub fn word_accuracy(recovered: &BitString, original: &BitString) -> Result<u8> {
    Ok(u8::from(bit_accuracy(recovered, original)? == 1.0))
}

/// One evaluated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub ba: f64,
    pub chunk_coverage_rate: f64,
    /// Mean PSNR of the watermarked samples, when images were involved.
    pub psnr: Option<f64>,
    /// Config echo; also the grouping key in [`aggregate_by_config`].
    pub config: BTreeMap<String, String>,
}

impl EvalReport {
    pub fn new(ba: f64, chunk_coverage_rate: f64) -> Self {
        Self {
            ba,
            chunk_coverage_rate,
            psnr: None,
            config: BTreeMap::new(),
        }
    }

    pub fn with_psnr(mut self, psnr: f64) -> Self {
        self.psnr = Some(psnr);
        self
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn wa(&self) -> u8 {
        u8::from(self.ba == 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub trials: usize,
    pub mean_ba: f64,
    pub mean_wa: f64,
    pub mean_coverage: f64,
    /// Mean over finite PSNR values; `INFINITY` when every measured pair was
    /// identical, `None` when nothing was measured.
    pub mean_psnr: Option<f64>,
    pub infinite_psnr: usize,
    pub config: BTreeMap<String, String>,
}

pub fn aggregate(trials: &[EvalReport]) -> Result<Summary> {
    let Some(first) = trials.first() else {
        return Err(Error::invalid("cannot aggregate zero trials"));
    };
    let n = trials.len() as f64;
    let mean = |f: &dyn Fn(&EvalReport) -> f64| trials.iter().map(f).sum::<f64>() / n;

    let measured: Vec<f64> = trials.iter().filter_map(|t| t.psnr).collect();
    let finite: Vec<f64> = measured.iter().copied().filter(|v| v.is_finite()).collect();
    let mean_psnr = if measured.is_empty() {
        None
    } else if finite.is_empty() {
        Some(f64::INFINITY)
    } else {
        Some(finite.iter().sum::<f64>() / finite.len() as f64)
    };

    // keys on which every trial agrees
    let config = first
        .config
        .iter()
        .filter(|(k, v)| trials.iter().all(|t| t.config.get(*k) == Some(*v)))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();

    Ok(Summary {
        trials: trials.len(),
        mean_ba: mean(&|t| t.ba),
        mean_wa: mean(&|t| f64::from(t.wa())),
        mean_coverage: mean(&|t| t.chunk_coverage_rate),
        mean_psnr,
        infinite_psnr: measured.len() - finite.len(),
        config,
    })
}

/// Groups by the config echo minus `ignore` (e.g. the trial number).
pub fn aggregate_by_config(trials: &[EvalReport], ignore: &[&str]) -> Result<Vec<Summary>> {
    let mut groups: BTreeMap<Vec<(String, String)>, Vec<EvalReport>> = BTreeMap::new();
    for t in trials {
        let key = t
            .config
            .iter()
            .filter(|(k, _)| !ignore.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        groups.entry(key).or_default().push(t.clone());
    }
    groups.values().map(|g| aggregate(g)).collect()
}
