//! Leak and noise simulation: random subsets of a dataset and i.i.d. bit
//! flips on extracted payloads.
//!
//! Every draw comes from a ChaCha8 stream seeded from a `u64`, so a seed and a
//! config reproduce a run exactly. Per-sample streams use `seed ^ index`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Recorded in experiment output next to every seed.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.9";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Folds `parts` into `base` with the SplitMix64 finalizer.
pub fn mix_seed(base: u64, parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    parts
        .iter()
        .fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}

pub fn random_message(len: usize, seed: u64) -> BitString {
    let mut r = rng(seed);
    (0..len).map(|_| r.random_bool(0.5)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetAttack {
    ratio: f64,
    seed: u64,
}

impl SubsetAttack {
    pub fn new(ratio: f64, seed: u64) -> Result<Self> {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(Error::invalid(format!("subset ratio {ratio} not in (0, 1]")));
        }
        Ok(Self { ratio, seed })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `round(s * n)`, halves rounded up.
    pub fn subset_size(&self, n: usize) -> usize {
        ((self.ratio * n as f64 + 0.5).floor() as usize).min(n)
    }

    /// Sorted indices of the leaked samples.
    pub fn indices(&self, n: usize) -> Result<Vec<usize>> {
        if n == 0 {
            return Err(Error::invalid("cannot take a subset of an empty dataset"));
        }
        let m = self.subset_size(n);
        let mut picked = index::sample(&mut rng(self.seed), n, m).into_vec();
        picked.sort_unstable();
        Ok(picked)
    }
}

/// Leaked samples, in their original order.
pub fn apply_subset<T: Clone>(samples: &[T], attack: &SubsetAttack) -> Result<Vec<T>> {
    Ok(attack
        .indices(samples.len())?
        .into_iter()
        .map(|i| samples[i].clone())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitFlipChannel {
    p: f64,
    seed: u64,
}

impl BitFlipChannel {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("flip probability {p} not in [0, 1]")));
        }
        Ok(Self { p, seed })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Independent stream for one sample.
    pub fn for_sample(&self, index: u64) -> Self {
        Self {
            p: self.p,
            seed: self.seed ^ index,
        }
    }
}

pub fn apply_bitflips(bits: &BitString, ch: &BitFlipChannel) -> BitString {
    let mut r = rng(ch.seed);
    bits.iter().map(|b| b ^ r.random_bool(ch.p)).collect()
}

/// `min(0.5, p0 * l / l_ref)`: flips grow linearly with payload length.
pub fn length_scaled_flip_prob(len: usize, p0: f64, l_ref: usize) -> Result<f64> {
    if !(0.0..=0.5).contains(&p0) {
        return Err(Error::invalid(format!("base probability {p0} not in [0, 0.5]")));
    }
    if len == 0 || l_ref == 0 {
        return Err(Error::invalid("lengths must be at least 1"));
    }
    Ok((p0 * len as f64 / l_ref as f64).min(0.5))
}

fn ln_choose(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// Exact probability that a per-bit majority over `copies` independent
/// copies, each flipped with probability `p`, is wrong. Ties decode to 0, so
/// a tie is an error for a 1-bit only; the result averages both bit values.
pub fn vote_error_rate(copies: usize, p: f64) -> f64 {
    if copies == 0 {
        return 0.5;
    }
    let pmf = |k: usize| -> f64 {
        if p <= 0.0 {
            return f64::from(u8::from(k == 0));
        }
        if p >= 1.0 {
            return f64::from(u8::from(k == copies));
        }
        (ln_choose(copies, k) + k as f64 * p.ln() + (copies - k) as f64 * (1.0 - p).ln()).exp()
    };
    let mut above = 0.0;
    let mut tie = 0.0;
    for k in 0..=copies {
        match (2 * k).cmp(&copies) {
            std::cmp::Ordering::Greater => above += pmf(k),
            std::cmp::Ordering::Equal => tie = pmf(k),
            std::cmp::Ordering::Less => {}
        }
    }
    above + 0.5 * tie
}

/// Base probability `p0` for which an `n`-copy majority over full-length
/// (`l_ref`-bit) messages reaches an expected bit accuracy of `target_ba`.
pub fn calibrate_base_prob(copies: usize, target_ba: f64) -> Result<f64> {
    let floor = 1.0 - vote_error_rate(copies, 0.5);
    if !(floor..1.0).contains(&target_ba) {
        return Err(Error::invalid(format!(
            "target accuracy {target_ba} outside [{floor}, 1)"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - vote_error_rate(copies, mid) > target_ba {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
