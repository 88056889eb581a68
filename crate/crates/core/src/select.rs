//! Choosing `(N, K)` for a leak threshold.
//!
//! A sub-message carries `N-K` of the `N` chunks, so a fixed chunk is missing
//! from exactly `binom(N-1, N-K)` of the `binom(N, N-K)` combinations, i.e. a
//! fraction `K/N` of a round-robin dataset. Any leaked subset larger than that
//! fraction holds every chunk. The search below scans `N` in `2..=100` and
//! keeps the shortest admissible sub-message.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codec::{binomial, submessage_length};
use crate::error::{Error, Result};

pub const MAX_CHUNKS: usize = 100;

/// Non-negative exact rational, always stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("ratio denominator is zero"));
        }
        let g = gcd(num, den).max(1);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn percent(p: u64) -> Self {
        Self::new(p, 100).expect("nonzero denominator")
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.num) * u128::from(other.den))
            .cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `"60%"`, `"12.5%"`, `"3/5"` or `"0.6"`; decimals are read exactly.
impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(pct) = s.strip_suffix('%') {
            let r = parse_decimal(pct.trim())?;
            return Ratio::new(r.num, r.den.checked_mul(100).ok_or_else(overflow)?);
        }
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad_ratio(s))?;
            let d = d.trim().parse().map_err(|_| bad_ratio(s))?;
            return Ratio::new(n, d);
        }
        parse_decimal(s)
    }
}

fn bad_ratio(s: &str) -> Error {
    Error::invalid(format!("cannot parse '{s}' as a ratio"))
}

fn overflow() -> Error {
    Error::invalid("ratio has too many digits")
}

fn parse_decimal(s: &str) -> Result<Ratio> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad_ratio(s));
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad_ratio(s));
    }
    let den = 10u64
        .checked_pow(frac.len() as u32)
        .ok_or_else(overflow)?;
    let digits = format!("{int}{frac}");
    let num = if digits.is_empty() {
        0
    } else {
        digits.parse::<u64>().map_err(|_| overflow())?
    };
    Ratio::new(num, den)
}

/// Owner's protection requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtectionSpec {
    pub tau_hat: Ratio,
    pub message_len: usize,
    pub samples: usize,
}

impl ProtectionSpec {
    pub fn new(tau_hat: Ratio, message_len: usize, samples: usize) -> Result<Self> {
        if tau_hat.numer() == 0 || tau_hat > Ratio::new(1, 1)? {
            return Err(Error::invalid(format!(
                "threshold {tau_hat} must lie in (0, 1]"
            )));
        }
        if message_len == 0 || samples == 0 {
            return Err(Error::invalid("message length and sample count must be positive"));
        }
        Ok(Self {
            tau_hat,
            message_len,
            samples,
        })
    }
}

/// Fraction of a round-robin dataset that misses any one chunk: `K/N`.
pub fn coverage_ratio(chunks: usize, excluded: usize) -> Ratio {
    Ratio::new(excluded as u64, chunks as u64).expect("chunks >= 1")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub chunks: usize,
    pub excluded: usize,
    pub length: usize,
    pub tau: Ratio,
}

impl Selection {
    /// True when no `(N, K)` qualified and the whole message goes in every sample.
    pub fn is_pass_through(&self) -> bool {
        self.chunks == 1
    }
}

pub fn select_params(spec: &ProtectionSpec) -> Selection {
    let len = spec.message_len;
    let mut best = Selection {
        chunks: 1,
        excluded: 0,
        length: len,
        tau: Ratio::new(0, 1).unwrap(),
    };
    let (t_num, t_den) = (u128::from(spec.tau_hat.numer()), u128::from(spec.tau_hat.denom()));
    for n in 2..=MAX_CHUNKS {
        for k in 1..n {
            // K/N > tau_hat
            if k as u128 * t_den > t_num * n as u128 {
                continue;
            }
            let c = binomial(n as u64, (n - k) as u64).unwrap_or(u128::MAX);
            if c > spec.samples as u128 {
                continue;
            }
            let l = submessage_length(len, n, k).expect("valid chunking");
            if l > best.length {
                continue;
            }
            best = Selection {
                chunks: n,
                excluded: k,
                length: l,
                tau: coverage_ratio(n, k),
            };
        }
    }
    best
}
