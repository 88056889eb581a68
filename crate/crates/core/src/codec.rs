//! Multi-segment message codec.
//!
//! The message is zero-padded at the tail to a multiple of `N`, split into
//! `N` equal chunks, and every `(N-K)`-subset of chunks becomes one
//! combination. A combination prefixed with its `b`-bit index forms a
//! sub-message, and sample `j` (1-based) carries combination
//! `S'[C - (j mod C)]`. Any set of samples that together carry every chunk is
//! enough to rebuild the message; repeated chunk copies are merged with a
//! per-bit majority vote.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

pub const COMBINATION_ORDER: &str = "lexicographic";
pub const ASSIGNMENT_RULE: &str = "round_robin_alg1_step7";

/// Largest combination table we are willing to materialize.
const MAX_TABLE_ENTRIES: u128 = 1 << 24;

/// Exact binomial coefficient, `None` on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// `ceil(log2(c))` for `c >= 1`.
pub fn ordering_width(combinations: u128) -> usize {
    debug_assert!(combinations >= 1);
    (128 - (combinations - 1).leading_zeros()) as usize
}

/// Number of zero bits appended so that `len + p` is divisible by `chunks`.
pub fn padding_bits(len: usize, chunks: usize) -> usize {
    (chunks - len % chunks) % chunks
}

/// Closed-form sub-message length for a message of `len` bits.
pub fn submessage_length(len: usize, chunks: usize, excluded: usize) -> Result<usize> {
    check_chunking(len, chunks, excluded)?;
    if chunks == 1 {
        return Ok(len);
    }
    let c = binomial(chunks as u64, (chunks - excluded) as u64)
        .ok_or_else(|| Error::invalid("combination count overflows"))?;
    let padded = len + padding_bits(len, chunks);
    Ok(ordering_width(c) + (chunks - excluded) * padded / chunks)
}

fn check_chunking(len: usize, chunks: usize, excluded: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::invalid("message length must be at least 1 bit"));
    }
    if chunks == 0 {
        return Err(Error::invalid("chunk count must be at least 1"));
    }
    if excluded >= chunks {
        return Err(Error::invalid(format!(
            "excluded chunk count K={excluded} must be below N={chunks}"
        )));
    }
    Ok(())
}

/// Appends `p` zero bits at the tail. Returns the padded message and `p`.
pub fn pad_message(message: &BitString, chunks: usize) -> Result<(BitString, usize)> {
    if message.is_empty() {
        return Err(Error::invalid("cannot pad an empty message"));
    }
    if chunks == 0 {
        return Err(Error::invalid("chunk count must be at least 1"));
    }
    let p = padding_bits(message.len(), chunks);
    let mut padded = message.clone();
    padded.extend_from(&BitString::zeros(p));
    Ok((padded, p))
}

/// Splits into `chunks` contiguous equal-length slices.
pub fn split_chunks(padded: &BitString, chunks: usize) -> Result<Vec<BitString>> {
    if chunks == 0 || !padded.len().is_multiple_of(chunks) {
        return Err(Error::invalid(format!(
            "length {} is not divisible into {chunks} chunks",
            padded.len()
        )));
    }
    let width = padded.len() / chunks;
    Ok((0..chunks)
        .map(|i| padded.slice(i * width, (i + 1) * width))
        .collect())
}

/// All `(N-K)`-subsets of `{0..N}` in lexicographic order.
///
/// Entry `i` is the combination with ordering index `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinationTable {
    chunks: usize,
    entries: Vec<Vec<usize>>,
}

impl CombinationTable {
    pub fn new(chunks: usize, excluded: usize) -> Result<Self> {
        if chunks == 0 || excluded >= chunks {
            return Err(Error::invalid(format!(
                "need 0 <= K < N, got N={chunks}, K={excluded}"
            )));
        }
        let keep = chunks - excluded;
        let count = binomial(chunks as u64, keep as u64).unwrap_or(u128::MAX);
        if count > MAX_TABLE_ENTRIES {
            return Err(Error::invalid(format!(
                "binom({chunks}, {keep}) = {count} combinations is too many to tabulate"
            )));
        }

        let mut entries = Vec::with_capacity(count as usize);
        let mut current: Vec<usize> = (0..keep).collect();
        loop {
            entries.push(current.clone());
            // rightmost position that can still advance
            let Some(i) = (0..keep).rev().find(|&i| current[i] < chunks - keep + i) else {
                break;
            };
            current[i] += 1;
            for t in i + 1..keep {
                current[t] = current[t - 1] + 1;
            }
        }
        debug_assert_eq!(entries.len() as u128, count);
        Ok(Self { chunks, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn chunks(&self) -> usize {
        self.chunks
    }

    pub fn get(&self, index: usize) -> Option<&[usize]> {
        self.entries.get(index).map(Vec::as_slice)
    }

    pub fn entries(&self) -> &[Vec<usize>] {
        &self.entries
    }

    /// Inverse of [`get`](Self::get) for a sorted subset.
    pub fn index_of(&self, subset: &[usize]) -> Option<usize> {
        self.entries
            .binary_search_by(|e| e.as_slice().cmp(subset))
            .ok()
    }
}

pub fn enumerate_combinations(chunks: usize, excluded: usize) -> Result<CombinationTable> {
    CombinationTable::new(chunks, excluded)
}

/// Full codec configuration, persisted alongside a watermarked dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodingParams {
    pub message_len: usize,
    pub chunks: usize,
    pub excluded: usize,
    pub padding: usize,
    pub samples: usize,
    pub combinations: usize,
    pub ordering_bits: usize,
    pub combination_order: String,
    pub assignment: String,
}

impl EncodingParams {
    pub fn new(message_len: usize, chunks: usize, excluded: usize, samples: usize) -> Result<Self> {
        check_chunking(message_len, chunks, excluded)?;
        if samples == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        let c = binomial(chunks as u64, (chunks - excluded) as u64).unwrap_or(u128::MAX);
        if chunks > 1 && c > samples as u128 {
            return Err(Error::invalid(format!(
                "binom({chunks}, {}) = {c} combinations exceed {samples} samples",
                chunks - excluded
            )));
        }
        Ok(Self {
            message_len,
            chunks,
            excluded,
            padding: padding_bits(message_len, chunks),
            samples,
            combinations: c as usize,
            ordering_bits: if chunks == 1 { 0 } else { ordering_width(c) },
            combination_order: COMBINATION_ORDER.to_string(),
            assignment: ASSIGNMENT_RULE.to_string(),
        })
    }

    /// Embed the whole message in every sample.
    pub fn pass_through(message_len: usize, samples: usize) -> Result<Self> {
        Self::new(message_len, 1, 0, samples)
    }

    /// Re-derives every field from `(L, N, K, n)` and compares.
    pub fn validate(&self) -> Result<()> {
        let expected = Self::new(self.message_len, self.chunks, self.excluded, self.samples)?;
        if &expected != self {
            return Err(Error::invalid(format!(
                "inconsistent encoding parameters: expected {expected:?}, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn is_pass_through(&self) -> bool {
        self.chunks == 1
    }

    pub fn chunk_len(&self) -> usize {
        (self.message_len + self.padding) / self.chunks
    }

    pub fn payload_len(&self) -> usize {
        (self.chunks - self.excluded) * self.chunk_len()
    }

    pub fn submessage_len(&self) -> usize {
        self.ordering_bits + self.payload_len()
    }

    /// 0-based combination index carried by 1-based sample `j`.
    pub fn combination_for_sample(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.samples {
            return Err(Error::invalid(format!(
                "sample index {j} outside 1..={}",
                self.samples
            )));
        }
        let c = self.combinations;
        Ok(c - (j % c) - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubMessage {
    pub ordering_index: usize,
    pub payload: BitString,
    pub raw: BitString,
}

/// Holds the chunks and combination table; sub-messages are produced on
/// demand per sample.
#[derive(Debug, Clone)]
pub struct Encoder {
    params: EncodingParams,
    chunks: Vec<BitString>,
    table: CombinationTable,
}

impl Encoder {
    pub fn new(message: &BitString, params: &EncodingParams) -> Result<Self> {
        if message.len() != params.message_len {
            return Err(Error::invalid(format!(
                "message has {} bits, parameters expect {}",
                message.len(),
                params.message_len
            )));
        }
        params.validate()?;
        let (padded, _) = pad_message(message, params.chunks)?;
        let chunks = split_chunks(&padded, params.chunks)?;
        let table = CombinationTable::new(params.chunks, params.excluded)?;
        Ok(Self {
            params: params.clone(),
            chunks,
            table,
        })
    }

    pub fn params(&self) -> &EncodingParams {
        &self.params
    }

    pub fn chunks(&self) -> &[BitString] {
        &self.chunks
    }

    pub fn table(&self) -> &CombinationTable {
        &self.table
    }

    /// Ordering bits followed by the chunks of combination `index`.
    pub fn combination_message(&self, index: usize) -> Result<SubMessage> {
        let subset = self.table.get(index).ok_or_else(|| {
            Error::invalid(format!(
                "combination index {index} outside 0..{}",
                self.table.len()
            ))
        })?;
        let mut payload = BitString::new();
        for &c in subset {
            payload.extend_from(&self.chunks[c]);
        }
        let raw = BitString::from_uint(index as u128, self.params.ordering_bits).concat(&payload);
        Ok(SubMessage {
            ordering_index: index,
            payload,
            raw,
        })
    }

    /// Sub-message for 1-based sample `j`.
    pub fn submessage(&self, j: usize) -> Result<SubMessage> {
        self.combination_message(self.params.combination_for_sample(j)?)
    }

    /// Sub-messages for samples `1..=n`, in order.
    pub fn iter(&self) -> impl Iterator<Item = SubMessage> + '_ {
        (1..=self.params.samples).map(move |j| self.submessage(j).expect("j is in range"))
    }
}

pub fn encode(message: &BitString, params: &EncodingParams) -> Result<Encoder> {
    Encoder::new(message, params)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Reconstructed message, exactly `L` bits; uncovered chunks are zero.
    pub message: BitString,
    pub chunk_coverage: Vec<bool>,
    /// Number of copies of each chunk that took part in the vote.
    pub vote_counts: Vec<usize>,
    pub complete: bool,
    /// Items dropped because their length was not `l`.
    pub rejected_length: usize,
    /// Items dropped because their ordering index was `>= C`.
    pub rejected_index: usize,
}

impl DecodeResult {
    pub fn coverage_rate(&self) -> f64 {
        let covered = self.chunk_coverage.iter().filter(|&&c| c).count();
        covered as f64 / self.chunk_coverage.len() as f64
    }
}

/// Accumulates chunk votes from extracted sub-messages.
#[derive(Debug, Clone)]
pub struct Decoder {
    params: EncodingParams,
    table: CombinationTable,
    ones: Vec<Vec<u32>>,
    copies: Vec<usize>,
    accepted: usize,
    rejected_length: usize,
    rejected_index: usize,
}

impl Decoder {
    pub fn new(params: &EncodingParams) -> Result<Self> {
        params.validate()?;
        let width = params.chunk_len();
        Ok(Self {
            params: params.clone(),
            table: CombinationTable::new(params.chunks, params.excluded)?,
            ones: vec![vec![0; width]; params.chunks],
            copies: vec![0; params.chunks],
            accepted: 0,
            rejected_length: 0,
            rejected_index: 0,
        })
    }

    /// Adds one extracted sub-message. Returns whether it was accepted.
    pub fn push(&mut self, item: &BitString) -> bool {
        let p = &self.params;
        if item.len() != p.submessage_len() {
            self.rejected_length += 1;
            return false;
        }
        let b = p.ordering_bits;
        let index = item.slice(0, b).to_uint().map_or(usize::MAX, |v| v as usize);
        let Some(subset) = self.table.get(index) else {
            self.rejected_index += 1;
            return false;
        };
        let width = p.chunk_len();
        for (pos, &chunk) in subset.iter().enumerate() {
            let start = b + pos * width;
            for (k, counter) in self.ones[chunk].iter_mut().enumerate() {
                *counter += u32::from(item[start + k]);
            }
            self.copies[chunk] += 1;
        }
        self.accepted += 1;
        true
    }

    pub fn finish(self) -> Result<DecodeResult> {
        let total = self.accepted + self.rejected_length + self.rejected_index;
        if total == 0 {
            return Err(Error::EmptyInput);
        }
        if self.accepted == 0 {
            return Err(Error::NoValidSubMessages(total));
        }
        let mut message = BitString::new();
        for (ones, &copies) in self.ones.iter().zip(&self.copies) {
            // ties and uncovered chunks resolve to 0
            message.extend_from(&ones.iter().map(|&o| 2 * o as usize > copies).collect());
        }
        message.truncate(self.params.message_len);
        let chunk_coverage: Vec<bool> = self.copies.iter().map(|&c| c > 0).collect();
        Ok(DecodeResult {
            message,
            complete: chunk_coverage.iter().all(|&c| c),
            chunk_coverage,
            vote_counts: self.copies,
            rejected_length: self.rejected_length,
            rejected_index: self.rejected_index,
        })
    }
}

pub fn decode(extracted: &[BitString], params: &EncodingParams) -> Result<DecodeResult> {
    if extracted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut decoder = Decoder::new(params)?;
    for item in extracted {
        decoder.push(item);
    }
    decoder.finish()
}
