//! Brute-force reference implementations.
//!
//! Everything here works on plain slices with direct scans and sorts. None
//! of it calls into the packed text, the trees or the search code, so a bug
//! in the index cannot hide behind a shared helper.

use std::cmp::Ordering;

use crate::interval::RankInterval;
use crate::text::Code;

/// Every 1-based position where `pattern` occurs in `raw`, ascending.
pub fn naive_find_all(raw: &[u8], pattern: &[u8]) -> Vec<usize> {
    if pattern.is_empty() || pattern.len() > raw.len() {
        return Vec::new();
    }
    (0..=raw.len() - pattern.len())
        .filter(|&i| raw[i..i + pattern.len()] == *pattern)
        .map(|i| i + 1)
        .collect()
}

/// Codes of `raw` under an alphabet made of its distinct bytes: symbols map
/// to `1..=σ` in byte order, followed by fillers `σ+1` and one sentinel `0`
/// so that the length is the least multiple of `r` above `raw.len()`.
pub fn naive_padded_codes(raw: &[u8], r: usize) -> Vec<Code> {
    let mut symbols: Vec<u8> = raw.to_vec();
    symbols.sort_unstable();
    symbols.dedup();
    let filler = symbols.len() as Code + 1;
    let mut codes: Vec<Code> = raw
        .iter()
        .map(|b| symbols.iter().position(|s| s == b).unwrap() as Code + 1)
        .collect();
    let n = (raw.len() + 1).div_ceil(r) * r;
    codes.resize(n - 1, filler);
    codes.push(0);
    codes
}

/// Codes of `pattern` under the alphabet of `raw`, or `None` if a byte is missing.
pub fn naive_pattern_codes(raw: &[u8], pattern: &[u8]) -> Option<Vec<Code>> {
    let mut symbols: Vec<u8> = raw.to_vec();
    symbols.sort_unstable();
    symbols.dedup();
    pattern
        .iter()
        .map(|b| symbols.binary_search(b).ok().map(|i| i as Code + 1))
        .collect()
}

/// Ordinals of the block-boundary suffixes in lexicographic order.
pub fn naive_sampled_sa(codes: &[Code], r: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..codes.len() / r).collect();
    order.sort_by(|&a, &b| codes[r * a..].cmp(&codes[r * b..]));
    order
}

/// Ranks (1-based, over the sorted boundary suffixes) of the suffixes that start with `s`.
pub fn naive_rank_interval(codes: &[Code], r: usize, s: &[Code]) -> RankInterval {
    let ranks: Vec<usize> = naive_sampled_sa(codes, r)
        .into_iter()
        .enumerate()
        .filter(|&(_, j)| codes[r * j..].starts_with(s))
        .map(|(i, _)| i + 1)
        .collect();
    match (ranks.first(), ranks.last()) {
        (Some(&lo), Some(&hi)) => RankInterval::new(lo, hi),
        _ => RankInterval::EMPTY,
    }
}

/// Answers "is this string a prefix of some boundary suffix" by binary search
/// over the naively sorted suffixes.
pub struct PrefixOracle<'a> {
    codes: &'a [Code],
    r: usize,
    order: Vec<usize>,
}

impl<'a> PrefixOracle<'a> {
    pub fn new(codes: &'a [Code], r: usize) -> Self {
        PrefixOracle { codes, r, order: naive_sampled_sa(codes, r) }
    }

    /// Compares a suffix against `s`, treating every extension of `s` as equal.
    fn cmp_prefix(&self, j: usize, s: &[Code]) -> Ordering {
        let suffix = &self.codes[self.r * j..];
        let k = suffix.len().min(s.len());
        suffix[..k].cmp(&s[..k]).then(if k < s.len() { Ordering::Less } else { Ordering::Equal })
    }

    pub fn is_represented(&self, s: &[Code]) -> bool {
        !self.rank_interval(s).is_empty()
    }

    /// Same answer as [`naive_rank_interval`], by binary search.
    pub fn rank_interval(&self, s: &[Code]) -> RankInterval {
        let lo = self.order.partition_point(|&j| self.cmp_prefix(j, s) == Ordering::Less);
        let hi = self.order.partition_point(|&j| self.cmp_prefix(j, s) != Ordering::Greater);
        if lo < hi {
            RankInterval::new(lo + 1, hi)
        } else {
            RankInterval::EMPTY
        }
    }

    /// Longest proper suffix of `alpha` that is a prefix of a boundary
    /// suffix, with the number of letters dropped.
    pub fn suffix_link(&self, alpha: &[Code]) -> (Vec<Code>, usize) {
        (1..=alpha.len())
            .find(|&t| self.is_represented(&alpha[t..]))
            .map(|t| (alpha[t..].to_vec(), t))
            .unwrap_or((Vec::new(), alpha.len()))
    }
}

/// Longest proper suffix of `alpha` represented in the sparse tree, and its type.
pub fn naive_suffix_link(codes: &[Code], r: usize, alpha: &[Code]) -> (Vec<Code>, usize) {
    let blocks = codes.len() / r;
    (1..=alpha.len())
        .find(|&t| (0..blocks).any(|j| codes[r * j..].starts_with(&alpha[t..])))
        .map(|t| (alpha[t..].to_vec(), t))
        .unwrap_or((Vec::new(), alpha.len()))
}

/// The reversed block ending at boundary `j`; `j = 0` is a block of fillers.
pub fn naive_reversed_block(codes: &[Code], r: usize, j: usize, filler: Code) -> Vec<Code> {
    if j == 0 {
        vec![filler; r]
    } else {
        codes[r * (j - 1)..r * j].iter().rev().copied().collect()
    }
}

/// Ordinals whose reversed block starts with `label`, in the order of `sa`.
pub fn naive_ord(codes: &[Code], r: usize, sa: &[usize], label: &[Code], filler: Code) -> Vec<usize> {
    sa.iter()
        .copied()
        .filter(|&j| naive_reversed_block(codes, r, j, filler).starts_with(label))
        .collect()
}
